"""Double limits at the central holonomy u = -1 for SU(2), genus 2, insertions x^k.

With chi_m(-1) = (-1)^(m-1) m the inner limit is the Abel sum of
(-1)^(m-1) m^(k-2), i.e. the Dirichlet eta value eta(2 - k).
"""

import argparse
import time

import sympy

from localize.liegroups import TorusElement, build_root_system
from localize.moduli import Insertion, ModuliQuery, intersection_number


def _real(v):
    return v["re"] if isinstance(v, dict) else float(v)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-degree", type=int, default=5)
    args = ap.parse_args()
    A1 = build_root_system("A1")
    u = TorusElement.from_alcove(A1, [1.0])
    print(f"{'p':>5} {'inner limit':>18} {'eta(2-k)':>18} {'reverse order':>18} {'time':>7}")
    for k in range(args.max_degree + 1):
        start = time.perf_counter()
        res = intersection_number(ModuliQuery(A1, 2, [u], insertion=Insertion.parse(f"x^{k}", 1)))
        inner = _real(res.diagnostics["inner_limit"])
        rev = _real(res.diagnostics["reverse_order_value"])
        ref = float(sympy.dirichlet_eta(2 - k))
        print(f"x^{k:<3} {inner:18.12f} {ref:18.12f} {rev:18.12f} {time.perf_counter() - start:6.2f}s")


if __name__ == "__main__":
    main()

"""Print K_d and n_d for the quintic, with the in-repo oracle checks for d = 1, 2."""

import argparse
import time

from localize.mirror import quintic_pipeline, quintic_target, toric_identity_check
from localize.oracles import graph_sum_invariant, schubert_lines_on_hypersurface


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=8)
    args = ap.parse_args()
    start = time.perf_counter()
    gw = quintic_pipeline(args.order)
    X, V = quintic_target()
    check = toric_identity_check(X, V, min(args.order, 5))
    print(f"{'d':>3}  {'n_d':>30}  K_d")
    for d in sorted(gw.n):
        print(f"{d:>3}  {str(gw.n[d]):>30}  {gw.K[d]}")
    print(f"Schubert n1 = {schubert_lines_on_hypersurface(5, 4)}, graph-sum K2 = {graph_sum_invariant(4, [5], 2)}")
    print(f"identity check convention: {check.convention}, passed: {check.passed}")
    print(f"mirror map coefficients: {[str(gw.mirror_map[k]) for k in range(min(args.order, 5))]}")
    print(f"{time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main()

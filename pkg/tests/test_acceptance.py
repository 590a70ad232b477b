"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import json
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from localize.cli import EXIT_OK, main
from localize.genera import (
    ManifoldData,
    a_hat_series,
    genus_value,
    l_series,
    solve_cancellation_dim12,
    witten_genus_qexp,
)
from localize.liegroups import (
    TorusElement,
    build_root_system,
    group_constants,
    su2_class_integral,
    su2_heat_kernel,
    su2_torus_integral,
)
from localize.mirror import quintic_target, toric_identity_check
from localize.moduli import Insertion, ModuliQuery, holonomy_integral_mc, intersection_number, piecewise_poly_fit
from localize.oracles import graph_sum_invariant, schubert_lines_on_hypersurface

A1 = build_root_system("A1")


@pytest.fixture
def report(capsys):
    def emit(label: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return emit


def cli(tmp_path, *args):
    out = tmp_path / "out"
    start = time.perf_counter()
    code = main([*args, "--out", str(out)])
    elapsed = time.perf_counter() - start
    return code, json.loads((out / "result.json").read_text()), elapsed


def test_quintic_instantons(tmp_path, report):
    code, res, elapsed = cli(tmp_path, "mirror-quintic", "--order", "3")
    n1, n2 = Fraction(res["n_d"]["1"]), Fraction(res["n_d"]["2"])
    k2 = Fraction(res["K_d"]["2"])
    schubert = schubert_lines_on_hypersurface(5, 4)
    graph = graph_sum_invariant(4, [5], 2)
    ok = (code == EXIT_OK and n1 == 2875 == schubert and n2 == 609250 and k2 == graph
          and k2 == n2 + n1 / 8 and elapsed < 60)
    assert report("1 quintic n1, n2", ok,
                  f"n1={n1} (Schubert {schubert}), n2={n2} (graph-sum K2={graph}), {elapsed:.2f}s")


def test_local_conifold(tmp_path, report):
    code, res, elapsed = cli(tmp_path, "mirror-local")
    kd3 = {int(d): Fraction(v) for d, v in res["K_d_times_d3"].items()}
    oracles = {d: graph_sum_invariant(1, [-1, -1], d) for d in (1, 2)}
    ok = (code == EXIT_OK and all(kd3.get(d) == 1 for d in range(1, 7))
          and all(oracles[d] * d**3 == 1 == kd3[d] for d in (1, 2)) and elapsed < 10)
    assert report("2 conifold K_d d^3 = 1", ok,
                  f"d<=6: {[str(kd3.get(d)) for d in range(1, 7)]}, oracle K1={oracles[1]}, K2={oracles[2]}, "
                  f"{elapsed:.2f}s")


def test_toric_identity_quintic(report):
    X, V = quintic_target()
    chk = toric_identity_check(X, V, 3)
    ok = chk.passed and chk.residuals[chk.convention].is_zero()
    assert report("3 toric identity residual", ok, f"convention={chk.convention}, residual={chk.residuals['minus']}")


def test_cancellation(report):
    res = solve_cancellation_dim12()
    rng = random.Random(12)
    triples = [[rng.randint(-10**6, 10**6) for _ in range(3)] for _ in range(100)]
    hits = sum(res.check(p) for p in triples)
    ok = res.rank == 2 and res.residual.is_zero() and hits == 100
    assert report("4 cancellation pair", ok, f"(a, b)=({res.a}, {res.b}), rank {res.rank}, {hits}/100 triples")


def test_genus_values(report):
    ahat = genus_value(ManifoldData.from_sequence(4, [-48]), a_hat_series())
    lval = genus_value(ManifoldData.from_sequence(4, [3], spin=False), l_series())
    rng = random.Random(5)
    matches = 0
    for i in range(20):
        dim = 4 if i % 2 == 0 else 8
        k = dim // 4
        vals = [rng.randint(-500, 500) * (48 if k == 1 else 1) for _ in range(1 if k == 1 else 2)]
        M = ManifoldData.from_sequence(dim, vals)
        matches += witten_genus_qexp(M, 2)[0] == genus_value(M, a_hat_series())
    ok = ahat == 2 and lval == 1 and matches == 20
    assert report("5 genus values", ok, f"A-hat={ahat}, L={lval}, Witten q^0 = A-hat on {matches}/20")


def _u(n, x):
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for _ in range(n):
        prev, cur = cur, 2 * x * cur - prev
    return cur


def test_heat_kernel_a1(report):
    total = su2_class_integral(lambda th: su2_heat_kernel(0.5, np.cos(th))[0], nodes=512)
    phi = 0.9
    semi = su2_torus_integral(
        lambda U, X: su2_heat_kernel(0.5, U * np.cos(X))[0] * su2_heat_kernel(0.5, U * np.cos(X - phi))[0])
    semi_err = abs(semi - su2_heat_kernel(1.0, np.array([math.cos(phi)]))[0][0])
    vol = group_constants(A1).volume
    orth = max(abs(su2_class_integral(lambda th: _u(m, np.cos(th)) * _u(n, np.cos(th)), 128) / vol - (m == n))
               for m in range(8) for n in range(8))
    ok = abs(total - 1) < 1e-8 and semi_err < 1e-8 and orth < 1e-8
    assert report("6 A1 heat kernel", ok,
                  f"|int H - 1|={abs(total - 1):.1e}, semigroup err={semi_err:.1e}, orthogonality err={orth:.1e}")


@pytest.mark.parametrize("poly,expected", [("1", math.pi**2 / 12), ("x^4", 0.0)])
def test_central_double_limit(poly, expected, report):
    u = TorusElement.from_alcove(A1, [1.0])
    start = time.perf_counter()
    res = intersection_number(ModuliQuery(A1, 2, [u], insertion=Insertion.parse(poly, 1)))
    elapsed = time.perf_counter() - start
    inner = complex(res.diagnostics["inner_limit"])
    err = abs(inner - expected)
    ok = err < 1e-6 and elapsed < 60
    assert report(f"7 A1 g=2 double limit p={poly}", ok, f"{inner.real:.12f} vs {expected:.12f}, err={err:.1e}, "
                                                         f"{elapsed:.2f}s")


def test_volume_piecewise_polynomial(report):
    pieces = piecewise_poly_fit(A1, 2, n_points=200, degree_bound=4)
    ok = all(p.degree <= 4 and p.residual < 1e-6 for p in pieces)
    desc = ", ".join(f"[{p.interval[0]:.3f},{p.interval[1]:.3f}] deg {p.degree} res {p.residual:.1e}" for p in pieces)
    assert report("8 A1 g=2 volume piecewise polynomial", ok, desc)


def test_monte_carlo(report):
    c = TorusElement.from_alcove(A1, [0.3])
    z = {}
    for t in (1.0, 0.5, 0.25):
        r = holonomy_integral_mc(A1, 2, c, t, samples=100_000, seed=20240601)
        z[t] = r.z_score
    ok = all(abs(v) <= 3 for v in z.values())
    assert report("9 Monte-Carlo holonomy integral", ok, ", ".join(f"t={t}: z={v:+.2f}" for t, v in z.items()))

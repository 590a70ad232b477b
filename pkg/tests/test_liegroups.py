import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localize.liegroups import (
    DominantWeight,
    LieError,
    TorusElement,
    build_root_system,
    casimir,
    characters,
    enumerate_weights,
    group_constants,
    heat_kernel,
    richardson,
    su2_class_integral,
    su2_heat_kernel,
    su2_torus_integral,
    weight_table,
    weyl_character,
    weyl_denominator,
    weyl_dimension,
)

A1, A2, B2 = (build_root_system(n) for n in ("A1", "A2", "B2"))


def cheb_u(n, x):
    """U_n(x) by recurrence; equals the SU(2) character of spin n/2 at cos(theta) = x."""
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for _ in range(n):
        prev, cur = cur, 2 * x * cur - prev
    return cur


# --- structure ------------------------------------------------------------------


@pytest.mark.parametrize("name,npos,order,dim,center", [
    ("A1", 1, 2, 3, 2), ("A2", 3, 6, 8, 3), ("B2", 4, 8, 10, 2), ("C2", 4, 8, 10, 2), ("A3", 6, 24, 15, 4),
    ("B3", 9, 48, 21, 2), ("D4", 12, 192, 28, 4),
])
def test_root_system_counts(name, npos, order, dim, center):
    rs = build_root_system(name)
    assert rs.n_positive == npos
    assert len(rs.weyl_group) == order
    assert rs.dim_G == dim and rs.center_order == center


@pytest.mark.parametrize("name", ["A1", "A2", "B2", "C2", "A3"])
def test_weyl_group_closure_and_signs(name):
    rs = build_root_system(name)
    W = rs.weyl_matrices
    keys = {tuple(np.round(w, 9).ravel()) for w in W}
    for a in W[:6]:
        for b in W:
            assert tuple(np.round(a @ b, 9).ravel()) in keys
    for w, s in zip(W, rs.weyl_signs):
        assert round(np.linalg.det(w)) == s


@pytest.mark.parametrize("name,scale", [("A1", Fraction(1, 4)), ("A2", Fraction(1, 6)),
                                        ("B2", Fraction(1, 6)), ("C2", Fraction(1, 12))])
def test_killing_scale(name, scale):
    assert build_root_system(name).killing_scale == scale


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=3, max_size=3), st.sampled_from(["A2", "B2", "C2"]))
def test_killing_normalization(v, name):
    # <mu, mu> = sum over all roots of <alpha, mu>^2 for mu in the root span
    rs = build_root_system(name)
    mu = [Fraction(0)] * rs.ambient_dim
    for c, a in zip(v, rs.simple_roots):
        mu = [m + c * x for m, x in zip(mu, a)]
    total = 2 * sum(rs.inner(a, mu) ** 2 for a in rs.positive_roots)
    assert rs.inner(mu, mu) == total


def test_unknown_type():
    with pytest.raises((LieError, ValueError)):
        build_root_system("Q", 3)


# --- Weyl dimension, Casimir, enumeration ------------------------------------------


@pytest.mark.parametrize("name,labels,dim", [
    ("A1", (3,), 4), ("A2", (1, 0), 3), ("A2", (1, 1), 8), ("A2", (2, 1), 15), ("A2", (3, 0), 10),
    ("B2", (1, 0), 5), ("B2", (0, 1), 4), ("B2", (0, 2), 10), ("C2", (1, 0), 4), ("A3", (1, 0, 1), 15),
])
def test_weyl_dimension(name, labels, dim):
    assert weyl_dimension(build_root_system(name), labels) == dim


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 40))
def test_a1_dimension_and_casimir(n):
    assert weyl_dimension(A1, (n,)) == n + 1
    assert casimir(A1, (n,)) == Fraction((n + 1) ** 2 - 1, 8)


def test_adjoint_casimir_is_one():
    # the Killing form is the trace form of the adjoint representation
    for rs, adj in [(A1, (2,)), (A2, (1, 1)), (B2, (0, 2)), (build_root_system("C2"), (2, 0))]:
        assert weyl_dimension(rs, adj) == rs.dim_G
        assert casimir(rs, adj) == 1


@settings(max_examples=30, deadline=None)
@given(st.tuples(st.integers(0, 6), st.integers(0, 6)), st.integers(0, 1), st.integers(0, 1))
def test_casimir_monotone(labels, i, bump):
    up = list(labels)
    up[i] += 1 + bump
    for rs in (A2, B2):
        assert casimir(rs, up) > casimir(rs, labels)


def test_non_dominant_rejected():
    with pytest.raises(LieError):
        DominantWeight.make(A2, (-1, 2))
    with pytest.raises(LieError):
        weyl_dimension(A2, (1,))


def test_enumerate_a1_count():
    for cut in (0, 1, 5.5, 30):
        ws = enumerate_weights(A1, cut)
        assert len(ws) == math.isqrt(int(8 * cut + 1))


def test_enumerate_a2_matches_box_scan():
    cut = Fraction(7)
    got = {w.labels for w in enumerate_weights(A2, cut)}
    scan = {(a, b) for a in range(20) for b in range(20) if casimir(A2, (a, b)) <= cut}
    assert got == scan


def test_weight_table_consistent():
    tab = weight_table(B2, 12.0)
    for lab, d, p in zip(tab.labels, tab.dim, tab.casimir):
        assert d == weyl_dimension(B2, lab)
        assert p == pytest.approx(float(casimir(B2, lab)), abs=1e-12)


# --- characters -------------------------------------------------------------------


@pytest.mark.parametrize("theta", [0.3, 1.1, 2.0, 2.9])
def test_a1_character_formula(theta):
    c = TorusElement.from_angle(A1, theta)
    for n in range(6):
        assert weyl_character(A1, (n,), c) == pytest.approx(math.sin((n + 1) * theta) / math.sin(theta))
    assert weyl_denominator(A1, c) == pytest.approx(2j * math.sin(theta))


def test_a1_central_points():
    one, minus = TorusElement.from_angle(A1, 0.0), TorusElement.from_angle(A1, math.pi)
    for n in range(7):
        assert weyl_character(A1, (n,), one) == pytest.approx(n + 1)
        assert weyl_character(A1, (n,), minus) == pytest.approx((-1) ** n * (n + 1))


def test_a2_fundamental_character_is_trace():
    C = (0.4, 1.3, -1.7)
    val = weyl_character(A2, (1, 0), TorusElement(C))
    assert val == pytest.approx(sum(np.exp(1j * np.array(C))))


def test_identity_character_is_dimension():
    e = TorusElement((0.0, 0.0))
    for labels in [(1, 0), (0, 1), (2, 1)]:
        assert weyl_character(B2, labels, e) == pytest.approx(weyl_dimension(B2, labels))


def test_singular_noncentral_character():
    # diag(e^{ia}, e^{ia}, e^{-2ia}) is singular but not central in SU(3)
    a = 0.7
    C = (a, a, -2 * a)
    c = TorusElement(C)
    assert not c.is_regular(A2) and not c.is_central(A2)
    assert weyl_character(A2, (1, 0), c) == pytest.approx(2 * np.exp(1j * a) + np.exp(-2j * a), abs=1e-8)
    tab = weight_table(A2, 4.0)
    assert np.allclose(characters(A2, tab, TorusElement((0, 0, 0))), tab.dim)


def test_alcove_parametrization():
    c = TorusElement.from_alcove(A2, [0.25, 0.25])
    angles = [float(A2.positive_array[i] @ c.array()) for i in range(3)]
    assert sorted(round(x / (2 * math.pi), 12) for x in angles) == [0.25, 0.25, 0.5]


def test_richardson_exact_for_polynomials():
    hs = [0.4, 0.2, 0.1, 0.05]
    est, err = richardson([3 + 2 * h - h**2 + 5 * h**3 for h in hs], hs, power=1)
    assert est == pytest.approx(3, abs=1e-12)
    # err compares with the previous tableau level, which still carries the cubic term
    assert 0 < err < 0.01


# --- group volumes ------------------------------------------------------------------


def test_a1_volumes():
    gc = group_constants(A1)
    assert gc.volume == pytest.approx(32 * math.sqrt(2) * math.pi**2)
    assert gc.torus_volume == pytest.approx(4 * math.sqrt(2) * math.pi)
    assert gc.flag_volume == pytest.approx(8 * math.pi)


@pytest.mark.parametrize("name", ["A1", "A2", "B2"])
def test_volume_from_small_time_heat_kernel(name):
    # H(t, 1) ~ (4 pi t)^{-dim/2} as t -> 0 fixes |G| independently of the flag formula
    rs = build_root_system(name)
    e = TorusElement(tuple([0.0] * rs.ambient_dim))
    t = 0.02 if rs.rank == 1 else 0.05
    h = heat_kernel(rs, t, e).value
    # leading correction: exp(t |rho|^2 ... ) absorbed by comparing two times
    h2 = heat_kernel(rs, t / 2, e).value
    ratio = (h2 / h) / 2 ** (rs.dim_G / 2)
    assert ratio == pytest.approx(1.0, rel=0.05)
    assert h * (4 * math.pi * t) ** (rs.dim_G / 2) == pytest.approx(1.0, rel=0.1 * rs.dim_G * t * 20)


def test_orbit_volume_errors():
    gc = group_constants(A2)
    with pytest.raises(LieError):
        gc.orbit_volume(A2, TorusElement((0.7, 0.7, -1.4)))
    assert gc.orbit_volume(A2, TorusElement((0.0, 0.0, 0.0))) == 0.0


# --- heat kernel --------------------------------------------------------------------


@pytest.mark.parametrize("t", [0.1, 0.5, 2.0])
def test_heat_kernel_total_integral(t):
    total = su2_class_integral(lambda th: su2_heat_kernel(t, np.cos(th))[0], nodes=512)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_heat_kernel_semigroup():
    t = s = 0.5
    phi = 0.9
    # x = 1, y = diag(e^{i phi}, e^{-i phi}); H(t, x z^-1) H(s, z y^-1) depends on (cos eta, xi1)
    lhs = su2_torus_integral(
        lambda U, X: su2_heat_kernel(t, U * np.cos(X))[0] * su2_heat_kernel(s, U * np.cos(X - phi))[0],
        nodes_eta=96, nodes_xi=192)
    rhs = su2_heat_kernel(t + s, np.array([math.cos(phi)]))[0][0]
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_character_orthogonality():
    vol = group_constants(A1).volume
    for m in range(6):
        for n in range(6):
            val = su2_class_integral(lambda th: cheb_u(m, np.cos(th)) * cheb_u(n, np.cos(th)), nodes=128)
            assert val / vol == pytest.approx(float(m == n), abs=1e-12)


def test_generic_heat_kernel_matches_su2_fast_path():
    for th in (0.2, 1.4, 3.0):
        hk = heat_kernel(A1, 0.3, TorusElement.from_angle(A1, th))
        fast, _ = su2_heat_kernel(0.3, np.array([math.cos(th)]))
        assert hk.converged
        assert hk.value == pytest.approx(fast[0], rel=1e-11)


def test_heat_kernel_class_symmetry():
    # H(t, g) = H(t, g^{-1}) and is invariant under the Weyl group
    C = np.array([0.3, 1.1, -1.4])
    a = heat_kernel(A2, 0.4, TorusElement(tuple(C))).value
    b = heat_kernel(A2, 0.4, TorusElement(tuple(-C))).value
    c = heat_kernel(A2, 0.4, TorusElement(tuple(C[[2, 0, 1]]))).value
    assert a == pytest.approx(b, rel=1e-10) and a == pytest.approx(c, rel=1e-10)


def test_heat_kernel_peak_decreases_in_t():
    e = TorusElement((0.0, 0.0))
    vals = [heat_kernel(B2, t, e).value for t in (0.1, 0.2, 0.4, 0.8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_heat_kernel_strictness():
    e = TorusElement((0.0, 0.0))
    with pytest.raises(LieError):
        heat_kernel(A1, 0.01, e, cutoff=5.0)
    weak = heat_kernel(A1, 0.01, e, cutoff=5.0, strict=False)
    assert not weak.converged and weak.tail_bound > 0
    with pytest.raises(LieError):
        heat_kernel(A1, 0.0, e)


def test_torus_element_dimension_checked():
    with pytest.raises(LieError):
        TorusElement((0.0,)).is_regular(A1)

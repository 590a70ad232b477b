import math

import numpy as np
import pytest

from localize.liegroups import TorusElement, build_root_system, group_constants, weyl_denominator
from localize.moduli import (
    Insertion,
    character_sum,
    ModuliError,
    ModuliQuery,
    derivative_insertion,
    holonomy_integral_exact,
    holonomy_integral_mc,
    intersection_number,
    intersection_prefactor,
    moduli_dimension,
    multi_boundary_sum,
    piecewise_poly_fit,
    volume,
    volume_along_line,
    volume_prefactor,
)

A1, A2 = build_root_system("A1"), build_root_system("A2")
FINE = (0.008, 0.004, 0.002, 0.001)
MINUS_ONE = TorusElement.from_alcove(A1, [1.0])
ETA2 = math.pi**2 / 12  # sum (-1)^{m-1} / m^2


def clausen_cubic(x):
    """sum_{m>=1} sin(m x) / m^3 on [0, 2 pi]."""
    return x**3 / 12 - math.pi * x**2 / 4 + math.pi**2 * x / 6


def clausen_quadratic(x):
    """sum_{m>=1} cos(m x) / m^2 on [0, 2 pi]."""
    return math.pi**2 / 6 - math.pi * x / 2 + x**2 / 4


# --- inputs and dimensions --------------------------------------------------------


def test_moduli_dimension():
    reg = TorusElement.from_angle(A1, 0.4)
    assert moduli_dimension(A1, 2, [MINUS_ONE]) == 3
    assert moduli_dimension(A1, 2, [reg]) == 4
    assert moduli_dimension(A1, 2, [reg, reg]) == 5
    assert moduli_dimension(A2, 2, [TorusElement((0.0, 0.0, 0.0))]) == 8
    with pytest.raises(ModuliError):
        moduli_dimension(A1, 1, [reg])


def test_intermediate_stratum_rejected():
    with pytest.raises(ModuliError):
        moduli_dimension(A2, 2, [TorusElement((0.7, 0.7, -1.4))])


def test_insertion_parse():
    p = Insertion.parse("x^4 - 2*x + 3", 1)
    assert p.degree == 4
    assert np.allclose(p.evaluate(np.array([1.0, 2.0])), [2.0, 15.0])
    q = Insertion.parse("x1*x2 + x2**2", 2)
    assert q.evaluate(np.array([[2.0, 3.0]]))[0] == 15.0
    assert Insertion.parse("0", 1).is_zero
    with pytest.raises(ModuliError):
        Insertion.parse("y + 1", 1)
    with pytest.raises(ModuliError):
        Insertion.parse("x +* 1", 1)


def test_query_validation():
    c = TorusElement.from_angle(A1, 0.4)
    with pytest.raises(ModuliError):
        ModuliQuery(A1, 2, [c], t_grid=(0.01, 0.02))
    with pytest.raises(ModuliError):
        ModuliQuery(A1, 2, [c], insertion=Insertion.one(2))
    with pytest.raises(ModuliError):
        ModuliQuery(A1, 2, [])


# --- volumes --------------------------------------------------------------------


@pytest.mark.parametrize("theta", [0.4, 0.3 * math.pi, 2.5])
def test_a1_volume_matches_clausen(theta):
    c = TorusElement.from_angle(A1, theta)
    res = volume(ModuliQuery(A1, 2, [c], t_grid=FINE))
    exact = volume_prefactor(A1, 2, c) / math.sin(theta) * clausen_cubic(theta)
    assert res.converged
    assert res.extrapolated_value == pytest.approx(exact, rel=1e-9)


def test_volume_symmetric_under_inversion():
    a = volume_along_line(A1, 2, [0.7, 2 * math.pi - 0.7])[0]
    assert a[0] == pytest.approx(a[1], rel=1e-9)


def test_volume_needs_regular_holonomy():
    with pytest.raises(ModuliError):
        volume(ModuliQuery(A1, 2, [MINUS_ONE]))


def test_volume_positive_on_a2():
    c = TorusElement.from_alcove(A2, [0.21, 0.33])
    res = volume(ModuliQuery(A2, 2, [c], t_grid=(0.02, 0.01, 0.005, 0.0025)))
    assert res.extrapolated_value > 0 and res.error_estimate < 1e-6 * res.extrapolated_value


def test_cutoff_robustness():
    c = TorusElement.from_angle(A1, 1.0)
    base = volume(ModuliQuery(A1, 2, [c], t_grid=FINE)).extrapolated_value
    wider = volume(ModuliQuery(A1, 2, [c], t_grid=FINE, cutoff=2e5)).extrapolated_value
    assert wider == pytest.approx(base, rel=1e-12)


# --- intersection numbers at a central holonomy ----------------------------------------


def test_central_damped_sum_monotone_in_t():
    vals = [complex(character_sum(A1, 2, MINUS_ONE, t)[0]).real for t in (0.08, 0.04, 0.02, 0.01, 0.005)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > ETA2


def test_intersection_prefactor_a1():
    assert intersection_prefactor(A1, 2) == pytest.approx(64 / math.pi**2)


@pytest.mark.parametrize("poly,inner", [("1", ETA2), ("x^2", 0.5), ("x^4", 0.0)])
def test_intersection_inner_limits(poly, inner):
    q = ModuliQuery(A1, 2, [MINUS_ONE], insertion=Insertion.parse(poly, 1))
    res = intersection_number(q)
    assert res.converged
    assert complex(res.diagnostics["inner_limit"]).real == pytest.approx(inner, abs=1e-8)


def test_intersection_value_p_one():
    res = intersection_number(ModuliQuery(A1, 2, [MINUS_ONE]))
    assert res.extrapolated_value == pytest.approx(16 / 3, rel=1e-8)
    # at c = u directly the damped sum is the raw alternating series
    assert res.diagnostics["reverse_order_value"] == pytest.approx(ETA2, abs=1e-9)


def test_intersection_identity_holonomy():
    # u = 1: sum m / m^3 = zeta(2), but the damped sum has a kink at u, so a fixed
    # t-grid is too coarse for the small eps values and must say so
    u = TorusElement((0.0, 0.0))
    coarse = intersection_number(ModuliQuery(A1, 2, [u]))
    assert not coarse.converged
    fine = intersection_number(ModuliQuery(A1, 2, [u], wall_adaptive_t=True))
    assert fine.diagnostics["inner_limit"] == pytest.approx(math.pi**2 / 6, abs=1e-6)


def test_intersection_rejects_regular():
    with pytest.raises(ModuliError):
        intersection_number(ModuliQuery(A1, 2, [TorusElement.from_angle(A1, 0.5)]))


# --- multiple boundaries ------------------------------------------------------------


def test_multi_boundary_degenerates_to_one_boundary():
    c = TorusElement.from_angle(A1, 0.3 * math.pi)
    one = multi_boundary_sum(ModuliQuery(A1, 2, [c], t_grid=FINE)).extrapolated_value
    gc = group_constants(A1)
    devs = []
    for eps in (1e-2, 1e-3):
        c2 = TorusElement.from_angle(A1, eps)
        two = multi_boundary_sum(ModuliQuery(A1, 2, [c, c2], t_grid=FINE)).extrapolated_value
        ratio = two / (gc.volume * weyl_denominator(A1, c2) / ((2 * math.pi) ** 2 * gc.torus_volume))
        devs.append(abs(ratio - one))
    assert devs[1] < devs[0] / 50 and devs[1] < 1e-5 * abs(one)
    assert abs(one) == pytest.approx(volume(ModuliQuery(A1, 2, [c], t_grid=FINE)).extrapolated_value, rel=1e-10)


def test_two_boundaries_continuous_along_path():
    thetas = np.linspace(0.5, 1.5, 11)
    vals = []
    for th in thetas:
        c = TorusElement.from_angle(A1, th)
        vals.append(complex(multi_boundary_sum(ModuliQuery(A1, 2, [c, c], t_grid=FINE)).extrapolated_value).real)
    first, second = np.abs(np.diff(vals)), np.abs(np.diff(vals, 2))
    assert second.max() < 0.25 * first.max()


# --- derivatives ---------------------------------------------------------------------


def test_numerator_derivative_closed_form():
    theta = 0.3 * math.pi
    c = TorusElement.from_angle(A1, theta)
    res = derivative_insertion(ModuliQuery(A1, 2, [c], t_grid=FINE), (1.0, -1.0), 1, form="numerator")
    assert complex(res.extrapolated_value) == pytest.approx(2j * clausen_quadratic(theta), abs=1e-8)
    assert res.diagnostics["disagreement"] < 1e-9


@pytest.mark.parametrize("k", [1, 3])
def test_odd_derivatives_vanish_at_central(k):
    res = derivative_insertion(ModuliQuery(A1, 2, [MINUS_ONE]), None, k)
    assert abs(complex(res.extrapolated_value)) < 1e-9


def test_second_derivative_at_central():
    # d^2/ds^2 sin(ms)/sin s at 0 = m(1 - m^2)/3; the generic direction moves theta at rate 1/sqrt 2
    res = derivative_insertion(ModuliQuery(A1, 2, [MINUS_ONE]), None, 2)
    assert complex(res.extrapolated_value).real == pytest.approx((ETA2 - 0.5) / 3 * 0.5, abs=1e-9)


def test_derivative_argument_checks():
    q = ModuliQuery(A1, 2, [MINUS_ONE])
    with pytest.raises(ModuliError):
        derivative_insertion(q, None, 0)
    with pytest.raises(ModuliError):
        derivative_insertion(q, None, 1, form="other")
    with pytest.raises(ModuliError):
        derivative_insertion(ModuliQuery(A2, 2, [TorusElement((0.0, 0.0, 0.0))]), None, 1, method="symbolic")


# --- piecewise polynomiality -----------------------------------------------------------


def test_piecewise_fit_two_cubics():
    pieces = piecewise_poly_fit(A1, 2, n_points=60)
    assert len(pieces) == 2
    assert pieces[0].interval[1] < math.pi < pieces[1].interval[0]
    assert all(p.degree == 3 and p.residual < 1e-6 for p in pieces)


def test_piecewise_fit_given_values():
    x = np.linspace(0, 2, 40)
    y = np.where(x < 1, x**2, 2 - x)
    pieces = piecewise_poly_fit(A1, 2, thetas=x, values=y, degree_bound=2)
    assert [p.degree for p in pieces] == [2, 1]


def test_piecewise_fit_zero_insertion():
    pieces = piecewise_poly_fit(A1, 2, n_points=20, insertion=Insertion.parse("0", 1))
    assert len(pieces) == 1 and pieces[0].degree == 0 and not np.any(pieces[0].coefficients)


def test_piecewise_fit_needs_grid_in_rank_two():
    with pytest.raises(ModuliError):
        piecewise_poly_fit(A2, 2)


# --- Monte Carlo -----------------------------------------------------------------


C_MC = TorusElement.from_angle(A1, 0.3)


def test_exact_integral_large_t_limit():
    # H -> 1/|G|, so I -> |G|^{2g-1} vol(O_c)
    gc = group_constants(A1)
    val, _ = holonomy_integral_exact(A1, 2, C_MC, 200.0)
    assert val == pytest.approx(gc.volume**3 * gc.orbit_volume(A1, C_MC), rel=1e-12)


def test_mc_agrees_and_is_deterministic():
    a = holonomy_integral_mc(A1, 2, C_MC, 0.5, samples=20_000, seed=11)
    b = holonomy_integral_mc(A1, 2, C_MC, 0.5, samples=20_000, seed=11)
    assert a.estimate == b.estimate
    assert abs(a.z_score) < 4


def test_mc_standard_error_scaling():
    small = holonomy_integral_mc(A1, 2, C_MC, 0.5, samples=20_000, seed=3)
    big = holonomy_integral_mc(A1, 2, C_MC, 0.5, samples=80_000, seed=4)
    assert small.standard_error / big.standard_error == pytest.approx(2.0, rel=0.1)


def test_mc_restricted_to_a1():
    with pytest.raises(ModuliError):
        holonomy_integral_mc(A2, 2, TorusElement((0.1, 0.2, -0.3)), 0.5, samples=10)

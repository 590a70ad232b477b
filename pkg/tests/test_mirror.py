from fractions import Fraction
from math import factorial

import pytest

from localize.exactnum import TruncatedSeries
from localize.mirror import (
    BundleSpec,
    DegreeMismatchError,
    MirrorError,
    conifold_target,
    hg_series,
    instanton_extract,
    local_conifold,
    one_parameter_pipeline,
    projective_space,
    quintic_pipeline,
    quintic_target,
    toric_identity_check,
)
from localize.oracles import (
    graph_sum_invariant,
    grassmannian_integral,
    schubert_lines_on_hypersurface,
)

# Independently known instanton numbers of the quintic (frozen from the literature
# and reproduced by this pipeline); only n1, n2 are checked by in-repo oracles.
QUINTIC_N = [2875, 609250, 317206375, 242467530000, 229305888887625]


# --- oracles -------------------------------------------------------------------


def test_schubert_oracle():
    assert grassmannian_integral((4, 0), 4) == 2  # sigma_1^4 on G(2,4)
    assert schubert_lines_on_hypersurface(3, 3) == 27
    assert schubert_lines_on_hypersurface(5, 4) == 2875


@pytest.mark.parametrize("weights", [None, [2, 19, -31, 57, 113]])
def test_graph_sum_quintic_weight_independent(weights):
    assert graph_sum_invariant(4, [5], 1, weights) == 2875
    assert graph_sum_invariant(4, [5], 2, weights) == Fraction(4876875, 8)


def test_graph_sum_local_targets():
    assert graph_sum_invariant(1, [-1, -1], 1) == 1
    assert graph_sum_invariant(1, [-1, -1], 2) == Fraction(1, 8)
    assert graph_sum_invariant(2, [-3], 1) == 3
    assert graph_sum_invariant(2, [-3], 2) == Fraction(-45, 8)


# --- hypergeometric series ------------------------------------------------------


def test_hg_quintic_leading_coefficients():
    X, V = quintic_target()
    hg = hg_series(X, V, 3, reduced=True, local=True)
    for d in range(4):
        assert hg.coefficient((d,)).coeff((0,)) == Fraction(factorial(5 * d), factorial(d) ** 5)
    assert hg.coefficient((1,)).coeff((0,)) == 120


def test_hg_cutoff_zero_is_prefactor_only():
    X, V = quintic_target()
    hg = hg_series(X, V, 0)
    assert list(hg.summands) == [(0,)]


def test_hg_conifold_concave_factor():
    X, V = conifold_target()
    # in H*(P^1) the concave factor H^2 vanishes ...
    assert list(hg_series(X, V, 2).summands) == [(0,)]
    # ... while the lifted local ring keeps it: d=1 -> H^2 (1 + 2H)
    local = hg_series(X, V, 2, local=True)
    assert local.coefficient((1,)).terms() == {(2,): 1, (3,): 2}


def test_hg_bad_convention():
    X, V = quintic_target()
    with pytest.raises(MirrorError):
        hg_series(X, V, 1, convention="sideways")


# --- pipelines -----------------------------------------------------------------


def test_quintic_instanton_numbers():
    gw = quintic_pipeline(6)
    assert [gw.n[d] for d in range(1, 6)] == QUINTIC_N
    assert gw.integral and gw.structure_ok


def test_quintic_k_matches_oracles():
    gw = quintic_pipeline(3)
    assert gw.K[1] == schubert_lines_on_hypersurface()
    assert gw.K[2] == graph_sum_invariant(4, [5], 2)
    assert gw.K[2] == gw.n[2] + gw.n[1] / 8


def test_quintic_stable_under_truncation_growth():
    small, big = quintic_pipeline(4), quintic_pipeline(7)
    assert all(small.K[d] == big.K[d] for d in small.K)


def test_mirror_map_round_trip():
    gw = quintic_pipeline(5)
    q = TruncatedSeries.gen(5, "q")
    Q_of_q = q * gw.mirror_map.exp()
    back = gw.inverse_mirror_map.compose(TruncatedSeries(dict(Q_of_q.items()), 5, "Q"))
    assert TruncatedSeries(dict(back.items()), 5, "q") == q
    assert [gw.mirror_map[k] for k in range(3)] == [0, 770, 717825]


def test_f0_constant_term_one():
    gw = quintic_pipeline(4)
    f0 = gw.periods[0]
    assert f0[0][0] == 1
    assert all(not f0[j] for j in range(1, f0.order))  # f0 has no t-dependence


def test_kd_denominators_divide_d_cubed():
    gw = quintic_pipeline(6)
    for d, k in gw.K.items():
        assert (d ** 3) % k.denominator == 0


def test_conifold_multiple_cover():
    gw = local_conifold(8)
    assert all(k * d ** 3 == 1 for d, k in gw.K.items())
    assert gw.n == {1: 1, **{d: 0 for d in range(2, 8)}}


def test_local_p2():
    gw = one_parameter_pipeline(projective_space(2), BundleSpec(((-3,),)), 5)
    assert [gw.n[d] for d in range(1, 5)] == [3, -6, 27, -192]
    assert gw.K[2] == graph_sum_invariant(2, [-3], 2)


def test_instanton_extract():
    assert instanton_extract([5]) == {1: 5}
    n = instanton_extract([Fraction(1), Fraction(1, 8), Fraction(1, 27)])
    assert n == {1: 1, 2: 0, 3: 0}
    assert instanton_extract([2, 3, 5])[3] == 5 - Fraction(2, 27)


def test_quintic_pipeline_needs_order_two():
    with pytest.raises(MirrorError):
        quintic_pipeline(1)


# --- the toric identity ----------------------------------------------------------


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_identity_quintic(order):
    X, V = quintic_target()
    chk = toric_identity_check(X, V, order)
    assert chk.convention == "minus"
    assert chk.residuals["minus"].is_zero()


def test_identity_other_convention_fails():
    X, V = quintic_target()
    chk = toric_identity_check(X, V, 3, conventions=("plus",))
    assert not chk.passed and not chk.residuals["plus"].is_zero()


@pytest.mark.parametrize("target", ["conifold", "local_p2"])
def test_identity_local_targets(target):
    if target == "conifold":
        X, V = conifold_target()
    else:
        X, V = projective_space(2), BundleSpec(((-3,),))
    assert toric_identity_check(X, V, 4).convention == "minus"


def test_identity_detects_wrong_phi():
    X, V = quintic_target()
    wrong = TruncatedSeries({1: 2874}, 3, "Q")
    assert not toric_identity_check(X, V, 3, phi=wrong).passed


def test_degree_mismatch():
    with pytest.raises(DegreeMismatchError):
        toric_identity_check(projective_space(4), BundleSpec(((4,),)), 3)
    with pytest.raises(DegreeMismatchError):
        one_parameter_pipeline(projective_space(4), BundleSpec(((6,),)), 3)


def test_mixed_sign_bundle_rejected():
    with pytest.raises(MirrorError):
        BundleSpec(((1, -1),)).split()

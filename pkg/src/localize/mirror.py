"""Genus-0 mirror principle for toric targets with split bundles.

Everything here is exact.  For one Kähler parameter the working objects are
nested truncated series::

    H-series (cohomology)  ->  t-polynomial (log q)  ->  q-series (Fraction)

The t-polynomial is stored as a TruncatedSeries in ``t`` whose order bounds
the degree; products never exceed it because the cohomology is nilpotent.

Sign conventions.  ``"minus"`` is the general hypergeometric series
``e^{-H.t} sum_d [...] e^{d.t}`` with factors ``(c1(L) - k)``; ``"plus"`` is the
same object after ``H -> -H``, i.e. the familiar quintic form
``e^{Ht} sum prod(5H+m)/prod(H+m)^5 e^{dt}``.  Both produce the same mirror
map and prepotential.

Local convention.  For a concave summand ``V-`` the cohomology of the base is
lifted to ``Q[H]/(H^{n+1})`` with ``n = dim X - rank V+ + rank V-`` and the
pairing ``<H^n> := int_X H^n e(V+)/e(V-)`` evaluated formally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _cartesian
from math import factorial
from typing import Mapping, Sequence

from .exactnum import GradedPolynomial, PolyRing, SeriesError, TruncatedSeries

__all__ = [
    "MirrorError",
    "DegreeMismatchError",
    "ToricTarget",
    "BundleSpec",
    "HGSeries",
    "GWSeries",
    "hg_series",
    "one_parameter_pipeline",
    "quintic_pipeline",
    "local_conifold",
    "instanton_extract",
    "toric_identity_check",
    "IdentityCheck",
    "projective_space",
    "quintic_target",
    "conifold_target",
]


class MirrorError(ValueError):
    pass


class DegreeMismatchError(MirrorError):
    """The bundle's Euler class has the wrong degree / Chern class for the pairing."""


@dataclass(frozen=True)
class ToricTarget:
    """Toric manifold described through its Kähler basis H_1..H_n.

    ``divisors`` are the toric divisors D_a as coefficient vectors in H,
    ``relations`` generate the monomial ideal of the truncated ring and
    ``pairing`` maps top-degree exponent vectors to integers.
    """

    kahler_rank: int
    divisors: tuple[tuple[int, ...], ...]
    relations: tuple[tuple[int, ...], ...]
    pairing: Mapping[tuple[int, ...], int]
    name: str = "X"

    def __post_init__(self):
        n = self.kahler_rank
        if n < 1:
            raise MirrorError("kahler_rank must be positive")
        for v in (*self.divisors, *self.relations, *self.pairing):
            if len(v) != n:
                raise MirrorError(f"vector {v} does not have length {n}")
        degs = {sum(m) for m in self.pairing}
        if len(degs) != 1:
            raise MirrorError("pairing must be defined on a single top degree")

    @property
    def dim(self) -> int:
        return sum(next(iter(self.pairing)))

    def ring(self) -> PolyRing:
        return PolyRing([(f"H{i + 1}" if self.kahler_rank > 1 else "H", 2) for i in range(self.kahler_rank)],
                        cap=2 * self.dim, ideal=self.relations)

    def c1(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.divisors))

    def integrate(self, p: GradedPolynomial):
        """The pairing with the fundamental class (top-degree part only)."""
        total = Fraction(0)
        for mono, c in p.terms().items():
            if sum(mono) == self.dim:
                total = total + c * self.pairing.get(mono, 0)
        return total


@dataclass(frozen=True)
class BundleSpec:
    """Direct sum of line bundles, each given by c1 as a vector in H."""

    line_bundles: tuple[tuple[int, ...], ...]

    def split(self) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
        convex, concave = [], []
        for c in self.line_bundles:
            if all(x >= 0 for x in c):
                convex.append(c)
            elif all(x <= 0 for x in c):
                concave.append(c)
            else:
                raise MirrorError(f"line bundle {c} is neither convex nor concave on effective classes")
        return convex, concave

    def c1(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.line_bundles))


def projective_space(n: int) -> ToricTarget:
    return ToricTarget(1, tuple((1,) for _ in range(n + 1)), ((n + 1,),), {(n,): 1}, name=f"P{n}")


def quintic_target() -> tuple[ToricTarget, BundleSpec]:
    return projective_space(4), BundleSpec(((5,),))


def conifold_target() -> tuple[ToricTarget, BundleSpec]:
    return projective_space(1), BundleSpec(((-1,), (-1,)))


def _pair(c: Sequence[int], d: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(c, d))


# ---------------------------------------------------------------------------
# hypergeometric series
# ---------------------------------------------------------------------------


@dataclass
class HGSeries:
    """Degree-indexed summands of HG[B]; the prefactor is ``e^{sign * H.t}``."""

    target: ToricTarget
    bundle: BundleSpec
    ring: PolyRing
    summands: dict[tuple[int, ...], GradedPolynomial]
    prefactor_sign: int
    reduced: bool

    def coefficient(self, d) -> GradedPolynomial:
        return self.summands.get(tuple(d), self.ring.zero())

    def full_series(self, q_order: int) -> TruncatedSeries:
        """One-parameter HG as an H-series of t-polynomials of q-series."""
        if self.target.kahler_rank != 1:
            raise NotImplementedError("full_series is only available for one Kähler parameter")
        h_order = self.ring.cap // 2 + 1 if self.ring.cap is not None else None
        for g in self.ring.ideal:
            h_order = min(h_order, g[0]) if h_order is not None else g[0]
        bare = _poly_series_to_H(self.summands, h_order, q_order)
        return _exp_Ht(self.prefactor_sign, h_order, q_order) * bare


def _factor_product(ring: PolyRing, c: GradedPolynomial, ks: range, sign: int):
    """prod_{k in ks} (c + sign*k)."""
    out = ring.one()
    for k in ks:
        out = out * (c + sign * k)
    return out


def _summand(ring, X, convex, concave, d, reduced, sign_flip=False):
    H = ring.gens()

    def cls(vec):
        p = ring.zero()
        for i, a in enumerate(vec):
            if a:
                p = p + H[i] * a
        return -p if sign_flip else p

    num = ring.one()
    for c in convex:
        m = _pair(c, d)
        start = 1 if reduced else 0
        num = num * _factor_product(ring, cls(c), range(start, m + 1), -1)
    for c in concave:
        m = _pair(c, d)
        if m < 0:
            num = num * _factor_product(ring, cls(c), range(0, -m), +1)
    den = ring.one()
    for D in X.divisors:
        m = _pair(D, d)
        if m >= 0:
            den = den * _factor_product(ring, cls(D), range(1, m + 1), -1)
        else:
            num = num * _factor_product(ring, cls(D), range(0, -m), +1)
    return num / den


def _cy_dimension(X: ToricTarget, V: BundleSpec) -> int:
    convex, concave = V.split()
    return X.dim - len(convex) + len(concave)


def _local_ring(X: ToricTarget, V: BundleSpec) -> PolyRing:
    if X.kahler_rank != 1:
        raise NotImplementedError("the local convention is implemented for one Kähler parameter")
    n = _cy_dimension(X, V)
    return PolyRing([("H", 2)], cap=2 * n, ideal=((n + 1,),))


def hg_series(X: ToricTarget, V: BundleSpec, cutoff: int, convention: str = "minus",
              reduced: bool = False, local: bool = False) -> HGSeries:
    """Summands of HG[B] for all effective degrees with ``0 <= d_i <= cutoff``.

    ``reduced`` drops the ``k = 0`` convex factors, i.e. divides by e(V+).
    ``local`` computes in the lifted ring of the local convention instead of
    H*(X).  ``convention="plus"`` returns the ``H -> -H`` form used for the
    quintic (overall sign absorbed when ``reduced``).
    """
    if cutoff < 0:
        raise MirrorError("cutoff must be non-negative")
    if convention not in ("minus", "plus"):
        raise MirrorError(f"unknown convention {convention!r}")
    convex, concave = V.split()
    ring = _local_ring(X, V) if local else X.ring()
    flip = convention == "plus"
    summands = {}
    for d in _cartesian(range(cutoff + 1), repeat=X.kahler_rank):
        try:
            s = _summand(ring, X, convex, concave, d, reduced, sign_flip=flip)
        except SeriesError as exc:
            raise MirrorError(f"degree {d}: {exc}") from exc
        if flip and not reduced:
            # the k=0 convex factors each pick up a sign under H -> -H
            s = s * (-1) ** len(convex)
        if s:
            summands[d] = s
    return HGSeries(X, V, ring, summands, +1 if flip else -1, reduced)


# ---------------------------------------------------------------------------
# nested-series helpers (one Kähler parameter)
# ---------------------------------------------------------------------------


def _poly_series_to_H(summands, h_order: int, q_order: int) -> TruncatedSeries:
    """sum_d P_d(H) q^d as an H-series with t-constant q-series coefficients."""
    coeffs = {}
    for i in range(h_order):
        qs = TruncatedSeries({d[0]: p.coeff((i,)) for d, p in summands.items()}, q_order, "q")
        coeffs[i] = TruncatedSeries({0: qs}, h_order, "t")
    return TruncatedSeries(coeffs, h_order, "H")


def _exp_Ht(sign: int, h_order: int, q_order: int) -> TruncatedSeries:
    """e^{sign*H*t} with coefficients t^j/j! embedded as t-polynomials."""
    one_q = TruncatedSeries.const(1, q_order, "q")
    return TruncatedSeries(
        {j: TruncatedSeries({j: one_q * Fraction(sign**j, factorial(j))}, h_order, "t") for j in range(h_order)},
        h_order, "H")


def _change_variables(F: TruncatedSeries, G: TruncatedSeries, q_of_Q: TruncatedSeries) -> TruncatedSeries:
    """Rewrite sum_j F_j(q) t^j with t = T - G(Q), q = q(Q)."""
    order = F.order
    shift = TruncatedSeries({0: -G, 1: TruncatedSeries.const(1, G.order, "Q")}, order, "T")
    out = TruncatedSeries({}, order, "T")
    power = TruncatedSeries.const(TruncatedSeries.const(1, G.order, "Q"), order, "T")
    for j in range(order):
        Fj = F[j]
        if Fj:
            out = out + power * Fj.compose(q_of_Q)
        power = power * shift
    return out


@dataclass
class GWSeries:
    """Genus-0 output: K_d = K^0_d for d = 1..q_order-1 and derived data."""

    K: dict[int, Fraction]
    n: dict[int, Fraction]
    mirror_map: TruncatedSeries  # g(q) with T = t + g(q)
    inverse_mirror_map: TruncatedSeries  # q(Q)
    periods: list[TruncatedSeries]  # f_0..f_3 as t-polynomials of q-series
    prepotential: TruncatedSeries  # F(T) as T-series of Q-series
    kappa: Fraction
    q_order: int
    integral: bool = True
    structure_ok: bool = True
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "K_d": {str(d): str(v) for d, v in self.K.items()},
            "n_d": {str(d): str(v) for d, v in self.n.items()},
            "mirror_map_coefficients": [str(self.mirror_map[k]) for k in range(self.q_order)],
            "kappa": str(self.kappa),
            "integral": self.integral,
            "structure_ok": self.structure_ok,
        }


def _kappa(X: ToricTarget, V: BundleSpec) -> Fraction:
    convex, concave = V.split()
    n = _cy_dimension(X, V)
    top = n + len(convex) - len(concave)
    if top != X.dim:
        raise DegreeMismatchError("pairing degree does not match")
    num = Fraction(1)
    for c in convex:
        num *= c[0]
    for c in concave:
        num /= c[0]
    return num * X.pairing[(X.dim,)]


def _check_calabi_yau(X: ToricTarget, V: BundleSpec):
    convex, concave = V.split()
    lhs = X.c1()
    rhs = tuple(sum(c[i] for c in convex) - sum(c[i] for c in concave) for i in range(X.kahler_rank))
    if lhs != rhs:
        raise DegreeMismatchError(f"c1(X) = {lhs} but c1(V+) - c1(V-) = {rhs}: not Calabi-Yau")
    if _cy_dimension(X, V) != 3:
        raise DegreeMismatchError(f"e(V) leaves a {_cy_dimension(X, V)}-dimensional pairing; need 3")


def _reduced_H_series(X, V, q_order, convention):
    """Reduced HG (divided by e(V+)) as an H-series in Q[H]/(H^4)."""
    hg = hg_series(X, V, q_order - 1, convention=convention, reduced=True, local=True)
    return hg.full_series(q_order), hg


def _qcoeff(tpoly: TruncatedSeries, j: int, q_order: int) -> TruncatedSeries:
    c = tpoly[j]
    return c if isinstance(c, TruncatedSeries) else TruncatedSeries.const(c, q_order, "q")


def _periods(W: TruncatedSeries) -> list[TruncatedSeries]:
    return [W[i] for i in range(W.order)]


def one_parameter_pipeline(X: ToricTarget, V: BundleSpec, q_order: int) -> GWSeries:
    """Candelas-style extraction for a one-parameter Calabi-Yau 3-fold target.

    f_k are the H^k coefficients of the reduced series in the plus
    convention, T = f1/f0 and F = kappa/2 (f1 f2 / f0^2 - f3 / f0).
    """
    if q_order < 1:
        raise MirrorError("q_order must be at least 1")
    if X.kahler_rank != 1:
        raise NotImplementedError("prepotential extraction needs one Kähler parameter")
    _check_calabi_yau(X, V)
    kappa = _kappa(X, V)
    W, _ = _reduced_H_series(X, V, q_order, "plus")
    f0, f1, f2, f3 = _periods(W)[:4]
    A = _qcoeff(f0, 0, q_order)  # t-independent
    if A[0] != 1:
        raise MirrorError("f0 does not start with 1; cannot normalize")
    g = _qcoeff(f1, 0, q_order) / A  # T = t + g(q)
    if g[0] != 0:
        raise MirrorError("mirror map has a constant term")
    F = (f1 * f2 / (f0 * f0) - f3 / f0) * (kappa / 2)
    Q_of_q = TruncatedSeries.gen(q_order, "q") * g.exp()
    q_of_Q = TruncatedSeries(dict(Q_of_q.revert().items()), q_order, "Q")
    G = g.compose(q_of_Q)
    FT = _change_variables(F, G, q_of_Q)
    cubic = TruncatedSeries.const(kappa / 6, q_order, "Q")
    rest = FT - TruncatedSeries({3: cubic}, FT.order, "T")
    notes = []
    rest0 = _qcoeff(rest, 0, q_order)
    structure_ok = all(not rest[j] for j in range(1, rest.order)) and (q_order == 0 or rest0[0] == 0)
    if not structure_ok:
        notes.append("F(T) - kappa/6 T^3 has a polynomial part in T")
    K = {d: rest0[d] for d in range(1, q_order)}
    n = instanton_extract([K[d] for d in range(1, q_order)])
    integral = all(v.denominator == 1 for v in n.values())
    if not integral:
        notes.append("non-integral instanton numbers: " + ", ".join(f"n_{d}={v}" for d, v in n.items() if v.denominator != 1))
    return GWSeries(K, n, g, q_of_Q, [f0, f1, f2, f3], FT, kappa, q_order, integral, structure_ok, notes)


def quintic_pipeline(q_order: int) -> GWSeries:
    if q_order < 2:
        raise MirrorError("q_order must be at least 2")
    X, V = quintic_target()
    return one_parameter_pipeline(X, V, q_order)


def local_conifold(q_order: int) -> GWSeries:
    X, V = conifold_target()
    return one_parameter_pipeline(X, V, q_order)


def instanton_extract(K: Sequence) -> dict[int, Fraction]:
    """Solve K_d = sum_{k | d} n_{d/k} / k^3 for n_1..n_D (K[0] is K_1)."""
    n: dict[int, Fraction] = {}
    for d in range(1, len(K) + 1):
        v = Fraction(K[d - 1])
        for k in range(2, d + 1):
            if d % k == 0:
                v -= n[d // k] / k**3
        n[d] = v
    return n


# ---------------------------------------------------------------------------
# the toric identity
# ---------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    convention: str | None
    residuals: dict[str, TruncatedSeries]
    phi: TruncatedSeries

    @property
    def passed(self) -> bool:
        return self.convention is not None


def _identity_residual(X, V, q_order, convention, phi: TruncatedSeries) -> TruncatedSeries:
    sign = +1 if convention == "plus" else -1
    kappa = _kappa(X, V)
    W, _ = _reduced_H_series(X, V, q_order, convention)
    h_order = W.order
    A = _qcoeff(W[0], 0, q_order)
    if A[0] != 1:
        raise MirrorError("H^0 coefficient does not start with 1")
    B = W[1]
    # T = t + g, with g read from the H^1 coefficient in this convention
    T_of_t = B * (sign * A.inverse())
    g = _qcoeff(T_of_t, 0, q_order)
    if T_of_t[1] != 1 or any(T_of_t[j] for j in range(2, T_of_t.order)):
        raise MirrorError("mirror map is not of the form T = t + g(q)")
    Q_of_q = TruncatedSeries.gen(q_order, "q") * g.exp()
    q_of_Q = TruncatedSeries(dict(Q_of_q.revert().items()), q_order, "Q")
    G = g.compose(q_of_Q)
    normalized = W * A.inverse()
    lhs_t = normalized[3] * kappa  # H^3 part of e^f HG (the e(V) pairing)
    lhs = _change_variables(lhs_t, G, q_of_Q)
    one_Q = TruncatedSeries.const(1, q_order, "Q")
    # H^3 coefficient of e^{-H T} = -T^3/6, already in (T, Q) variables
    lhs = lhs - TruncatedSeries({3: one_Q * Fraction(-1, 6) * kappa}, lhs.order, "T")
    # 2 Phi - T dPhi/dT with Phi = sum K_d Q^d
    dphi = TruncatedSeries({d: c * d for d, c in phi.items()}, q_order, "Q")
    rhs = TruncatedSeries({0: phi * 2, 1: -dphi}, lhs.order, "T")
    return lhs - rhs


def toric_identity_check(X: ToricTarget, V: BundleSpec, q_order: int, phi: TruncatedSeries | None = None,
                         conventions: Sequence[str] = ("minus", "plus")) -> IdentityCheck:
    """Residual of  int_X (e^f HG - e^{-H.T} e(V)) = 2 Phi - sum T_j dPhi/dT_j.

    Phi defaults to the prepotential instanton part from
    :func:`one_parameter_pipeline`.  Each convention is tried; the first with
    an identically zero residual is reported.
    """
    if X.kahler_rank != 1:
        raise NotImplementedError("toric_identity_check supports one Kähler parameter")
    _check_calabi_yau(X, V)
    if phi is None:
        gw = one_parameter_pipeline(X, V, q_order)
        phi = TruncatedSeries(gw.K, q_order, "Q")
    residuals = {}
    chosen = None
    for conv in conventions:
        r = _identity_residual(X, V, q_order, conv, phi)
        residuals[conv] = r
        if chosen is None and all(not r[j] for j in range(r.order)):
            chosen = conv
    return IdentityCheck(chosen, residuals, phi)

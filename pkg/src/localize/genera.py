"""Multiplicative genera in Pontryagin classes and the Witten genus q-expansion."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .exactnum import GradedPolynomial, PolyRing, SeriesError, TruncatedSeries, solve_linear

__all__ = [
    "GenusError",
    "CharacteristicSeries",
    "ManifoldData",
    "partitions",
    "pontryagin_ring",
    "a_hat_series",
    "l_series",
    "witten_series",
    "multiplicative_class",
    "genus_value",
    "symmetric_power_character",
    "chern_character_tangent",
    "witten_genus_qexp",
    "CancellationResult",
    "solve_cancellation_dim12",
]


class GenusError(ValueError):
    pass


def partitions(k: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of k as non-increasing tuples."""
    if largest is None:
        largest = k
    if k == 0:
        return [()]
    out = []
    for first in range(min(k, largest), 0, -1):
        for rest in partitions(k - first, first):
            out.append((first,) + rest)
    return out


def _partition_to_mono(part: Sequence[int], k: int) -> tuple[int, ...]:
    mono = [0] * k
    for i in part:
        mono[i - 1] += 1
    return tuple(mono)


def _mono_to_partition(mono: Sequence[int]) -> tuple[int, ...]:
    part = []
    for i in range(len(mono), 0, -1):
        part.extend([i] * mono[i - 1])
    return tuple(part)


def pontryagin_ring(k: int) -> PolyRing:
    """p_1..p_k with deg p_i = 4i, truncated above degree 4k."""
    return PolyRing([(f"p{i}", 4 * i) for i in range(1, k + 1)], cap=4 * k)


@dataclass(frozen=True)
class CharacteristicSeries:
    """Q(x) with Q(0) = 1, stored as a series in x (coefficients may be q-series)."""

    series: TruncatedSeries
    name: str = "custom"

    def __post_init__(self):
        if self.series.order == 0 or self.series[0] != 1:
            raise GenusError("characteristic series must have constant term 1")

    @property
    def even(self) -> bool:
        return all(not self.series[n] for n in range(1, self.series.order, 2))

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, name: str = "custom") -> "CharacteristicSeries":
        return cls(TruncatedSeries(list(coeffs), len(coeffs), "x"), name)


def _sinh_over_x(order: int, scale: Fraction = Fraction(1)) -> TruncatedSeries:
    """sinh(scale*x)/(scale*x)."""
    return TruncatedSeries({2 * j: scale ** (2 * j) / factorial(2 * j + 1) for j in range(order)}, order, "x")


def a_hat_series(order: int = 14) -> CharacteristicSeries:
    """(x/2)/sinh(x/2)."""
    return CharacteristicSeries(_sinh_over_x(order, Fraction(1, 2)).inverse(), "A-hat")


def l_series(order: int = 14) -> CharacteristicSeries:
    """x/tanh(x) = x cosh x / sinh x."""
    cosh = TruncatedSeries({2 * j: Fraction(1, factorial(2 * j)) for j in range(order)}, order, "x")
    return CharacteristicSeries(cosh / _sinh_over_x(order), "L")


def _exp_series(order: int, scale, var="x") -> TruncatedSeries:
    return TruncatedSeries({j: Fraction(scale) ** j / factorial(j) for j in range(order)}, order, var)


def witten_series(q_order: int, order: int = 14) -> CharacteristicSeries:
    """Per root pair: (x/2)/sinh(x/2) * prod_n (1-q^n)^2 / ((1-q^n e^x)(1-q^n e^-x)).

    Coefficients of x^j are q-series.
    """
    one_q = TruncatedSeries.const(1, q_order, "q")
    ex, emx = _exp_series(order, 1), _exp_series(order, -1)
    prod = TruncatedSeries.const(one_q, order, "x")
    for n in range(1, q_order):
        qn = TruncatedSeries({n: 1}, q_order, "q")
        # 1/(1 - q^n e^{+-x}) = sum_m q^{nm} e^{+-mx}
        for e in (ex, emx):
            acc = TruncatedSeries({}, order, "x")
            for m in range(0, (q_order - 1) // n + 1):
                qnm = TruncatedSeries({n * m: 1}, q_order, "q")
                acc = acc + (e ** m) * qnm if m else acc + one_q
            prod = prod * acc
        prod = prod * ((one_q - qn) * (one_q - qn))
    a_hat = a_hat_series(order).series
    return CharacteristicSeries(prod * a_hat, "Witten")


# ---------------------------------------------------------------------------
# symmetric functions
# ---------------------------------------------------------------------------


def _power_sums(ring: PolyRing, k: int) -> list[GradedPolynomial]:
    """Power sums P_m of the squared roots in terms of p_i = e_i(x^2), m = 0..k."""
    e = [ring.one()] + ring.gens() + [ring.zero()] * k
    P = [ring.zero()]
    for m in range(1, k + 1):
        acc = e[m] * ((-1) ** (m - 1) * m)
        for i in range(1, m):
            acc = acc + e[i] * P[m - i] * (-1) ** (i - 1)
        P.append(acc)
    return P


def multiplicative_class(Q: CharacteristicSeries, k: int) -> list[GradedPolynomial]:
    """[K_1, ..., K_k] with K_j the degree-4j part of prod_i Q(x_i), p_i = e_i(x^2)."""
    if k < 1:
        raise GenusError("k must be >= 1")
    if not Q.even:
        raise GenusError("characteristic series has odd terms")
    if Q.series.order <= 2 * k:
        raise GenusError(f"characteristic series known only to order {Q.series.order}; need > {2 * k}")
    ring = pontryagin_ring(k)
    # log Q(x) as a series in z = x^2
    z = TruncatedSeries({j: Q.series[2 * j] for j in range(k + 1)}, k + 1, "z")
    logq = z.log()
    P = _power_sums(ring, k)
    total = ring.zero()
    for m in range(1, k + 1):
        if logq[m]:
            total = total + P[m] * logq[m]
    full = total.exp()
    return [full.homogeneous_part(4 * j) for j in range(1, k + 1)]


@dataclass(frozen=True)
class ManifoldData:
    """Pontryagin numbers of a closed oriented 4k-manifold."""

    dimension: int
    pontryagin_numbers: Mapping[tuple[int, ...], int]
    spin: bool = True
    name: str = "M"

    def __post_init__(self):
        if self.dimension <= 0 or self.dimension % 4:
            raise GenusError("dimension must be a positive multiple of 4")
        missing = [p for p in partitions(self.k) if p not in self.pontryagin_numbers]
        if missing:
            raise GenusError(f"missing Pontryagin numbers for partitions {missing}")

    @property
    def k(self) -> int:
        return self.dimension // 4

    @classmethod
    def from_sequence(cls, dimension: int, values: Sequence[int], spin: bool = True, name: str = "M"):
        """Values in the order of :func:`partitions` (e.g. k=2: p2, p1^2)."""
        parts = partitions(dimension // 4)
        if len(values) != len(parts):
            raise GenusError(f"expected {len(parts)} Pontryagin numbers")
        return cls(dimension, dict(zip(parts, values)), spin, name)

    def pair(self, top: GradedPolynomial):
        """Evaluate a degree-4k polynomial in p_i on the fundamental class."""
        total = Fraction(0)
        for mono, c in top.terms().items():
            if sum((i + 1) * e for i, e in enumerate(mono)) != self.k:
                continue
            part = _mono_to_partition(mono)
            if part not in self.pontryagin_numbers:
                raise GenusError(f"no Pontryagin number for {part}")
            total = total + c * self.pontryagin_numbers[part]
        return total


def genus_value(M: ManifoldData, Q: CharacteristicSeries):
    return M.pair(multiplicative_class(Q, M.k)[-1])


def symmetric_power_character(rank: int, t_order: int, cap: int) -> TruncatedSeries:
    """ch(S_t E) = prod_i (1 - t e^{x_i})^{-1} in Chern roots x_i (deg 2).

    Truncated below t^t_order and above cohomological degree ``cap``.
    """
    if rank < 1:
        raise GenusError("rank must be >= 1")
    ring = PolyRing([(f"x{i + 1}", 2) for i in range(rank)], cap=cap)
    jmax = cap // 2

    def exp_root(i, m):
        x = ring.gen(i)
        out, term = ring.one(), ring.one()
        for j in range(1, jmax + 1):
            term = term * x * Fraction(m, j)
            out = out + term
        return out

    result = TruncatedSeries.const(ring.one(), t_order, "t")
    for i in range(rank):
        factor = TruncatedSeries({n: exp_root(i, n) for n in range(t_order)}, t_order, "t")
        result = result * factor
    return result


def chern_character_tangent(k: int) -> GradedPolynomial:
    """ch(T_C M) = sum_i 2 cosh(x_i) over 2k root pairs, in p_1..p_k."""
    ring = pontryagin_ring(k)
    P = _power_sums(ring, k)
    out = ring.const(2 * (2 * k))
    for m in range(1, k + 1):
        out = out + P[m] * Fraction(2, factorial(2 * m))
    return out


def witten_genus_qexp(M: ManifoldData, q_order: int, reduced: bool = True) -> TruncatedSeries:
    """Index of D tensor (tensor_n S_{q^n}(T_C M - dim)) as a q-series.

    ``reduced=False`` twists by S_{q^n}(T_C M) instead, which multiplies the
    result by prod_n (1 - q^n)^(-dim).
    """
    if not M.spin:
        raise GenusError("the Witten genus needs a spin manifold")
    if M.k > 3:
        raise GenusError("Witten genus supported in dimensions 4, 8, 12")
    Q = witten_series(q_order, order=2 * M.k + 2)
    top = multiplicative_class(Q, M.k)[-1]
    value = M.pair(top)
    if not isinstance(value, TruncatedSeries):
        value = TruncatedSeries.const(value, q_order, "q")
    if not reduced:
        euler = TruncatedSeries.const(1, q_order, "q")
        for n in range(1, q_order):
            euler = euler * (1 - TruncatedSeries({n: 1}, q_order, "q"))
        value = value / euler ** M.dimension
    return value


@dataclass
class CancellationResult:
    a: Fraction
    b: Fraction
    residual: GradedPolynomial
    rank: int
    L: GradedPolynomial = field(repr=False)
    a_hat_twisted: GradedPolynomial = field(repr=False)
    a_hat: GradedPolynomial = field(repr=False)

    def check(self, p: Sequence[int]) -> bool:
        lhs = self.L.evaluate(p)
        rhs = self.a * self.a_hat_twisted.evaluate(p) + self.b * self.a_hat.evaluate(p)
        return lhs == rhs


def solve_cancellation_dim12() -> CancellationResult:
    """Find a, b with L = a (A-hat ch(T_C M)) + b A-hat in degree 12."""
    k = 3
    L = multiplicative_class(l_series(), k)[-1]
    ahat_all = multiplicative_class(a_hat_series(), k)
    ring = L.ring
    ahat_full = ring.one() + ahat_all[0] + ahat_all[1] + ahat_all[2]
    twisted = (ahat_full * chern_character_tangent(k)).homogeneous_part(12)
    ahat = ahat_all[2]
    monos = ring.monomials_of_degree(12)
    rows = [[twisted.coeff(m), ahat.coeff(m)] for m in monos]
    rhs = [L.coeff(m) for m in monos]
    try:
        (a, b), rank = solve_linear(rows, rhs)
    except SeriesError as exc:
        raise GenusError(f"cancellation system: {exc}") from exc
    residual = L - twisted * a - ahat * b
    return CancellationResult(a, b, residual, rank, L, twisted, ahat)

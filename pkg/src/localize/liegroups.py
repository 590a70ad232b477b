"""Root systems of classical type, Weyl formulas and the heat kernel on G.

Coordinates.  Roots and weights live in the usual Bourbaki coordinates
(``e_i - e_j`` etc.), with exact rational entries.  The Killing-dual inner
product on t* is ``killing_scale * (mu . nu)``; the scale is *computed* from
the roots via ``<mu, mu> = sum_alpha <alpha, mu>^2`` rather than tabulated.
A Cartan element C uses the same coordinates with ``alpha(C) = alpha . C``,
so ``exp: t -> T`` has kernel ``2 pi`` times the coroot lattice and the
Killing metric on t is ``(C . D) / killing_scale``.

Group volumes come from |G| = |T| * prod_{alpha>0} 2 pi / <alpha, rho>; the
heat-kernel small-time test in the suite checks them independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = [
    "LieError",
    "RootSystemData",
    "DominantWeight",
    "TorusElement",
    "WeightTable",
    "build_root_system",
    "weyl_dimension",
    "weyl_character",
    "casimir",
    "enumerate_weights",
    "weight_table",
    "heat_kernel",
    "HeatKernelValue",
    "group_constants",
    "GroupConstants",
    "richardson",
    "characters",
    "weyl_denominator",
    "heat_kernel_cutoff",
    "su2_heat_kernel",
    "su2_class_integral",
    "su2_torus_integral",
]


class LieError(ValueError):
    pass


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _vec(*xs):
    return tuple(Fraction(x) for x in xs)


def _unit(n, i, c=1):
    v = [Fraction(0)] * n
    v[i] = Fraction(c)
    return v


def _reflect(v, alpha):
    c = 2 * _dot(v, alpha) / _dot(alpha, alpha)
    return tuple(x - c * a for x, a in zip(v, alpha))


@dataclass(frozen=True)
class RootSystemData:
    type: str
    rank: int
    ambient_dim: int
    simple_roots: tuple[tuple[Fraction, ...], ...]
    positive_roots: tuple[tuple[Fraction, ...], ...]
    fundamental_weights: tuple[tuple[Fraction, ...], ...]
    rho: tuple[Fraction, ...]
    killing_scale: Fraction
    weyl_group: tuple[tuple[tuple[Fraction, ...], ...], ...]  # matrices (rows)
    weyl_signs: tuple[int, ...]
    center_order: int
    dim_G: int
    generic_direction: tuple[float, ...]

    @property
    def name(self) -> str:
        return f"{self.type}{self.rank}"

    @property
    def n_positive(self) -> int:
        return len(self.positive_roots)

    def killing_gram(self) -> np.ndarray:
        """Gram matrix of the Killing-dual form in the ambient coordinates."""
        return float(self.killing_scale) * np.eye(self.ambient_dim)

    def inner(self, mu, nu) -> Fraction:
        return self.killing_scale * _dot(mu, nu)

    def weight(self, labels: Sequence[int]) -> tuple[Fraction, ...]:
        """Weight with the given Dynkin labels (coefficients of fundamental weights)."""
        out = [Fraction(0)] * self.ambient_dim
        for a, w in zip(labels, self.fundamental_weights):
            for i in range(self.ambient_dim):
                out[i] += a * w[i]
        return tuple(out)

    def labels(self, mu) -> tuple[Fraction, ...]:
        """Dynkin labels 2<mu, alpha_i>/<alpha_i, alpha_i>."""
        return tuple(2 * _dot(mu, a) / _dot(a, a) for a in self.simple_roots)

    def coroots(self) -> list[tuple[Fraction, ...]]:
        return [tuple(2 * x / _dot(a, a) for x in a) for a in self.simple_roots]

    def fundamental_coweights(self) -> list[tuple[Fraction, ...]]:
        """omega_i^vee with alpha_j(omega_i^vee) = delta_ij, inside the Cartan subspace."""
        A = np.array([[float(x) for x in a] for a in self.simple_roots])
        pinv = np.linalg.pinv(A)  # columns solve A c = e_i in the row space
        return [tuple(pinv[:, i]) for i in range(self.rank)]

    @cached_property
    def weyl_matrices(self) -> np.ndarray:
        return np.array([[[float(x) for x in row] for row in w] for w in self.weyl_group])

    @cached_property
    def positive_array(self) -> np.ndarray:
        return np.array([[float(x) for x in a] for a in self.positive_roots])

    @cached_property
    def rho_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.rho])

    def __hash__(self):
        return hash((self.type, self.rank))

    def __eq__(self, other):
        return isinstance(other, RootSystemData) and (self.type, self.rank) == (other.type, other.rank)


def _classical_data(typ: str, n: int):
    if typ == "A":
        if n < 1:
            raise LieError("A_n needs n >= 1")
        m = n + 1
        simple = [tuple(Fraction(x) for x in (_unit(m, i, 1)[j] - _unit(m, i + 1, 1)[j] for j in range(m))) for i in range(n)]
        pos = [tuple(Fraction((k == i) - (k == j)) for k in range(m)) for i in range(m) for j in range(i + 1, m)]
        fund = []
        for i in range(1, n + 1):
            fund.append(tuple(Fraction(int(k < i)) - Fraction(i, m) for k in range(m)))
        return m, simple, pos, fund, n + 1, n * (n + 2)
    if typ in ("B", "C", "D"):
        lo = {"B": 2, "C": 2, "D": 3}[typ]
        if n < lo:
            raise LieError(f"{typ}_n needs n >= {lo}")
        m = n
        e = lambda i: _unit(m, i)  # noqa: E731
        simple = [tuple(a - b for a, b in zip(e(i), e(i + 1))) for i in range(n - 1)]
        pos = []
        for i in range(n):
            for j in range(i + 1, n):
                pos.append(tuple(a - b for a, b in zip(e(i), e(j))))
                pos.append(tuple(a + b for a, b in zip(e(i), e(j))))
        if typ == "B":
            simple.append(tuple(e(n - 1)))
            pos += [tuple(e(i)) for i in range(n)]
            fund = [tuple(Fraction(int(k <= i)) for k in range(m)) for i in range(n - 1)]
            fund.append(tuple(Fraction(1, 2) for _ in range(m)))
            return m, simple, pos, fund, 2, n * (2 * n + 1)
        if typ == "C":
            simple.append(tuple(2 * x for x in e(n - 1)))
            pos += [tuple(2 * x for x in e(i)) for i in range(n)]
            fund = [tuple(Fraction(int(k <= i)) for k in range(m)) for i in range(n)]
            return m, simple, pos, fund, 2, n * (2 * n + 1)
        simple.append(tuple(a + b for a, b in zip(e(n - 2), e(n - 1))))
        fund = [tuple(Fraction(int(k <= i)) for k in range(m)) for i in range(n - 2)]
        fund.append(tuple(Fraction(1, 2) * (1 if k < n - 1 else -1) for k in range(m)))
        fund.append(tuple(Fraction(1, 2) for _ in range(m)))
        return m, simple, pos, fund, 4, n * (2 * n - 1)
    raise LieError(f"unsupported root system type {typ!r}")


def _weyl_group(simple, m):
    ident = tuple(tuple(Fraction(int(i == j)) for j in range(m)) for i in range(m))
    refl = []
    for a in simple:
        cols = [_reflect(_unit(m, j), a) for j in range(m)]
        refl.append(tuple(tuple(cols[j][i] for j in range(m)) for i in range(m)))

    def mul(A, B):
        return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(m)) for j in range(m)) for i in range(m))

    seen = {ident: 1}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for r in refl:
                v = mul(r, w)
                if v not in seen:
                    seen[v] = -seen[w]
                    nxt.append(v)
        frontier = nxt
        if len(seen) > 100000:
            raise LieError("Weyl group too large")
    mats = tuple(seen)
    return mats, tuple(seen[w] for w in mats)


def build_root_system(type_or_name: str, rank: int | None = None) -> RootSystemData:
    """``build_root_system("A", 2)`` or ``build_root_system("B2")``."""
    if rank is None:
        typ, rank = type_or_name[0].upper(), int(type_or_name[1:])
    else:
        typ = type_or_name.upper()
    m, simple, pos, fund, center, dimG = _classical_data(typ, rank)
    rho = tuple(sum(col) / 2 for col in zip(*pos))
    # Killing-dual scale: <mu,mu>_K = sum_{roots} <alpha,mu>_K^2  =>  s = |mu|^2 / sum (alpha.mu)^2
    probe = rho
    s = _dot(probe, probe) / (2 * sum(_dot(a, probe) ** 2 for a in pos))
    weyl, signs = _weyl_group(simple, m)
    # generic direction in the Cartan subspace: orthogonal to no root
    raw = np.array([math.sqrt(p) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)[:m]])
    if typ == "A":
        raw = raw - raw.mean()
    raw = raw / np.linalg.norm(raw)
    return RootSystemData(typ, rank, m, tuple(map(tuple, simple)), tuple(map(tuple, pos)), tuple(map(tuple, fund)),
                          rho, s, weyl, signs, center, dimG, tuple(raw))


@dataclass(frozen=True)
class DominantWeight:
    labels: tuple[int, ...]
    coordinates: tuple[Fraction, ...]
    casimir: Fraction
    dimension: int

    @classmethod
    def make(cls, rs: RootSystemData, labels: Sequence[int]) -> "DominantWeight":
        labels = tuple(int(a) for a in labels)
        if len(labels) != rs.rank:
            raise LieError("wrong number of Dynkin labels")
        if any(a < 0 for a in labels):
            raise LieError(f"weight {labels} is not dominant")
        mu = rs.weight(labels)
        return cls(labels, mu, _casimir_of(rs, mu), _dimension_of(rs, mu))


def _as_coords(rs, lam):
    """Dynkin labels or a DominantWeight -> ambient coordinates."""
    if isinstance(lam, DominantWeight):
        return lam.coordinates
    lam = tuple(lam)
    if len(lam) != rs.rank:
        raise LieError(f"expected {rs.rank} Dynkin labels, got {len(lam)}")
    return rs.weight(lam)


def weyl_dimension(rs: RootSystemData, lam) -> int:
    """prod_{alpha>0} <lam+rho, alpha>/<rho, alpha>, exactly (lam as Dynkin labels)."""
    return _dimension_of(rs, _as_coords(rs, lam))


def _dimension_of(rs, mu) -> int:
    if any(_dot(mu, a) < 0 for a in rs.positive_roots):
        raise LieError("weight is not dominant")
    shifted = tuple(x + r for x, r in zip(mu, rs.rho))
    d = Fraction(1)
    for a in rs.positive_roots:
        d *= _dot(shifted, a) / _dot(rs.rho, a)
    if d.denominator != 1:
        raise LieError(f"non-integral Weyl dimension {d}")
    return int(d)


def casimir(rs: RootSystemData, lam) -> Fraction:
    """|lam + rho|^2 - |rho|^2 in the Killing-dual metric (lam as Dynkin labels)."""
    return _casimir_of(rs, _as_coords(rs, lam))


def _casimir_of(rs, mu) -> Fraction:
    shifted = tuple(x + r for x, r in zip(mu, rs.rho))
    return rs.inner(shifted, shifted) - rs.inner(rs.rho, rs.rho)


def enumerate_weights(rs: RootSystemData, casimir_cutoff) -> list[DominantWeight]:
    """All dominant weights with casimir <= cutoff (exact comparison)."""
    labels = _enumerate_labels(rs, casimir_cutoff)
    return [DominantWeight.make(rs, a) for a in labels]


def _enumerate_labels(rs: RootSystemData, cutoff) -> list[tuple[int, ...]]:
    cutoff = Fraction(cutoff) if not isinstance(cutoff, float) else Fraction(cutoff).limit_denominator(10**12)
    # Gram of fundamental weights and their pairing with rho (floats are enough for the search;
    # the final test is exact)
    W = np.array([[float(x) for x in w] for w in rs.fundamental_weights])
    s = float(rs.killing_scale)
    gram = s * W @ W.T
    rho_w = s * W @ rs.rho_array
    out = []
    r = rs.rank
    cut = float(cutoff) * (1 + 1e-12) + 1e-12

    def cas(a):
        a = np.asarray(a, dtype=float)
        return float(a @ gram @ a + 2 * a @ rho_w)

    def rec(prefix):
        i = len(prefix)
        if i == r:
            out.append(tuple(prefix))
            return
        a = 0
        while True:
            trial = prefix + [a] + [0] * (r - i - 1)
            if cas(trial) > cut:
                break
            rec(prefix + [a])
            a += 1

    rec([])
    return [a for a in out if casimir(rs, a) <= cutoff]


@dataclass
class WeightTable:
    """Float arrays over dominant weights with casimir <= cutoff (for fast sums)."""

    labels: np.ndarray  # (M, rank) ints
    shifted: np.ndarray  # (M, ambient) coordinates of lam + rho
    casimir: np.ndarray
    dim: np.ndarray
    cutoff: float


def weight_table(rs: RootSystemData, cutoff: float) -> WeightTable:
    if rs.rank == 1:
        # closed form along the single ray; avoids the generic search for huge cutoffs
        s = float(rs.inner(rs.fundamental_weights[0], rs.fundamental_weights[0]))
        rho_w = float(rs.inner(rs.fundamental_weights[0], rs.rho))
        nmax = int(math.floor((-2 * rho_w + math.sqrt(4 * rho_w**2 + 4 * s * cutoff)) / (2 * s))) + 1
        n = np.arange(nmax + 1)
        cas = s * n**2 + 2 * rho_w * n
        keep = cas <= cutoff * (1 + 1e-14)
        labels = n[keep][:, None]
    else:
        labels = np.array(_enumerate_labels(rs, cutoff), dtype=int).reshape(-1, rs.rank)
    W = np.array([[float(x) for x in w] for w in rs.fundamental_weights])
    shifted = labels @ W + rs.rho_array
    s = float(rs.killing_scale)
    cas = s * (np.sum(shifted**2, axis=1) - rs.rho_array @ rs.rho_array)
    pos = rs.positive_array
    dim = np.prod((shifted @ pos.T) / (rs.rho_array @ pos.T), axis=1)
    return WeightTable(labels, shifted, cas, np.rint(dim), float(cutoff))


# ---------------------------------------------------------------------------
# torus elements and characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusElement:
    """exp(C) for C in the Cartan algebra (ambient coordinates)."""

    C: tuple[float, ...]

    @classmethod
    def from_alcove(cls, rs: RootSystemData, coords: Sequence[float]) -> "TorusElement":
        """C = 2 pi sum_i a_i omega_i^vee; the fundamental alcove is a_i >= 0, sum m_i a_i <= 1."""
        if len(coords) != rs.rank:
            raise LieError("need one alcove coordinate per simple root")
        cw = np.array(rs.fundamental_coweights())
        return cls(tuple(2 * math.pi * np.asarray(coords, float) @ cw))

    @classmethod
    def from_angle(cls, rs: RootSystemData, theta: float) -> "TorusElement":
        """Rank one: alpha(C) = 2 theta, i.e. diag(e^{i theta}, e^{-i theta}) in SU(2)."""
        if rs.rank != 1:
            raise LieError("from_angle is for rank one")
        return cls.from_alcove(rs, [theta / math.pi])

    def array(self) -> np.ndarray:
        return np.asarray(self.C, dtype=float)

    def shifted(self, direction: Sequence[float], eps: float) -> "TorusElement":
        return TorusElement(tuple(self.array() + eps * np.asarray(direction, float)))

    def root_angles(self, rs: RootSystemData) -> np.ndarray:
        if len(self.C) != rs.ambient_dim:
            raise LieError(f"{rs.name} needs {rs.ambient_dim} ambient coordinates, got {len(self.C)}")
        return rs.positive_array @ self.array()

    def is_central(self, rs: RootSystemData, tol: float = 1e-12) -> bool:
        a = self.root_angles(rs) / (2 * math.pi)
        return bool(np.all(np.abs(a - np.rint(a)) < tol))

    def is_regular(self, rs: RootSystemData, tol: float = 1e-12) -> bool:
        a = self.root_angles(rs) / (2 * math.pi)
        return bool(np.all(np.abs(a - np.rint(a)) > tol))


def weyl_denominator(rs: RootSystemData, c: TorusElement) -> complex:
    """j(c) = prod_{alpha>0} (e^{i alpha(C)/2} - e^{-i alpha(C)/2})."""
    ang = c.root_angles(rs)
    return complex(np.prod(2j * np.sin(ang / 2)))


def _numerators(rs: RootSystemData, shifted: np.ndarray, C: np.ndarray) -> np.ndarray:
    """sum_w sign(w) e^{i <w(lam+rho), C>} for each row of ``shifted``."""
    # <w mu, C> = <mu, w^T C>
    wc = rs.weyl_matrices.transpose(0, 2, 1) @ C  # (|W|, ambient)
    phases = shifted @ wc.T  # (M, |W|)
    signs = np.array(rs.weyl_signs, dtype=float)
    return np.exp(1j * phases) @ signs


def richardson(values: Sequence, hs: Sequence[float], power: int = 1) -> tuple[complex | float, float]:
    """Neville extrapolation of f(h) to h = 0 assuming an expansion in h**power.

    Returns (estimate, difference between the last two tableau entries).
    """
    x = np.asarray(hs, float) ** power
    P = [np.asarray(v) for v in values]
    n = len(P)
    if n == 1:
        return P[0], float("inf")
    prev_last = None
    T = list(P)
    for k in range(1, n):
        T = [(x[i] * T[i + 1] - x[i + k] * T[i]) / (x[i] - x[i + k]) for i in range(n - k)]
        if k == n - 2:
            prev_last = T[-1]
    est = T[0]
    err = float(np.max(np.abs(np.asarray(est) - np.asarray(prev_last)))) if prev_last is not None else float("inf")
    return est, err


def characters(rs: RootSystemData, table: WeightTable, c: TorusElement, eps0: float = 0.05, levels: int = 6,
               direction: Sequence[float] | None = None) -> np.ndarray:
    """chi_lam(c) for every row of ``table``; singular c by perturbation + Richardson."""
    C = c.array()
    if c.is_regular(rs, 1e-9):
        return _numerators(rs, table.shifted, C) / weyl_denominator(rs, c)
    if c.is_central(rs, 1e-12):
        # a central element acts by the scalar e^{i lam(C)}
        lam = table.shifted - rs.rho_array
        return table.dim * np.exp(1j * (lam @ C))
    xi = np.asarray(direction if direction is not None else rs.generic_direction, float)
    hs = [eps0 / 2**k for k in range(levels)]
    vals = []
    for h in hs:
        ch = c.shifted(xi, h)
        vals.append(_numerators(rs, table.shifted, ch.array()) / weyl_denominator(rs, ch))
    est, _ = richardson(vals, hs, power=1)
    return est


def weyl_character(rs: RootSystemData, lam, c: TorusElement, tol: float = 1e-9) -> complex:
    """chi_lam(exp C) by the Weyl character formula."""
    mu = _as_coords(rs, lam)
    if any(_dot(mu, a) < 0 for a in rs.positive_roots):
        raise LieError("weight is not dominant")
    shifted = np.array([[float(x + r) for x, r in zip(mu, rs.rho)]])
    table = WeightTable(np.zeros((1, rs.rank), int), shifted, np.zeros(1), np.ones(1), 0.0)
    if c.is_regular(rs, 1e-9) or c.is_central(rs, 1e-12):
        table.dim[0] = _dimension_of(rs, mu)
        return complex(characters(rs, table, c)[0])
    # two independent perturbation schedules must agree
    a = complex(characters(rs, table, c, eps0=0.05)[0])
    b = complex(characters(rs, table, c, eps0=0.035)[0])
    scale = max(1.0, abs(a))
    if abs(a - b) > tol * scale * 10:
        raise LieError(f"singular character did not converge ({abs(a - b):.2e})")
    return a


# ---------------------------------------------------------------------------
# group constants and heat kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupConstants:
    volume: float  # |G|
    torus_volume: float  # |T|
    flag_volume: float  # |G/T|
    center_order: int
    dim: int

    def centralizer_volume(self, rs: RootSystemData, c: TorusElement) -> float:
        if c.is_central(rs):
            return self.volume
        if c.is_regular(rs):
            return self.torus_volume
        raise LieError("holonomy is neither regular nor central")

    def orbit_volume(self, rs: RootSystemData, c: TorusElement) -> float:
        """Riemannian volume of the conjugacy class O_c = |G/T| |j(c)|^2 (regular c)."""
        if c.is_central(rs):
            return 0.0
        if not c.is_regular(rs):
            raise LieError("holonomy is neither regular nor central")
        return self.flag_volume * abs(weyl_denominator(rs, c)) ** 2


def group_constants(rs: RootSystemData) -> GroupConstants:
    s = rs.killing_scale
    co = rs.coroots()
    gram = np.array([[float(_dot(a, b) / s) for b in co] for a in co])
    torus = (2 * math.pi) ** rs.rank * math.sqrt(np.linalg.det(gram))
    flag = 1.0
    for a in rs.positive_roots:
        flag *= 2 * math.pi / float(rs.inner(a, rs.rho))
    return GroupConstants(torus * flag, torus, flag, rs.center_order, rs.dim_G)


@dataclass
class HeatKernelValue:
    value: float
    tail_bound: float
    cutoff: float
    n_weights: int
    converged: bool = True


def heat_kernel_cutoff(t: float, tol: float = 1e-14) -> float:
    """Casimir cutoff after which e^{-t p} drops below ``tol`` (polynomial growth is
    covered by the computed tail shell)."""
    return (math.log(1 / tol) + 10.0) / t


def heat_kernel(rs: RootSystemData, t: float, g: TorusElement, cutoff: float | None = None,
                tol: float = 1e-12, strict: bool = True) -> HeatKernelValue:
    """H(t, x, y) = 1/|G| sum_lam d_lam chi_lam(x y^-1) e^{-t p(lam)} with g = x y^-1.

    The tail bound is the absolute sum over the next shell of weights
    (cutoff, cutoff + 40/t], bounding |chi| by d.  Without an explicit cutoff
    it is grown until the bound meets ``tol``.  With ``strict=False`` an
    insufficient cutoff returns the partial sum flagged ``converged=False``.
    """
    if t <= 0:
        raise LieError("t must be positive")
    fixed = cutoff is not None
    if cutoff is None:
        cutoff = heat_kernel_cutoff(t, tol)
    consts = group_constants(rs)
    for _ in range(8):
        ext = weight_table(rs, cutoff + 40.0 / t)
        inside = ext.casimir <= cutoff
        table = WeightTable(ext.labels[inside], ext.shifted[inside], ext.casimir[inside], ext.dim[inside], cutoff)
        chi = characters(rs, table, g)
        terms = table.dim * chi * np.exp(-t * table.casimir)
        value = math.fsum(terms.real) / consts.volume
        tail = math.fsum((ext.dim[~inside] ** 2) * np.exp(-t * ext.casimir[~inside])) / consts.volume
        if tail <= tol * max(1.0, abs(value)):
            return HeatKernelValue(value, tail, cutoff, len(table.casimir))
        if fixed:
            break
        cutoff += 10.0 / t
    if strict:
        raise LieError(f"cutoff {cutoff} insufficient: tail bound {tail:.2e}")
    return HeatKernelValue(value, tail, cutoff, len(table.casimir), converged=False)


# ---------------------------------------------------------------------------
# SU(2) quadrature (A1)
# ---------------------------------------------------------------------------


def su2_heat_kernel(t: float, half_trace: np.ndarray, cutoff: float | None = None, tol: float = 1e-12):
    """H(t, x, y) for A1 as a function of cos(theta) = tr(x y^-1)/2, vectorized.

    Uses chi_{m-1} = U_{m-1}(cos theta).  Returns (values, tail_bound).
    """
    rs = build_root_system("A", 1)
    if t <= 0:
        raise LieError("t must be positive")
    if cutoff is None:
        cutoff = heat_kernel_cutoff(t, tol)
    vol = group_constants(rs).volume
    mmax = int(math.floor(math.sqrt(8 * cutoff + 1)))  # p = (m^2 - 1)/8 <= cutoff
    m_shell = np.arange(mmax + 1, int(math.sqrt(8 * (cutoff + 40 / t) + 1)) + 1)
    tail = math.fsum(m_shell**2 * np.exp(-t * (m_shell**2 - 1) / 8)) / vol
    x = np.clip(np.asarray(half_trace, float), -1.0, 1.0)
    u_prev, u_cur = np.zeros_like(x), np.ones_like(x)
    acc = np.ones_like(x)  # m = 1 term: d = 1, p = 0
    for m in range(2, mmax + 1):
        u_prev, u_cur = u_cur, 2 * x * u_cur - u_prev
        acc = acc + m * u_cur * math.exp(-t * (m * m - 1) / 8)
    return acc / vol, tail


def su2_class_integral(f, nodes: int = 512) -> float:
    """int_G f over SU(2) (Killing volume) for a class function f(theta).

    Weyl integration: |G| (2/pi) int_0^pi f(theta) sin^2(theta) dtheta, by the
    trapezoid rule, which is exact for trigonometric polynomials of degree < 2*nodes.
    """
    vol = group_constants(build_root_system("A", 1)).volume
    theta = np.pi * np.arange(nodes) / nodes
    vals = np.asarray(f(theta), float) * np.sin(theta) ** 2
    return vol * (2 / np.pi) * (np.pi / nodes) * math.fsum(vals)


def su2_torus_integral(F, nodes_eta: int = 96, nodes_xi: int = 192) -> float:
    """int_G F(z) dz when F depends on z only through (cos eta, xi1) in Hopf coordinates
    z = [[cos eta e^{i xi1}, sin eta e^{i xi2}], [-sin eta e^{-i xi2}, cos eta e^{-i xi1}]].

    The measure is |G| / (2 pi^2) * sin eta cos eta d eta d xi1 d xi2; with u = cos eta it
    becomes u du, integrated by Gauss-Legendre in u and the trapezoid rule in xi1.
    """
    vol = group_constants(build_root_system("A", 1)).volume
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes_eta)
    u = 0.5 * (gl_x + 1)
    wu = 0.5 * gl_w * u
    xi = 2 * np.pi * np.arange(nodes_xi) / nodes_xi
    U, X = np.meshgrid(u, xi, indexing="ij")
    vals = np.asarray(F(U, X), float)
    inner = (2 * np.pi / nodes_xi) * vals.sum(axis=1)
    # (1/(2 pi^2)) * 2 pi (xi2) = 1/pi
    return vol / np.pi * math.fsum(wu * inner)

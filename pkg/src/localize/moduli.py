"""Volumes and intersection numbers of moduli of flat connections on a surface.

Every infinite weight sum is kept at t > 0 (Gaussian/Abel damping) and then
extrapolated to t -> 0 with Neville/Richardson on a decreasing t-grid.  Limits
c -> u toward a central element are taken along the ray c = u exp(eps * xi),
xi = ``rs.generic_direction``, extrapolating eps -> 0 after t -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .liegroups import (
    LieError,
    RootSystemData,
    TorusElement,
    WeightTable,
    characters,
    group_constants,
    richardson,
    su2_heat_kernel,
    weight_table,
    weyl_denominator,
)

__all__ = [
    "ModuliError",
    "Insertion",
    "ModuliQuery",
    "RegularizedSum",
    "FitPiece",
    "MonteCarloResult",
    "moduli_dimension",
    "character_sum",
    "volume_prefactor",
    "volume_series",
    "volume",
    "intersection_prefactor",
    "intersection_number",
    "multi_boundary_sum",
    "derivative_insertion",
    "volume_along_line",
    "piecewise_poly_fit",
    "holonomy_integral_exact",
    "holonomy_integral_mc",
]

TAIL_TOL = 1e-13


class ModuliError(ValueError):
    pass


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Insertion:
    """Polynomial in the Dynkin-label coordinates x_1..x_r of lam + rho.

    For A1 the single coordinate is m = n + 1 = d_lam.
    """

    terms: Mapping[tuple[int, ...], float]
    rank: int

    @classmethod
    def one(cls, rank: int) -> "Insertion":
        return cls({(0,) * rank: 1.0}, rank)

    @classmethod
    def parse(cls, text: str, rank: int) -> "Insertion":
        """Parse e.g. ``"x^4"`` (rank one), ``"x1**2 + 3*x1*x2"``."""
        import sympy

        names = [f"x{i + 1}" for i in range(rank)]
        syms = sympy.symbols(names)
        local = dict(zip(names, syms))
        if rank == 1:
            local["x"] = syms[0]
        try:
            expr = sympy.sympify(str(text).replace("^", "**"), locals=local)
            poly = sympy.Poly(expr, *syms)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise ModuliError(f"cannot parse insertion polynomial {text!r}: {exc}") from exc
        extra = expr.free_symbols - set(syms)
        if extra:
            raise ModuliError(f"unknown variables in insertion: {sorted(map(str, extra))}")
        return cls({tuple(int(e) for e in mono): float(c) for mono, c in poly.terms() if c != 0}, rank)

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not any(self.terms.values())

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, float).reshape(-1, self.rank)
        out = np.zeros(len(x))
        for mono, c in self.terms.items():
            out += c * np.prod(x ** np.asarray(mono), axis=1)
        return out

    def __str__(self) -> str:
        parts = []
        for mono, c in sorted(self.terms.items()):
            vs = "*".join(f"x{i + 1}^{e}" for i, e in enumerate(mono) if e)
            parts.append(f"{c:g}" + (f"*{vs}" if vs else ""))
        return " + ".join(parts) or "0"


@dataclass
class ModuliQuery:
    rs: RootSystemData
    g: int
    holonomies: list[TorusElement]
    insertion: Insertion | None = None
    t_grid: Sequence[float] = (0.02, 0.01, 0.005, 0.0025)
    cutoff: float | None = None
    eps_grid: Sequence[float] = (0.4, 0.2, 0.1, 0.05, 0.025)
    tol: float = 1e-8
    # shrink the t-grid per eps so that t_0 <= d^2/40, d the half-angle distance to the nearest wall;
    # needed when the sum has a kink at u (e.g. A1 at u = 1), costly beyond rank one
    wall_adaptive_t: bool = False

    def __post_init__(self):
        if self.g < 2:
            raise ModuliError("genus must be >= 2")
        if not self.holonomies:
            raise ModuliError("need at least one boundary holonomy")
        ts = list(self.t_grid)
        if not ts or any(t <= 0 for t in ts) or any(a <= b for a, b in zip(ts, ts[1:])):
            raise ModuliError("t-grid must be positive and strictly decreasing")
        es = list(self.eps_grid)
        if not es or any(e <= 0 for e in es) or any(a <= b for a, b in zip(es, es[1:])):
            raise ModuliError("eps-grid must be positive and strictly decreasing")
        if self.insertion is None:
            self.insertion = Insertion.one(self.rs.rank)
        if self.insertion.rank != self.rs.rank:
            raise ModuliError("insertion polynomial rank differs from the group rank")


@dataclass
class RegularizedSum:
    partial_values: dict[float, complex | float]
    extrapolated_value: float | complex
    tail_bound: float
    converged: bool
    error_estimate: float = float("inf")
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex) or np.iscomplexobj(v):
                v = complex(v)
                return {"re": v.real, "im": v.imag}
            return float(v)

        return {
            "value": enc(self.extrapolated_value),
            "tail_bound": self.tail_bound,
            "converged": self.converged,
            "error_estimate": self.error_estimate,
            "partial_values": {repr(float(t)): enc(v) for t, v in self.partial_values.items()},
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# dimension and prefactors
# ---------------------------------------------------------------------------


def _classify(rs: RootSystemData, c: TorusElement) -> str:
    if c.is_central(rs):
        return "central"
    if c.is_regular(rs):
        return "regular"
    raise ModuliError("holonomy is neither regular nor central (intermediate strata unsupported)")


def moduli_dimension(rs: RootSystemData, g: int, holonomies: Sequence[TorusElement]) -> int:
    if g < 2:
        raise ModuliError("genus must be >= 2")
    total = (2 * g - 2) * rs.dim_G
    for c in holonomies:
        if _classify(rs, c) == "regular":
            total += rs.dim_G - rs.rank
    if total % 2:
        raise ModuliError("odd real dimension")
    return total // 2


def _centralizer_volume(rs, c) -> float:
    gc = group_constants(rs)
    return gc.volume if _classify(rs, c) == "central" else gc.torus_volume


def volume_prefactor(rs: RootSystemData, g: int, c: TorusElement) -> float:
    """|Z(G)| |G|^{2g-1} |j(c)| / ((2 pi)^{2N} |Z_c|) for one regular boundary."""
    if _classify(rs, c) != "regular":
        raise ModuliError("the volume formula needs a regular holonomy")
    gc = group_constants(rs)
    N = moduli_dimension(rs, g, [c])
    return (rs.center_order * gc.volume ** (2 * g - 1) * abs(weyl_denominator(rs, c))
            / ((2 * math.pi) ** (2 * N) * gc.torus_volume))


def intersection_prefactor(rs: RootSystemData, g: int) -> float:
    """|Z(G)| |G|^{2g-2} / (2 pi)^{2 N_u} for a central boundary holonomy."""
    gc = group_constants(rs)
    N = ((2 * g - 2) * rs.dim_G) // 2
    return rs.center_order * gc.volume ** (2 * g - 2) / (2 * math.pi) ** (2 * N)


# ---------------------------------------------------------------------------
# regularized weight sums
# ---------------------------------------------------------------------------


def _cutoff_for(t: float, degree: int) -> float:
    # e^{-t p} p^{degree/2} below TAIL_TOL: generous log allowance for polynomial growth
    return (math.log(1 / TAIL_TOL) + 3.0 * degree + 10.0) / t


def _damped_sum(rs: RootSystemData, t: float, term_fn: Callable[[WeightTable], np.ndarray],
                bound_fn: Callable[[WeightTable], np.ndarray], cutoff: float | None, degree: int):
    """sum over lam of term_fn(table) * e^{-t p}, plus a shell bound on the remainder.

    The remainder bound sums bound_fn * e^{-t p} over the shell (cutoff, cutoff + 40/t];
    beyond it the Gaussian factor is smaller by e^{-40}.
    """
    fixed = cutoff is not None
    if cutoff is None:
        cutoff = _cutoff_for(t, degree)
    for _ in range(8):
        ext = weight_table(rs, cutoff + 40.0 / t)
        inside = ext.casimir <= cutoff
        damp = np.exp(-t * ext.casimir)
        terms = term_fn(ext) * damp
        value = math.fsum(terms[inside].real) + 1j * math.fsum(np.imag(terms[inside]))
        tail = math.fsum(np.abs(bound_fn(ext)[~inside] * damp[~inside]))
        if tail <= TAIL_TOL * max(1.0, abs(value)) or fixed:
            return (value.real if value.imag == 0 else value), tail, cutoff
        cutoff += 10.0 / t
    return (value.real if value.imag == 0 else value), tail, cutoff


def _labels_rho(table: WeightTable) -> np.ndarray:
    return table.labels.astype(float) + 1.0


def character_sum(rs: RootSystemData, g: int, c: TorusElement, t: float, insertion: Insertion | None = None,
                  cutoff: float | None = None, power: int | None = None):
    """sum_lam chi_lam(c) p(lam+rho) / d^power e^{-t p_c(lam)}, power defaults to 2g-1.

    Returns (value, tail_bound, cutoff).
    """
    insertion = insertion or Insertion.one(rs.rank)
    power = 2 * g - 1 if power is None else power

    def term(tab):
        return characters(rs, tab, c) * insertion.evaluate(_labels_rho(tab)) / tab.dim ** power

    def bound(tab):
        return np.abs(insertion.evaluate(_labels_rho(tab))) / tab.dim ** (power - 1)

    return _damped_sum(rs, t, term, bound, cutoff, insertion.degree)


def _t_extrapolate(values: list, ts: Sequence[float]):
    if len(values) < 2:
        return values[-1], float("inf")
    est, err = richardson(values, ts, power=1)
    est = complex(est)
    return (est.real if abs(est.imag) <= 1e-15 * max(1, abs(est)) else est), err


def volume_series(q: ModuliQuery, t: float) -> tuple[float, float]:
    """Prefactor times the damped character sum at one value of t (one regular boundary)."""
    if len(q.holonomies) != 1:
        raise ModuliError("volume_series takes exactly one boundary holonomy")
    c = q.holonomies[0]
    pref = volume_prefactor(q.rs, q.g, c)
    val, tail, _ = character_sum(q.rs, q.g, c, t, q.insertion, q.cutoff)
    return pref * complex(val).real, pref * tail


def volume(q: ModuliQuery) -> RegularizedSum:
    vals, tails = {}, []
    for t in q.t_grid:
        v, tl = volume_series(q, t)
        vals[t] = v
        tails.append(tl)
    est, err = _t_extrapolate(list(vals.values()), list(vals))
    scale = max(1.0, abs(est))
    converged = len(vals) >= 2 and err <= q.tol * scale and max(tails) <= q.tol * scale
    return RegularizedSum(vals, float(np.real(est)), max(tails), converged, err,
                          {"prefactor": volume_prefactor(q.rs, q.g, q.holonomies[0])})


def _wall_scaled_grid(q: ModuliQuery, c: TorusElement) -> list[float]:
    if not q.wall_adaptive_t:
        return list(q.t_grid)
    a = c.root_angles(q.rs) / (2 * math.pi)
    d = float(np.min(np.abs(a - np.rint(a)))) * math.pi
    factor = min(1.0, d**2 / 40 / q.t_grid[0])
    return [t * factor for t in q.t_grid]


def _inner_t_limit(q: ModuliQuery, c: TorusElement, power: int, extra=None, ts=None):
    ts = list(q.t_grid) if ts is None else ts
    vals, tails = [], []
    for t in ts:
        if extra is None:
            v, tl, _ = character_sum(q.rs, q.g, c, t, q.insertion, q.cutoff, power)
        else:
            v, tl, _ = extra(t)
        vals.append(v)
        tails.append(tl)
    est, err = _t_extrapolate(vals, ts)
    return est, err, max(tails), vals


def intersection_number(q: ModuliQuery) -> RegularizedSum:
    """Central boundary u: prefactor * lim_{c->u} lim_{t->0} of the character sum.

    ``diagnostics['inner_limit']`` holds the double limit before the prefactor;
    ``diagnostics['reverse_order_deviation']`` compares with evaluating at c = u first.
    """
    if len(q.holonomies) != 1:
        raise ModuliError("intersection_number takes exactly one boundary holonomy")
    rs, u = q.rs, q.holonomies[0]
    if _classify(rs, u) != "central":
        raise ModuliError("intersection_number needs a central holonomy u")
    xi = np.asarray(rs.generic_direction)
    power = 2 * q.g - 1
    per_eps, t_errs, tails = {}, [], []
    first_partials = None
    for eps in q.eps_grid:
        c = u.shifted(xi, eps)
        ts = _wall_scaled_grid(q, c)
        est, err, tail, partials = _inner_t_limit(q, c, power, ts=ts)
        per_eps[eps] = est
        t_errs.append(err)
        tails.append(tail)
        if first_partials is None:
            first_partials = dict(zip(ts, partials))
    if len(per_eps) >= 2:
        inner, eps_err = richardson(list(per_eps.values()), list(per_eps), power=1)
        inner = complex(inner)
    else:
        inner, eps_err = complex(next(iter(per_eps.values()))), float("inf")
    # reverse order: c = u exactly, then t -> 0
    rev, rev_err, _, _ = _inner_t_limit(q, u, power)
    pref = intersection_prefactor(rs, q.g)
    scale = max(1.0, abs(inner))
    converged = (len(q.t_grid) >= 2 and len(per_eps) >= 2 and max(t_errs) <= q.tol * scale * 10
                 and eps_err <= q.tol * scale * 10 and max(tails) <= q.tol * scale)
    inner_real = inner.real if abs(inner.imag) <= q.tol * scale else inner
    value = pref * inner_real
    return RegularizedSum(
        {eps: v for eps, v in per_eps.items()}, value, pref * max(tails), converged, pref * max(eps_err, max(t_errs)),
        {
            "inner_limit": _jsonable(inner_real),
            "prefactor": pref,
            "eps_error": eps_err,
            "t_error": max(t_errs),
            "reverse_order_value": _jsonable(rev),
            "reverse_order_deviation": abs(complex(rev) - inner),
            "limit_direction": list(map(float, xi)),
            "first_eps_t_partials": {repr(t): _jsonable(v) for t, v in first_partials.items()},
        },
    )


def _jsonable(v):
    v = complex(v)
    return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}


def multi_boundary_sum(q: ModuliQuery) -> RegularizedSum:
    """Multi-boundary formula taken literally: complex prod j(c_j) in the prefactor,
    prod chi_lam(c_j) / d^{2g-2+s} in the sum, t -> 0 by Richardson."""
    rs, hol = q.rs, q.holonomies
    s = len(hol)
    power = 2 * q.g - 2 + s
    gc = group_constants(rs)
    N = moduli_dimension(rs, q.g, hol)
    jprod = complex(np.prod([weyl_denominator(rs, c) for c in hol]))
    zprod = float(np.prod([_centralizer_volume(rs, c) for c in hol]))
    pref = rs.center_order * gc.volume ** power * jprod / ((2 * math.pi) ** (2 * N) * zprod)

    def at(t):
        def term(tab):
            out = q.insertion.evaluate(_labels_rho(tab)) / tab.dim ** power
            for c in hol:
                out = out * characters(rs, tab, c)
            return out

        def bound(tab):
            return np.abs(q.insertion.evaluate(_labels_rho(tab))) * tab.dim ** (s - power)

        return _damped_sum(rs, t, term, bound, q.cutoff, q.insertion.degree)

    est, err, tail, vals = _inner_t_limit(q, hol[0], power, extra=at)
    est = complex(est)
    scale = max(1.0, abs(est))
    converged = len(q.t_grid) >= 2 and err <= q.tol * scale and tail <= q.tol * scale
    return RegularizedSum(dict(zip(q.t_grid, [pref * v for v in vals])), pref * est, abs(pref) * tail, converged,
                          abs(pref) * err, {"prefactor": _jsonable(pref), "inner_limit": _jsonable(est)})


# ---------------------------------------------------------------------------
# derivatives in C
# ---------------------------------------------------------------------------


def _numerator_derivative(rs, tab: WeightTable, C: np.ndarray, xi: np.ndarray, k: int) -> np.ndarray:
    """d^k/de^k at e=0 of sum_w sign(w) e^{i <w(lam+rho), C + e xi>}, exactly."""
    wc = rs.weyl_matrices.transpose(0, 2, 1)
    phases = tab.shifted @ (wc @ C).T
    slopes = tab.shifted @ (wc @ xi).T
    signs = np.array(rs.weyl_signs, float)
    return ((1j * slopes) ** k * np.exp(1j * phases)) @ signs


def _a1_character_derivative_symbolic(theta0: float, k: int, m: np.ndarray) -> np.ndarray:
    """k-th derivative in s at s=0 of sin(m(theta0+s))/sin(theta0+s), A1, via sympy."""
    import sympy

    s, M = sympy.symbols("s m")
    r = round(theta0 / math.pi)
    if abs(theta0 - r * math.pi) < 1e-12:
        # sin(m(r pi + s))/sin(r pi + s) = (-1)^{r(m+1)} sin(m s)/sin s
        ser = sympy.series(sympy.sin(M * s) / sympy.sin(s), s, 0, k + 1).removeO()
        coeff = sympy.expand(ser).coeff(s, k) * sympy.factorial(k)
        f = sympy.lambdify(M, coeff, "numpy")
        return np.asarray(f(m), float) * ((-1.0) ** (r * (m + 1))) * np.ones_like(m, float)
    expr = sympy.diff(sympy.sin(M * (theta0 + s)) / sympy.sin(theta0 + s), s, k).subs(s, 0)
    f = sympy.lambdify(M, expr, "numpy")
    return np.asarray(f(m), float) * np.ones_like(m, float)


def derivative_insertion(q: ModuliQuery, direction: Sequence[float] | None, k: int, form: str = "character",
                         method: str = "both", h0: float = 0.2, levels: int = 5) -> RegularizedSum:
    """k-th derivative along ``direction`` of the damped sum at c = holonomy, then t -> 0.

    ``form="character"`` differentiates sum chi_lam(c) p / d^{2g-1};
    ``form="numerator"`` differentiates sum j(c) chi_lam(c) p / d^{2g-1}, which is smooth.
    ``method`` is "numeric" (central differences + Richardson in h^2), "symbolic"
    (exact numerator derivative; sympy series for A1 characters) or "both",
    which also reports and checks their disagreement.
    """
    if k < 1:
        raise ModuliError("derivative order must be >= 1")
    if form not in ("character", "numerator"):
        raise ModuliError(f"unknown form {form!r}")
    if method not in ("numeric", "symbolic", "both"):
        raise ModuliError(f"unknown method {method!r}")
    rs, c0 = q.rs, q.holonomies[0]
    xi = np.asarray(direction if direction is not None else rs.generic_direction, float)
    power = 2 * q.g - 1
    if method != "numeric" and form == "character" and rs.rank != 1:
        raise ModuliError("symbolic character derivatives are implemented for rank one only")

    def weights(tab):
        return q.insertion.evaluate(_labels_rho(tab)) / tab.dim ** power

    def f_at(tab, eps):
        c = c0.shifted(xi, eps)
        if form == "character":
            return characters(rs, tab, c)
        return characters(rs, tab, c) * weyl_denominator(rs, c)

    def numeric(tab):
        hs = [h0 / 2**i for i in range(levels)]
        est_levels = []
        for h in hs:
            acc = 0
            for j in range(k + 1):
                acc = acc + (-1) ** j * math.comb(k, j) * f_at(tab, (k / 2 - j) * h)
            est_levels.append(acc / h**k)
        est, _ = richardson(est_levels, hs, power=2)
        return est

    def symbolic(tab):
        if form == "numerator":
            return _numerator_derivative(rs, tab, c0.array(), xi, k)
        theta0 = float(c0.array()[0])
        speed = float(xi[0])  # theta moves at rate xi_1 along the direction
        m = tab.labels[:, 0] + 1
        return _a1_character_derivative_symbolic(theta0, k, m) * speed**k

    def bound(tab):
        slope = np.linalg.norm(tab.shifted, axis=1) * np.linalg.norm(xi)
        return np.abs(weights(tab)) * tab.dim * (1 + slope) ** (k + 1)

    results = {}
    for meth in (("numeric", "symbolic") if method == "both" else (method,)):
        fn = numeric if meth == "numeric" else symbolic
        vals, tails = [], []
        for t in q.t_grid:
            v, tl, _ = _damped_sum(rs, t, lambda tab, fn=fn: fn(tab) * weights(tab), bound, q.cutoff,
                                   q.insertion.degree + 2 * k)
            vals.append(v)
            tails.append(tl)
        est, err = _t_extrapolate(vals, q.t_grid)
        results[meth] = (est, err, max(tails), vals)
    primary = "symbolic" if "symbolic" in results else "numeric"
    est, err, tail, vals = results[primary]
    diag = {"form": form, "method": method, "direction": list(map(float, xi))}
    scale = max(1.0, abs(complex(est)))
    ok = len(q.t_grid) >= 2 and err <= q.tol * scale * 10 and tail <= q.tol * scale
    if method == "both":
        dev = abs(complex(results["numeric"][0]) - complex(results["symbolic"][0]))
        diag["numeric_value"] = _jsonable(results["numeric"][0])
        diag["symbolic_value"] = _jsonable(results["symbolic"][0])
        diag["disagreement"] = dev
        if dev > 1e-6 * scale:
            raise ModuliError(f"symbolic and numeric derivatives disagree by {dev:.3e}")
    return RegularizedSum(dict(zip(q.t_grid, vals)), est, tail, ok, err, diag)


# ---------------------------------------------------------------------------
# piecewise polynomiality
# ---------------------------------------------------------------------------


@dataclass
class FitPiece:
    interval: tuple[float, float]
    coefficients: np.ndarray  # highest degree first (numpy.polyval order)
    degree: int
    residual: float
    n_points: int

    def __call__(self, x):
        return np.polyval(self.coefficients, x)


def _line_element(rs, direction, theta) -> TorusElement:
    return TorusElement(tuple(theta * np.asarray(direction, float)))


def _default_direction(rs) -> np.ndarray:
    if rs.rank == 1:
        # theta parametrizes diag(e^{i theta}, e^{-i theta}) for A1
        return np.asarray(TorusElement.from_angle(rs, 1.0).C)
    return np.asarray(rs.generic_direction)


def _wall_distance(rs, direction, theta) -> float:
    """Distance (in theta) from exp(theta * direction) to the nearest wall alpha(C) in 2 pi Z."""
    rates = rs.positive_array @ np.asarray(direction, float)
    best = float("inf")
    for r in rates:
        if abs(r) < 1e-14:
            return 0.0
        a = theta * r / (2 * math.pi)
        best = min(best, abs(a - round(a)) * 2 * math.pi / abs(r))
    return best


def volume_along_line(rs: RootSystemData, g: int, thetas: Sequence[float], direction=None,
                      t_grid: Sequence[float] | None = None, insertion: Insertion | None = None):
    """Volume of M_c at c = exp(theta * direction), each extrapolated t -> 0.

    The default t-grid keeps the Gaussian smoothing width well inside the
    distance to the nearest wall: t_max = d_min^2 / 40.
    Returns (values, errors).
    """
    direction = _default_direction(rs) if direction is None else np.asarray(direction, float)
    thetas = np.asarray(thetas, float)
    dmin = min(_wall_distance(rs, direction, th) for th in thetas)
    if dmin < 1e-6:
        raise ModuliError("theta-grid touches a wall")
    if t_grid is None:
        t0 = min(0.02, dmin**2 / 40)
        t_grid = [t0, t0 / 2, t0 / 4]
    insertion = insertion or Insertion.one(rs.rank)
    vals, errs = np.empty(len(thetas)), np.empty(len(thetas))
    # one weight table per t shared across the grid
    tables = {t: weight_table(rs, _cutoff_for(t, insertion.degree)) for t in t_grid}
    for i, th in enumerate(thetas):
        c = _line_element(rs, direction, th)
        pref = volume_prefactor(rs, g, c)
        series = []
        for t in t_grid:
            tab = tables[t]
            terms = characters(rs, tab, c) * insertion.evaluate(_labels_rho(tab)) / tab.dim ** (2 * g - 1)
            terms = terms * np.exp(-t * tab.casimir)
            series.append(math.fsum(terms.real))
        est, err = richardson(series, t_grid, power=1)
        vals[i] = pref * float(np.real(est))
        errs[i] = pref * err
    return vals, errs


def _lsq(x, y, deg):
    coef = np.polyfit(x, y, deg)
    return coef, float(np.max(np.abs(np.polyval(coef, x) - y))) if len(x) else 0.0


def piecewise_poly_fit(rs: RootSystemData, g: int, thetas: Sequence[float] | None = None, values=None,
                       direction=None, degree_bound: int | None = None, tol: float = 1e-6,
                       jump_threshold: float = 1e-4, n_points: int = 200,
                       insertion: Insertion | None = None) -> list[FitPiece]:
    """Split the theta-grid into smooth pieces and fit each with the lowest degree <= bound.

    Pieces grow greedily; a new piece starts when adding a point pushes the
    degree-``degree_bound`` fit residual above ``jump_threshold`` times the
    largest |value|.  Raises if some piece cannot meet ``tol``.
    """
    D = 2 * g * rs.n_positive if degree_bound is None else degree_bound
    if thetas is None:
        if rs.rank != 1:
            raise ModuliError("give an explicit theta-grid for rank > 1")
        thetas = np.linspace(0.05, 2 * math.pi - 0.05, n_points)
    x = np.asarray(thetas, float)
    if values is None:
        values = volume_along_line(rs, g, x, direction, insertion=insertion)[0]
    y = np.asarray(values, float)
    scale = float(np.max(np.abs(y))) if len(y) else 0.0
    if scale == 0.0:
        return [FitPiece((float(x[0]), float(x[-1])), np.zeros(1), 0, 0.0, len(x))]
    jump = jump_threshold * scale
    cuts = [0]
    start = 0
    i = start + D + 2
    while i <= len(x):
        _, r = _lsq(x[start:i], y[start:i], D)
        if r > jump:
            cuts.append(i - 1)
            start = i - 1
            i = start + D + 2
            continue
        i += 1
    cuts.append(len(x))
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        xs, ys = x[a:b], y[a:b]
        for deg in range(0, min(D, len(xs) - 1) + 1):
            coef, r = _lsq(xs, ys, deg)
            if r < tol:
                break
        else:
            raise ModuliError(f"no polynomial of degree <= {D} fits [{xs[0]:.4f}, {xs[-1]:.4f}] (residual {r:.2e})")
        pieces.append(FitPiece((float(xs[0]), float(xs[-1])), coef, deg, r, len(xs)))
    return pieces


# ---------------------------------------------------------------------------
# Monte-Carlo holonomy integral (A1)
# ---------------------------------------------------------------------------


@dataclass
class MonteCarloResult:
    estimate: float
    standard_error: float
    samples: int
    seed: int
    exact: float | None = None

    @property
    def z_score(self) -> float | None:
        if self.exact is None or self.standard_error == 0:
            return None
        return (self.estimate - self.exact) / self.standard_error

    def as_dict(self) -> dict:
        return {"estimate": self.estimate, "standard_error": self.standard_error, "samples": self.samples,
                "seed": self.seed, "exact": self.exact, "z_score": self.z_score}


def _require_a1(rs):
    if (rs.type, rs.rank) != ("A", 1):
        raise ModuliError("the Monte-Carlo holonomy integral is implemented for A1 = SU(2)")


def holonomy_integral_exact(rs: RootSystemData, g: int, c: TorusElement, t: float, cutoff: float | None = None):
    """I(t) by orthogonality: |G|^{2g-1} vol(O_c) sum |chi(c)|^2 / d^{2g} e^{-t p}."""
    gc = group_constants(rs)
    vol_orbit = gc.orbit_volume(rs, c)

    def term(tab):
        return np.abs(characters(rs, tab, c)) ** 2 / tab.dim ** (2 * g)

    def bound(tab):
        return tab.dim ** (2 - 2 * g)

    val, tail, _ = _damped_sum(rs, t, term, bound, cutoff, 0)
    f = gc.volume ** (2 * g - 1) * vol_orbit
    return f * float(np.real(val)), f * tail


def _haar_su2(rng, n):
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    a = q[:, 0] + 1j * q[:, 1]
    b = q[:, 2] + 1j * q[:, 3]
    out = np.empty((n, 2, 2), complex)
    out[:, 0, 0], out[:, 0, 1] = a, -np.conj(b)
    out[:, 1, 0], out[:, 1, 1] = b, np.conj(a)
    return out


def _adjoint(m):
    return np.conj(np.swapaxes(m, -1, -2))


def holonomy_integral_mc(rs: RootSystemData, g: int, c: TorusElement, t: float, samples: int = 100_000,
                         seed: int = 0, chunk: int = 20_000) -> MonteCarloResult:
    """Monte-Carlo estimate of I(t) = int_{G^{2g} x O_c} H(t, c, f(h)) dh.

    Haar samples are normalized Gaussian quaternions; z = k c k^{-1} samples O_c.
    The estimate is |G|^{2g} vol(O_c) times the sample mean of H.
    """
    _require_a1(rs)
    if samples < 2:
        raise ModuliError("need at least two samples")
    gc = group_constants(rs)
    vol_orbit = gc.orbit_volume(rs, c)
    rng = np.random.default_rng(seed)
    C = c.array()
    cmat = np.diag(np.exp(1j * C))
    total = np.zeros(0)
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        prod = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
        for _ in range(g):
            x, y = _haar_su2(rng, n), _haar_su2(rng, n)
            prod = prod @ x @ y @ _adjoint(x) @ _adjoint(y)
        k = _haar_su2(rng, n)
        z = k @ cmat @ _adjoint(k)
        f = prod @ z
        w = cmat @ _adjoint(f)
        half_tr = np.clip(np.real(np.trace(w, axis1=1, axis2=2)) / 2, -1.0, 1.0)
        H, _ = su2_heat_kernel(t, half_tr)
        total = np.concatenate([total, H])
        done += n
    vol = gc.volume ** (2 * g) * vol_orbit
    est = vol * float(np.mean(total))
    se = vol * float(np.std(total, ddof=1)) / math.sqrt(samples)
    exact, _ = holonomy_integral_exact(rs, g, c, t)
    return MonteCarloResult(est, se, samples, seed, exact)

"""Exact coefficient arithmetic on truncated power series and graded polynomials.

Rationals are :class:`fractions.Fraction`.  Both container types below are
immutable, store only nonzero coefficients and accept any coefficient that
supports ``+``, ``-``, ``*`` and truthiness-as-nonzero, so series of
polynomials and series of series nest freely.

Mixed products follow one rule: an operand is treated as a *ring element*
only when it has the same kind and the same variable(s); anything else is a
scalar that multiplies every coefficient.  Callers that nest series must
therefore always write ``outer * inner``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _cartesian
from typing import Callable, Iterable, Mapping, Sequence

BigRational = Fraction

__all__ = [
    "BigRational",
    "SeriesError",
    "NotInvertibleError",
    "TruncatedSeries",
    "PolyRing",
    "GradedPolynomial",
    "invert_scalar",
    "solve_linear",
    "series_arith",
    "series_exp_log",
    "series_revert",
]


class SeriesError(ValueError):
    """A series/polynomial operation's precondition was violated."""


class NotInvertibleError(SeriesError, ZeroDivisionError):
    pass


def invert_scalar(c):
    """Multiplicative inverse of a coefficient (rational or ring element)."""
    if isinstance(c, (int, Fraction)):
        if c == 0:
            raise NotInvertibleError("zero is not invertible")
        return Fraction(1) / c
    inv = getattr(c, "inverse", None)
    if inv is None:
        raise NotInvertibleError(f"cannot invert {type(c).__name__}")
    return inv()


def _scale(c, r):
    return c * r if isinstance(c, (int, Fraction)) else c * Fraction(r)


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------


class TruncatedSeries:
    """Power series in one variable, exact below ``order``.

    ``TruncatedSeries({0: 1, 1: 1}, order=5, var="x")`` is ``1 + x + O(x^5)``.
    Binary operations keep the smaller of the two orders, so the recorded
    order is always the order up to which the result is exact.
    """

    __slots__ = ("var", "order", "_c")

    def __init__(self, coeffs: Mapping[int, object] | Sequence | None = None, order: int = 0, var: str = "x"):
        if order < 0:
            raise SeriesError("order must be non-negative")
        if coeffs is None:
            items: Iterable = ()
        elif isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        c = {}
        for e, v in items:
            if e < 0:
                raise SeriesError("negative exponent")
            if e < order and v:
                c[e] = Fraction(v) if isinstance(v, int) else v
        self.var = var
        self.order = order
        self._c = c

    # construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, c: dict, order: int, var: str) -> "TruncatedSeries":
        s = cls.__new__(cls)
        s.var, s.order, s._c = var, order, c
        return s

    @classmethod
    def gen(cls, order: int, var: str = "x") -> "TruncatedSeries":
        return cls({1: 1}, order, var)

    @classmethod
    def const(cls, value, order: int, var: str = "x") -> "TruncatedSeries":
        return cls({0: value}, order, var)

    @classmethod
    def from_function(cls, f: Callable[[int], object], order: int, var: str = "x") -> "TruncatedSeries":
        return cls({n: f(n) for n in range(order)}, order, var)

    # access ---------------------------------------------------------------
    def __getitem__(self, n: int):
        if n >= self.order:
            raise SeriesError(f"coefficient {self.var}^{n} is beyond the truncation order {self.order}")
        return self._c.get(n, Fraction(0))

    def coeff(self, n: int):
        return self[n]

    def items(self):
        return sorted(self._c.items())

    def coefficients(self) -> list:
        return [self[n] for n in range(self.order)]

    def valuation(self) -> int | None:
        return min(self._c) if self._c else None

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self.order)
        return TruncatedSeries._raw({e: v for e, v in self._c.items() if e < order}, order, self.var)

    def map_coefficients(self, f) -> "TruncatedSeries":
        return TruncatedSeries({e: f(v) for e, v in self._c.items()}, self.order, self.var)

    def _same(self, other) -> bool:
        return isinstance(other, TruncatedSeries) and other.var == self.var

    # ring operations -------------------------------------------------------
    def __neg__(self):
        return TruncatedSeries._raw({e: -v for e, v in self._c.items()}, self.order, self.var)

    def __add__(self, other):
        if self._same(other):
            order = min(self.order, other.order)
            c = {e: v for e, v in self._c.items() if e < order}
            for e, v in other._c.items():
                if e < order:
                    w = c.get(e, 0) + v
                    if w:
                        c[e] = w
                    else:
                        c.pop(e, None)
            return TruncatedSeries._raw(c, order, self.var)
        if self.order == 0:
            return self
        c = dict(self._c)
        w = c.get(0, 0) + other
        if w:
            c[0] = w
        else:
            c.pop(0, None)
        return TruncatedSeries._raw(c, self.order, self.var)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if self._same(other):
            order = min(self.order, other.order)
            c: dict = {}
            for e1, v1 in self._c.items():
                if e1 >= order:
                    continue
                for e2, v2 in other._c.items():
                    e = e1 + e2
                    if e < order:
                        c[e] = c[e] + v1 * v2 if e in c else v1 * v2
            return TruncatedSeries._raw({e: v for e, v in c.items() if v}, order, self.var)
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return TruncatedSeries._raw({}, self.order, self.var)
            return TruncatedSeries._raw({e: v * other for e, v in self._c.items()}, self.order, self.var)
        c = {}
        for e, v in self._c.items():
            w = v * other
            if w:
                c[e] = w
        return TruncatedSeries._raw(c, self.order, self.var)

    def __rmul__(self, other):
        # scalar on the left; coefficient rings here are commutative
        return self.__mul__(other)

    def __truediv__(self, other):
        if self._same(other):
            return self * other.inverse()
        return self * invert_scalar(other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def one(self) -> "TruncatedSeries":
        return TruncatedSeries.const(1, self.order, self.var)

    def inverse(self) -> "TruncatedSeries":
        if self.order == 0:
            return self
        a0 = self._c.get(0)
        if not a0:
            raise NotInvertibleError(f"series in {self.var} has zero constant term")
        inv0 = invert_scalar(a0)
        b = [inv0]
        for n in range(1, self.order):
            acc = None
            for k in range(1, n + 1):
                ak = self._c.get(k)
                if ak and b[n - k]:
                    term = ak * b[n - k]
                    acc = term if acc is None else acc + term
            b.append(-(acc * inv0) if acc is not None else Fraction(0))
        return TruncatedSeries(dict(enumerate(b)), self.order, self.var)

    # equality ---------------------------------------------------------------
    def __eq__(self, other):
        if self._same(other):
            order = min(self.order, other.order)
            return self.truncate(order)._c == other.truncate(order)._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: other} if other and self.order else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.var, self.order, frozenset(self._c.items())))

    # calculus -----------------------------------------------------------------
    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries(
            {e - 1: v * e for e, v in self._c.items() if e > 0}, max(self.order - 1, 0), self.var
        )

    def integral(self) -> "TruncatedSeries":
        """Antiderivative with zero constant; the order grows by one."""
        return TruncatedSeries(
            {e + 1: _scale(v, Fraction(1, e + 1)) for e, v in self._c.items()}, self.order + 1, self.var
        )

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``var**k``."""
        return TruncatedSeries({e + k: v for e, v in self._c.items()}, self.order + k, self.var)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner)``; ``inner`` must have zero constant term."""
        if not isinstance(inner, TruncatedSeries):
            raise TypeError("compose expects a TruncatedSeries")
        if inner.order and inner._c.get(0):
            raise SeriesError("cannot compose with a series that has nonzero constant term")
        order = min(self.order, inner.order) if inner.var == self.var else self.order
        inner = inner.truncate(order)
        result = TruncatedSeries._raw({}, order, inner.var)
        for n in range(self.order - 1, -1, -1):
            result = result * inner
            c = self._c.get(n)
            if c:
                result = result + c
        return result

    def exp(self) -> "TruncatedSeries":
        if self.order and self._c.get(0):
            raise SeriesError("exp needs zero constant term")
        f = [Fraction(1)]
        for n in range(1, self.order):
            acc = None
            for k in range(1, n + 1):
                ak = self._c.get(k)
                if ak and f[n - k]:
                    term = ak * f[n - k] * k
                    acc = term if acc is None else acc + term
            f.append(_scale(acc, Fraction(1, n)) if acc is not None else Fraction(0))
        return TruncatedSeries(dict(enumerate(f)), self.order, self.var)

    def log(self) -> "TruncatedSeries":
        if self.order and self._c.get(0) != 1:
            raise SeriesError("log needs constant term 1")
        l = [Fraction(0)]
        for n in range(1, self.order):
            acc = self._c.get(n, Fraction(0))
            for k in range(1, n):
                lk, a = l[k], self._c.get(n - k)
                if lk and a:
                    acc = acc - _scale(lk * a, Fraction(k, n))
            l.append(acc)
        return TruncatedSeries(dict(enumerate(l)), self.order, self.var)

    def revert(self) -> "TruncatedSeries":
        """Compositional inverse ``b`` with ``self(b) = b(self) = var``."""
        if self.order and self._c.get(0):
            raise SeriesError("reversion needs zero constant term")
        if self.order <= 1:
            return TruncatedSeries({}, self.order, self.var)  # var + O(var) is O(var)
        a1 = self._c.get(1)
        if not a1:
            raise SeriesError("reversion needs a nonzero linear coefficient")
        inv1 = invert_scalar(a1)
        b = TruncatedSeries({1: inv1}, self.order, self.var)
        for n in range(2, self.order):
            err = self.compose(b)._c.get(n)
            if err:
                b = b - TruncatedSeries({n: err * inv1}, self.order, self.var)
        return b

    # display ----------------------------------------------------------------------
    def __repr__(self):
        if not self._c:
            body = "0"
        else:
            parts = []
            for e, v in self.items():
                vs = f"({v})" if not isinstance(v, (int, Fraction)) or v < 0 or v.denominator != 1 else str(v)
                parts.append(vs if e == 0 else f"{vs}*{self.var}^{e}")
            body = " + ".join(parts)
        return f"{body} + O({self.var}^{self.order})"


# Operation-style entry points -----------------------------------------------


def series_arith(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "compose":
        return a.compose(b)
    raise ValueError(f"unknown series operation {op!r}")


def series_exp_log(a: TruncatedSeries, op: str) -> TruncatedSeries:
    if op == "exp":
        return a.exp()
    if op == "log":
        return a.log()
    raise ValueError(f"unknown operation {op!r}")


def series_revert(a: TruncatedSeries) -> TruncatedSeries:
    return a.revert()


# ---------------------------------------------------------------------------
# graded polynomials
# ---------------------------------------------------------------------------


class PolyRing:
    """Polynomial ring with graded variables, an optional degree cap and a
    monomial ideal of relations (monomials divisible by a generator vanish)."""

    __slots__ = ("names", "degrees", "cap", "ideal", "_key")

    def __init__(self, variables: Sequence[tuple[str, int]], cap: int | None = None, ideal: Iterable[Sequence[int]] = ()):
        names = tuple(v[0] for v in variables)
        degrees = tuple(int(v[1]) for v in variables)
        if len(set(names)) != len(names):
            raise SeriesError("duplicate variable names")
        if any(d <= 0 for d in degrees):
            raise SeriesError("variable degrees must be positive")
        ideal = tuple(tuple(int(x) for x in m) for m in ideal)
        if any(len(m) != len(names) for m in ideal):
            raise SeriesError("ideal generator has wrong length")
        self.names, self.degrees, self.cap, self.ideal = names, degrees, cap, ideal
        self._key = (names, degrees, cap, ideal)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"PolyRing({list(zip(self.names, self.degrees))}, cap={self.cap}, ideal={list(self.ideal)})"

    @property
    def nvars(self) -> int:
        return len(self.names)

    def degree(self, mono: Sequence[int]) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def keeps(self, mono: Sequence[int]) -> bool:
        if self.cap is not None and self.degree(mono) > self.cap:
            return False
        for g in self.ideal:
            if all(e >= x for e, x in zip(mono, g)):
                return False
        return True

    def zero(self) -> "GradedPolynomial":
        return GradedPolynomial(self, {})

    def one(self) -> "GradedPolynomial":
        return self.const(1)

    def const(self, c) -> "GradedPolynomial":
        return GradedPolynomial(self, {(0,) * self.nvars: c})

    def gen(self, name_or_index) -> "GradedPolynomial":
        i = self.names.index(name_or_index) if isinstance(name_or_index, str) else int(name_or_index)
        mono = [0] * self.nvars
        mono[i] = 1
        return GradedPolynomial(self, {tuple(mono): 1})

    def gens(self) -> list["GradedPolynomial"]:
        return [self.gen(i) for i in range(self.nvars)]

    def linear(self, coeffs: Sequence) -> "GradedPolynomial":
        """``sum(c_i * gen_i)``."""
        terms = {}
        for i, c in enumerate(coeffs):
            mono = [0] * self.nvars
            mono[i] = 1
            terms[tuple(mono)] = c
        return GradedPolynomial(self, terms)

    def monomials_of_degree(self, deg: int) -> list[tuple[int, ...]]:
        out = []
        bounds = [deg // d for d in self.degrees]
        for mono in _cartesian(*(range(b + 1) for b in bounds)):
            if self.degree(mono) == deg and self.keeps(mono):
                out.append(tuple(mono))
        return out


class GradedPolynomial:
    """Element of a :class:`PolyRing`; terms map exponent vectors to coefficients."""

    __slots__ = ("ring", "_t")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple[int, ...], object]):
        t = {}
        for mono, c in terms.items():
            mono = tuple(mono)
            if len(mono) != ring.nvars:
                raise SeriesError("monomial length does not match ring")
            if c and ring.keeps(mono):
                t[mono] = Fraction(c) if isinstance(c, int) else c
        self.ring = ring
        self._t = t

    @classmethod
    def _raw(cls, ring, t):
        p = cls.__new__(cls)
        p.ring, p._t = ring, t
        return p

    # access ---------------------------------------------------------------------
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return sorted(self._t.items())

    def coeff(self, mono: Sequence[int]):
        return self._t.get(tuple(mono), Fraction(0))

    def constant(self):
        return self._t.get((0,) * self.ring.nvars, Fraction(0))

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def degree(self) -> int:
        return max((self.ring.degree(m) for m in self._t), default=-1)

    def homogeneous_part(self, deg: int) -> "GradedPolynomial":
        return GradedPolynomial._raw(self.ring, {m: c for m, c in self._t.items() if self.ring.degree(m) == deg})

    def is_homogeneous(self, deg: int) -> bool:
        return all(self.ring.degree(m) == deg for m in self._t)

    def map_coefficients(self, f) -> "GradedPolynomial":
        return GradedPolynomial(self.ring, {m: f(c) for m, c in self._t.items()})

    def _same(self, other):
        return isinstance(other, GradedPolynomial) and other.ring == self.ring

    # arithmetic -------------------------------------------------------------------
    def __neg__(self):
        return GradedPolynomial._raw(self.ring, {m: -c for m, c in self._t.items()})

    def __add__(self, other):
        if self._same(other):
            t = dict(self._t)
            for m, c in other._t.items():
                w = t.get(m, 0) + c
                if w:
                    t[m] = w
                else:
                    t.pop(m, None)
            return GradedPolynomial._raw(self.ring, t)
        if isinstance(other, GradedPolynomial):
            raise SeriesError("adding polynomials from different rings")
        return self + self.ring.const(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if self._same(other):
            ring = self.ring
            t: dict = {}
            for m1, c1 in self._t.items():
                for m2, c2 in other._t.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    if ring.keeps(m):
                        t[m] = t[m] + c1 * c2 if m in t else c1 * c2
            return GradedPolynomial._raw(ring, {m: c for m, c in t.items() if c})
        if isinstance(other, GradedPolynomial):
            raise SeriesError("multiplying polynomials from different rings")
        t = {}
        for m, c in self._t.items():
            w = c * other
            if w:
                t[m] = w
        return GradedPolynomial._raw(self.ring, t)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if self._same(other):
            return self * other.inverse()
        return self * invert_scalar(other)

    def inverse(self) -> "GradedPolynomial":
        """Inverse when the constant term is a unit and the rest is nilpotent."""
        c0 = self.constant()
        if not c0:
            raise NotInvertibleError("polynomial has zero constant term")
        inv0 = invert_scalar(c0)
        nil = (self - c0) * inv0
        if not nil:
            return self.ring.const(inv0)
        mindeg = min(self.ring.degree(m) for m in nil._t)
        bound = self.ring.cap // mindeg + 1 if self.ring.cap is not None else 256
        result, power = self.ring.one(), self.ring.one()
        for _ in range(bound + 1):
            power = power * (-nil)
            if not power:
                return result * inv0
            result = result + power
        raise NotInvertibleError("non-constant part is not nilpotent in this ring")

    def exp(self) -> "GradedPolynomial":
        if self.constant():
            raise SeriesError("exp needs zero constant term")
        result, term, n = self.ring.one(), self.ring.one(), 0
        while True:
            n += 1
            term = term * self * Fraction(1, n)
            if not term:
                return result
            if n > 512:
                raise SeriesError("exp did not terminate; argument not nilpotent")
            result = result + term

    def __eq__(self, other):
        if self._same(other):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == (self.ring.const(other)._t if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self._t.items())))

    def evaluate(self, values: Sequence):
        """Substitute numbers (or ring elements) for the variables."""
        total = 0
        for mono, c in self._t.items():
            term = c
            for v, e in zip(values, mono):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def __repr__(self):
        if not self._t:
            return "0"
        parts = []
        for mono, c in self.items():
            vars_ = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(self.ring.names, mono) if e)
            parts.append(f"({c})" + (f"*{vars_}" if vars_ else ""))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> tuple[list[Fraction], int]:
    """Solve an (over-determined) rational system exactly.

    Returns ``(solution, rank)``.  Raises :class:`SeriesError` when the system
    is inconsistent or the solution is not unique.
    """
    m = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    r = 0
    pivots = []
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(m)):
        if m[i][-1] != 0:
            raise SeriesError("inconsistent linear system")
    if r < ncols:
        raise SeriesError(f"linear system has rank {r} < {ncols} unknowns")
    sol = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        sol[col] = m[i][-1]
    return sol, r

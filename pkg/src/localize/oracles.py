"""Independent checks for genus-0 invariants.

Neither routine shares code with the hypergeometric pipeline:

* ``schubert_lines_on_hypersurface`` integrates the top Chern class of
  Sym^k S* over the Grassmannian of lines G(2, n+1) with the Pieri rule;
* ``graph_sum_invariant`` evaluates Kontsevich's torus-localization graph
  sum on M_{0,0}(P^n, d) for d <= 2 at explicit rational weights.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

__all__ = [
    "schubert_lines_on_hypersurface",
    "symmetric_power_top_chern",
    "grassmannian_integral",
    "graph_sum_invariant",
]


# ---------------------------------------------------------------------------
# Schubert calculus on G(2, N)
# ---------------------------------------------------------------------------


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def symmetric_power_top_chern(k: int) -> dict[tuple[int, int], int]:
    """prod_{a=0}^{k} (a x1 + (k-a) x2) rewritten in e1 = x1+x2, e2 = x1 x2.

    Returns {(i, j): coeff} meaning coeff * e1^i e2^j.
    """
    poly = {(0, 0): 1}
    for a in range(k + 1):
        poly = _poly_mul(poly, {(1, 0): a, (0, 1): k - a})
    poly = {m: c for m, c in poly.items() if c}
    out: dict = {}
    # peel off leading monomials x1^p x2^q (p >= q) as e1^{p-q} e2^q
    while poly:
        p, q = max(poly)
        c = poly[(p, q)]
        out[(p - q, q)] = out.get((p - q, q), 0) + c
        sub = {(0, 0): 1}
        for _ in range(p - q):
            sub = _poly_mul(sub, {(1, 0): 1, (0, 1): 1})
        sub = _poly_mul(sub, {(q, q): 1})
        for m, v in sub.items():
            poly[m] = poly.get(m, 0) - c * v
        poly = {m: v for m, v in poly.items() if v}
    return out


def grassmannian_integral(monomial: tuple[int, int], n_ambient: int) -> int:
    """int_{G(2, N)} sigma_1^a sigma_{11}^b by the Pieri rule, N = n_ambient.

    Classes are partitions (l1, l2) in a 2 x (N-2) box; sigma_1 adds one box,
    sigma_{11} adds one box to each row.
    """
    a, b = monomial
    width = n_ambient - 2
    if a + 2 * b != 2 * width:
        return 0
    state = {(0, 0): 1}
    for _ in range(b):
        state = {(l1 + 1, l2 + 1): c for (l1, l2), c in state.items() if l1 + 1 <= width}
    for _ in range(a):
        new: dict = {}
        for (l1, l2), c in state.items():
            if l1 + 1 <= width:
                new[(l1 + 1, l2)] = new.get((l1 + 1, l2), 0) + c
            if l2 + 1 <= l1:
                new[(l1, l2 + 1)] = new.get((l1, l2 + 1), 0) + c
        state = new
    return state.get((width, width), 0)


def schubert_lines_on_hypersurface(degree: int = 5, n: int = 4) -> int:
    """Number of lines on a generic degree-``degree`` hypersurface in P^n.

    Requires degree = 2n - 3 so that c_top(Sym^degree S*) has top degree on
    G(2, n+1).  The quintic threefold gives 2875.
    """
    if degree + 1 != 2 * (n - 1):
        raise ValueError("need rank Sym^k S* = dim G(2, n+1)")
    # c(S*) = 1 + sigma_1 + sigma_11: Chern roots of S* have e1 = sigma_1, e2 = sigma_11
    total = 0
    for (i, j), c in symmetric_power_top_chern(degree).items():
        total += c * grassmannian_integral((i, j), n + 1)
    return total


# ---------------------------------------------------------------------------
# torus localization on M_{0,0}(P^n, d), d <= 2
# ---------------------------------------------------------------------------


def _edge_factor(li, lj, d, others):
    """1/e of the moving part of H^0(C_e, f*T) minus infinitesimal automorphisms."""
    val = Fraction((-1) ** d * d ** (2 * d), factorial_(d) ** 2) / (li - lj) ** (2 * d)
    for lk in others:
        for a in range(d + 1):
            val /= Fraction(a, d) * li + Fraction(d - a, d) * lj - lk
    return val


def factorial_(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _vertex_factor(i, flags, lam):
    """flags: weights omega_F = (lambda_i - lambda_j)/d_e of the edges at vertex i."""
    val = len(flags)
    tangent = Fraction(1)
    for k, lk in enumerate(lam):
        if k != i:
            tangent *= lam[i] - lk
    inv_sum = sum(Fraction(1) / w for w in flags)
    out = tangent ** (val - 1)
    out *= inv_sum ** (val - 3) if val != 3 else 1
    for w in flags:
        out /= w
    return out


def _bundle_edge(li, lj, d, bundles):
    """Euler class contribution of an edge for each line bundle O(k).

    Convex k >= 0: H^0 weights (a li + (k d - a) lj)/d, a = 0..kd.
    Concave k < 0: H^1 weights -(b lj + (|k| d - b) li)/d, b = 1..|k|d-1.
    """
    val = Fraction(1)
    for k in bundles:
        if k >= 0:
            for a in range(k * d + 1):
                val *= (a * li + (k * d - a) * lj) / Fraction(d)
        else:
            m = -k * d
            for b in range(1, m):
                val *= -(b * lj + (m - b) * li) / Fraction(d)
    return val


def _bundle_vertex(li, val, bundles):
    """Node corrections: divide (convex) or multiply (concave) by fibre weights."""
    out = Fraction(1)
    for k in bundles:
        w = k * li
        if k >= 0:
            out /= w ** (val - 1)
        else:
            out *= w ** (val - 1)
    return out


def graph_sum_invariant(n: int, bundles: Sequence[int], d: int, weights: Sequence | None = None) -> Fraction:
    """int_{M_{0,0}(P^n, d)} e(V_d) by the localization graph sum.

    ``bundles`` lists the degrees k of the split bundle V = sum O(k); the
    integrand uses H^0 for k >= 0 and H^1 for k < 0.  Only d = 1, 2.
    Weights default to a fixed generic rational choice; the answer must not
    depend on them.
    """
    if d not in (1, 2):
        raise NotImplementedError("graph sums implemented for d = 1, 2")
    lam = [Fraction(w) for w in (weights or [Fraction(3 * i * i + 7 * i + 2, 5 + i) for i in range(n + 1)])]
    if len(lam) != n + 1 or len(set(lam)) != n + 1:
        raise ValueError("need n+1 distinct weights")
    pts = range(n + 1)

    def others(i, j):
        return [lam[k] for k in pts if k not in (i, j)]

    total = Fraction(0)
    # one edge of degree d between i < j; automorphisms: d (cover) x 1
    for i, j in combinations(pts, 2):
        li, lj = lam[i], lam[j]
        c = _edge_factor(li, lj, d, others(i, j))
        c *= _vertex_factor(i, [(li - lj) / d], lam) * _vertex_factor(j, [(lj - li) / d], lam)
        c *= _bundle_edge(li, lj, d, bundles)
        total += c / d
    if d == 2:
        # chain i - j - k of two degree-1 edges with centre j (i may equal k)
        for j in pts:
            for i in pts:
                for k in pts:
                    if i == j or k == j or (i > k):
                        continue
                    aut = 2 if i == k else 1
                    lj = lam[j]
                    c = _edge_factor(lam[i], lj, 1, others(i, j)) * _edge_factor(lam[k], lj, 1, others(k, j))
                    c *= _vertex_factor(i, [lam[i] - lj], lam) * _vertex_factor(k, [lam[k] - lj], lam)
                    c *= _vertex_factor(j, [lj - lam[i], lj - lam[k]], lam)
                    c *= _bundle_edge(lam[i], lj, 1, bundles) * _bundle_edge(lam[k], lj, 1, bundles)
                    c *= _bundle_vertex(lj, 2, bundles)
                    total += c / aut
    return total

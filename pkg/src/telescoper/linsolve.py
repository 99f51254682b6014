"""Exact nullspace of matrices with polynomial entries.

The elimination is fraction-free in Bareiss style: entries stay
polynomials throughout, every division is exact, and the pivot at each
step is the lowest-total-degree nonzero entry of the remaining block
(ties broken by column, then row).  Back substitution then runs over
the rational-function field and each nullspace vector is cleared of
denominators and normalized.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .poly import MultiPoly, poly_gcd, poly_lcm
from .ratfun import RatFun


class SymMatrix:
    """Rectangular matrix of MultiPoly entries over one universe."""

    def __init__(self, rows):
        rows = [tuple(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        width = len(rows[0])
        universe = rows[0][0].variables
        for r in rows:
            if len(r) != width:
                raise ValueError("ragged rows")
            for e in r:
                if e.variables != universe:
                    raise ValueError("mixed variable universes in matrix")
        self.rows = rows
        self.shape = (len(rows), width)
        self.universe = universe

    def __getitem__(self, idx):
        return self.rows[idx]


def _pick_pivot(rows, used_rows, used_cols):
    """Lowest-degree nonzero entry in the unused block, ties by column then row."""
    best = None
    for j in range(len(rows[0])):
        if j in used_cols:
            continue
        for i in range(len(rows)):
            if i in used_rows:
                continue
            e = rows[i][j]
            if e.is_zero():
                continue
            key = (e.total_degree(), j, i)
            if best is None or key < best[0]:
                best = (key, i, j)
    if best is None:
        return None
    return best[1], best[2]


def nullspace(matrix):
    """Basis of the right nullspace over the rational-function field.

    Each basis vector is a tuple of MultiPoly: denominator-free, with
    common polynomial factors and integer content removed, and the
    first nonzero entry carrying a positive leading coefficient.  An
    empty list means the nullspace is trivial.
    """
    if isinstance(matrix, SymMatrix):
        rows = [list(r) for r in matrix.rows]
        universe = matrix.universe
    else:
        rows = [list(r) for r in matrix]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        universe = rows[0][0].variables
    nrows, ncols = len(rows), len(rows[0])
    one = MultiPoly.const(universe, 1)

    used_rows = set()
    used_cols = set()
    pivots = []
    prev_pivot = one
    while True:
        found = _pick_pivot(rows, used_rows, used_cols)
        if found is None:
            break
        pi, pj = found
        pivot = rows[pi][pj]
        for i in range(nrows):
            if i == pi or i in used_rows:
                continue
            if rows[i][pj].is_zero():
                continue
            factor = rows[i][pj]
            for j in range(ncols):
                if j in used_cols:
                    rows[i][j] = MultiPoly.zero(universe)
                    continue
                rows[i][j] = (rows[i][j] * pivot - factor * rows[pi][j]).exact_div(
                    prev_pivot
                )
        used_rows.add(pi)
        used_cols.add(pj)
        pivots.append((pi, pj))
        prev_pivot = pivot

    free_cols = [j for j in range(ncols) if j not in used_cols]
    basis = []
    for f in free_cols:
        x = [None] * ncols
        x[f] = RatFun.one(universe)
        for j in free_cols:
            if j != f:
                x[j] = RatFun.zero(universe)
        # Pivot rows are mutually independent after full cross-row
        # elimination, so each one determines its own pivot variable.
        for pi, pj in reversed(pivots):
            acc = RatFun.zero(universe)
            for j in range(ncols):
                if j == pj or rows[pi][j].is_zero():
                    continue
                if x[j] is None:
                    raise AssertionError("unsolved dependency in back substitution")
                acc = acc + RatFun(rows[pi][j]) * x[j]
            x[pj] = -acc / RatFun(rows[pi][pj])
        basis.append(_normalize_vector(x, universe))
    return basis


def _normalize_vector(entries, universe):
    """Clear denominators, strip common factors, fix the sign."""
    den = MultiPoly.const(universe, 1)
    for e in entries:
        den = poly_lcm(den, e.den)
    cleared = []
    for e in entries:
        cleared.append(e.num * den.exact_div(e.den))
    common = MultiPoly.zero(universe)
    for p in cleared:
        if not p.is_zero():
            common = poly_gcd(common, p) if not common.is_zero() else p
    if not common.is_zero() and not common.is_constant():
        cleared = [p.exact_div(common) for p in cleared]
    content = None
    for p in cleared:
        if p.is_zero():
            continue
        c = p.content()
        content = c if content is None else _frac_gcd(content, c)
    if content is not None and content != 1:
        cleared = [p * (1 / content) for p in cleared]
    for p in cleared:
        if not p.is_zero():
            if p.leading()[1] < 0:
                cleared = [-x for x in cleared]
            break
    return tuple(cleared)


def _frac_gcd(a, b):
    a, b = Fraction(a), Fraction(b)
    return Fraction(
        math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
        a.denominator * b.denominator,
    )

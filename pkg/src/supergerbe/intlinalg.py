"""Exact integer and rational linear algebra on sparse matrices.

Used for the nerve-level cohomology solves: integer-coboundary membership,
mod-Z congruences for exponential-coordinate corrections, and plain rational
solves.  Row operations are restricted to integer-unimodular moves so that
mod-Z structure is preserved.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["SparseIntMatrix", "solve_integer", "solve_mod1", "solve_rational"]


class SparseIntMatrix:
    """Rows are dicts column -> nonzero int."""

    def __init__(self, rows: list[dict], ncols: int):
        self.rows = [dict(r) for r in rows]
        self.ncols = ncols

    def copy(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.rows, self.ncols)


def _eliminate(rows: list[dict], rhs: list, ncols: int):
    """Integer row echelon via unimodular row operations (swap, negate,
    add integer multiples).  Returns list of (pivot_col, row_index) in
    elimination order; rows/rhs are modified in place.

    rhs entries may be Fractions (or tuples of Fractions handled by the
    caller); they are only combined with integer multipliers.
    """
    pivots: list[tuple[int, int]] = []
    used: set[int] = set()
    for col in range(ncols):
        # gcd-reduce all candidate rows on this column
        while True:
            candidates = [i for i in range(len(rows))
                          if i not in used and rows[i].get(col)]
            if not candidates:
                break
            best = min(candidates, key=lambda i: abs(rows[i][col]))
            b = rows[best][col]
            done = True
            for i in candidates:
                if i == best:
                    continue
                q = rows[i][col] // b
                if q:
                    _row_axpy(rows, rhs, i, best, -q)
                if rows[i].get(col):
                    done = False
            if done:
                if b < 0:
                    _row_scale_neg(rows, rhs, best)
                pivots.append((col, best))
                used.add(best)
                break
    return pivots


def _row_axpy(rows, rhs, i, j, q):
    """row_i += q * row_j (q integer)."""
    ri, rj = rows[i], rows[j]
    for col, v in rj.items():
        acc = ri.get(col, 0) + q * v
        if acc:
            ri[col] = acc
        else:
            ri.pop(col, None)
    rhs[i] = rhs[i] + q * rhs[j]


def _row_scale_neg(rows, rhs, i):
    rows[i] = {c: -v for c, v in rows[i].items()}
    rhs[i] = -rhs[i]


def _back_substitute(rows, rhs, pivots, value_of):
    """Solve the echelonized system; `value_of(pivot, residual)` produces the
    solution entry or raises."""
    x: dict[int, object] = {}
    for col, i in reversed(pivots):
        residual = rhs[i]
        for c, v in rows[i].items():
            if c == col:
                continue
            if c in x:
                residual = residual - v * x[c]
        x[col] = value_of(rows[i][col], residual)
    return x


def solve_integer(rows: list[dict], rhs: list[int], ncols: int,
                  need_solution: bool = True):
    """One integer solution x of A x = b, or None.

    Works on the transpose: row-reduce B = A^T over Z with a tracked
    unimodular transform U (so H = U B), then forward-substitute H^T y = b
    with divisibility checks and recover x = U^T y.  Free components of y
    multiply zero columns, so the existence decision is exact.

    With need_solution=False the transform is not tracked and the return
    value is [] for "solvable" (cheaper on large systems).
    """
    nrows = len(rows)
    # B rows indexed by x-coordinate; columns are equation indices.
    b_rows = [dict() for _ in range(ncols)]
    for i, r in enumerate(rows):
        for c, v in r.items():
            b_rows[c][i] = v
    u_rows = [{j: 1} for j in range(ncols)] if need_solution else None

    pivots: list[tuple[int, int]] = []  # (equation index, B-row)
    used: set[int] = set()
    for col in range(nrows):
        while True:
            candidates = [j for j in range(ncols)
                          if j not in used and b_rows[j].get(col)]
            if not candidates:
                break
            best = min(candidates, key=lambda j: abs(b_rows[j][col]))
            b0 = b_rows[best][col]
            done = True
            for j in candidates:
                if j == best:
                    continue
                q = b_rows[j][col] // b0
                if q:
                    _dict_axpy(b_rows[j], b_rows[best], -q)
                    if u_rows is not None:
                        _dict_axpy(u_rows[j], u_rows[best], -q)
                if b_rows[j].get(col):
                    done = False
            if done:
                if b0 < 0:
                    b_rows[best] = {c: -v for c, v in b_rows[best].items()}
                    if u_rows is not None:
                        u_rows[best] = {c: -v for c, v in u_rows[best].items()}
                pivots.append((col, best))
                used.add(best)
                break

    y: dict[int, int] = {}
    pivot_eqs = {col for col, _ in pivots}
    for col, j in pivots:
        residual = rhs[col]
        for col2, j2 in pivots:
            if j2 == j:
                break
            residual -= b_rows[j2].get(col, 0) * y[j2]
        p = b_rows[j][col]
        if residual % p:
            return None
        y[j] = residual // p
    # non-pivot equations must be satisfied
    for i in range(nrows):
        if i in pivot_eqs:
            continue
        acc = 0
        for col, j in pivots:
            acc += b_rows[j].get(i, 0) * y[j]
        if acc != rhs[i]:
            return None
    if not need_solution:
        return []
    # x = U^T y
    x = [0] * ncols
    for j, yj in y.items():
        if yj:
            for c, v in u_rows[j].items():
                x[c] += v * yj
    return x


def _dict_axpy(dst: dict, src: dict, q: int) -> None:
    for c, v in src.items():
        acc = dst.get(c, 0) + q * v
        if acc:
            dst[c] = acc
        else:
            dst.pop(c, None)


def solve_mod1(rows: list[dict], rhs: list[Fraction], ncols: int):
    """Rational x with A x = b (mod Z componentwise), or the list of
    irreducible non-integer residuals when no solution exists.

    Returns (x, None) on success and (None, witnesses) on failure.
    """
    rows = [dict(r) for r in rows]
    rhs = [Fraction(v) for v in rhs]
    pivots = _eliminate(rows, rhs, ncols)
    pivot_rows = {i for _, i in pivots}
    witnesses = []
    for i in range(len(rows)):
        if i not in pivot_rows and rhs[i].denominator != 1:
            witnesses.append(rhs[i] - (rhs[i].numerator // rhs[i].denominator))
    if witnesses:
        return None, witnesses

    def value_of(p, residual):
        return Fraction(residual, p)

    x = _back_substitute(rows, rhs, pivots, value_of)
    return [x.get(c, Fraction(0)) for c in range(ncols)], None


def solve_rational(rows: list[dict], rhs: list[Fraction], ncols: int):
    """One rational solution of A x = b, or None (A integer, b rational)."""
    rows = [dict(r) for r in rows]
    rhs = [Fraction(v) for v in rhs]
    pivots = _eliminate(rows, rhs, ncols)
    pivot_rows = {i for _, i in pivots}
    for i in range(len(rows)):
        if i not in pivot_rows and rhs[i] != 0:
            return None

    def value_of(p, residual):
        return Fraction(residual, p)

    x = _back_substitute(rows, rhs, pivots, value_of)
    return [x.get(c, Fraction(0)) for c in range(ncols)]

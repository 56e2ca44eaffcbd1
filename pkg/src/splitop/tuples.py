"""Star products of coordinate tuples, their Jacobians, and exact ranks.

The star product of k n-tuples is the vector of all k-factor products taking
one factor per tuple with pairwise-distinct coordinate indices.  For two
3-tuples the classic component order is kept::

    (u1*v2, u3*v2, u3*v1, u2*v1, u2*v3, u1*v3)

and for every other (k, n) the components follow lexicographic order of the
index tuples.  The Jacobian of the star product has generic rank
``k*(n-1) + 1`` for k < n; for k = n it drops to the k-1 value.

The basis-substitution determinant replaces one Jacobian row by the unit
basis vectors and expands along it, yielding a vector of polynomials that
factors as a monomial times ``(u1, u2, u3, -v1, -v2, -v3)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .symbolic import (
    ExprError,
    PointState,
    Polynomial,
    RationalExpr,
    Sym,
    sym,
)

# classic component order for two 3-tuples, as (u index, v index) pairs
STAR_ORDER_23 = ((0, 1), (2, 1), (2, 0), (1, 0), (1, 2), (0, 2))

# row arrangement used for the basis-substitution determinant: the first
# star component is moved to the last slot, so that replacing row 6 yields
# the determinant that factors as u2*u3*v1*v3 * (u1,u2,u3,-v1,-v2,-v3)
DET_ROW_ORDER = (1, 2, 3, 4, 5, 0)


@dataclass(frozen=True)
class TupleFamily:
    """k tuples of dimension n; entries are RationalExpr or exact numbers."""

    entries: tuple

    def __post_init__(self):
        k = len(self.entries)
        if k < 2:
            raise ExprError("need at least two tuples")
        n = len(self.entries[0])
        if any(len(row) != n for row in self.entries):
            raise ExprError("tuples must share one dimension")
        if n < 2:
            raise ExprError("tuple dimension must be at least 2")
        if k > n:
            raise ExprError(f"k={k} tuples of dimension n={n}: k > n rejected")
        for row in self.entries:
            for x in row:
                if isinstance(x, RationalExpr):
                    if x.is_zero():
                        raise ExprError("tuple entries must be nonzero")
                elif x == 0:
                    raise ExprError("tuple entries must be nonzero")

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    @property
    def symbolic(self) -> bool:
        return isinstance(self.entries[0][0], RationalExpr)

    @staticmethod
    def canonical() -> "TupleFamily":
        """The two symbolic 3-tuples (u1,u2,u3) and (v1,v2,v3)."""
        u = tuple(RationalExpr.var(f"u{i}") for i in (1, 2, 3))
        v = tuple(RationalExpr.var(f"v{i}") for i in (1, 2, 3))
        return TupleFamily((u, v))

    @staticmethod
    def from_values(rows: Sequence[Sequence]) -> "TupleFamily":
        return TupleFamily(tuple(tuple(Fraction(x) if isinstance(x, int) else x
                                       for x in row) for row in rows))


@dataclass(frozen=True)
class StarProduct:
    components: tuple
    index_map: tuple  # one index tuple (j_1..j_k) per component


def _index_tuples(k: int, n: int) -> tuple:
    if (k, n) == (2, 3):
        return STAR_ORDER_23
    return tuple(itertools.permutations(range(n), k))


def _one_like(family: TupleFamily):
    return RationalExpr.const(1) if family.symbolic else Fraction(1)


def star_product(family: TupleFamily) -> StarProduct:
    idx = _index_tuples(family.k, family.n)
    comps = []
    for tup in idx:
        prod = _one_like(family)
        for s, j in enumerate(tup):
            prod = prod * family.entries[s][j]
        comps.append(prod)
    return StarProduct(tuple(comps), idx)


def star_jacobian(family: TupleFamily) -> list:
    """Jacobian of the star product w.r.t. all k*n entries (row-major)."""
    idx = _index_tuples(family.k, family.n)
    zero = RationalExpr.const(0) if family.symbolic else Fraction(0)
    rows = []
    for tup in idx:
        row = [zero] * (family.k * family.n)
        for s in range(family.k):
            prod = _one_like(family)
            for s2, j2 in enumerate(tup):
                if s2 != s:
                    prod = prod * family.entries[s2][j2]
            row[s * family.n + tup[s]] = prod
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Exact ranks


def _fraction_rank(rows: list) -> int:
    """Fraction-free (Bareiss) rank of a matrix with rational entries."""
    m = [[Fraction(x) for x in row] for row in rows]
    for row in m:
        scale = math.lcm(*(x.denominator for x in row)) if row else 1
        for j, x in enumerate(row):
            row[j] = int(x * scale)
    n_rows, n_cols = len(m), len(m[0]) if m else 0
    rank = 0
    prev = 1
    col = 0
    while rank < n_rows and col < n_cols:
        pivot_row = next((r for r in range(rank, n_rows) if m[r][col]), None)
        if pivot_row is None:
            col += 1
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        piv = m[rank][col]
        for r in range(rank + 1, n_rows):
            for c in range(col + 1, n_cols):
                m[r][c] = (m[r][c] * piv - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = piv
        rank += 1
        col += 1
    return rank


def _polynomial_rank(rows: list) -> int:
    """Bareiss rank over the polynomial ring (entries: RationalExpr with
    denominator cleared first)."""
    cleared = []
    for row in rows:
        den = Polynomial.const(1)
        for x in row:
            den = den * x.den
        cleared.append([x.num * den.exact_div(x.den) for x in row])
    m = cleared
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = Polynomial.const(1)
    col = 0
    while rank < n_rows and col < n_cols:
        pivot_row = next(
            (r for r in range(rank, n_rows) if not m[r][col].is_zero()), None)
        if pivot_row is None:
            col += 1
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        piv = m[rank][col]
        for r in range(rank + 1, n_rows):
            for c in range(col + 1, n_cols):
                m[r][c] = (m[r][c] * piv - m[r][col] * m[rank][c]).exact_div(prev)
            m[r][col] = Polynomial.zero()
        prev = piv
        rank += 1
        col += 1
    return rank


def rank_exact(matrix: list, point: PointState | None = None) -> int:
    """Exact rank; symbolic matrices are evaluated at ``point`` first.

    With ``point=None`` a symbolic matrix is ranked over the rational-function
    field by fraction-free elimination.
    """
    if matrix and isinstance(matrix[0][0], RationalExpr):
        if point is None:
            return _polynomial_rank(matrix)
        if not point.is_exact():
            raise ExprError("exact rank needs an exact rational point")
        rows = [[x.evaluate(point) for x in row] for row in matrix]
        return _fraction_rank(rows)
    return _fraction_rank(matrix)


def rank_law_expected(k: int, n: int) -> int:
    if k < n:
        return k * (n - 1) + 1
    return rank_law_expected(k - 1, n)


def random_family(k: int, n: int, rng) -> TupleFamily:
    rows = []
    for _ in range(k):
        rows.append(tuple(
            Fraction(rng.randint(10, 1000), 100) * rng.choice((-1, 1))
            for _ in range(n)))
    return TupleFamily.from_values(rows)


def rank_law_check(k: int, n: int, rng, samples: int = 10) -> bool:
    """Sample random rational families and confirm the Jacobian rank law."""
    expected = rank_law_expected(k, n)
    for _ in range(samples):
        fam = random_family(k, n, rng)
        if _fraction_rank(star_jacobian(fam)) != expected:
            return False
    return True


# ---------------------------------------------------------------------------
# Basis-substitution determinant


@dataclass(frozen=True)
class ExternalDet:
    """Cofactor vector of the Jacobian with one row swapped for basis vectors."""

    vector: tuple       # six RationalExpr
    factor: RationalExpr
    reduced: tuple      # (u1, u2, u3, -v1, -v2, -v3)
    replaced_row: int


def mirror_vector() -> tuple:
    """(u1, u2, u3, -v1, -v2, -v3) as symbolic entries."""
    out = [RationalExpr.var(f"u{i}") for i in (1, 2, 3)]
    out += [-RationalExpr.var(f"v{i}") for i in (1, 2, 3)]
    return tuple(out)


def _det(matrix: list) -> RationalExpr:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = RationalExpr.const(0)
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = entry * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def external_det(family: TupleFamily | None = None,
                 replaced_row: int = 6) -> ExternalDet:
    """Swap one row of the (2,3) star Jacobian for the unit basis vectors and
    expand along it.

    Rows follow ``DET_ROW_ORDER``; the default ``replaced_row=6`` reproduces
    the determinant ``u2*u3*v1*v3 * (u1, u2, u3, -v1, -v2, -v3)``.  Any other
    row gives the same vector scaled by a rational function.
    """
    family = family or TupleFamily.canonical()
    if (family.k, family.n) != (2, 3):
        raise ExprError("basis-substitution determinant is defined for (2,3)")
    if not 1 <= replaced_row <= 6:
        raise ExprError("replaced_row must be in 1..6")
    jac = star_jacobian(family)
    arranged = [jac[i] for i in DET_ROW_ORDER]
    kept = [arranged[i] for i in range(6) if i != replaced_row - 1]
    vector = []
    for m in range(6):
        minor = [row[:m] + row[m + 1:] for row in kept]
        cof = _det(minor)
        if (replaced_row + m + 1) % 2 == 1:  # (-1)^(row + column), both 1-based
            cof = -cof
        vector.append(cof)
    reduced = mirror_vector()
    factor = vector[0] / reduced[0]
    for comp, base in zip(vector, reduced):
        if not comp.equals(factor * base):
            raise ExprError("cofactor vector does not factor as expected")
    return ExternalDet(tuple(vector), factor, reduced, replaced_row)


def det_with_row(family: TupleFamily, replaced_row: int,
                 row_values: Sequence) -> RationalExpr | Fraction:
    """Determinant of the arranged Jacobian with one row set to given values.

    Cofactor-consistency helper: the result is linear in ``row_values`` and
    equals ``sum(row_values[m] * external_det(...).vector[m])``.
    """
    jac = star_jacobian(family)
    arranged = [list(jac[i]) for i in DET_ROW_ORDER]
    symbolic = family.symbolic
    arranged[replaced_row - 1] = [
        RationalExpr.const(x) if symbolic and not isinstance(x, RationalExpr)
        else x for x in row_values]
    if symbolic:
        return _det(arranged)
    mat = [[Fraction(x) for x in row] for row in arranged]
    return _fraction_det(mat)


def _fraction_det(m: list) -> Fraction:
    n = len(m)
    m = [row[:] for row in m]
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if m[r][col]), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            det = -det
        piv = m[col][col]
        det *= piv
        for r in range(col + 1, n):
            f = m[r][col] / piv
            for c in range(col, n):
                m[r][c] -= f * m[col][c]
    return det

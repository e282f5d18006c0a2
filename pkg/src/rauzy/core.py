"""Exact generator matrices, words, projective maps and simplex volumes.

Everything here is integer or :class:`fractions.Fraction` arithmetic. Values
are immutable tuples, so they can be handed to worker processes freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math
from math import prod
from typing import Iterable, Sequence

Matrix = tuple[tuple[int, ...], ...]
Word = tuple[int, ...]
BaryPoint = tuple[Fraction, ...]


class InvalidMatrixError(ValueError):
    """Raised when a matrix has a zero column sum."""


def check_dimension(d: int) -> int:
    if not isinstance(d, int) or isinstance(d, bool) or d < 3:
        raise ValueError(f"dimension must be an integer >= 3, got {d!r}")
    return d


def check_word(d: int, w: Iterable[int]) -> Word:
    w = tuple(w)
    for s in w:
        if not isinstance(s, int) or not 1 <= s <= d:
            raise ValueError(f"symbol {s!r} outside 1..{d}")
    return w


def identity(d: int) -> Matrix:
    return tuple(tuple(int(i == k) for k in range(d)) for i in range(d))


@lru_cache(maxsize=None)
def generator_matrix(d: int, j: int) -> Matrix:
    """Return M_j: ones on the diagonal and on row j (1-based)."""
    check_dimension(d)
    if not isinstance(j, int) or not 1 <= j <= d:
        raise ValueError(f"generator index {j!r} outside 1..{d}")
    r = j - 1
    return tuple(tuple(int(i == r or i == k) for k in range(d)) for i in range(d))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def right_multiply_generator(m: Matrix, j: int) -> Matrix:
    """Compute ``m @ M_j`` without a general product.

    Column k of the result is col_k + col_j for k != j; column j is unchanged.
    """
    c = j - 1
    return tuple(
        tuple(x if k == c else x + row[c] for k, x in enumerate(row)) for row in m
    )


def word_matrix(d: int, w: Sequence[int]) -> Matrix:
    """Left-to-right product M_{w_1} M_{w_2} ... M_{w_n}; identity for the empty word."""
    check_dimension(d)
    m = identity(d)
    for j in check_word(d, w):
        m = right_multiply_generator(m, j)
    return m


def _bareiss(a: list[list[int]]) -> int:
    """Fraction-free elimination; ``a`` is consumed."""
    n = len(a)
    sign, prev = 1, 1
    for c in range(n - 1):
        if a[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if a[r][c] != 0), None)
            if swap is None:
                return 0
            a[c], a[swap] = a[swap], a[c]
            sign = -sign
        p = a[c][c]
        for r in range(c + 1, n):
            for k in range(c + 1, n):
                a[r][k] = (a[r][k] * p - a[r][c] * a[c][k]) // prev
        prev = p
    return sign * a[n - 1][n - 1]


def determinant(m: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a rational matrix.

    Columns are scaled to integers by their common denominators, then the
    integer determinant is taken by Bareiss elimination.
    """
    n = len(m)
    if all(isinstance(x, int) for row in m for x in row):
        return Fraction(_bareiss([list(row) for row in m]))
    a = [[Fraction(x) for x in row] for row in m]
    scales = [math.lcm(*(a[r][c].denominator for r in range(n))) for c in range(n)]
    ints = [[a[r][c].numerator * (scales[c] // a[r][c].denominator) for c in range(n)] for r in range(n)]
    return Fraction(_bareiss(ints), math.prod(scales))


def column_norms(m: Matrix) -> tuple[int, ...]:
    """Column sums of ``m`` (the l1 norms of the images of the basis vectors)."""
    return tuple(sum(col) for col in zip(*m))


def nu(m: Matrix) -> Fraction:
    """Product over columns of the reciprocal column sum.

    For a word matrix this is the relative (d-1)-volume of the word's
    sub-simplex inside the standard simplex.
    """
    norms = column_norms(m)
    if any(c <= 0 for c in norms):
        raise InvalidMatrixError(f"column sums must be positive, got {norms}")
    return Fraction(1, prod(norms))


def generator_column_sums(c: tuple[int, ...], j: int) -> tuple[int, ...]:
    """Column sums of ``M @ M_j`` given the column sums ``c`` of ``M``."""
    cj = c[j - 1]
    return tuple(x if k == j - 1 else x + cj for k, x in enumerate(c))


# -- barycentric geometry ---------------------------------------------------


def bary_point(coords: Iterable) -> BaryPoint:
    v = tuple(Fraction(x) for x in coords)
    if any(x < 0 for x in v) or sum(v) != 1:
        raise ValueError(f"not a point of the standard simplex: {v}")
    return v


def vertex(d: int, j: int) -> BaryPoint:
    return tuple(Fraction(int(i == j - 1)) for i in range(d))


def barycenter(d: int) -> BaryPoint:
    return (Fraction(1, d),) * d


def l1_norm(v: Iterable) -> Fraction:
    return sum(v, Fraction(0))


def apply_generator(d: int, j: int, v: Sequence) -> tuple:
    """Unnormalised image ``M_j v``: coordinate j becomes the total sum."""
    total = sum(v)
    return tuple(total if i == j - 1 else x for i, x in enumerate(v))


def apply_map(d: int, j: int, v: BaryPoint) -> BaryPoint:
    """Projectivised map T_j(v) = M_j v / |M_j v|, with |M_j v| = 2 - v_j."""
    check_dimension(d)
    if len(v) != d:
        raise ValueError(f"expected {d} coordinates, got {len(v)}")
    if not 1 <= j <= d:
        raise ValueError(f"generator index {j!r} outside 1..{d}")
    norm = 2 - v[j - 1]
    return tuple(x / norm for x in apply_generator(d, j, v))


def apply_word(d: int, w: Sequence[int], v: BaryPoint) -> BaryPoint:
    """T_{w_1} o ... o T_{w_n} applied to ``v`` (innermost map last in ``w``)."""
    for j in reversed(check_word(d, w)):
        v = apply_map(d, j, v)
    return v


@dataclass(frozen=True)
class Simplex:
    """Ordered vertices; vertex j is the image of the basis vector e_j."""

    vertices: tuple[BaryPoint, ...]

    def __post_init__(self):
        d = len(self.vertices)
        for v in self.vertices:
            if len(v) != d or any(x < 0 for x in v) or sum(v) != 1:
                raise ValueError(f"vertex {v} is not in the standard simplex")

    @property
    def d(self) -> int:
        return len(self.vertices)

    def contains(self, p: Sequence) -> bool:
        """Exact barycentric membership test of point ``p``."""
        # Solve V x = p; p lies in the simplex iff x >= 0 (sum is automatic).
        cols = self.vertices
        d = self.d
        aug = [[cols[k][i] for k in range(d)] + [Fraction(p[i])] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if aug[r][c] != 0)
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [x / pv for x in aug[c]]
            for r in range(d):
                if r != c and aug[r][c]:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        return all(aug[r][d] >= 0 for r in range(d))


def standard_simplex(d: int) -> Simplex:
    return Simplex(tuple(vertex(d, j) for j in range(1, d + 1)))


def simplex_from_matrix(m: Matrix) -> Simplex:
    norms = column_norms(m)
    cols = zip(*m)
    return Simplex(tuple(tuple(Fraction(x, n) for x in col) for col, n in zip(cols, norms)))


def word_simplex(d: int, w: Sequence[int]) -> Simplex:
    """The sub-simplex T_w(standard simplex): columns of M_w, l1-normalised."""
    return simplex_from_matrix(word_matrix(d, w))


def volume_ratio_oracle(s: Simplex) -> Fraction:
    """|det| of the matrix whose columns are the simplex vertices.

    Equals vol(s) / vol(standard simplex), computed independently of ``nu``.
    """
    m = [[v[i] for v in s.vertices] for i in range(s.d)]
    return abs(determinant(m))

"""Intersection theory on the Picard lattice of a cubic surface resolution.

Classes are coordinate vectors ``(d; m1, ..., m6)`` on the blow-up basis
``e0, e1, ..., e6``: ``e0`` is the pullback of a line and ``e1..e6`` are the
exceptional classes, so ``e0 - e1 - e2`` is ``(1; -1, -1, 0, 0, 0, 0)``.
The pairing is ``diag(1, -1, -1, -1, -1, -1, -1)`` and ``K = (-3; 1, ..., 1)``.
Everything is exact; coefficients are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

RANK = 7
DEGREE = 3

Number = int | Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class DivisorClass:
    """A Q-divisor class ``(d; m1..m6)``."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(_frac(c) for c in self.coeffs)
        if len(coeffs) != RANK:
            raise ValueError(f"a divisor class needs {RANK} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def of(cls, *coeffs) -> "DivisorClass":
        return cls(tuple(coeffs))

    @classmethod
    def zero(cls) -> "DivisorClass":
        return cls((0,) * RANK)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.coeffs))

    def __mul__(self, scalar) -> "DivisorClass":
        s = _frac(scalar)
        return DivisorClass(tuple(s * a for a in self.coeffs))

    __rmul__ = __mul__

    def dot(self, other: "DivisorClass") -> Fraction:
        return intersect(self, other)

    def square(self) -> Fraction:
        return intersect(self, self)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def as_ints(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise ValueError(f"{self} is not an integral class")
        return tuple(int(c) for c in self.coeffs)

    def __str__(self) -> str:
        d, *m = (str(c) for c in self.coeffs)
        return f"({d}; {', '.join(m)})"


def intersect(a: DivisorClass, b: DivisorClass) -> Fraction:
    """The pairing ``d_a d_b - sum m_{a,i} m_{b,i}``."""
    ca, cb = a.coeffs, b.coeffs
    return ca[0] * cb[0] - sum(x * y for x, y in zip(ca[1:], cb[1:]))


def canonical_class() -> DivisorClass:
    return DivisorClass.of(-3, 1, 1, 1, 1, 1, 1)


def anticanonical_class() -> DivisorClass:
    return -canonical_class()


def basis(i: int) -> DivisorClass:
    c = [0] * RANK
    c[i] = 1
    return DivisorClass(tuple(c))


def combination(terms: Iterable[tuple[Number, DivisorClass]]) -> DivisorClass:
    total = DivisorClass.zero()
    for coeff, cls in terms:
        total = total + cls * coeff
    return total


def gram_matrix(classes: Sequence[DivisorClass]) -> list[list[Fraction]]:
    return [[intersect(a, b) for b in classes] for a in classes]


def leading_minors(matrix: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Leading principal minors, each an exact determinant."""
    n = len(matrix)
    minors = []
    for k in range(1, n + 1):
        minors.append(determinant([row[:k] for row in matrix[:k]]))
    return minors


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [[_frac(x) for x in row] for row in matrix]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def is_negative_definite(curves: Sequence[DivisorClass]) -> bool:
    """Sylvester's criterion: the k-th leading minor must have sign (-1)^k."""
    if not curves:
        raise ValueError("need at least one class")
    for k, m in enumerate(leading_minors(gram_matrix(curves)), start=1):
        if m == 0 or (m > 0) != (k % 2 == 0):
            return False
    return True


def _pivot_key(x: Fraction) -> int:
    # every nonzero pivot is exact; prefer large heights
    return abs(x.numerator) * x.denominator


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Solve ``matrix @ X = rhs`` exactly for several right-hand sides at once.

    ``rhs`` is a list of columns; the result is the list of solution columns.
    Raises ``ZeroDivisionError`` if the matrix is singular.
    """
    n = len(matrix)
    m = len(rhs)
    a = [[_frac(x) for x in row] + [_frac(col[i]) for col in rhs] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: (a[r][col] != 0, _pivot_key(a[r][col])))
        if a[pivot][col] == 0:
            raise ZeroDivisionError("singular system")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col] / p
                for c in range(col, n + m):
                    a[r][c] -= f * a[col][c]
    return [[a[i][n + j] / a[i][i] for i in range(n)] for j in range(m)]


@lru_cache(maxsize=None)
def exceptional_classes() -> tuple[DivisorClass, ...]:
    """The 27 classes with ``l^2 = -1`` and ``l.K = -1``, by exhaustive scan.

    The box ``d in 0..2``, ``m_i in -1..2`` is complete: the two equations
    give ``sum m = 1 - 3d`` and ``sum m^2 = d^2 + 1``, and Cauchy-Schwarz on
    the six ``m_i`` then forces ``d <= 2`` and ``|m_i| <= 1``.
    """
    K = canonical_class()
    found = []
    for d in range(0, 3):
        for m in itertools.product(range(-1, 3), repeat=RANK - 1):
            c = DivisorClass((d, *m))
            if intersect(c, c) == -1 and intersect(c, K) == -1:
                found.append(c)
    return tuple(sorted(found, key=lambda c: c.coeffs))


@lru_cache(maxsize=None)
def roots() -> tuple[DivisorClass, ...]:
    """All 72 roots of ``K^perp`` (``r^2 = -2``, ``r.K = 0``)."""
    K = canonical_class()
    found = []
    for d in range(-2, 3):
        for m in itertools.product(range(-2, 3), repeat=RANK - 1):
            c = DivisorClass((d, *m))
            if intersect(c, K) == 0 and intersect(c, c) == -2:
                found.append(c)
    return tuple(sorted(found, key=lambda c: c.coeffs))


def is_root(c: DivisorClass) -> bool:
    return intersect(c, c) == -2 and intersect(c, canonical_class()) == 0


def is_positive_root(c: DivisorClass) -> bool:
    """Positive w.r.t. the blow-up ordering: ``e_i - e_j`` (i<j), ``e0-ei-ej-ek``, ``2e0-sum e_i``."""
    if not is_root(c):
        return False
    d, *m = c.coeffs
    if d > 0:
        return True
    if d < 0:
        return False
    first = next(x for x in m if x != 0)
    return first > 0


def positive_roots() -> tuple[DivisorClass, ...]:
    return tuple(r for r in roots() if is_positive_root(r))

"""Exact arithmetic in Q(sqrt(D)) and small exact linear algebra.

Scalars are pairs (a, b) of rationals meaning a + b*sqrt(D); D = 0 degenerates
to plain rationals.  All row reductions and nullspace computations stay in the
field, so ranks and span comparisons are decidable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence


class QSurd:
    """Element a + b*sqrt(D) of the real quadratic field Q(sqrt(D)).

    D is a non-square positive integer, or 0 for the rational field.
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D: int = 0):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = int(D)
        if self.D == 0 and self.b != 0:
            raise ValueError("surd part requires D > 0")

    def _coerce(self, other) -> "QSurd":
        if isinstance(other, QSurd):
            if self.D and other.D and self.D != other.D:
                raise ValueError("mixed surd bases %d and %d" % (self.D, other.D))
            return other
        return QSurd(other, 0, 0)

    def _d(self, other: "QSurd") -> int:
        return self.D or other.D

    def __add__(self, other):
        o = self._coerce(other)
        return QSurd(self.a + o.a, self.b + o.b, self._d(o))

    __radd__ = __add__

    def __neg__(self):
        return QSurd(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        D = self._d(o)
        return QSurd(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def inverse(self) -> "QSurd":
        # (a + b s)^-1 = (a - b s) / (a^2 - b^2 D); denominator nonzero since
        # D is not a perfect square.
        den = self.a * self.a - self.b * self.b * self.D
        if den == 0:
            if self.a == 0 and self.b == 0:
                raise ZeroDivisionError("inverse of zero")
            raise ValueError("D must be a non-square")
        return QSurd(self.a / den, -self.b / den, self.D)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(D)."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return (self.b > 0) - (self.b < 0)
        if self.a > 0 and self.b > 0:
            return 1
        if self.a < 0 and self.b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 D; sign decided by the larger part
        lhs = self.a * self.a
        rhs = self.b * self.b * self.D
        if lhs == rhs:
            return 0
        bigger_rational = lhs > rhs
        return (1 if self.a > 0 else -1) if bigger_rational else (1 if self.b > 0 else -1)

    def __eq__(self, other):
        if isinstance(other, (QSurd, int, Fraction)):
            return (self - self._coerce(other)).is_zero()
        return NotImplemented

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __repr__(self):
        if self.b == 0:
            return "QSurd(%s)" % self.a
        return "QSurd(%s + %s*sqrt(%d))" % (self.a, self.b, self.D)


def qs(x, D: int = 0) -> QSurd:
    return x if isinstance(x, QSurd) else QSurd(x, 0, D)


def rref(rows: Sequence[Sequence[QSurd]]):
    """Reduced row-echelon form over the field; returns (rref_rows, pivot_cols).

    Input rows are not mutated.  Deterministic pivot rule: first nonzero
    column, rows in given order.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(m)):
            if not qs(m[i][col]).is_zero():
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = qs(m[rank][col]).inverse()
        m[rank] = [qs(v) * inv for v in m[rank]]
        for i in range(len(m)):
            if i != rank and not qs(m[i][col]).is_zero():
                f = qs(m[i][col])
                m[i] = [qs(a) - f * qs(b) for a, b in zip(m[i], m[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(m):
            break
    return m[:rank], pivots


def rank(rows: Sequence[Sequence[QSurd]]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: Sequence[Sequence[QSurd]]):
    """Basis of the right nullspace {x : M x = 0} over the field."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [QSurd(0) for _ in range(ncols)]
        v[fc] = QSurd(1)
        for r, pc in zip(red, pivots):
            v[pc] = -qs(r[fc])
        basis.append(v)
    return basis


def solve_exact(rows: Sequence[Sequence[QSurd]], rhs: Sequence[QSurd]):
    """Solve M x = rhs for square nonsingular M over the field."""
    aug = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    n = len(rows)
    if pivots[:n] != list(range(n)) or len(red) != n:
        raise ValueError("singular system")
    return [red[i][-1] for i in range(n)]


def dot(u: Iterable, v: Iterable) -> QSurd:
    acc = QSurd(0)
    for a, b in zip(u, v):
        acc = acc + qs(a) * qs(b)
    return acc

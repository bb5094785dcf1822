"""Paved spaces: interval grounds with exact interval-set algebra, and finite grounds.

An :class:`IntervalSet` is a finite union of intervals, each end open or
closed.  It is stored as sorted breakpoints together with membership of each
breakpoint and of each open gap between consecutive breakpoints, so every
boolean operation is exact endpoint arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import StructuralError

_EMPTY_F = np.zeros(0)
_EMPTY_B = np.zeros(0, dtype=bool)


def _normalise(points, on_point, on_gap):
    """Drop breakpoints that do not change membership."""
    if points.size == 0:
        return _EMPTY_F, _EMPTY_B, _EMPTY_B
    ext = np.concatenate(([False], on_gap, [False]))
    keep = ~((on_point == ext[:-1]) & (on_point == ext[1:]))
    pts = points[keep]
    pm = on_point[keep]
    gm = ext[1:][keep][:-1] if pts.size else _EMPTY_B
    return pts, pm, gm


class IntervalSet:
    """Exact finite union of intervals on the real line."""

    __slots__ = ("points", "on_point", "on_gap")

    def __init__(self, points=_EMPTY_F, on_point=_EMPTY_B, on_gap=_EMPTY_B, _normalised=False):
        points = np.asarray(points, dtype=np.float64)
        on_point = np.asarray(on_point, dtype=bool)
        on_gap = np.asarray(on_gap, dtype=bool)
        if points.size and on_gap.size != points.size - 1:
            raise StructuralError("gap membership must have one entry per gap")
        if not _normalised:
            if np.any(np.diff(points) <= 0):
                raise StructuralError("breakpoints must strictly increase")
            points, on_point, on_gap = _normalise(points, on_point, on_gap)
        for arr in (points, on_point, on_gap):
            arr.setflags(write=False)
        self.points = points
        self.on_point = on_point
        self.on_gap = on_gap

    # -------------------------------------------------------- constructors

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def interval(cls, a, b, left_closed=True, right_closed=False):
        a = float(a)
        b = float(b)
        if not np.isfinite(a) or not np.isfinite(b):
            raise StructuralError("interval endpoints must be finite")
        if a > b:
            raise StructuralError(f"empty interval bounds {a} > {b}")
        if a == b:
            if left_closed and right_closed:
                return cls([a], [True], [])
            return cls()
        return cls([a, b], [left_closed, right_closed], [True])

    @classmethod
    def closed(cls, a, b):
        return cls.interval(a, b, True, True)

    @classmethod
    def half_open(cls, a, b):
        return cls.interval(a, b, True, False)

    @classmethod
    def point(cls, c):
        return cls.interval(c, c, True, True)

    @classmethod
    def from_cells(cls, left, right, left_closed, right_closed):
        """Union of pairwise disjoint cells sorted by (left, right)."""
        left = np.asarray(left, dtype=np.float64)
        right = np.asarray(right, dtype=np.float64)
        if left.size == 0:
            return cls()
        pts = np.unique(np.concatenate((left, right)))
        pm = np.zeros(pts.size, dtype=bool)
        gm = np.zeros(max(pts.size - 1, 0), dtype=bool)
        li = np.searchsorted(pts, left)
        ri = np.searchsorted(pts, right)
        pm[li[left_closed]] = True
        pm[ri[right_closed]] = True
        nondeg = right > left
        gm[li[nondeg]] = True
        return cls(pts, pm, gm)

    # -------------------------------------------------------- queries

    def is_empty(self):
        return self.points.size == 0

    def contains(self, x):
        """Vectorised membership test."""
        x = np.asarray(x, dtype=np.float64)
        if self.points.size == 0:
            return np.zeros(x.shape, dtype=bool)
        idx = np.searchsorted(self.points, x, side="right") - 1
        safe = np.clip(idx, 0, self.points.size - 1)
        at_point = (idx >= 0) & (self.points[safe] == x)
        gap_ok = (idx >= 0) & (idx < self.points.size - 1)
        in_gap = np.zeros(x.shape, dtype=bool)
        gi = np.clip(idx, 0, max(self.points.size - 2, 0))
        if self.on_gap.size:
            in_gap = gap_ok & self.on_gap[gi]
        return np.where(at_point, self.on_point[safe], in_gap)

    def __contains__(self, x):
        return bool(self.contains(np.array([x]))[0])

    def components(self):
        """Maximal intervals as (a, b, left_closed, right_closed) tuples."""
        out = []
        pts, pm, gm = self.points, self.on_point, self.on_gap
        k = 0
        n = pts.size
        while k < n:
            if not pm[k] and (k == n - 1 or not gm[k]):
                k += 1
                continue
            a = pts[k]
            lc = bool(pm[k])
            if k == n - 1 or not gm[k]:
                out.append((float(a), float(a), True, True))
                k += 1
                continue
            j = k + 1
            while j < n - 1 and pm[j] and gm[j]:
                j += 1
            out.append((float(a), float(pts[j]), lc, bool(pm[j])))
            k = j if not pm[j] else j + 1
        return out

    def length(self):
        if self.on_gap.size == 0:
            return 0.0
        widths = np.diff(self.points)[self.on_gap]
        return _kernels.fsum(widths)

    def hull(self):
        if self.is_empty():
            raise StructuralError("empty set has no hull")
        return float(self.points[0]), float(self.points[-1])

    def is_bounded_interval(self):
        return len(self.components()) == 1

    # -------------------------------------------------------- boolean algebra

    def _gap_membership(self, q):
        """Membership of this set on the open gaps of the sorted grid ``q``."""
        if self.points.size < 2 or q.size < 2:
            return np.zeros(max(q.size - 1, 0), dtype=bool)
        idx = np.searchsorted(self.points, q[:-1], side="right") - 1
        ok = (idx >= 0) & (idx < self.points.size - 1)
        return ok & self.on_gap[np.clip(idx, 0, self.points.size - 2)]

    def _combine(self, other, op):
        q = np.union1d(self.points, other.points)
        if q.size == 0:
            return IntervalSet()
        pm = op(self.contains(q), other.contains(q))
        gm = op(self._gap_membership(q), other._gap_membership(q))
        return IntervalSet(q, pm, gm)

    def __or__(self, other):
        return self._combine(other, np.logical_or)

    def __and__(self, other):
        return self._combine(other, np.logical_and)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a & ~b)

    def __xor__(self, other):
        return self._combine(other, np.logical_xor)

    def issubset(self, other):
        return (self - other).is_empty()

    def __le__(self, other):
        return self.issubset(other)

    def isdisjoint(self, other):
        return (self & other).is_empty()

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.on_point, other.on_point)
            and np.array_equal(self.on_gap, other.on_gap)
        )

    def __hash__(self):
        return hash((self.points.tobytes(), self.on_point.tobytes(), self.on_gap.tobytes()))

    def __repr__(self):
        parts = []
        for a, b, lc, rc in self.components():
            if a == b:
                parts.append(f"{{{a!r}}}")
            else:
                parts.append(f"{'[' if lc else '('}{a!r}, {b!r}{']' if rc else ')'}")
        return "IntervalSet(" + (" U ".join(parts) if parts else "{}") + ")"


# ------------------------------------------------------------------ grounds


@dataclass(frozen=True)
class Interval:
    """Interval ground set [a, b]."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.a >= self.b:
            raise StructuralError("interval ground needs finite a < b")

    def as_set(self):
        return IntervalSet.closed(self.a, self.b)


@dataclass(frozen=True)
class FiniteSet:
    """Finite ground {0, ..., n-1}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError("finite ground needs n >= 1")

    def as_set(self):
        return frozenset(range(self.n))


class PavedSpace:
    """A ground set with its paving.

    Interval grounds are paved by finite unions of intervals (closed under
    union, intersection and relative complement); finite grounds by the full
    power set.
    """

    def __init__(self, ground):
        if not isinstance(ground, (Interval, FiniteSet)):
            raise StructuralError(f"unsupported ground {ground!r}")
        self.ground = ground
        self.omega = ground.as_set()

    @property
    def is_finite(self):
        return isinstance(self.ground, FiniteSet)

    def contains(self, A):
        if self.is_finite:
            return isinstance(A, frozenset) and A <= self.omega
        return isinstance(A, IntervalSet) and A.issubset(self.omega)

    def check(self, A):
        if not self.contains(A):
            raise StructuralError(f"{A!r} is not in the paving")
        return A

    def complement(self, A):
        self.check(A)
        return self.omega - A

    def empty(self):
        return frozenset() if self.is_finite else IntervalSet()

    def __repr__(self):
        return f"PavedSpace({self.ground!r})"


def interval_space(a=0.0, b=1.0):
    return PavedSpace(Interval(a, b))


def finite_space(n):
    return PavedSpace(FiniteSet(n))

"""Tagged partitions, refinement chains, gauges, truncations and countable streams.

Interval cells are stored struct-of-arrays: ``left``, ``right`` and the two
closure flags, sorted by (left, right).  A degenerate cell [c, c] is the
singleton {c}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractViolation, ResourceExhausted, StructuralError
from .sets import IntervalSet


def _as_target(target):
    if isinstance(target, IntervalSet):
        return target
    if isinstance(target, frozenset):
        return target
    if isinstance(target, tuple) and len(target) == 2:
        return IntervalSet.half_open(*target)
    raise StructuralError(f"unsupported partition target {target!r}")


class IntervalCells:
    """Pairwise disjoint interval cells, sorted by (left, right)."""

    __slots__ = ("left", "right", "left_closed", "right_closed")

    def __init__(self, left, right, left_closed, right_closed, *, validate=True):
        left = np.asarray(left, dtype=np.float64)
        right = np.asarray(right, dtype=np.float64)
        lc = np.broadcast_to(np.asarray(left_closed, dtype=bool), left.shape).copy()
        rc = np.broadcast_to(np.asarray(right_closed, dtype=bool), left.shape).copy()
        if validate:
            order = np.lexsort((right, left))
            if np.any(order != np.arange(order.size)):
                left, right, lc, rc = left[order], right[order], lc[order], rc[order]
            bad = (left > right) | ((left == right) & ~(lc & rc))
            if np.any(bad):
                raise StructuralError("cells must be nonempty intervals")
            if left.size > 1:
                gap = left[1:] - right[:-1]
                overlap = (gap < 0) | ((gap == 0) & rc[:-1] & lc[1:])
                if np.any(overlap):
                    k = int(np.flatnonzero(overlap)[0])
                    raise StructuralError(f"cells {k} and {k + 1} overlap")
        for arr in (left, right, lc, rc):
            arr.setflags(write=False)
        self.left, self.right, self.left_closed, self.right_closed = left, right, lc, rc

    def __len__(self):
        return self.left.size

    @property
    def lengths(self):
        return self.right - self.left

    @property
    def mesh(self):
        return float(self.lengths.max(initial=0.0))

    def union(self):
        return IntervalSet.from_cells(self.left, self.right, self.left_closed, self.right_closed)

    def cell(self, k):
        return IntervalSet.interval(self.left[k], self.right[k], self.left_closed[k], self.right_closed[k])

    def contains_points(self, x, closure=False):
        """Whether x[k] lies in cell k (or its closure)."""
        if closure:
            return (self.left <= x) & (x <= self.right)
        lo = (self.left < x) | ((self.left == x) & self.left_closed)
        hi = (x < self.right) | ((x == self.right) & self.right_closed)
        return lo & hi

    def locate(self, x):
        """Index of the cell containing each point of x, or -1."""
        x = np.asarray(x, dtype=np.float64)
        j = np.searchsorted(self.left, x, side="right") - 1
        out = np.full(x.shape, -1, dtype=np.int64)
        for cand in (j, j - 1):
            ok = cand >= 0
            c = np.clip(cand, 0, max(len(self) - 1, 0))
            if len(self) == 0:
                break
            lo = (self.left[c] < x) | ((self.left[c] == x) & self.left_closed[c])
            hi = (x < self.right[c]) | ((x == self.right[c]) & self.right_closed[c])
            hit = ok & lo & hi & (out < 0)
            out[hit] = c[hit]
        return out

    def locate_gaps(self, a, b):
        """Index of the cell containing each open interval (a, b), or -1."""
        j = np.searchsorted(self.left, a, side="right") - 1
        ok = j >= 0
        c = np.clip(j, 0, max(len(self) - 1, 0))
        if len(self) == 0:
            return np.full(np.shape(a), -1)
        hit = ok & (self.left[c] <= a) & (self.right[c] >= b)
        return np.where(hit, c, -1)

    def __repr__(self):
        return f"IntervalCells(n={len(self)}, mesh={self.mesh:g})"


def elementary_pieces(target, grid):
    """Split ``target`` at the points of ``grid``.

    Returns arrays (a, b, is_point) of the elementary pieces in order: the
    singletons at breakpoints that lie in the target and the open gaps
    between consecutive breakpoints that lie in the target.
    """
    q = np.union1d(target.points, np.asarray(grid, dtype=np.float64))
    if target.points.size:
        lo, hi = target.points[0], target.points[-1]
        q = q[(q >= lo) & (q <= hi)]
    pm = target.contains(q)
    gm = target._gap_membership(q)
    n = q.size
    a = np.empty(2 * n - 1 if n else 0)
    b = np.empty_like(a)
    is_point = np.zeros(a.shape, dtype=bool)
    keep = np.zeros(a.shape, dtype=bool)
    a[0::2], b[0::2], is_point[0::2], keep[0::2] = q, q, True, pm
    if n > 1:
        a[1::2], b[1::2], keep[1::2] = q[:-1], q[1:], gm
    return a[keep], b[keep], is_point[keep]


def _merge_runs(a, b, is_point, labels):
    """Merge consecutive elementary pieces sharing a label into cells."""
    if a.size == 0:
        return IntervalCells([], [], [], [], validate=False)
    new = np.ones(a.size, dtype=bool)
    new[1:] = np.any(labels[1:] != labels[:-1], axis=-1) if labels.ndim > 1 else labels[1:] != labels[:-1]
    # pieces must also be adjacent to merge
    adjacent = np.zeros(a.size, dtype=bool)
    adjacent[1:] = b[:-1] == a[1:]
    new |= ~adjacent
    starts = np.flatnonzero(new)
    ends = np.append(starts[1:], a.size) - 1
    left = a[starts]
    right = b[ends]
    lc = is_point[starts]
    rc = is_point[ends]
    return IntervalCells(left, right, lc, rc, validate=False)


def grid_cells(target, grid):
    """Partition ``target`` by the grid: each boundary point joins the cell after it
    when possible, otherwise the cell before it, otherwise stays a singleton."""
    a, b, is_point = elementary_pieces(target, grid)
    if a.size == 0:
        return IntervalCells([], [], [], [], validate=False)
    label = np.arange(a.size)
    pts = np.flatnonzero(is_point)
    nxt = pts + 1
    prv = pts - 1
    join_next = (nxt < a.size) & ~is_point[np.minimum(nxt, a.size - 1)] & (a[np.minimum(nxt, a.size - 1)] == a[pts])
    join_prev = ~join_next & (prv >= 0) & ~is_point[np.maximum(prv, 0)] & (b[np.maximum(prv, 0)] == a[pts])
    label[pts[join_next]] = nxt[join_next]
    label[pts[join_prev]] = prv[join_prev]
    return _merge_runs(a, b, is_point, label)


class FiniteCells:
    """Partition cells of a finite ground: a tuple of disjoint frozensets."""

    def __init__(self, cells):
        cells = tuple(frozenset(c) for c in cells)
        seen = set()
        for c in cells:
            if not c:
                raise StructuralError("cells must be nonempty")
            if seen & c:
                raise StructuralError("cells overlap")
            seen |= c
        self.cells = cells

    def __len__(self):
        return len(self.cells)

    def union(self):
        return frozenset().union(*self.cells)

    def __iter__(self):
        return iter(self.cells)


# ------------------------------------------------------------------ tags


@dataclass(frozen=True)
class TagPolicy:
    """Choice rule for tags: left, midpoint, right, seeded-random or adversarial-list.

    ``thetas`` (adversarial-list) are relative positions in [0, 1] cycled over cells.
    """

    kind: str = "midpoint"
    seed: int = 0
    thetas: tuple = (0.0, 1.0)

    KINDS = ("left", "midpoint", "right", "seeded-random", "adversarial-list")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise StructuralError(f"unknown tag policy {self.kind!r}")

    @property
    def label(self):
        if self.kind == "seeded-random":
            return f"seeded-random:{self.seed}"
        return self.kind

    def interval_tags(self, cells, closure=False):
        l, r = cells.left, cells.right
        if self.kind == "left":
            t = l.copy()
        elif self.kind == "right":
            t = r.copy()
        elif self.kind == "midpoint":
            t = l + 0.5 * (r - l)
        elif self.kind == "seeded-random":
            u = np.random.default_rng(self.seed).random(len(cells))
            t = l + u * (r - l)
        else:
            th = np.resize(np.asarray(self.thetas, dtype=np.float64), len(cells))
            t = l + th * (r - l)
        t = np.clip(t, l, r)
        if not closure:
            # pull tags off open endpoints
            at_l = (t == l) & ~cells.left_closed
            t[at_l] = np.nextafter(l[at_l], r[at_l])
            at_r = (t == r) & ~cells.right_closed
            t[at_r] = np.nextafter(r[at_r], l[at_r])
        return t

    def finite_tags(self, cells):
        out = []
        rng = np.random.default_rng(self.seed)
        for k, c in enumerate(cells):
            pts = sorted(c)
            if self.kind == "left":
                out.append(pts[0])
            elif self.kind == "right":
                out.append(pts[-1])
            elif self.kind == "midpoint":
                out.append(pts[(len(pts) - 1) // 2])
            elif self.kind == "seeded-random":
                out.append(pts[int(rng.integers(len(pts)))])
            else:
                th = self.thetas[k % len(self.thetas)]
                out.append(pts[min(int(th * len(pts)), len(pts) - 1)])
        return np.array(out, dtype=np.float64)


def standard_policies(n_random=5, seed=0):
    pols = [TagPolicy("left"), TagPolicy("midpoint"), TagPolicy("right")]
    pols += [TagPolicy("seeded-random", seed=seed + k) for k in range(n_random)]
    pols.append(TagPolicy("adversarial-list", thetas=(0.0, 1.0, 0.5, 0.25, 0.75)))
    return pols


class TaggedPartition:
    """Finite cells tiling ``target`` with one tag per cell.

    ``mode`` is "plain" (tag in the cell) or "gauge" (tag in its closure).
    All invariants are checked on construction.
    """

    def __init__(self, cells, tags, target, mode="plain"):
        if mode not in ("plain", "gauge"):
            raise StructuralError(f"unknown partition mode {mode!r}")
        tags = np.asarray(tags, dtype=np.float64)
        if tags.shape != (len(cells),):
            raise StructuralError("one tag per cell is required")
        if isinstance(cells, FiniteCells):
            if cells.union() != target:
                raise StructuralError("cells do not tile the target")
            for c, t in zip(cells, tags):
                if int(t) not in c:
                    raise StructuralError(f"tag {t} outside its cell")
        else:
            if cells.union() != target:
                raise StructuralError("cells do not tile the target")
            if not np.all(cells.contains_points(tags, closure=(mode == "gauge"))):
                k = int(np.flatnonzero(~cells.contains_points(tags, closure=(mode == "gauge")))[0])
                raise StructuralError(f"tag {tags[k]!r} outside cell {k}")
        tags.setflags(write=False)
        self.cells = cells
        self.tags = tags
        self.target = target
        self.mode = mode

    @property
    def is_finite(self):
        return isinstance(self.cells, FiniteCells)

    def __len__(self):
        return len(self.cells)

    @property
    def mesh(self):
        return 0.0 if self.is_finite else self.cells.mesh

    @classmethod
    def with_policy(cls, cells, target, policy, mode="plain"):
        if isinstance(cells, FiniteCells):
            tags = policy.finite_tags(cells)
        else:
            tags = policy.interval_tags(cells, closure=(mode == "gauge"))
        return cls(cells, tags, target, mode)

    def __repr__(self):
        return f"TaggedPartition(n={len(self)}, mode={self.mode})"


def uniform_tagged_partition(target, n, policy=None):
    if n <= 0:
        raise StructuralError("n must be >= 1")
    target = _as_target(target)
    a, b = target.hull()
    grid = a + (b - a) * np.arange(n + 1) / n
    return TaggedPartition.with_policy(grid_cells(target, grid), target, policy or TagPolicy("midpoint"))


def _cells_refine(fine, coarse):
    if isinstance(fine, FiniteCells):
        return all(any(c <= d for d in coarse) for c in fine)
    # every fine cell must sit inside one coarse cell: its interior gap and its endpoints
    j = coarse.locate_gaps(fine.left, fine.right)
    deg = fine.left == fine.right
    jl = coarse.locate(fine.left)
    jr = coarse.locate(fine.right)
    mid_ok = deg | (j >= 0)
    l_ok = ~fine.left_closed | (jl == np.where(deg, jl, j))
    r_ok = ~fine.right_closed | (jr == np.where(deg, jr, j))
    l_ok &= ~fine.left_closed | (jl >= 0)
    r_ok &= ~fine.right_closed | (jr >= 0)
    return bool(np.all(mid_ok & l_ok & r_ok))


def is_refinement(fine, coarse):
    """Whether every cell of ``fine`` lies inside a cell of ``coarse``."""
    if fine.target != coarse.target:
        raise StructuralError("partitions have different targets")
    return _cells_refine(fine.cells, coarse.cells)


def common_refinement(P, Q, policy=None):
    """Cellwise intersections of P and Q, retagged by ``policy``."""
    if P.target != Q.target:
        raise StructuralError("partitions have different targets")
    policy = policy or TagPolicy("midpoint")
    if P.is_finite:
        cells = FiniteCells(c & d for c in P.cells for d in Q.cells if c & d)
        return TaggedPartition.with_policy(cells, P.target, policy)
    grid = np.union1d(np.union1d(P.cells.left, P.cells.right), np.union1d(Q.cells.left, Q.cells.right))
    a, b, is_point = elementary_pieces(P.target, grid)
    labels = []
    for part in (P.cells, Q.cells):
        lab = np.where(is_point, part.locate(a), part.locate_gaps(a, b))
        labels.append(lab)
    cells = _merge_runs(a, b, is_point, np.stack(labels, axis=1))
    cells = IntervalCells(cells.left, cells.right, cells.left_closed, cells.right_closed)
    return TaggedPartition.with_policy(cells, P.target, policy)


# ------------------------------------------------------------------ chains


class RefinementChain:
    """Cofinal chain k -> cells(k), each step refining the previous ones."""

    def __init__(self, target, generator, levels, label="chain"):
        self.target = target
        self._generator = generator
        self.levels = tuple(levels)
        self.label = label
        self._cache = {}

    def cells(self, k):
        if k not in self._cache:
            cells = self._generator(k)
            if not isinstance(cells, FiniteCells):
                cells = IntervalCells(cells.left, cells.right, cells.left_closed, cells.right_closed)
                if cells.union() != self.target:
                    raise StructuralError(f"chain step {k} does not tile the target")
            elif cells.union() != self.target:
                raise StructuralError(f"chain step {k} does not tile the target")
            self._cache = {k: cells}
        return self._cache[k]

    def partition(self, k, policy, mode="plain"):
        return TaggedPartition.with_policy(self.cells(k), self.target, policy, mode)

    def check_nested(self):
        prev = None
        for k in self.levels:
            cur = self.cells(k)
            if prev is not None and not _cells_refine(cur, prev):
                return False
            prev = cur
        return True


def dyadic_chain(target, start=0, stop=20, span=None):
    """Level k cuts the hull (or ``span``) of the target into 2**k equal pieces."""
    target = _as_target(target)
    if target.is_empty():
        raise StructuralError("cannot partition the empty set")
    a, b = span or target.hull()

    def gen(k):
        return grid_cells(target, a + (b - a) * np.arange(2**k + 1) / 2**k)

    return RefinementChain(target, gen, range(start, stop + 1), f"dyadic[{start}..{stop}]")


def graded_chain(target, anchor, start=4, stop=14, shells=32, span=None):
    """Grids refined geometrically toward ``anchor`` (an endpoint of the span).

    Level m puts 2**m equal cells into each of the dyadic shells
    {x : 2**-(j+1) <= |x - anchor| / width < 2**-j}, j < shells.
    """
    target = _as_target(target)
    a, b = span or target.hull()
    width = b - a
    sign = 1.0 if anchor == a else -1.0
    if anchor not in (a, b):
        raise StructuralError("anchor must be an endpoint of the span")

    def gen(m):
        j = np.arange(shells)[:, None]
        u = np.arange(2**m)[None, :] / 2**m
        rel = (2.0 ** -(j + 1)) * (1.0 + u)
        pts = anchor + sign * width * np.concatenate(([0.0, 1.0], rel.ravel()))
        return grid_cells(target, np.unique(pts))

    return RefinementChain(target, gen, range(start, stop + 1), f"graded[{start}..{stop}]")


def null_extended_chain(chain, null_set):
    """Chain on Omega built from a chain on Omega \\ N plus the single cell N (an interval)."""
    comps = null_set.components()
    if len(comps) != 1:
        raise StructuralError("the null cell must be a single interval")
    a, b, lc, rc = comps[0]
    target = chain.target | null_set
    if not chain.target.isdisjoint(null_set):
        raise StructuralError("the null set must be disjoint from the chain target")

    def gen(k):
        c = chain.cells(k)
        return IntervalCells(
            np.append(c.left, a), np.append(c.right, b), np.append(c.left_closed, lc), np.append(c.right_closed, rc)
        )

    return RefinementChain(target, gen, chain.levels, f"{chain.label}+null")


def finite_chain(n, levels=None):
    """Finite ground {0..n-1}: level k groups consecutive points in blocks of ceil(n / 2**k)."""
    target = frozenset(range(n))
    top = int(np.ceil(np.log2(n))) if n > 1 else 0
    levels = range(0, top + 1) if levels is None else levels

    def gen(k):
        size = max(1, -(-n // 2**k))
        return FiniteCells(range(s, min(s + size, n)) for s in range(0, n, size))

    return RefinementChain(target, gen, levels, f"finite[{n}]")


def finite_target_chain(target, levels=None):
    """Chain of a finite subset target ending in singletons."""
    pts = sorted(target)
    top = int(np.ceil(np.log2(len(pts)))) if len(pts) > 1 else 0
    levels = range(0, top + 1) if levels is None else levels

    def gen(k):
        size = max(1, -(-len(pts) // 2**k))
        return FiniteCells(pts[s : s + size] for s in range(0, len(pts), size))

    return RefinementChain(frozenset(target), gen, levels, "finite")


# ------------------------------------------------------------------ gauges


@dataclass(frozen=True)
class Gauge:
    """Positive radius function; ``radius`` must accept numpy arrays."""

    radius: Callable
    label: str = "gauge"

    def __call__(self, t):
        return np.broadcast_to(np.asarray(self.radius(np.asarray(t, dtype=np.float64)), dtype=np.float64), np.shape(t))

    @classmethod
    def constant(cls, c):
        if c <= 0:
            raise StructuralError("gauge radius must be positive")
        return cls(lambda t, c=c: np.full(np.shape(t), c), f"const({c})")

    @classmethod
    def around(cls, point, inner, outer):
        """Radius ``inner`` at ``point`` and ``outer`` elsewhere."""
        return cls(lambda t: np.where(t == point, inner, outer), f"around({point},{inner},{outer})")


def gauge_containment(partition, g):
    """Whether every cell lies in (t - g(t), t + g(t))."""
    c = partition.cells
    t = partition.tags
    r = g(t)
    return bool(np.all((c.left > t - r) & (c.right < t + r)))


def gauge_fine_partition(target, g, max_depth=40):
    """Cousin-style bisection: split cells until some tag in the closure is g-fine."""
    target = _as_target(target)
    fin_l, fin_r, fin_lc, fin_rc, fin_t = [], [], [], [], []
    comps = target.components()
    l = np.array([c[0] for c in comps])
    r = np.array([c[1] for c in comps])
    lc = np.array([c[2] for c in comps])
    rc = np.array([c[3] for c in comps])
    for depth in range(max_depth + 1):
        if l.size == 0:
            break
        tag = np.full(l.shape, np.nan)
        for cand in (l + 0.5 * (r - l), l, r):
            rad = g(cand)
            if np.any(rad <= 0):
                raise ContractViolation("gauge must be positive", module="partitions", operation="gauge_fine_partition")
            fine = np.isnan(tag) & (l > cand - rad) & (r < cand + rad)
            tag[fine] = cand[fine]
        done = ~np.isnan(tag)
        for lst, arr in zip((fin_l, fin_r, fin_lc, fin_rc, fin_t), (l, r, lc, rc, tag)):
            lst.append(arr[done])
        l, r, lc, rc = l[~done], r[~done], lc[~done], rc[~done]
        if l.size and depth < max_depth:
            m = l + 0.5 * (r - l)
            if np.any((m <= l) | (m >= r)):
                break
            l, r, lc, rc = (
                np.concatenate((l, m)),
                np.concatenate((m, r)),
                np.concatenate((lc, np.ones_like(lc))),
                np.concatenate((np.zeros_like(rc), rc)),
            )
    if l.size:
        raise ResourceExhausted(f"gauge fineness not reached within depth {max_depth}")
    left = np.concatenate(fin_l)
    order = np.lexsort((np.concatenate(fin_r), left))
    cells = IntervalCells(
        left[order],
        np.concatenate(fin_r)[order],
        np.concatenate(fin_lc)[order],
        np.concatenate(fin_rc)[order],
        validate=False,
    )
    return TaggedPartition(cells, np.concatenate(fin_t)[order], target, mode="gauge")


# ------------------------------------------------------------------ countable streams


@dataclass(frozen=True)
class Truncation:
    """Sion truncation: keep the first k_m enumerated pieces at refinement m.

    ``kind`` "geometric" gives k_m = 2**(m + base + 1); "linear" gives
    k_m = c * (m + 1).  Both increase with m, so earlier selections stay
    inside later ones.
    """

    kind: str = "geometric"
    c: int = 4
    base: int = 6

    def __post_init__(self):
        if self.kind not in ("geometric", "linear"):
            raise StructuralError(f"unknown truncation schedule {self.kind!r}")

    def k(self, m):
        if self.kind == "geometric":
            return 2 ** (m + self.base + 1)
        return self.c * (m + 1)


class StreamCells:
    """Enumerated cells of a countable partition (enumeration order, not sorted)."""

    __slots__ = ("left", "right", "left_closed", "right_closed", "points")

    def __init__(self, left, right, left_closed, right_closed, points=None):
        self.left = left
        self.right = right
        self.left_closed = left_closed
        self.right_closed = right_closed
        self.points = points

    def __len__(self):
        return self.left.size if self.points is None else len(self.points)

    def head(self, k):
        if self.points is not None:
            return StreamCells(None, None, None, None, self.points[:k])
        return StreamCells(self.left[:k], self.right[:k], self.left_closed[:k], self.right_closed[:k])

    def sorted_cells(self):
        return IntervalCells(self.left, self.right, self.left_closed, self.right_closed)


class CountablePartitionStream:
    """Disjoint countable partition of a target, enumerated lazily.

    Each component [a, b] contributes base cells of length (b - a) 2**-n
    accumulating toward b; components are interleaved round-robin.  Point
    cells (a closed b, isolated points) are listed first and do not count
    toward ``depth``.  A finite target lists its singletons, padded with
    empty sets.  Refinement m cuts base cell n
    into 2**max(0, m + base - n) equal pieces.
    """

    def __init__(self, target, base=6):
        self.target = _as_target(target)
        self.base = int(base)
        self.finite = isinstance(self.target, frozenset)
        if not self.finite:
            comps = self.target.components()
            if not comps:
                raise StructuralError("target must be nondegenerate")
            self.points = [c[0] for c in comps if c[0] == c[1]]
            self.points += [c[1] for c in comps if c[0] < c[1] and c[3]]
            self.intervals = [(c[0], c[1], c[2]) for c in comps if c[0] < c[1]]

    def _base_layout(self, depth):
        """(component index, n) for the first ``depth`` non-point base cells."""
        k = max(len(self.intervals), 1)
        idx = np.arange(depth)
        return idx % k, idx // k + 1

    def _base_cells(self, depth):
        n_int = depth
        comp, n = self._base_layout(n_int) if self.intervals else (np.zeros(0, int), np.zeros(0, int))
        A = np.array([c[0] for c in self.intervals])[comp] if self.intervals else np.zeros(0)
        B = np.array([c[1] for c in self.intervals])[comp] if self.intervals else np.zeros(0)
        LC = np.array([c[2] for c in self.intervals])[comp] if self.intervals else np.zeros(0, bool)
        w = B - A
        left = np.where(n == 1, A, B - w * 2.0 ** (-(n - 1)))
        right = B - w * 2.0 ** (-n.astype(np.float64))
        lc = np.where(n == 1, LC, True)
        keep = right > left
        p = np.array(self.points, dtype=np.float64)
        return (
            np.concatenate((p, left[keep])),
            np.concatenate((p, right[keep])),
            np.concatenate((np.ones(p.size, bool), lc[keep])),
            np.concatenate((np.ones(p.size, bool), np.zeros(int(keep.sum()), bool))),
            np.concatenate((np.zeros(p.size, int), n[keep])),
        )

    def enumerate_sets(self, depth):
        if self.finite:
            sets = [frozenset([p]) for p in sorted(self.target)[:depth]]
            return sets + [frozenset()] * (depth - len(sets))
        l, r, lc, rc, _ = self._base_cells(depth)
        return [IntervalSet.interval(*t) for t in zip(l, r, lc, rc)]

    def cells(self, m, depth):
        """Enumerated pieces of refinement m restricted to the first ``depth`` base cells."""
        if self.finite:
            return StreamCells(None, None, None, None, sorted(self.target)[:depth])
        l, r, lc, rc, n = self._base_cells(depth)
        s = m + self.base
        reps = np.where(n == 0, 1, 2 ** np.maximum(0, s - n)).astype(np.int64)
        owner = np.repeat(np.arange(l.size), reps)
        offs = np.arange(owner.size) - np.repeat(np.cumsum(reps) - reps, reps)
        w = (r - l)[owner] / reps[owner]
        left = l[owner] + offs * w
        right = np.where(offs == reps[owner] - 1, r[owner], l[owner] + (offs + 1) * w)
        first = offs == 0
        last = offs == reps[owner] - 1
        plc = np.where(first, lc[owner], True)
        prc = np.where(last, rc[owner], False)
        return StreamCells(left, right, plc, prc)

    def tail_length(self, depth):
        """Exact length of the part of the target not covered by the first ``depth`` base cells."""
        if self.finite:
            return 0.0
        k = max(len(self.intervals), 1)
        n_int = depth
        total = 0.0
        for c, (a, b, _) in enumerate(self.intervals):
            listed = n_int // k + (1 if c < n_int % k else 0)
            total += (b - a) * 2.0**-listed
        return total

    def remainder_cells(self, depth):
        """One right-open cell per component covering what the first ``depth`` base cells leave out."""
        if self.finite:
            return None
        k = max(len(self.intervals), 1)
        left, right = [], []
        for c, (a, b, _) in enumerate(self.intervals):
            listed = depth // k + (1 if c < depth % k else 0)
            w = (b - a) * 2.0**-listed
            if w > 0:
                left.append(b - w)
                right.append(b)
        n = len(left)
        return StreamCells(np.array(left), np.array(right), np.ones(n, bool), np.zeros(n, bool))

    def base_count(self, depth):
        if self.finite:
            return min(depth, len(self.target))
        return len(self._base_cells(depth)[0])


def dyadic_countable_partition(target, schedule="geometric", base=6):
    if schedule != "geometric":
        raise StructuralError(f"unknown countable schedule {schedule!r}")
    return CountablePartitionStream(target, base=base)

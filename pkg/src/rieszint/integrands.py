"""Integrands: point evaluation plus rigorous per-cell enclosures.

Every integrand returns values of shape (n, dim) and an enclosure (lo, hi)
of its values over each cell.  The enclosure width is what the integrators
turn into a certified modulus bound.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import dsl
from .errors import StructuralError
from .sets import IntervalSet


def _col(a, n):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 0:
        a = np.full(n, float(a))
    if a.ndim == 1:
        a = a[:, None]
    return a


def _cells_flags(cells, closure):
    if closure:
        return dsl.Cells(cells.left, cells.right, True, True)
    return dsl.Cells(cells.left, cells.right, cells.left_closed, cells.right_closed)


class IntegrandFunction:
    """Base class: subclasses implement ``_values`` and ``_enclose``."""

    dim = 1
    label = "f"
    #: "increasing", "decreasing" or None; used for level sets
    monotone = None

    def values(self, x):
        x = np.asarray(x, dtype=np.float64)
        return _col(self._values(x), x.size).reshape(x.size, self.dim)

    def __call__(self, x):
        return self.values(np.atleast_1d(x))

    def enclosure(self, cells, closure=False):
        lo, hi = self._enclose(cells, closure)
        n = len(cells.left)
        return _col(lo, n).reshape(n, self.dim), _col(hi, n).reshape(n, self.dim)

    def finite_values(self, cells):
        """(lo, hi) over finite cells (frozensets of points)."""
        lo, hi = [], []
        for c in cells:
            v = self.values(np.array(sorted(c), dtype=np.float64))
            lo.append(v.min(axis=0))
            hi.append(v.max(axis=0))
        return np.array(lo).reshape(len(lo), self.dim), np.array(hi).reshape(len(hi), self.dim)

    def _enclose(self, cells, closure):
        n = len(cells.left)
        return np.full((n, self.dim), -np.inf), np.full((n, self.dim), np.inf)

    def sup_bound(self, target):
        """Componentwise bound on |f| over the target set."""
        if isinstance(target, frozenset):
            v = self.values(np.array(sorted(target), dtype=np.float64))
            return np.abs(v).max(axis=0)
        comps = target.components()
        c = dsl.Cells([a for a, *_ in comps], [b for _, b, *_ in comps], True, True)
        lo, hi = self.enclosure(c, closure=True)
        return np.maximum(np.abs(lo), np.abs(hi)).max(axis=0)

    # composite integrands used by the law checks
    def __add__(self, other):
        return Combined("+", self, other)

    def __sub__(self, other):
        return Combined("-", self, other)

    def __abs__(self):
        return Mapped("abs", self)

    def pos(self):
        return Mapped("pos", self)

    def neg(self):
        return Mapped("neg", self)

    def scaled(self, alpha):
        return Mapped("scale", self, float(alpha))

    def shifted(self, c):
        return Combined("+", self, ConstantFunction(np.full(self.dim, c)))

    def level_points(self, t, a, b):
        """Smallest x in [a, b] with f(x) >= t (increasing f) or the largest (decreasing f)."""
        if self.monotone not in ("increasing", "decreasing"):
            raise StructuralError(f"{self.label}: level sets need a monotone or simple integrand")
        t = np.asarray(t, dtype=np.float64)
        lo = np.full(t.shape, a)
        hi = np.full(t.shape, b)
        inc = self.monotone == "increasing"
        for _ in range(64):
            mid = lo + 0.5 * (hi - lo)
            if not np.any((mid > lo) & (mid < hi)):
                break
            fm = self.values(mid)[:, 0]
            if inc:
                ok = fm >= t
                hi = np.where(ok, mid, hi)
                lo = np.where(ok, lo, mid)
            else:
                ok = fm >= t
                lo = np.where(ok, mid, lo)
                hi = np.where(ok, hi, mid)
        return hi if inc else lo


class ExprFunction(IntegrandFunction):
    """Integrand given by a DSL expression in x."""

    def __init__(self, expr, monotone=None):
        self.node = dsl.parse_function(expr) if isinstance(expr, str) else expr
        self.dim = dsl.output_dim(self.node)
        self.label = dsl.to_text(self.node)
        self.monotone = monotone
        self.constant = "x" not in dsl.free_vars(self.node)

    def _values(self, x):
        v = dsl.evaluate(self.node, x)
        return np.broadcast_to(v, (x.size,) + v.shape[1:]) if v.ndim else np.full(x.size, float(v))

    def _enclose(self, cells, closure):
        return dsl.enclose(self.node, _cells_flags(cells, closure))

    def level_points(self, t, a, b):
        if isinstance(self.node, dsl.Var) and self.monotone == "increasing":
            return np.clip(np.asarray(t, dtype=np.float64), a, b)
        return super().level_points(t, a, b)


class CallableFunction(IntegrandFunction):
    """Integrand from a vectorised Python callable with an optional declared modulus.

    ``lipschitz`` gives osc <= L * width; ``monotone`` ("increasing" or
    "decreasing") gives the exact hull of the endpoint values.  Without
    either, only ``bound`` (|f| <= bound) is used, and no modulus exists.
    """

    def __init__(self, func, dim=1, lipschitz=None, monotone=None, bound=None, label="callable"):
        self.func = func
        self.dim = dim
        self.lipschitz = None if lipschitz is None else np.broadcast_to(np.asarray(lipschitz, float), (dim,))
        self.monotone = monotone
        self.bound = bound
        self.label = label

    def _values(self, x):
        return np.asarray(self.func(x), dtype=np.float64)

    def _enclose(self, cells, closure):
        l, r = cells.left, cells.right
        n = l.size
        if self.monotone in ("increasing", "decreasing"):
            fl = self.values(l)
            fr = self.values(r)
            lo, hi = np.minimum(fl, fr), np.maximum(fl, fr)
            return np.nextafter(lo, -np.inf), np.nextafter(hi, np.inf)
        if self.lipschitz is not None:
            m = l + 0.5 * (r - l)
            fm = self.values(m)
            w = self.lipschitz[None, :] * (0.5 * (r - l))[:, None]
            w = np.nextafter(np.nextafter(w, np.inf), np.inf)
            return np.nextafter(fm - w, -np.inf), np.nextafter(fm + w, np.inf)
        if self.bound is not None:
            b = np.broadcast_to(np.asarray(self.bound, float), (self.dim,))
            return np.tile(-b, (n, 1)), np.tile(b, (n, 1))
        return super()._enclose(cells, closure)


class ConstantFunction(IntegrandFunction):
    def __init__(self, c):
        self.c = np.atleast_1d(np.asarray(c, dtype=np.float64))
        self.dim = self.c.size
        self.label = f"const({self.c.tolist()})"
        self.constant = True

    def _values(self, x):
        return np.tile(self.c, (x.size, 1))

    def _enclose(self, cells, closure):
        v = np.tile(self.c, (len(cells.left), 1))
        return v, v.copy()


def _cell_vs_set(cells, S, closure):
    """(cell inside S, cell disjoint from S) for each interval cell."""
    l, r = cells.left, cells.right
    lc = np.ones(l.shape, bool) if closure else np.asarray(cells.left_closed)
    rc = np.ones(l.shape, bool) if closure else np.asarray(cells.right_closed)
    inside = np.zeros(l.shape, bool)
    meets = np.zeros(l.shape, bool)
    for a, b, ac, bc in S.components():
        in_l = (a < l) | ((a == l) & (ac | ~lc))
        in_r = (r < b) | ((r == b) & (bc | ~rc))
        inside |= in_l & in_r
        apart = (r < a) | ((r == a) & ~(rc & ac)) | (l > b) | ((l == b) & ~(lc & bc))
        meets |= ~apart
    return inside, ~meets


class SimpleFunction(IntegrandFunction):
    """f = sum_i a_i 1_{A_i} over disjoint paving elements A_i (intervals or finite sets)."""

    def __init__(self, coeffs, sets):
        coeffs = [np.atleast_1d(np.asarray(a, dtype=np.float64)) for a in coeffs]
        if len(coeffs) != len(sets):
            raise StructuralError("one coefficient per set is required")
        self.dim = coeffs[0].size if coeffs else 1
        if any(a.size != self.dim for a in coeffs):
            raise StructuralError("coefficients must share one dimension")
        self.coeffs = coeffs
        self.sets = list(sets)
        self.finite = bool(self.sets) and isinstance(self.sets[0], frozenset)
        for i, A in enumerate(self.sets):
            for B in self.sets[i + 1 :]:
                if (A & B) if self.finite else not A.isdisjoint(B):
                    raise StructuralError("simple-function sets must be disjoint")
        self.label = "simple"
        self.constant = False

    def _values(self, x):
        out = np.zeros((x.size, self.dim))
        for a, A in zip(self.coeffs, self.sets):
            if self.finite:
                mask = np.isin(x, np.fromiter(A, dtype=np.float64, count=len(A)))
            else:
                mask = A.contains(x)
            out[mask] = a
        return out

    def _enclose(self, cells, closure):
        n = len(cells.left)
        lo = np.full((n, self.dim), np.inf)
        hi = np.full((n, self.dim), -np.inf)
        covered = np.zeros(n, bool)
        for a, A in zip(self.coeffs, self.sets):
            inside, disjoint = _cell_vs_set(cells, A, closure)
            touch = ~disjoint
            lo[touch] = np.minimum(lo[touch], a)
            hi[touch] = np.maximum(hi[touch], a)
            covered |= inside
        # cells not inside one set also see the value 0 (or meet several sets)
        lo[~covered] = np.minimum(lo[~covered], 0.0)
        hi[~covered] = np.maximum(hi[~covered], 0.0)
        return lo, hi

    def sup_bound(self, target):
        if not self.coeffs:
            return np.zeros(self.dim)
        return np.max(np.abs(np.array(self.coeffs)), axis=0)

    def level_set(self, t, omega):
        """{f >= t} for scalar f as a paving element."""
        if self.dim != 1:
            raise StructuralError("level sets need a scalar integrand")
        out = frozenset() if self.finite else IntervalSet()
        rest = omega
        for a, A in zip(self.coeffs, self.sets):
            if a[0] >= t:
                out = out | A
            rest = rest - A
        if t <= 0:
            out = out | rest
        return out

    def levels(self):
        return sorted({float(a[0]) for a in self.coeffs} | {0.0})


class IndicatorFunction(SimpleFunction):
    def __init__(self, A, space=None):
        super().__init__([1.0], [A])
        self.label = f"indicator({A!r})"


class ElementaryFunction(IntegrandFunction):
    """f = sum_i a_i 1_{A_i} over a countable disjoint family, given blockwise.

    ``coef_block(i)`` maps an array of 1-based indices to an (k, dim) array;
    ``cell_block(i)`` maps it to (left, right, left_closed, right_closed).
    ``count`` is None for an infinite family.  ``coef_tail(n)`` bounds
    sup_{i>n} |a_i| and ``cell_tail(n)`` bounds the total length of the
    cells past n; either may be None when unknown.
    """

    def __init__(self, coef_block, cell_block, count=None, dim=1, coef_tail=None, cell_tail=None, locate=None, label="elementary"):
        self.coef_block = coef_block
        self.cell_block = cell_block
        self.count = count
        self.dim = dim
        self.coef_tail = coef_tail
        self.cell_tail = cell_tail
        self._locate = locate
        self.label = label

    def terms(self, n):
        n = n if self.count is None else min(n, self.count)
        i = np.arange(1, n + 1)
        a = np.asarray(self.coef_block(i), dtype=np.float64).reshape(n, self.dim)
        return a, self.cell_block(i)

    def tail(self, n):
        """(coefficient bound, cell length) past n, or None if undeclared."""
        if self.count is not None and n >= self.count:
            return np.zeros(self.dim), 0.0
        if self.coef_tail is None or self.cell_tail is None:
            return None
        return np.atleast_1d(np.asarray(self.coef_tail(n), dtype=np.float64)), float(self.cell_tail(n))

    def _index(self, x):
        if self._locate is not None:
            return self._locate(x)
        if self.count is None:
            raise StructuralError("pointwise evaluation needs a locator for infinite families")
        l, r, lc, rc = self.cell_block(np.arange(1, self.count + 1))
        out = np.zeros(x.shape, dtype=np.int64)
        for k in range(self.count):
            hit = ((x > l[k]) | ((x == l[k]) & lc[k])) & ((x < r[k]) | ((x == r[k]) & rc[k]))
            out[hit] = k + 1
        return out

    def _values(self, x):
        idx = self._index(x)
        out = np.zeros((x.size, self.dim))
        pos = idx > 0
        if np.any(pos):
            out[pos] = np.asarray(self.coef_block(idx[pos]), dtype=np.float64).reshape(-1, self.dim)
        return out

    def _enclose(self, cells, closure):
        l, r = cells.left, cells.right
        lc = np.ones(l.shape, bool) if closure else cells.left_closed
        rc = np.ones(l.shape, bool) if closure else cells.right_closed
        l_eff = np.where(lc | (l == r), l, np.nextafter(l, r))
        r_eff = np.where(rc | (l == r), r, np.nextafter(r, l))
        il = self._index(l_eff)
        ir = self._index(r_eff)
        same = (il == ir) & (il > 0)
        n = l.size
        lo = np.full((n, self.dim), -np.inf)
        hi = np.full((n, self.dim), np.inf)
        if np.any(same):
            # the cell may still straddle a gap between A_i and A_i itself; check containment
            a = np.asarray(self.coef_block(il[same]), dtype=np.float64).reshape(-1, self.dim)
            cl, cr, clc, crc = self.cell_block(il[same])
            inside = ((cl < l_eff[same]) | ((cl == l_eff[same]) & clc)) & (
                (r_eff[same] < cr) | ((r_eff[same] == cr) & crc)
            )
            idx = np.flatnonzero(same)[inside]
            lo[idx] = a[inside]
            hi[idx] = a[inside]
        zero = (il == 0) & (ir == 0) & (l_eff == r_eff)
        lo[zero] = 0.0
        hi[zero] = 0.0
        rest = np.isinf(lo[:, 0])
        if np.any(rest) and self.count is not None:
            a_all, _ = self.terms(self.count)
            lo[rest] = np.minimum(a_all.min(axis=0), 0.0)
            hi[rest] = np.maximum(a_all.max(axis=0), 0.0)
        elif np.any(rest) and self.coef_tail is not None:
            b = np.atleast_1d(self.coef_tail(0))
            lo[rest] = -b
            hi[rest] = b
        return lo, hi

    def sup_bound(self, target):
        if self.count is not None:
            a, _ = self.terms(self.count)
            return np.abs(a).max(axis=0) if a.size else np.zeros(self.dim)
        if self.coef_tail is not None:
            return np.atleast_1d(self.coef_tail(0))
        return np.full(self.dim, np.inf)

    @classmethod
    def dyadic(cls, coef, dim=1, coef_tail=None, label="elemseries"):
        """a_i on A_i = [1 - 2**(1-i), 1 - 2**-i), a partition of [0, 1)."""

        def cells(i):
            lo, hi = dsl.elem_cell(i)
            return lo, hi, np.ones(lo.shape, bool), np.zeros(lo.shape, bool)

        return cls(
            lambda i: coef(np.asarray(i)),
            cells,
            None,
            dim,
            coef_tail,
            lambda n: 2.0**-n,
            locate=dsl.elem_index,
            label=label,
        )

    @classmethod
    def from_elemseries(cls, node):
        """Build from a parsed ``elemseries(coef, dyadic)`` node.

        The coefficient tail is bounded by the largest |a_i| over a long
        window past n; for monotone coefficient formulas (the intended use)
        that is exact.
        """
        coef = lambda i: dsl.evaluate(node.coef, np.zeros(np.size(i)), {"i": np.asarray(i, dtype=np.float64)})

        def tail(n):
            i = np.arange(n + 1, n + 2049, dtype=np.float64)
            return float(np.max(np.abs(coef(i))))

        return cls.dyadic(coef, coef_tail=tail, label=dsl.to_text(node))

    @classmethod
    def finite(cls, coeffs, intervals):
        """Finite elementary function from (a, b, left_closed, right_closed) intervals."""
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.float64).T).T
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        iv = np.array([(a, b) for a, b, _, _ in intervals], dtype=np.float64).reshape(-1, 2)
        flags = np.array([(lc, rc) for _, _, lc, rc in intervals], dtype=bool).reshape(-1, 2)
        dim = coeffs.shape[1]

        def cb(i):
            i = np.asarray(i) - 1
            return iv[i, 0], iv[i, 1], flags[i, 0], flags[i, 1]

        return cls(lambda i: coeffs[np.asarray(i) - 1], cb, len(iv), dim, label="finite-elementary")


def staircase(f, n, a=0.0, b=1.0, anchor=0.0, closed_right=True):
    """Dyadic staircase of f with 2**n steps on [a, b]; step k takes f at a + (k + anchor) h."""
    m = 2**n
    h = (b - a) / m
    k = np.arange(m)
    left = a + k * h
    right = a + (k + 1) * h
    right[-1] = b
    vals = f.values(left + anchor * h) if isinstance(f, IntegrandFunction) else np.asarray(f(left + anchor * h))
    vals = np.asarray(vals, dtype=np.float64).reshape(m, -1)
    rc = np.zeros(m, bool)
    rc[-1] = closed_right

    def cb(i):
        i = np.asarray(i) - 1
        return left[i], right[i], np.ones(i.shape, bool), rc[i]

    def locate(x):
        x = np.asarray(x, dtype=np.float64)
        idx = np.searchsorted(left, x, side="right")
        inside = (x >= a) & ((x < b) | ((x == b) & closed_right))
        return np.where(inside, np.clip(idx, 1, m), 0)

    return ElementaryFunction(lambda i: vals[np.asarray(i) - 1], cb, m, vals.shape[1], locate=locate, label=f"staircase({n})")


class Combined(IntegrandFunction):
    def __init__(self, op, f, g):
        if f.dim != g.dim:
            raise StructuralError("cannot combine integrands of different dimension")
        self.op, self.f, self.g = op, f, g
        self.dim = f.dim
        self.label = f"({f.label} {op} {g.label})"

    def _values(self, x):
        a, b = self.f.values(x), self.g.values(x)
        return a + b if self.op == "+" else a - b

    def _enclose(self, cells, closure):
        a_lo, a_hi = self.f.enclosure(cells, closure)
        b_lo, b_hi = self.g.enclosure(cells, closure)
        exact = (a_lo == a_hi) & (b_lo == b_hi)
        with np.errstate(all="ignore"):
            if self.op == "+":
                return dsl._widen(a_lo + b_lo, a_hi + b_hi, exact)
            return dsl._widen(a_lo - b_hi, a_hi - b_lo, exact)

    def finite_values(self, cells):
        return super().finite_values(cells)


class Mapped(IntegrandFunction):
    def __init__(self, kind, f, alpha=1.0):
        self.kind, self.f, self.alpha = kind, f, alpha
        self.dim = f.dim
        self.label = f"{kind}({f.label})"

    def _map(self, v):
        if self.kind == "abs":
            return np.abs(v)
        if self.kind == "pos":
            return np.maximum(v, 0.0)
        if self.kind == "neg":
            return np.maximum(-v, 0.0)
        return self.alpha * v

    def _values(self, x):
        return self._map(self.f.values(x))

    def _enclose(self, cells, closure):
        lo, hi = self.f.enclosure(cells, closure)
        if self.kind == "abs":
            a_lo = np.where(lo >= 0, lo, np.where(hi <= 0, -hi, 0.0))
            return a_lo, np.maximum(np.abs(lo), np.abs(hi))
        if self.kind == "pos":
            return np.maximum(lo, 0.0), np.maximum(hi, 0.0)
        if self.kind == "neg":
            return np.maximum(-hi, 0.0), np.maximum(-lo, 0.0)
        exact = lo == hi
        a, b = self.alpha * lo, self.alpha * hi
        return dsl._widen(np.minimum(a, b), np.maximum(a, b), exact)


def as_integrand(f):
    if isinstance(f, IntegrandFunction):
        return f
    if isinstance(f, str):
        node = dsl.parse_function(f)
        if isinstance(node, dsl.ElemSeries):
            return ElementaryFunction.from_elemseries(node)
        return ExprFunction(node)
    if isinstance(f, (int, float)):
        return ConstantFunction(f)
    raise StructuralError(f"cannot build an integrand from {f!r}")


class Masked(IntegrandFunction):
    """f * 1_A, used for the indicator variant of subset integration."""

    def __init__(self, f, A):
        self.f = f
        self.A = A
        self.dim = f.dim
        self.label = f"{f.label}*1_A"

    def _values(self, x):
        v = self.f.values(x)
        mask = np.isin(x, np.fromiter(self.A, float)) if isinstance(self.A, frozenset) else self.A.contains(x)
        return np.where(mask[:, None], v, 0.0)

    def _enclose(self, cells, closure):
        lo, hi = self.f.enclosure(cells, closure)
        inside, disjoint = _cell_vs_set(cells, self.A, closure)
        zero = np.zeros_like(lo)
        lo = np.where(inside[:, None], lo, np.where(disjoint[:, None], zero, np.minimum(lo, 0.0)))
        hi = np.where(inside[:, None], hi, np.where(disjoint[:, None], zero, np.maximum(hi, 0.0)))
        return lo, hi

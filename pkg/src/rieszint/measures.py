"""Riesz-space-valued set functions on paved spaces, and capacities."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .convergence import ConvergenceReport, Verdict
from .errors import ContractViolation, StructuralError
from .lattice import RieszValue
from .sets import IntervalSet, PavedSpace, interval_space

NONNEGATIVE = "nonnegative"
FINITELY_ADDITIVE = "finitely-additive"
SIGMA_ADDITIVE = "sigma-additive"
REGULAR = "regular-integrator"

ADDITIVE_PROPS = frozenset({NONNEGATIVE, FINITELY_ADDITIVE, SIGMA_ADDITIVE, REGULAR})


class VectorSetFunction:
    """Base class: a set function on the paving of ``space`` with values in R^dim.

    Subclasses implement ``_interval_cells(left, right)`` for interval grounds
    and/or ``_finite_cell(frozenset)`` for finite grounds.
    """

    dim = 1
    properties = frozenset()
    name = "set-function"

    def __init__(self, space):
        self.space = space

    def has(self, prop):
        return prop in self.properties

    def interval_cells(self, left, right):
        """Values on the cells (left, right) with any endpoint flags, shape (n, dim)."""
        raise StructuralError(f"{self.name} is not defined on interval cells")

    def finite_cells(self, cells):
        return np.array([self._finite_cell(c) for c in cells], dtype=np.float64).reshape(len(cells), self.dim)

    def _finite_cell(self, cell):
        raise StructuralError(f"{self.name} is not defined on finite grounds")

    def tail_from_length(self, length):
        """Bound on |mu(B)| for any B of total length <= ``length``; None if unknown."""
        return None

    def evaluate(self, A):
        self.space.check(A)
        if self.space.is_finite:
            return RieszValue(self._finite_cell(A))
        comps = A.components()
        if not comps:
            return RieszValue.zero(self.dim)
        left = np.array([c[0] for c in comps])
        right = np.array([c[1] for c in comps])
        return RieszValue(_kernels.column_fsum(self.interval_cells(left, right)))

    def __call__(self, A):
        return self.evaluate(A)


class LengthMeasure(VectorSetFunction):
    """Lebesgue length with an optional piecewise-constant density.

    ``density`` is a list of (IntervalSet, weight) pairs; points outside
    every piece get density 0.  ``restrict=R`` is shorthand for density 1 on R.
    """

    name = "length"

    def __init__(self, space=None, density=None, restrict=None):
        super().__init__(space or interval_space())
        if restrict is not None:
            if density is not None:
                raise StructuralError("give either density or restrict")
            density = [(restrict, 1.0)]
        self.pieces = None
        if density is not None:
            lefts, rights, weights = [], [], []
            for S, w in density:
                if w < 0:
                    raise StructuralError("density weights must be >= 0")
                for a, b, _, _ in S.components():
                    lefts.append(a)
                    rights.append(b)
                    weights.append(float(w))
            self.pieces = (np.array(lefts), np.array(rights), np.array(weights))
        self.properties = ADDITIVE_PROPS

    @property
    def max_density(self):
        if self.pieces is None:
            return 1.0
        return float(self.pieces[2].max(initial=0.0))

    def interval_cells(self, left, right):
        left = np.asarray(left, dtype=np.float64)
        right = np.asarray(right, dtype=np.float64)
        if self.pieces is None:
            return (right - left)[:, None]
        out = np.zeros(left.shape)
        for a, b, w in zip(*self.pieces):
            overlap = np.minimum(right, b) - np.maximum(left, a)
            out += w * np.maximum(overlap, 0.0)
        return out[:, None]

    def tail_from_length(self, length):
        return np.array([self.max_density * length])


class VectorMeasure(VectorSetFunction):
    """mu(A) = [s_1 * base(A), ..., s_k * base(A)] for a scalar base measure."""

    name = "vector"

    def __init__(self, base, scales):
        super().__init__(base.space)
        if base.dim != 1:
            raise StructuralError("vector measure needs a scalar base")
        self.base = base
        self.scales = np.asarray(scales, dtype=np.float64).reshape(-1)
        if self.scales.size == 0:
            raise StructuralError("vector measure needs at least one scale")
        self.dim = self.scales.size
        props = set(base.properties)
        if np.any(self.scales < 0):
            props -= {NONNEGATIVE, REGULAR}
        self.properties = frozenset(props)

    def interval_cells(self, left, right):
        return self.base.interval_cells(left, right) * self.scales[None, :]

    def _finite_cell(self, cell):
        return self.base._finite_cell(cell) * self.scales

    def tail_from_length(self, length):
        t = self.base.tail_from_length(length)
        return None if t is None else t[0] * np.abs(self.scales)


class CountingMeasure(VectorSetFunction):
    """Counting measure on a finite ground, optionally weighted per point."""

    name = "counting"

    def __init__(self, space, weights=None):
        if not space.is_finite:
            raise StructuralError("counting measure needs a finite ground")
        super().__init__(space)
        n = space.ground.n
        self.weights = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
        if self.weights.shape != (n,):
            raise StructuralError("one weight per point is required")
        props = {FINITELY_ADDITIVE, SIGMA_ADDITIVE, REGULAR}
        if np.all(self.weights >= 0):
            props.add(NONNEGATIVE)
        self.properties = frozenset(props)

    def _finite_cell(self, cell):
        idx = np.fromiter(cell, dtype=np.int64, count=len(cell))
        return np.array([_kernels.fsum(self.weights[idx])])

    def tail_from_length(self, length):
        return np.zeros(1)


class CofiniteCharge(VectorSetFunction):
    """Truncated-universe stand-in for the cofinite 0/1 charge on N.

    On {0..n-1}, mu(A) = 1 iff A contains the whole "tail" {h..n-1}, else 0.
    Finitely additive on the power set, but not sigma-additive: the
    singleton partition sums to 0 while mu(Omega) = 1.
    """

    name = "cofinite"

    def __init__(self, space, h=None):
        if not space.is_finite:
            raise StructuralError("cofinite charge needs a finite ground")
        super().__init__(space)
        n = space.ground.n
        self.h = n // 2 if h is None else int(h)
        if not 0 < self.h < n:
            raise StructuralError("tail start must satisfy 0 < h < n")
        self.tail_set = frozenset(range(self.h, n))
        self.properties = frozenset({NONNEGATIVE, FINITELY_ADDITIVE})

    def _finite_cell(self, cell):
        return np.array([1.0 if self.tail_set <= cell else 0.0])


class Capacity:
    """Monotone set function C with C(empty) = 0, here C = transform(base(A))."""

    def __init__(self, base, transform=None, label="capacity"):
        self.base = base
        self.space = base.space
        self.transform = transform or (lambda v: v)
        self.label = label
        self.dim = base.dim

    @classmethod
    def power(cls, base, k):
        if k <= 0:
            raise StructuralError("capacity exponent must be > 0")
        return cls(base, lambda v, k=k: np.power(v, k), f"pow({base.name}, {k})")

    @property
    def is_additive(self):
        return self.label == "capacity" and self.base.has(FINITELY_ADDITIVE)

    def values(self, base_values):
        return self.transform(np.asarray(base_values, dtype=np.float64))

    def evaluate(self, A):
        return RieszValue(self.values(self.base.evaluate(A).coords))

    def __call__(self, A):
        return self.evaluate(A)

    @property
    def normalization(self):
        return self.evaluate(self.space.omega)


def eval_measure(mu, A):
    if not mu.space.contains(A):
        raise StructuralError(f"{A!r} is outside the paving of {mu.space!r}")
    return mu.evaluate(A)


def is_null(mu, A):
    return eval_measure(mu, A).is_zero()


def _check_disjoint(parts):
    if parts and isinstance(parts[0], frozenset):
        seen = set()
        for p in parts:
            if seen & p:
                raise ContractViolation("parts are not disjoint", module="measures", operation="check_sigma_additivity")
            seen |= p
        return frozenset(seen)
    union = IntervalSet()
    for p in parts:
        if not union.isdisjoint(p):
            raise ContractViolation("parts are not disjoint", module="measures", operation="check_sigma_additivity")
        union = union | p
    return union


def check_sigma_additivity(mu, parts, depth, union=None, tail_length=None):
    """Compare mu(A) with the unconditional sum of mu over a disjoint stream.

    ``parts`` is a sequence of paving elements or a CountablePartitionStream.
    A stream declares the length of its unlisted remainder; a finite list is
    exhausted when ``depth`` covers it.  Without a tail the verdict is at
    best inconclusive.
    """
    from .convergence import unconditional_sum

    if hasattr(parts, "enumerate_sets"):
        stream = parts
        listed = stream.enumerate_sets(depth)
        union = stream.target if union is None else union
        tail_length = stream.tail_length(depth)
    else:
        listed = list(parts)[:depth]
        exhausted = depth >= len(list(parts))
        if union is None:
            raise StructuralError("the union of the parts is required")
        if exhausted:
            tail_length = 0.0
    covered = _check_disjoint(listed)
    if not (covered <= union if isinstance(covered, frozenset) else covered.issubset(union)):
        raise ContractViolation("parts leave the declared union", module="measures", operation="check_sigma_additivity")
    target = eval_measure(mu, union)
    if listed:
        terms = np.array([eval_measure(mu, p).coords for p in listed])
        total = unconditional_sum(terms, len(listed), nonnegative=False).value
    else:
        total = RieszValue.zero(mu.dim)
    resid = np.abs(target.coords - total.coords)
    slack = 1e-12 * max(1.0, float(np.max(np.abs(target.coords))))
    tail = None
    if tail_length is not None:
        tail = np.zeros(mu.dim) if tail_length == 0 else mu.tail_from_length(tail_length)
    trace = ({"depth": depth, "residual": resid.tolist(), "tail": None if tail is None else list(map(float, tail))},)
    if tail is None:
        verdict = Verdict.INCONCLUSIVE
        bound = resid
    elif np.all(resid <= tail + slack):
        verdict = Verdict.CONVERGED
        bound = np.maximum(tail, resid)
    else:
        verdict = Verdict.DIVERGED
        bound = resid
    return ConvergenceReport(verdict, target, RieszValue(bound), trace)


def check_finite_additivity(mu, pairs, tol=1e-12):
    """Worst |mu(A u B) - mu(A) - mu(B)| over disjoint sampled pairs; raises on overlap."""
    worst = 0.0
    for A, B in pairs:
        if (A & B) if isinstance(A, frozenset) else not A.isdisjoint(B):
            raise ContractViolation("pair is not disjoint", module="measures", operation="check_finite_additivity")
        r = eval_measure(mu, A | B) - eval_measure(mu, A) - eval_measure(mu, B)
        worst = max(worst, r.norm())
    return worst <= tol, worst


def check_capacity(C, nested_pairs):
    """Exact monotonicity on nested pairs and C(empty) = 0."""
    if not C.evaluate(C.space.empty()).is_zero():
        return False
    for A, B in nested_pairs:
        if not C.evaluate(A) <= C.evaluate(B):
            return False
    return True


def check_regular_integrator(mu, integrator, sample_sets):
    """Integrate the indicator of each sample set and compare with mu(A).

    ``integrator(f, mu)`` must return an IntegralReport over the whole ground.
    Returns a list of per-set records and an overall pass flag.
    """
    from .integrands import IndicatorFunction

    records = []
    ok = True
    for A in sample_sets:
        rep = integrator(IndicatorFunction(A, mu.space), mu)
        target = eval_measure(mu, A)
        resid = float(np.max(np.abs(rep.value.coords - target.coords)))
        bound = float(np.max(rep.cauchy_bound.coords))
        passed = resid <= bound + 1e-12
        ok = ok and passed
        records.append({"set": repr(A), "residual": resid, "bound": bound, "passed": passed})
    return ok, records


def is_paving_element(space: PavedSpace, A):
    return space.contains(A)

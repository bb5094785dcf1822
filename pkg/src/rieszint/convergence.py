"""Net convergence checks: regulators, (D)-convergence, order limits, series.

Nets are never materialised over their directed set.  A :class:`NetSample`
is the net observed along a cofinal chain, and every verdict returned
here is a statement about that sample only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import ContractViolation, StructuralError
from .lattice import RieszValue, as_value

STRADDLE_SLACK = 1e-12


class Verdict(str, Enum):
    CONVERGED = "certified-converged"
    DIVERGED = "certified-diverged"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConvergenceReport:
    verdict: Verdict
    limit_estimate: RieszValue
    certified_bound: RieszValue
    trace: tuple = ()

    @property
    def converged(self):
        return self.verdict is Verdict.CONVERGED


# ------------------------------------------------------------------ regulators


class Regulator:
    """A (D)-sequence a_ij: nonnegative, nonincreasing in j, infimum 0 in j.

    Subclasses provide entries and a certified bound on the tail
    sup_{i > depth} a_{i, phi(i)}.
    """

    dim = 1

    def entries(self, i, j):
        """Vectorised a_ij for 1-based integer arrays; returns (n, dim)."""
        raise NotImplementedError

    def tail_sup(self, depth, phi):
        raise NotImplementedError

    def __add__(self, other):
        return SumRegulator(self, other)


class GeometricRegulator(Regulator):
    """a_ij = c * r**i / j with 0 < r < 1 and c >= 0."""

    def __init__(self, c=1.0, r=0.5):
        self.c = np.atleast_1d(np.asarray(c, dtype=np.float64))
        if np.any(self.c < 0):
            raise StructuralError("geometric regulator needs c >= 0")
        if not 0.0 < r < 1.0:
            raise StructuralError("geometric regulator needs 0 < r < 1")
        self.r = float(r)
        self.dim = self.c.size

    def entries(self, i, j):
        i = np.asarray(i, dtype=np.float64)
        j = np.asarray(j, dtype=np.float64)
        return self.c[None, :] * (self.r**i / j)[:, None]

    def tail_sup(self, depth, phi):
        return self.c * self.r ** (depth + 1) / phi.min_beyond(depth)


class HarmonicRegulator(Regulator):
    """a_ij = c_i / j.

    ``coeff`` maps a 1-based row index to c_i (or is a constant);
    ``coeff_tail(depth)`` must bound sup_{i > depth} c_i.
    """

    def __init__(self, coeff=1.0, coeff_tail=None):
        if callable(coeff):
            self._coeff = coeff
            if coeff_tail is None:
                raise StructuralError("a variable-coefficient harmonic regulator needs coeff_tail")
            self._coeff_tail = coeff_tail
            self.dim = np.atleast_1d(np.asarray(coeff(1), dtype=np.float64)).size
        else:
            c = np.atleast_1d(np.asarray(coeff, dtype=np.float64))
            if np.any(c < 0):
                raise StructuralError("harmonic regulator needs c >= 0")
            self._coeff = lambda i, c=c: c
            self._coeff_tail = lambda depth, c=c: c
            self.dim = c.size

    def entries(self, i, j):
        i = np.asarray(i)
        j = np.asarray(j, dtype=np.float64)
        c = np.array([np.atleast_1d(self._coeff(int(k))) for k in i], dtype=np.float64)
        return c.reshape(len(i), self.dim) / j[:, None]

    def tail_sup(self, depth, phi):
        return np.atleast_1d(np.asarray(self._coeff_tail(depth), dtype=np.float64)) / phi.min_beyond(depth)


class TableRegulator(Regulator):
    """Finite table a[i-1, j-1], zero-extended, with a declared row tail.

    ``row_tail(depth)`` must bound sup_{i > depth, j} a_ij; it defaults to the
    maximum of the remaining table rows (exact for a finitely supported table).
    """

    def __init__(self, table, row_tail=None):
        t = np.asarray(table, dtype=np.float64)
        if t.ndim == 2:
            t = t[:, :, None]
        if t.ndim != 3:
            raise StructuralError("table regulator needs a (rows, cols[, dim]) array")
        if np.any(t < 0):
            raise StructuralError("regulator entries must be nonnegative")
        if np.any(np.diff(t, axis=1) > 0):
            raise StructuralError("regulator rows must be nonincreasing in j")
        self.table = t
        self.dim = t.shape[2]
        self._row_tail = row_tail

    def entries(self, i, j):
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        rows, cols, _ = self.table.shape
        out = np.zeros((len(i), self.dim))
        inside = (i >= 1) & (i <= rows) & (j >= 1) & (j <= cols)
        out[inside] = self.table[i[inside] - 1, j[inside] - 1]
        return out

    def tail_sup(self, depth, phi):
        if self._row_tail is not None:
            return np.atleast_1d(np.asarray(self._row_tail(depth), dtype=np.float64))
        rest = self.table[depth:]
        if rest.size == 0:
            return np.zeros(self.dim)
        return rest.max(axis=(0, 1))


class SumRegulator(Regulator):
    def __init__(self, first, second):
        if first.dim != second.dim:
            raise StructuralError("cannot add regulators of different dimension")
        self.parts = (first, second)
        self.dim = first.dim

    def entries(self, i, j):
        return self.parts[0].entries(i, j) + self.parts[1].entries(i, j)

    def tail_sup(self, depth, phi):
        return self.parts[0].tail_sup(depth, phi) + self.parts[1].tail_sup(depth, phi)


def zero_regulator(dim=1):
    return TableRegulator(np.zeros((1, 1, dim)))


def check_regulator_monotone(reg, rows=64, cols=64):
    """Exact check a_ij >= a_i,j+1 >= 0 on the (rows x cols) truncation."""
    i, j = np.meshgrid(np.arange(1, rows + 1), np.arange(1, cols + 2), indexing="ij")
    vals = reg.entries(i.ravel(), j.ravel()).reshape(rows, cols + 1, reg.dim)
    return bool(np.all(vals >= 0) and np.all(vals[:, :-1] >= vals[:, 1:]))


@dataclass(frozen=True)
class SelectorFunction:
    """phi: N -> N given by finitely many values and a constant tail."""

    values: tuple
    tail_value: int

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "tail_value", int(self.tail_value))
        if any(v < 1 for v in vals) or self.tail_value < 1:
            raise StructuralError("selector values must be >= 1")

    def __call__(self, j):
        j = np.asarray(j, dtype=np.int64)
        vals = np.array(self.values + (self.tail_value,), dtype=np.int64)
        idx = np.minimum(j - 1, len(self.values))
        return vals[idx]

    def min_beyond(self, depth):
        rest = self.values[depth:]
        return float(min(rest + (self.tail_value,)))

    @classmethod
    def constant(cls, k):
        return cls((), k)

    @classmethod
    def identity(cls, length):
        return cls(tuple(range(1, length + 1)), length)

    @classmethod
    def stretch(cls, k, length):
        """The diagonal stretch j -> k*j on 1..length."""
        return cls(tuple(k * j for j in range(1, length + 1)), k * length)


def regulator_envelope(reg, phi, depth):
    """(max_{j<=depth} a_{j,phi(j)}, certified bound on the tail beyond depth)."""
    if depth < 1:
        raise StructuralError("depth must be >= 1")
    if not isinstance(reg, Regulator):
        raise StructuralError(f"unsupported regulator family {type(reg).__name__}")
    j = np.arange(1, depth + 1)
    vals = reg.entries(j, phi(j))
    value = vals.max(axis=0)
    tail = np.maximum(reg.tail_sup(depth, phi), 0.0)
    return RieszValue(value), RieszValue(tail)


# ------------------------------------------------------------------ net samples


class NetSample:
    """A net observed along a cofinal chain: (label, value) pairs in order."""

    def __init__(self, entries):
        entries = list(entries)
        if not entries:
            raise StructuralError("a net sample must be nonempty")
        labels = [lab for lab, _ in entries]
        for a, b in zip(labels, labels[1:]):
            if not a < b:
                raise StructuralError(f"net labels must strictly increase ({a!r} !< {b!r})")
        values = [as_value(v) for _, v in entries]
        dims = {v.dim for v in values}
        if len(dims) != 1:
            raise StructuralError("net values must share one dimension")
        self.labels = tuple(labels)
        self.values = tuple(values)
        self.array = np.array([v.coords for v in values])

    @classmethod
    def from_values(cls, values, labels=None):
        values = list(values)
        if labels is None:
            labels = range(1, len(values) + 1)
        return cls(zip(labels, values))

    @property
    def dim(self):
        return self.array.shape[1]

    def __len__(self):
        return len(self.values)

    def drop_prefix(self, k):
        return NetSample(list(zip(self.labels, self.values))[k:])

    def __add__(self, other):
        if self.labels != other.labels:
            raise StructuralError("can only add nets sampled on the same chain")
        return NetSample(zip(self.labels, (a + b for a, b in zip(self.values, other.values))))


def check_d_convergence(net, limit, reg, phis, depth):
    """(D)-convergence of a sampled net against a regulator and selector budget."""
    if not phis:
        raise StructuralError("need at least one selector function")
    limit = as_value(limit)
    if limit.dim != net.dim or reg.dim != net.dim:
        raise StructuralError("net, limit and regulator must share a dimension")
    resid = np.abs(net.array - limit.coords[None, :])
    trace = []
    verdicts = []
    bound = None
    for k, phi in enumerate(phis):
        value, tail = regulator_envelope(reg, phi, depth)
        env = value.coords + tail.coords
        ok = np.all(resid <= env[None, :], axis=1)
        if ok[-1]:
            bad = np.flatnonzero(~ok)
            i0 = int(bad[-1]) + 1 if bad.size else 0
            verdicts.append(Verdict.CONVERGED)
            bound = env if bound is None else np.minimum(bound, env)
        elif np.all(resid[-1] <= env + STRADDLE_SLACK):
            i0 = None
            verdicts.append(Verdict.INCONCLUSIVE)
        else:
            i0 = None
            verdicts.append(Verdict.DIVERGED)
        worst = resid[i0:].max(axis=0) if i0 is not None else resid[-1]
        trace.append({"selector": k, "envelope": env.tolist(), "i0": i0, "worst_residual": worst.tolist()})
    if Verdict.DIVERGED in verdicts:
        verdict = Verdict.DIVERGED
    elif Verdict.INCONCLUSIVE in verdicts:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.CONVERGED
    if bound is None:
        bound = resid[-1]
    return ConvergenceReport(verdict, limit, RieszValue(bound), tuple(trace))


class LimsupLiminf(NamedTuple):
    limsup: RieszValue
    liminf: RieszValue
    bounded: bool


def order_limsup_liminf(net, tail_start=None):
    """Componentwise inf-sup and sup-inf of the sample.

    The outer inf/sup runs over starting positions ``0..tail_start`` so that
    every tail still holds ``len - tail_start`` samples; the default is the
    midpoint of the sample.
    """
    a = net.array
    n = a.shape[0]
    if tail_start is None:
        tail_start = n // 2
    tail_start = max(0, min(int(tail_start), n - 1))
    smax, smin = _kernels.suffix_extrema(a)
    limsup = smax[: tail_start + 1].min(axis=0)
    liminf = smin[: tail_start + 1].max(axis=0)
    bounded = bool(np.all(np.isfinite(a)))
    return LimsupLiminf(RieszValue(limsup), RieszValue(liminf), bounded)


def order_converges(net, tol, tail_start=None):
    sup, inf, bounded = order_limsup_liminf(net, tail_start)
    return bounded and bool(np.all(sup.coords - inf.coords <= tol))


# ------------------------------------------------------------------ series


@dataclass
class TermStream:
    """Lazy series terms x_1, x_2, ... with an optional declared tail bound.

    ``tail_bound(depth)`` must bound |sum_{n > depth} x_n| componentwise.
    """

    term: Callable[[int], object]
    dim: int = 1
    tail_bound: Callable[[int], object] | None = None
    length: int | None = None

    @classmethod
    def from_sequence(cls, items):
        items = [as_value(x).coords for x in items]
        dim = items[0].size if items else 1
        return cls(lambda n: items[n - 1], dim, lambda depth: np.zeros(dim), len(items))

    def block(self, depth):
        n = depth if self.length is None else min(depth, self.length)
        if n == 0:
            return np.zeros((0, self.dim))
        return np.array([np.atleast_1d(np.asarray(self.term(k), dtype=np.float64)) for k in range(1, n + 1)])

    def tail(self, depth):
        if self.length is not None and depth >= self.length:
            return np.zeros(self.dim)
        if self.tail_bound is None:
            return None
        return np.atleast_1d(np.asarray(self.tail_bound(depth), dtype=np.float64))


def _term_block(terms, depth):
    if isinstance(terms, TermStream):
        return terms.block(depth), terms.tail(depth), terms.dim
    if isinstance(terms, np.ndarray):
        arr = terms.reshape(terms.shape[0], -1) if terms.ndim else terms.reshape(1, 1)
        arr = arr[:depth]
        full = terms.shape[0] <= depth
        return arr, (np.zeros(arr.shape[1]) if full else None), arr.shape[1]
    items = list(itertools.islice(iter(terms), depth))
    if not items:
        return np.zeros((0, 1)), np.zeros(1), 1
    arr = np.array([as_value(x).coords for x in items])
    return arr, None, arr.shape[1]


@dataclass(frozen=True)
class SeriesSum:
    value: RieszValue
    tail_bound: RieszValue | None
    terms_used: int
    permutation_deviation: float = 0.0


def unconditional_sum(terms, depth, permutation_trials=0, seed=0, nonnegative=True):
    """Limit of the finite-subset net of a series, observed to ``depth`` terms.

    In nonnegative mode the limit is the supremum of the increasing partial
    sums.  Sums are correctly rounded, so any reordering gives the same
    float; ``permutation_trials`` random orders are checked anyway.
    """
    if depth < 1:
        raise StructuralError("depth must be >= 1")
    block, tail, dim = _term_block(terms, depth)
    if nonnegative and np.any(block < 0):
        raise ContractViolation(
            "negative term in nonnegative mode", module="convergence", operation="unconditional_sum"
        )
    value = _kernels.column_fsum(block) if block.shape[0] else np.zeros(dim)
    deviation = 0.0
    if permutation_trials and block.shape[0] > 1:
        rng = np.random.default_rng(seed)
        for _ in range(permutation_trials):
            perm = block[rng.permutation(block.shape[0])]
            deviation = max(deviation, float(np.max(np.abs(_kernels.column_fsum(perm) - value))))
    tail_value = RieszValue(tail) if tail is not None else None
    return SeriesSum(RieszValue(value), tail_value, block.shape[0], deviation)


def conditional_sum(terms, depth):
    """Ordered partial sum x_1 + ... + x_depth (correctly rounded)."""
    if depth < 1:
        raise StructuralError("depth must be >= 1")
    block, _, dim = _term_block(terms, depth)
    if block.shape[0] == 0:
        return RieszValue(np.zeros(dim))
    return RieszValue(_kernels.column_fsum(block))


def weak_sigma_distributivity_probe(reg, phi_budget, depth):
    """Meet over the stretch selectors j -> k*j (k <= budget) of the envelope."""
    if phi_budget < 1:
        raise StructuralError("phi_budget must be >= 1")
    best = None
    for k in range(1, phi_budget + 1):
        value, _ = regulator_envelope(reg, SelectorFunction.stretch(k, depth), depth)
        best = value.coords if best is None else np.minimum(best, value.coords)
    return RieszValue(best)


# ------------------------------------------------------------------ Fremlin


def _as_fremlin_array(a, ndim):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == ndim:
        a = a[..., None]
    if a.ndim != ndim + 1:
        raise StructuralError(f"expected a {ndim}-index table (optionally with a trailing dim axis)")
    return a


def _zero_extended(table, idx):
    """table[idx-1] along the last index axis with zero beyond the truncation."""
    cols = table.shape[-2]
    idx = np.asarray(idx)
    safe = np.clip(idx, 1, cols) - 1
    vals = np.take(table, safe, axis=-2)
    mask = (idx <= cols)[..., None]
    return np.where(mask, vals, 0.0)


def fremlin_sides(a, b, L, phi, k, depth):
    """Left and right sides of the Fremlin inequality on truncated tables.

    ``a`` has shape (N, I, J[, d]) and ``b`` (R, C[, d]); entries past a
    truncation are taken as 0, which keeps every row a (D)-sequence.
    """
    a = _as_fremlin_array(a, 3)
    b = _as_fremlin_array(b, 2)
    L = as_value(L).coords
    if a.shape[-1] != L.size or b.shape[-1] != L.size:
        raise StructuralError("a, b and L must share a dimension")
    if np.any(L < 0):
        raise ContractViolation("L must be >= 0", module="convergence", operation="fremlin_inequality_check")
    d = L.size
    total = np.zeros(d)
    for n in range(1, min(k, a.shape[0]) + 1):
        best = np.zeros(d)
        for i in range(1, min(depth, a.shape[1]) + 1):
            col = int(phi(i + n))
            if col <= a.shape[2]:
                best = np.maximum(best, a[n - 1, i - 1, col - 1])
        total = total + best
    left = np.minimum(L, total)
    right = np.zeros(d)
    for j in range(1, min(depth, b.shape[0]) + 1):
        col = int(phi(j))
        if col <= b.shape[1]:
            right = np.maximum(right, np.minimum(L, b[j - 1, col - 1]))
    return left, right


def fremlin_inequality_check(a, b, L, phi, k, depth):
    left, right = fremlin_sides(a, b, L, phi, k, depth)
    return bool(np.all(left <= right))


def fremlin_combiner_search(a, L, phi, depth, k_max=None, levels=8):
    """Brute-force search for a smallest column-profile combiner b.

    Candidates are tables b_jm = g_m with g nonincreasing, drawn from a
    grid of ``levels + 1`` values between 0 and sum_n max_i a_n,i,1.  The
    first candidate (by total mass) satisfying the inequality for every
    k <= k_max is returned with shape (depth, J, d); None if none does.
    """
    a = _as_fremlin_array(a, 3)
    L = as_value(L)
    k_max = a.shape[0] if k_max is None else k_max
    n_cols = a.shape[2]
    d = a.shape[3]
    out = np.zeros((depth, n_cols, d))
    for comp in range(d):
        top = float(a[:, :, 0, comp].max(axis=1).sum())
        grid = np.linspace(0.0, top, levels + 1)
        profiles = [
            tuple(reversed(p))
            for p in itertools.combinations_with_replacement(grid, n_cols)
        ]
        profiles.sort(key=lambda p: (sum(p), p))
        a_c = a[..., comp]
        found = None
        for prof in profiles:
            b = np.broadcast_to(np.asarray(prof), (depth, n_cols))
            if all(
                fremlin_inequality_check(a_c, b, L.coords[comp], phi, k, depth)
                for k in range(1, k_max + 1)
            ):
                found = b
                break
        if found is None:
            return None
        out[..., comp] = found
    return out

"""Riemann-type integrals over Riesz-space-valued set functions.

Every integrator walks a cofinal chain of its index set and returns an
:class:`IntegralReport`.  Certification never rests on oscillation alone:
each step carries a rigorous modulus bound

    b = sum_cells product(osc_cell(f), |mu(cell)|) + declared tails + rounding,

which bounds the distance from the step's sum to every refined sum.  A
value is certified when that bound and the window oscillation are both
within tolerance.  A bound of exactly zero (a simple function once the
chain refines its cells) certifies immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .convergence import order_limsup_liminf, NetSample
from .errors import ContractViolation, ResourceExhausted, StructuralError
from .integrands import (
    CallableFunction,
    ConstantFunction,
    ElementaryFunction,
    ExprFunction,
    IntegrandFunction,
    Masked,
    SimpleFunction,
    as_integrand,
)
from .lattice import ProductRule, RieszValue
from .measures import NONNEGATIVE, SIGMA_ADDITIVE, Capacity, LengthMeasure
from .partitions import (
    FiniteCells,
    Gauge,
    StreamCells,
    TagPolicy,
    Truncation,
    dyadic_chain,
    dyadic_countable_partition,
    finite_target_chain,
    gauge_fine_partition,
)
from .sets import IntervalSet, interval_space

DEFAULT_TOL = 1e-6
DEFAULT_WINDOW = 4
ROUNDING = 2.0**-52


class IntegralVerdict(str, Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class StepRecord:
    step: int
    size: int
    value: tuple
    oscillation: tuple
    bound: tuple
    spread: tuple = ()


@dataclass(frozen=True)
class IntegralReport:
    value: RieszValue
    cauchy_bound: RieszValue
    verdict: IntegralVerdict
    steps: tuple
    method: str = ""
    info: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.verdict is IntegralVerdict.CERTIFIED

    def as_dict(self):
        return {
            "method": self.method,
            "value": self.value.tolist(),
            "cauchy_bound": self.cauchy_bound.tolist(),
            "verdict": self.verdict.value,
            "steps": len(self.steps),
        }


@dataclass(frozen=True)
class UniformRegulatorSequence:
    """u_n >= u_{n+1} >= 0 with u_n -> 0; ``u`` maps n to a value or array."""

    u: object
    label: str = "u"

    def __call__(self, n):
        return np.atleast_1d(np.asarray(self.u(n), dtype=np.float64))

    def check(self, n_max=64):
        vals = np.array([self(n) for n in range(1, n_max + 1)])
        return bool(np.all(vals >= 0) and np.all(vals[:-1] >= vals[1:]))

    @classmethod
    def geometric(cls, c=1.0, r=0.5):
        return cls(lambda n, c=c, r=r: c * r**n, f"{c}*{r}^n")


# ------------------------------------------------------------------ sums and bounds


def _rule(f, mu, product):
    return product if product is not None else ProductRule.infer(f.dim, mu.dim)


def _measure_cells(mu, cells):
    if isinstance(cells, FiniteCells):
        return mu.finite_cells(cells.cells)
    if isinstance(cells, StreamCells) and cells.points is not None:
        return mu.finite_cells([frozenset([p]) for p in cells.points])
    return mu.interval_cells(cells.left, cells.right)


def _broadcast(rule, fx, my):
    rule.apply_arrays(fx[:1], my[:1]) if len(fx) else None
    a, b = np.broadcast_arrays(fx, my)
    return a, b


def _up(x):
    """Round nonzero values one ulp toward +inf; zeros stay exact."""
    return np.where(x == 0, 0.0, np.nextafter(x, np.inf))


def _sum_up(x):
    if x.size == 0:
        return np.zeros(x.shape[1] if x.ndim > 1 else 1)
    return _up(_kernels.column_fsum(x))


def _exact_sum(rule, fx, my):
    a, b = _broadcast(rule, fx, my)
    a = np.where(b == 0, 0.0, a)
    return _kernels.exact_product_sum(a, b)


def _modulus(rule, lo, hi, my):
    osc = hi - lo
    osc = np.where(np.isnan(osc), np.inf, osc)
    a, b = _broadcast(rule, osc, np.abs(my))
    with np.errstate(invalid="ignore"):
        terms = np.where(b == 0, 0.0, a * b)
    terms = _up(terms)
    if not np.all(np.isfinite(terms)):
        return np.full(terms.shape[1], np.inf)
    return _sum_up(terms)


def _enclose(f, cells, closure=False):
    if isinstance(cells, FiniteCells):
        return f.finite_values(cells.cells)
    if isinstance(cells, StreamCells) and cells.points is not None:
        return f.finite_values([frozenset([p]) for p in cells.points])
    return f.enclosure(cells, closure)


def _tags(policy, cells, closure=False):
    if isinstance(cells, FiniteCells):
        return policy.finite_tags(cells.cells)
    if isinstance(cells, StreamCells) and cells.points is not None:
        return np.asarray(cells.points, dtype=np.float64)
    return policy.interval_tags(cells, closure=closure)


def _step(f, mu, rule, cells, policies, closure=False, tail=None):
    """Sums per policy, modulus bound and cell count for one index-set element."""
    my = _measure_cells(mu, cells)
    lo, hi = _enclose(f, cells, closure)
    bound = _modulus(rule, lo, hi, my)
    sums = []
    for pol in policies:
        t = _tags(pol, cells, closure)
        sums.append(_exact_sum(rule, f.values(t), my))
    sums = np.array(sums)
    exact = bool(np.all(bound == 0)) and (tail is None or bool(np.all(tail == 0)))
    if tail is not None:
        bound = _up(bound + tail)
    bound = bound + ROUNDING * np.abs(sums[0])
    return sums, bound, exact


class _Walker:
    """Accumulates steps and applies the certification policy."""

    def __init__(self, tol, window, method):
        if tol <= 0:
            raise StructuralError("tolerance must be > 0")
        self.tol = tol
        self.window = max(1, int(window))
        self.method = method
        self.values = []
        self.bounds = []
        self.spreads = []
        self.records = []
        self.exact = False
        self.info = {}

    def add(self, step, size, sums, bound, exact=False):
        v = sums[0]
        spread = sums.max(axis=0) - sums.min(axis=0)
        self.values.append(v)
        self.bounds.append(bound)
        self.spreads.append(spread)
        osc = self._osc()
        self.records.append(StepRecord(step, int(size), tuple(map(float, v)), tuple(map(float, osc)), tuple(map(float, bound)), tuple(map(float, spread))))
        self.exact = exact and bool(np.all(spread == 0))

    def _osc(self):
        w = np.array(self.values[-self.window :])
        return w.max(axis=0) - w.min(axis=0)

    def cauchy(self):
        return np.maximum(self.bounds[-1], self._osc())

    def certified_now(self):
        if self.exact:
            return True
        bounds = np.array(self.bounds[-self.window :])
        if not np.all(np.isfinite(bounds)):
            return False
        if np.any(self.spreads[-1] > 2 * self.bounds[-1]):
            return False
        return bool(np.all(self.cauchy() <= self.tol))

    def diverged_now(self):
        spreads = np.array(self.spreads[-self.window :])
        persistent = np.all(spreads > self.tol, axis=0)
        impossible = np.any(self.spreads[-1] > 2 * self.bounds[-1] + self.tol)
        return bool(np.any(persistent) or impossible)

    def report(self, extra_info=None):
        if not self.values:
            raise ResourceExhausted(f"{self.method}: no steps were computed")
        if self.certified_now():
            verdict = IntegralVerdict.CERTIFIED
        elif self.diverged_now():
            verdict = IntegralVerdict.DIVERGED
        else:
            verdict = IntegralVerdict.INCONCLUSIVE
        cb = self.bounds[-1] if self.exact else self.cauchy()
        if not np.all(np.isfinite(cb)):
            cb = np.where(np.isfinite(cb), cb, self._osc())
            self.info["modulus"] = "unavailable"
        info = dict(self.info)
        info.update(extra_info or {})
        return IntegralReport(RieszValue(self.values[-1]), RieszValue(cb), verdict, tuple(self.records), self.method, info)


def _policies(policies):
    if policies is None:
        return [TagPolicy("midpoint")]
    out = [p if isinstance(p, TagPolicy) else TagPolicy(p) for p in policies]
    if not out:
        raise StructuralError("at least one tag policy is required")
    return out


# ------------------------------------------------------------------ Net Riemann


def riemann_sum(f, mu, P, product=None):
    """S(f, mu, P) = sum_i product(f(tag_i), mu(cell_i)), correctly rounded."""
    f = as_integrand(f)
    rule = _rule(f, mu, product)
    my = _measure_cells(mu, P.cells)
    return RieszValue(_exact_sum(rule, f.values(P.tags), my))


def riemann_sum_bound(f, mu, P, product=None):
    """Modulus bound sum_i product(osc_i(f), |mu(cell_i)|) for partition P."""
    f = as_integrand(f)
    rule = _rule(f, mu, product)
    lo, hi = _enclose(f, P.cells, closure=(P.mode == "gauge"))
    return RieszValue(_modulus(rule, lo, hi, _measure_cells(mu, P.cells)))


def default_chain(target, stop=20):
    if isinstance(target, frozenset):
        return finite_target_chain(target)
    return dyadic_chain(target, 0, stop)


def net_riemann_integral(
    f,
    mu,
    A=None,
    chain=None,
    tol=DEFAULT_TOL,
    window=DEFAULT_WINDOW,
    policies=None,
    variant="per-set",
    product=None,
    stop_early=True,
):
    """Net Riemann integral of f over A along a refinement chain.

    ``variant`` "per-set" walks a chain of partitions of A; "indicator"
    integrates f * 1_A along a chain of partitions of the whole ground.
    """
    f = as_integrand(f)
    rule = _rule(f, mu, product)
    omega = mu.space.omega
    A = omega if A is None else mu.space.check(A)
    if variant == "indicator":
        g = f if A == omega else Masked(f, A)
        target = omega
    elif variant == "per-set":
        g = f
        target = A
    else:
        raise StructuralError(f"unknown subset-integration variant {variant!r}")
    if (isinstance(target, frozenset) and not target) or (isinstance(target, IntervalSet) and target.is_empty()):
        zero = RieszValue.zero(rule.dim_z)
        return IntegralReport(zero, zero, IntegralVerdict.CERTIFIED, (), "net-riemann", {"empty": True})
    chain = chain or default_chain(target)
    if chain.target != target:
        raise StructuralError("chain does not target the integration set")
    pols = _policies(policies)
    w = _Walker(tol, window, "net-riemann")
    for k in chain.levels:
        cells = chain.cells(k)
        sums, bound, exact = _step(g, mu, rule, cells, pols)
        w.add(k, len(cells), sums, bound, exact)
        if stop_early and w.certified_now():
            break
    return w.report({"variant": variant, "chain": chain.label, "policies": [p.label for p in pols]})


# ------------------------------------------------------------------ S* and Sion


def _require_sigma(mu, op):
    if not mu.has(SIGMA_ADDITIVE):
        raise ContractViolation("the set function must be sigma-additive", module="integrators", operation=op)


def _stream_tail(f, mu, rule, A, tail_length):
    if tail_length == 0:
        return np.zeros(rule.dim_z)
    t = mu.tail_from_length(tail_length)
    if t is None:
        return np.full(rule.dim_z, np.inf)
    sup = f.sup_bound(A)
    a, b = _broadcast(rule, sup[None, :], np.asarray(t, dtype=np.float64)[None, :])
    return _up(a[0] * b[0])


def s_star_partition_integral(
    f,
    mu,
    A=None,
    stream=None,
    depth=None,
    refinements=12,
    tag_policies=None,
    tol=1e-5,
    window=DEFAULT_WINDOW,
    product=None,
    stop_early=True,
):
    """Kolmogorov S*-partition integral over countable partitions of A.

    Outer loop: refinements m of a countable partition stream; inner: the
    unconditional series of f(tag) mu(cell) over the first ``depth`` base
    cells, with its tail bounded by sup|f| times the declared remainder.
    """
    _require_sigma(mu, "s_star_partition_integral")
    f = as_integrand(f)
    rule = _rule(f, mu, product)
    A = mu.space.omega if A is None else mu.space.check(A)
    stream = stream or dyadic_countable_partition(A)
    depth = _default_depth(A) if depth is None else depth
    pols = _policies(tag_policies)
    rem = stream.remainder_cells(depth)
    w = _Walker(tol, window, "s-star-partition")
    for m in range(refinements + 1):
        cells = stream.cells(m, depth)
        if rem is not None and len(rem):
            cells = _join_cells(cells, rem)
        cells = _finite_stream(cells)
        sums, bound, exact = _step(f, mu, rule, cells, pols)
        w.add(m, len(cells), sums, bound, exact)
        if stop_early and w.certified_now():
            break
    return w.report({"depth": depth, "policies": [p.label for p in pols]})


def _join_cells(c, d):
    # the remainder cell closes the series: its term brackets the unlisted tail
    return StreamCells(*(np.concatenate([getattr(c, k), getattr(d, k)]) for k in ("left", "right", "left_closed", "right_closed")))


def _default_depth(A):
    """40 base cells per component, so each component's remainder is ~2**-40 long."""
    if isinstance(A, frozenset):
        return max(len(A), 1)
    return 40 * max(len(A.components()), 1)


def _finite_stream(cells):
    if isinstance(cells, StreamCells) and cells.points is not None:
        return FiniteCells([[p] for p in cells.points])
    return cells


def sion_integral(
    f,
    mu,
    A=None,
    truncation=None,
    depth=None,
    refinements=12,
    tag_policies=None,
    tol=1e-5,
    window=DEFAULT_WINDOW,
    product=None,
    stream=None,
    stop_early=True,
):
    """Sion integral: finite truncations of refining countable partitions."""
    _require_sigma(mu, "sion_integral")
    f = as_integrand(f)
    rule = _rule(f, mu, product)
    A = mu.space.omega if A is None else mu.space.check(A)
    stream = stream or dyadic_countable_partition(A)
    depth = _default_depth(A) if depth is None else depth
    truncation = truncation or Truncation()
    pols = _policies(tag_policies)
    total_len = 0.0 if isinstance(A, frozenset) else A.length()
    ncomp = 1 if isinstance(A, frozenset) else max(len(A.components()), 1)
    w = _Walker(tol, window, "sion")
    kept = []
    for m in range(refinements + 1):
        full = stream.cells(m, depth)
        k = truncation.k(m) * ncomp
        cells = _finite_stream(full.head(k))
        if isinstance(cells, FiniteCells):
            tail_len = 0.0 if len(cells) >= len(A) else None
        else:
            covered = _kernels.fsum(cells.right - cells.left)
            tail_len = max(total_len - covered, 0.0) + 4 * ROUNDING * total_len
        if tail_len is None:
            tail = np.full(rule.dim_z, np.inf)
        else:
            tail = _stream_tail(f, mu, rule, A, tail_len)
        kept.append(len(cells))
        sums, bound, exact = _step(f, mu, rule, cells, pols, tail=tail)
        w.add(m, len(cells), sums, bound, exact)
        if stop_early and w.certified_now():
            break
    return w.report({"truncation": truncation.kind, "kept": kept})


# ------------------------------------------------------------------ Henstock


def default_gauges(start=1, stop=21):
    return [Gauge.constant(2.0**-m) for m in range(start, stop + 1)]


def henstock_integral(f, mu, interval=None, gauge_schedule=None, budget=40, tol=DEFAULT_TOL, window=DEFAULT_WINDOW, product=None, stop_early=True):
    """Gauge integral: Riemann sums of gauge-fine partitions for shrinking gauges.

    Tags may sit on cell closures, so enclosures are taken over closed cells.
    """
    f = as_integrand(f)
    rule = _rule(f, mu, product)
    target = mu.space.omega if interval is None else mu.space.check(interval)
    gauges = gauge_schedule or default_gauges()
    w = _Walker(tol, window, "henstock")
    exhausted = None
    for m, g in enumerate(gauges):
        try:
            P = gauge_fine_partition(target, g, budget)
        except ResourceExhausted as exc:
            exhausted = str(exc)
            break
        my = _measure_cells(mu, P.cells)
        lo, hi = f.enclosure(P.cells, closure=True)
        bound = _modulus(rule, lo, hi, my)
        s = _exact_sum(rule, f.values(P.tags), my)
        exact = bool(np.all(bound == 0))
        w.add(m, len(P), s[None, :], bound + ROUNDING * np.abs(s), exact)
        if stop_early and w.certified_now():
            break
    if not w.values and exhausted:
        raise ResourceExhausted(exhausted)
    rep = w.report({"gauges": [g.label for g in gauges[: len(w.values)]]})
    if exhausted and rep.verdict is not IntegralVerdict.CERTIFIED:
        rep.info["exhausted"] = exhausted
    return rep


# ------------------------------------------------------------------ Pavlakos


def _elementary_value(e, mu, rule, n):
    a, (l, r, lc, rc) = e.terms(n)
    my = mu.interval_cells(l, r)
    return _exact_sum(rule, a, my), a, my


def pavlakos_elementary_integral(e, mu, depth=None, tol=DEFAULT_TOL, product=None):
    """Sum of a_i mu(A_i), split as e+ - e-, with the declared tail bound.

    ``depth`` defaults to every term of a finite family and 64 otherwise.
    """
    _require_sigma(mu, "pavlakos_elementary_integral")
    if not mu.has(NONNEGATIVE):
        raise ContractViolation("the measure must be nonnegative", module="integrators", operation="pavlakos_elementary_integral")
    rule = _rule(e, mu, product)
    w = _Walker(tol, 1, "pavlakos-elementary")
    if depth is None:
        depth = e.count if e.count is not None else 64
    checkpoints = sorted({max(1, depth >> s) for s in (3, 2, 1, 0)})
    info = {}
    for n in checkpoints:
        v, a, my = _elementary_value(e, mu, rule, n)
        pos = _exact_sum(rule, np.maximum(a, 0.0), my)
        neg = _exact_sum(rule, np.maximum(-a, 0.0), my)
        tail = e.tail(n)
        if tail is None:
            t = np.full(rule.dim_z, np.inf)
        else:
            coef_bound, length = tail
            if length == 0:
                t = np.zeros(rule.dim_z)
            else:
                mt = mu.tail_from_length(length)
                if mt is None:
                    t = np.full(rule.dim_z, np.inf)
                else:
                    x, y = _broadcast(rule, coef_bound[None, :], np.asarray(mt)[None, :])
                    t = _up(x[0] * y[0])
        bound = t + ROUNDING * np.abs(v)
        w.add(n, n if e.count is None else min(n, e.count), v[None, :], bound, bool(np.all(t == 0)))
        info = {"positive_part": pos.tolist(), "negative_part": neg.tolist()}
    if not np.all(np.isfinite(w.bounds[-1])):
        w.info["tail"] = "undeclared"
    return w.report(info)


def _envelope_samples(space, null_set, n, seed):
    a, b = space.omega.hull()
    rng = np.random.default_rng(seed)
    x = np.concatenate((np.linspace(a, b, n + 1), rng.uniform(a, b, n)))
    if null_set is not None:
        x = x[~null_set.contains(x)]
    return x


def _check_envelope(approx, f, u, x, op):
    fx = f.values(x)
    diff = np.abs(approx.values(x) - fx)
    bad = diff > u[None, :] + 4 * np.spacing(np.abs(fx) + u[None, :])
    if np.any(bad):
        k = int(np.flatnonzero(np.any(bad, axis=1))[0])
        raise ContractViolation(
            f"|f_n - f| = {diff[k].max():.3g} exceeds u_n = {u.max():.3g} at x = {x[k]!r}",
            module="integrators",
            operation=op,
        )


def pavlakos_integral(f, approx, u, mu, null_set=None, levels=range(1, 21), depth=None, tol=DEFAULT_TOL, samples=1024, seed=0, product=None):
    """Pavlakos integral: limit of elementary integrals of a.e.-uniform approximants."""
    f = as_integrand(f)
    rule = _rule(f, mu, product)
    omega = mu.space.omega
    rest = omega if null_set is None else omega - null_set
    if null_set is not None and not mu.evaluate(null_set).is_zero():
        raise ContractViolation("the exceptional set is not null", module="integrators", operation="pavlakos_integral")
    mass = np.abs(mu.evaluate(rest).coords)
    x = _envelope_samples(mu.space, null_set, samples, seed)
    w = _Walker(tol, DEFAULT_WINDOW, "pavlakos")
    values, bounds = [], []
    for n in levels:
        e = approx(n)
        un = u(n)
        _check_envelope(e, f, un, x, "pavlakos_integral")
        rep = pavlakos_elementary_integral(e, mu, depth, tol, product)
        a, b = _broadcast(rule, un[None, :], mass[None, :])
        bound = _up(a[0] * b[0] + rep.cauchy_bound.coords)
        values.append(rep.value.coords)
        bounds.append(bound)
        w.add(n, rep.steps[-1].size, rep.value.coords[None, :], bound)
    w.window = 1
    info = {}
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if np.any(np.abs(values[i] - values[j]) > bounds[i] + bounds[j] + 1e-12):
                info["inconsistent"] = (i, j)
    if "inconsistent" in info:
        rep = w.report(info)
        return IntegralReport(rep.value, rep.cauchy_bound, IntegralVerdict.DIVERGED, rep.steps, rep.method, rep.info)
    return w.report(info)


# ------------------------------------------------------------------ Lebesgue, Saks, Choquet


@dataclass
class FunctionNet:
    """An approximating net of integrands with optional declared envelopes.

    ``envelopes[i]`` bounds |f_i - lim f_j| pointwise, so the base integral
    of f_i is within envelopes[i] * |mu|(A) of the limit.
    """

    members: list
    envelopes: list | None = None


def abstract_lebesgue_integral(f, approximating_nets, base_integrator, mu, A=None, tol=DEFAULT_TOL):
    """Limit of base integrals along each net; certified only if every net agrees."""
    if len(approximating_nets) < 1:
        raise StructuralError("at least one approximating net is required")
    A = mu.space.omega if A is None else A
    mass = np.abs(mu.evaluate(A).coords)
    limits, bounds, certs, steps = [], [], [], []
    for k, net in enumerate(approximating_nets):
        if isinstance(net, FunctionNet):
            members, env = net.members, net.envelopes
        else:
            members, env = list(net), None
        reps = [base_integrator(g) for g in members]
        vals = NetSample.from_values([r.value for r in reps])
        sup, inf, _ = order_limsup_liminf(vals, tail_start=max(len(reps) - 2, 0))
        last = reps[-1]
        if env is not None:
            bound = last.cauchy_bound.coords + np.asarray(env[-1], dtype=np.float64) * mass
            cert = last.certified
        else:
            bound = last.cauchy_bound.coords + (sup.coords - inf.coords)
            cert = False
        limits.append(last.value.coords)
        bounds.append(bound)
        certs.append(cert)
        for i, r in enumerate(reps):
            steps.append(StepRecord(k * 1000 + i, len(r.steps), tuple(r.value.coords), (), tuple(r.cauchy_bound.coords)))
    agree = True
    for i in range(len(limits)):
        for j in range(i + 1, len(limits)):
            if np.any(np.abs(limits[i] - limits[j]) > bounds[i] + bounds[j]):
                agree = False
    bound = np.max(np.array(bounds), axis=0)
    if not agree:
        verdict = IntegralVerdict.DIVERGED
    elif all(certs) and np.all(bound <= tol):
        verdict = IntegralVerdict.CERTIFIED
    else:
        verdict = IntegralVerdict.INCONCLUSIVE
    return IntegralReport(RieszValue(limits[0]), RieszValue(bound), verdict, tuple(steps), "abstract-lebesgue", {"nets": len(limits), "limits": [l.tolist() for l in limits]})


def saks_integral(f, mu, expanding_sets, base_integrator, tail=None, tol=DEFAULT_TOL):
    """Limit of base integrals over an inclusion-increasing chain of sets.

    ``tail(k)``, when given, bounds the distance from the k-th base integral
    to the integral over the union; without it the value is reported with
    its monotone trend and an inconclusive verdict.
    """
    f = as_integrand(f)
    sets = list(expanding_sets)
    if not sets:
        raise StructuralError("the chain of sets is empty")
    for A, B in zip(sets, sets[1:]):
        if not (A <= B):
            raise ContractViolation("the chain of sets is not increasing", module="integrators", operation="saks_integral")
    steps, vals, reps = [], [], []
    for k, A in enumerate(sets):
        rep = base_integrator(f, A)
        reps.append(rep)
        vals.append(rep.value.coords)
        t = tail(k) if tail is not None else np.inf
        steps.append(StepRecord(k, len(rep.steps), tuple(rep.value.coords), (), tuple(np.atleast_1d(rep.cauchy_bound.coords + t))))
    v = np.array(vals)
    d = np.diff(v, axis=0)
    trend = "constant" if not d.size or np.all(d == 0) else "increasing" if np.all(d >= 0) else "decreasing" if np.all(d <= 0) else "mixed"
    last = reps[-1]
    if len(sets) == 1 or all(A == sets[-1] for A in sets):
        t_last = np.zeros_like(last.cauchy_bound.coords)
    else:
        t_last = np.atleast_1d(np.asarray(tail(len(sets) - 1), dtype=np.float64)) if tail is not None else np.inf
    bound = last.cauchy_bound.coords + t_last
    if last.verdict is IntegralVerdict.DIVERGED:
        verdict = IntegralVerdict.DIVERGED
    elif last.certified and np.all(bound <= tol):
        verdict = IntegralVerdict.CERTIFIED
    else:
        verdict = IntegralVerdict.INCONCLUSIVE
    shown = np.where(np.isfinite(bound), bound, last.cauchy_bound.coords)
    return IntegralReport(last.value, RieszValue(shown), verdict, tuple(steps), "saks", {"trend": trend, "sets": len(sets)})


def choquet_integral(f, C, level_grid=None, tol=DEFAULT_TOL, policies=None):
    """Choquet integral sup_a int_0^a C({f >= t}) dt of a nonnegative scalar f.

    Simple and constant integrands use the exact layer-cake sum.  Monotone
    integrands integrate the nonincreasing level function u by the Net
    Riemann integral on [0, a], doubling a until u(a) = 0.
    """
    f = as_integrand(f)
    if f.dim != 1:
        raise StructuralError("the Choquet integral needs a scalar integrand")
    space = C.space
    omega = space.omega
    if space.is_finite:
        vals = f.values(np.array(sorted(omega), dtype=np.float64))[:, 0]
    else:
        a0, b0 = omega.hull()
        vals = f.values(np.linspace(a0, b0, 1025))[:, 0]
    if np.any(vals < 0):
        raise ContractViolation("the integrand must be nonnegative", module="integrators", operation="choquet_integral")

    if isinstance(f, (SimpleFunction, ConstantFunction)) or getattr(f, "constant", False):
        return _choquet_layer_cake(f, C, omega)

    if f.monotone not in ("increasing", "decreasing"):
        raise StructuralError("level sets {f >= t} are not in the paving for this integrand")
    a0, b0 = omega.hull()
    base = C.base

    def u(t):
        t = np.asarray(t, dtype=np.float64)
        x = f.level_points(t, a0, b0)
        if f.monotone == "increasing":
            inside = f.values(np.full(1, b0))[0, 0] >= t
            m = base.interval_cells(x, np.full(t.shape, b0))[:, 0]
        else:
            inside = f.values(np.full(1, a0))[0, 0] >= t
            m = base.interval_cells(np.full(t.shape, a0), x)[:, 0]
        out = C.values(np.where(inside, m, 0.0))
        return np.where(t <= 0, C.values(base.interval_cells(np.array([a0]), np.array([b0]))[:, 0])[0], out)

    ufun = CallableFunction(u, monotone="decreasing", label="u")
    a = float(f.sup_bound(omega)[0])
    if a == 0:
        zero = RieszValue.zero(1)
        return IntegralReport(zero, zero, IntegralVerdict.CERTIFIED, (), "choquet", {"a": 0.0})
    reps = []
    for _ in range(64):
        line = LengthMeasure(interval_space(0.0, a))
        chain = level_grid(a) if callable(level_grid) else dyadic_chain(IntervalSet.closed(0.0, a), 0, 20)
        rep = net_riemann_integral(ufun, line, chain=chain, tol=tol, policies=policies)
        reps.append((a, rep))
        if u(np.array([a]))[0] == 0:
            break
        a *= 2
    a, rep = reps[-1]
    return IntegralReport(rep.value, rep.cauchy_bound, rep.verdict, rep.steps, "choquet", {"a": a, "saks_steps": len(reps)})


def _choquet_layer_cake(f, C, omega):
    if isinstance(f, SimpleFunction):
        levels = [t for t in f.levels() if t > 0]
        level_set = lambda t: f.level_set(t, omega)
    else:
        c = float(f.values(np.zeros(1))[0, 0])
        levels = [c] if c > 0 else []
        level_set = lambda t: omega
    terms = []
    prev = 0.0
    for t in levels:
        terms.append((t - prev) * C.evaluate(level_set(t)).coords[0])
        prev = t
    v = _kernels.fsum(np.array(terms)) if terms else 0.0
    bound = ROUNDING * abs(v) * max(len(terms), 1)
    rec = StepRecord(0, len(levels), (v,), (0.0,), (bound,))
    return IntegralReport(RieszValue([v]), RieszValue([bound]), IntegralVerdict.CERTIFIED, (rec,), "choquet", {"layer_cake": True})

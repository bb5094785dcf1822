"""Experiment configs, runs, CSV traces and verification suites."""

from __future__ import annotations

import configparser
import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dsl
from . import integrators as itg
from . import laws
from .convergence import (
    TermStream,
    conditional_sum,
    fremlin_combiner_search,
    fremlin_inequality_check,
    unconditional_sum,
    SelectorFunction,
)
from .errors import RieszIntError, StructuralError
from .integrands import ElementaryFunction, ExprFunction, as_integrand, staircase
from .measures import Capacity, CountingMeasure, LengthMeasure, VectorMeasure
from .partitions import TagPolicy, Truncation, dyadic_chain, finite_target_chain
from .sets import IntervalSet, finite_space, interval_space

EXIT = {
    itg.IntegralVerdict.CERTIFIED: 0,
    itg.IntegralVerdict.INCONCLUSIVE: 2,
    itg.IntegralVerdict.DIVERGED: 3,
}
EXIT_ERROR = 1
OUTPUT_ENV = "RIESZINT_OUTPUT_DIR"
INTEGRATORS = ("net_riemann", "s_star", "sion", "henstock", "pavlakos", "choquet")
SUITES = ("laws", "uniform", "equivalence", "nullsets", "summability", "choquet")


def fmt(x):
    return "%.17g" % x


# ------------------------------------------------------------------ configuration


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    ground: str = "interval"
    a: float = 0.0
    b: float = 1.0
    n: int = 0
    function: str = "x"
    monotone: str | None = None
    measure: str = "length"
    integrator: str = "net_riemann"
    tol: float | None = None
    start: int = 0
    stop: int = 20
    depth: int | None = None
    refinements: int = 12
    policies: tuple = ("midpoint",)
    seed: int = 0
    variant: str = "per-set"
    subset: str | None = None
    truncation: str = "geometric"
    output_dir: str | None = None
    trace: str | None = None
    report: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.ground not in ("interval", "finite"):
            raise StructuralError(f"unknown ground {self.ground!r}")
        if self.ground == "finite" and self.n < 1:
            raise StructuralError("a finite ground needs n >= 1")
        if self.ground == "interval" and not self.a < self.b:
            raise StructuralError("an interval ground needs a < b")
        if self.integrator not in INTEGRATORS:
            raise StructuralError(f"unknown integrator {self.integrator!r}; expected one of {', '.join(INTEGRATORS)}")
        if self.tol is not None and not self.tol > 0:
            raise StructuralError("tolerance must be > 0")
        if self.variant not in ("per-set", "indicator"):
            raise StructuralError(f"unknown variant {self.variant!r}")
        dsl.parse_function(self.function)
        dsl.parse_measure(self.measure)
        return self


def load_config(path):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    get = lambda sec, key, default=None: cp.get(sec, key, fallback=default) if cp.has_section(sec) else default
    cfg = ExperimentConfig(name=Path(path).stem)
    cfg.ground = get("space", "ground", "interval").strip()
    cfg.a = float(get("space", "a", 0.0))
    cfg.b = float(get("space", "b", 1.0))
    cfg.n = int(get("space", "n", 0))
    cfg.function = get("function", "expr", "x")
    cfg.monotone = get("function", "monotone")
    cfg.measure = get("measure", "spec", "length")
    cfg.integrator = get("integrator", "name", "net_riemann").strip()
    tol = get("integrator", "tol")
    cfg.tol = None if tol is None else float(tol)
    cfg.start = int(get("integrator", "start", 0))
    cfg.stop = int(get("integrator", "stop", 20))
    depth = get("integrator", "depth")
    cfg.depth = None if depth is None else int(depth)
    cfg.refinements = int(get("integrator", "refinements", 12))
    cfg.policies = tuple(p.strip() for p in get("integrator", "policies", "midpoint").split(",") if p.strip())
    cfg.seed = int(get("integrator", "seed", 0))
    cfg.variant = get("integrator", "variant", "per-set").strip()
    cfg.subset = get("integrator", "subset")
    cfg.truncation = get("integrator", "truncation", "geometric").strip()
    cfg.output_dir = get("output", "dir")
    cfg.trace = get("output", "trace")
    cfg.report = get("output", "report")
    return cfg.validate()


# ------------------------------------------------------------------ builders


def build_space(cfg):
    if cfg.ground == "finite":
        return finite_space(cfg.n)
    return interval_space(cfg.a, cfg.b)


def _interval_set(lit):
    return IntervalSet.interval(lit.a, lit.b, lit.left_closed, lit.right_closed)


def build_measure(node, space):
    if isinstance(node, str):
        node = dsl.parse_measure(node)
    if isinstance(node, dsl.LengthSpec):
        if space.is_finite:
            raise StructuralError("length needs an interval ground")
        return LengthMeasure(space, restrict=None if node.restrict is None else _interval_set(node.restrict))
    if isinstance(node, dsl.CountingSpec):
        return CountingMeasure(space)
    if isinstance(node, dsl.VectorSpec):
        return VectorMeasure(build_measure(node.base, space), node.scales)
    if isinstance(node, dsl.CapacitySpec):
        base = build_measure(node.base, space)
        return Capacity.power(base, node.power) if node.power != 1.0 else Capacity(base)
    raise StructuralError(f"unsupported measure {node!r}")


def build_function(text, monotone=None):
    node = dsl.parse_function(text)
    if isinstance(node, dsl.ElemSeries):
        return ElementaryFunction.from_elemseries(node)
    return ExprFunction(node, monotone=monotone)


def _subset(cfg, space):
    if cfg.subset is None:
        return None
    text = cfg.subset.strip()
    if space.is_finite:
        return frozenset(int(t) for t in text.strip("{}").split(",") if t.strip())
    node = dsl.parse_function(f"indicator({text})")
    return _interval_set(node.interval)


def _policies(cfg):
    out = []
    for p in cfg.policies:
        kind, _, seed = p.partition(":")
        out.append(TagPolicy(kind.strip(), int(seed) if seed else cfg.seed))
    return out


def run_integrator(cfg):
    space = build_space(cfg)
    mu = build_measure(cfg.measure, space)
    f = build_function(cfg.function, cfg.monotone)
    pols = _policies(cfg)
    A = _subset(cfg, space)
    name = cfg.integrator
    if name == "choquet":
        if not isinstance(mu, Capacity):
            raise StructuralError("choquet needs a capacity(...) measure")
        return itg.choquet_integral(f, mu, tol=cfg.tol or itg.DEFAULT_TOL)
    if isinstance(mu, Capacity):
        raise StructuralError(f"{name} needs an additive measure, not a capacity")
    if name == "net_riemann":
        target = A if cfg.variant == "per-set" and A is not None else space.omega
        chain = finite_target_chain(target) if space.is_finite else dyadic_chain(target, cfg.start, cfg.stop)
        return itg.net_riemann_integral(f, mu, A=A, chain=chain, tol=cfg.tol or itg.DEFAULT_TOL, policies=pols, variant=cfg.variant)
    if name == "s_star":
        return itg.s_star_partition_integral(
            f, mu, A=A, depth=cfg.depth, refinements=cfg.refinements, tag_policies=pols, tol=cfg.tol or 1e-5
        )
    if name == "sion":
        return itg.sion_integral(
            f, mu, A=A, truncation=Truncation(cfg.truncation), depth=cfg.depth,
            refinements=cfg.refinements, tag_policies=pols, tol=cfg.tol or 1e-5,
        )
    if name == "henstock":
        gauges = itg.default_gauges(max(cfg.start, 1), cfg.stop + 1)
        return itg.henstock_integral(f, mu, interval=A, gauge_schedule=gauges, tol=cfg.tol or itg.DEFAULT_TOL)
    if name == "pavlakos":
        if not isinstance(f, ElementaryFunction):
            raise StructuralError("pavlakos runs take an elemseries(...) function")
        return itg.pavlakos_elementary_integral(f, mu, depth=cfg.depth, tol=cfg.tol or itg.DEFAULT_TOL)
    raise StructuralError(f"unknown integrator {name!r}")


# ------------------------------------------------------------------ outputs


def output_dir(cfg=None):
    d = (cfg.output_dir if cfg is not None else None) or os.environ.get(OUTPUT_ENV) or "."
    return Path(d)


def write_trace(report, path):
    dim = len(report.value)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "n_cells"] + [f"v_{i}" for i in range(dim)] + ["oscillation", "bound"])
        for s in report.steps:
            osc = max(s.oscillation) if s.oscillation else 0.0
            w.writerow([s.step, s.size] + [fmt(v) for v in s.value] + [fmt(osc), fmt(max(s.bound))])
    return path


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    return str(o)


def dump_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, sort_keys=True, indent=2, default=_json_default)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def run_experiment(cfg, trace=None, timing=False):
    """Run one config; writes trace CSV and report JSON.  Returns (exit_code, report dict)."""
    t0 = time.perf_counter()
    rep = run_integrator(cfg)
    elapsed = time.perf_counter() - t0
    out = output_dir(cfg)
    trace_path = Path(trace) if trace else out / (cfg.trace or f"{cfg.name}.csv")
    report_path = out / (cfg.report or f"{cfg.name}.json")
    write_trace(rep, trace_path)
    doc = {
        "name": cfg.name,
        "integrator": cfg.integrator,
        "function": cfg.function,
        "measure": cfg.measure,
        "seed": cfg.seed,
        "value": [fmt(v) for v in rep.value],
        "cauchy_bound": [fmt(v) for v in rep.cauchy_bound],
        "verdict": rep.verdict.value,
        "steps": len(rep.steps),
        "info": rep.info,
    }
    if timing:
        doc["wall_time"] = elapsed
    dump_json(doc, report_path)
    return EXIT[rep.verdict], doc


# ------------------------------------------------------------------ fixtures


def random_polynomial(rng, degree=2, nonnegative=False):
    c = np.round(rng.uniform(-1, 1, degree + 1), 6)
    if nonnegative:
        c[0] = float(np.abs(c[1:]).sum()) + abs(c[0])
    terms = [fmt(c[0])] + [f"{fmt(ci)}*x^{k}" if k > 1 else f"{fmt(ci)}*x" for k, ci in enumerate(c[1:], 1)]
    lip = float(sum(k * abs(ci) for k, ci in enumerate(c[1:], 1)))
    return " + ".join(f"({t})" for t in terms), lip


def random_piecewise(rng, nonnegative=False):
    cut = float(np.round(rng.uniform(0.1, 0.9), 6))
    p, _ = random_polynomial(rng, 1, nonnegative)
    q, _ = random_polynomial(rng, 1, nonnegative)
    return f"piecewise(x < {fmt(cut)}, {p}, {q})"


def random_null_set(rng, k=2):
    pts = np.round(np.sort(rng.uniform(0.05, 0.95, k)), 6)
    s = IntervalSet()
    for p in pts:
        s = s | IntervalSet.point(float(p))
    return s


def staircase_family(f, lip):
    """f_n = dyadic staircase of f with 2**n steps; |f_n - f| <= lip * 2**-n."""
    u = itg.UniformRegulatorSequence(lambda n, L=lip: L * 2.0**-n, f"{lip}*2^-n")
    return (lambda n: staircase(f, n)), u


# ------------------------------------------------------------------ suites


def _entry(name, res):
    return {"name": name, **res}


def suite_laws(rng, pairs=5):
    mu = LengthMeasure()
    out = [_entry("laws[x,1-x]", laws.verify_integral_laws("x", "1-x", mu))]
    for i in range(pairs):
        f, g = random_piecewise(rng), random_piecewise(rng)
        out.append(_entry(f"laws[{i}]", laws.verify_integral_laws(f, g, mu)))
    return out


def suite_uniform(rng, families=3):
    mu = LengthMeasure()
    geo = itg.UniformRegulatorSequence.geometric()
    out = [_entry("uniform[x+2^-n]", laws.verify_uniform_convergence(lambda n: f"x + 2^-{n}", "x", geo, mu))]
    out.append(_entry("uniform[constant]", laws.verify_uniform_convergence(lambda n: "x^2", "x^2", geo, mu, n_max=5)))
    N = IntervalSet.point(0.5)
    out.append(
        _entry(
            "uniform[a.e.]",
            laws.verify_uniform_convergence(lambda n: f"x + piecewise(x == 0.5, 1000, 2^-{n})", "x", geo, mu, null_set=N),
        )
    )
    for i in range(families):
        text, lip = random_polynomial(rng)
        f = as_integrand(text)
        seq, u = staircase_family(f, lip)
        out.append(_entry(f"uniform[staircase {i}]", laws.verify_uniform_convergence(seq, f, u, mu, seed=int(rng.integers(1 << 30)))))
    for e in out:
        e.pop("rows", None)
    return out


def suite_equivalence(rng, fixtures=3):
    mu = LengthMeasure()
    e = ElementaryFunction.from_elemseries(dsl.parse_function("elemseries(2^-i, dyadic)"))
    out = [_entry("pavlakos=s_star[1/3]", laws.pavlakos_vs_s_star(e, mu))]
    for i in range(fixtures):
        text, lip = random_polynomial(rng, nonnegative=True)
        f = as_integrand(text)
        seq, u = staircase_family(f, lip)
        out.append(_entry(f"pavlakos=s_star[{i}]", laws.pavlakos_vs_s_star(f, mu, seq, u)))
    vmu = VectorMeasure(mu, [1.0, -2.0])
    for i in range(fixtures):
        text, _ = random_polynomial(rng)
        out.append(_entry(f"s_star=sion[{i}]", laws.s_star_vs_sion(text, vmu)))
    out.append(_entry("choquet=net_riemann", laws.choquet_vs_net_riemann(ExprFunction("x", monotone="increasing"), mu)))
    text, _ = random_polynomial(rng, nonnegative=True)
    out.append(_entry("nu sigma-additive", laws.nu_sigma_additivity(text, mu)))
    return out


def suite_nullsets(rng, fixtures=3):
    mu = LengthMeasure()
    out = []
    for i in range(fixtures):
        f = random_piecewise(rng)
        out.append(_entry(f"nullsets[{i}]", laws.verify_null_sets(f, mu, random_null_set(rng))))
    return out


def _geometric_terms(ratio, scale):
    scale = np.atleast_1d(np.asarray(scale, dtype=np.float64))
    return TermStream(
        lambda n: scale * ratio ** (n - 1),
        scale.size,
        lambda depth: np.abs(scale) * ratio**depth / (1 - ratio),
    )


def suite_summability(rng, permutations=20, fremlin_trials=5):
    out = []
    for label, scale, depth in (("scalar", [1.0], 60), ("vector", [1.0, 3.0], 60)):
        terms = _geometric_terms(0.5, scale)
        s = unconditional_sum(terms, depth, permutation_trials=permutations, seed=int(rng.integers(1 << 30)))
        exact = 2.0 * np.asarray(scale)
        resid = np.abs(s.value.coords - exact)
        ok = bool(np.all(resid <= s.tail_bound.coords + 1e-15))
        out.append(
            _entry(
                f"geometric[{label}]",
                {
                    "residual": float(resid.max()),
                    "bound": float(s.tail_bound.coords.max()),
                    "permutation_deviation": float(s.permutation_deviation),
                    "passed": ok and s.permutation_deviation == 0,
                },
            )
        )
    x = rng.uniform(0, 1, (40, 2))
    cond = conditional_sum(TermStream.from_sequence(list(x)), 40)
    unc = unconditional_sum(TermStream.from_sequence(list(x)), 40)
    out.append(_entry("conditional=unconditional", {"passed": cond == unc.value}))

    phi = SelectorFunction.identity(16)
    ok_all = True
    for _ in range(fremlin_trials):
        a = np.sort(rng.uniform(0, 1, (3, 3, 3)), axis=2)[:, :, ::-1]
        b = fremlin_combiner_search(a, 1.0, phi, 3)
        ok_all &= b is not None and all(fremlin_inequality_check(a, b, 1.0, phi, k, 3) for k in range(1, 4))
    a = np.full((3, 3, 3), 0.5)
    zero_fails = not fremlin_inequality_check(a, np.zeros((3, 3)), 1.0, phi, 1, 3)
    out.append(_entry("fremlin", {"passed": bool(ok_all and zero_fails), "zero_b_fails": zero_fails}))
    return out


def suite_choquet(rng):
    mu = LengthMeasure()
    fx = ExprFunction("x", monotone="increasing")
    out = []
    for name, C, exact in (("length", Capacity(mu), 0.5), ("length^2", Capacity.power(mu, 2), 1.0 / 3.0)):
        r = itg.choquet_integral(fx, C)
        resid = abs(r.value[0] - exact)
        out.append(_entry(f"choquet[{name}]", {"residual": resid, "bound": 1e-6, "passed": resid <= 1e-6 and r.certified}))
    c = float(np.round(rng.uniform(0.1, 2), 6))
    r = itg.choquet_integral(fmt(c), Capacity(mu))
    out.append(_entry("choquet[constant]", {"residual": abs(r.value[0] - c), "passed": r.value[0] == c}))
    out.append(_entry("choquet[additive]", laws.choquet_vs_net_riemann(fx, mu)))
    return out


SUITE_FUNCS = {
    "laws": suite_laws,
    "uniform": suite_uniform,
    "equivalence": suite_equivalence,
    "nullsets": suite_nullsets,
    "summability": suite_summability,
    "choquet": suite_choquet,
}


def run_verification_suite(name, seed=0):
    """Run one suite (or "all") and return a report sorted by property name."""
    if name != "all" and name not in SUITE_FUNCS:
        raise StructuralError(f"unknown suite {name!r}; expected one of {', '.join(SUITES + ('all',))}")
    names = SUITES if name == "all" else (name,)
    results = []
    for n in names:
        rng = np.random.default_rng([seed, SUITES.index(n)])
        for e in SUITE_FUNCS[n](rng):
            results.append(dict(e, suite=n))
    results.sort(key=lambda e: (e["suite"], e["name"]))
    return {"suite": name, "seed": seed, "results": results, "passed": all(e["passed"] for e in results)}


def summarize_error(exc):
    if isinstance(exc, RieszIntError):
        return str(exc)
    return f"{type(exc).__name__}: {exc}"

"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import time
from fractions import Fraction

import numpy as np
import pytest

from rieszint import cli, harness, laws
from rieszint.convergence import (
    SelectorFunction,
    TermStream,
    conditional_sum,
    fremlin_combiner_search,
    fremlin_inequality_check,
    unconditional_sum,
)
from rieszint.integrands import ElementaryFunction, ExprFunction, SimpleFunction, as_integrand
from rieszint.integrators import (
    IntegralVerdict,
    UniformRegulatorSequence,
    choquet_integral,
    net_riemann_integral,
    s_star_partition_integral,
)
from rieszint import dsl
from rieszint.lattice import ProductKind, ProductRule, RieszValue, abs_parts, apply_product, join_meet, leq
from rieszint.measures import Capacity, LengthMeasure, VectorMeasure
from rieszint.partitions import TagPolicy, dyadic_chain
from rieszint.sets import IntervalSet

L = LengthMeasure()
SEED = 20240611


@pytest.fixture
def report(capsys, request):
    """Yields a callable(ok, detail, elapsed, budget) that prints the verdict line and asserts."""

    def _report(ok, detail, elapsed=None, budget=None):
        timed = budget is None or elapsed < budget
        status = "PASS" if ok and timed else "FAIL"
        t = "" if elapsed is None else f" [{elapsed:.2f}s / {budget:g}s]"
        with capsys.disabled():
            print(f"\n{status} {request.node.name}: {detail}{t}")
        assert ok, detail
        assert timed, f"runtime {elapsed:.2f}s exceeds {budget}s"

    return _report


def test_criterion_01_lattice_laws(report):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    failures = 0
    worst_rel = 0.0
    for d in (1, 2, 4):
        zero = RieszValue.zero(d)
        rules = [ProductRule(ProductKind.COMPONENTWISE, d, d)]
        rules += [ProductRule(ProductKind.SCALAR_VECTOR, 1, d), ProductRule(ProductKind.VECTOR_SCALAR, d, 1)] if d > 1 else [ProductRule(ProductKind.SCALAR_SCALAR)]
        for _ in range(1000):
            a, b, c = (RieszValue(rng.uniform(-10, 10, d)) for _ in range(3))
            sup, inf = join_meet(a, b)
            mod, pos, neg = abs_parts(a)
            ok = (
                leq(a, sup)
                and leq(b, sup)
                and leq(inf, a)
                and leq(inf, b)
                and a == pos - neg
                and (pos & neg) == zero
                and mod == pos + neg
                and leq(a, a)
                and (not (leq(a, b) and leq(b, c)) or leq(a, c))
                and (not (leq(a, b) and leq(b, a)) or a == b)
            )
            failures += not ok
            for rule in rules:
                x = RieszValue(rng.uniform(-10, 10, rule.dim_x))
                x2 = RieszValue(rng.uniform(-10, 10, rule.dim_x))
                y = RieszValue(rng.uniform(-10, 10, rule.dim_y))
                alpha = float(rng.uniform(-5, 5))
                lhs = apply_product(rule, x * alpha + x2, y).coords
                rhs = (apply_product(rule, x, y) * alpha + apply_product(rule, x2, y)).coords
                scale = np.abs(alpha) * np.abs(apply_product(rule, x, y).coords) + np.abs(apply_product(rule, x2, y).coords)
                worst_rel = max(worst_rel, float(np.max(np.abs(lhs - rhs) / np.maximum(scale, 1e-300))))
                xp, yp = abs(x), abs(y)
                xq = xp + abs(x2)
                failures += not leq(apply_product(rule, xp, yp), apply_product(rule, xq, yp))
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and worst_rel <= 1e-12
    report(ok, f"failures={failures} bilinear rel err={worst_rel:.2e}", elapsed, 5)


def test_criterion_02_net_riemann_oracle(report):
    t0 = time.perf_counter()
    r = net_riemann_integral("x", L, chain=dyadic_chain(L.space.omega, 0, 20), stop_early=False)
    elapsed = time.perf_counter() - t0
    err = abs(r.value.coords[0] - 0.5)
    ok = r.certified and err <= 1e-6 and r.steps[-1].size >= 2**20
    report(ok, f"value={r.value.coords[0]!r} err={err:.2e} bound={r.cauchy_bound.coords[0]:.2e} cells={r.steps[-1].size}", elapsed, 10)


def _random_simple(rng, m):
    k = int(rng.integers(2, min(2**m, 6) + 2))
    cuts = np.sort(rng.choice(2**m + 1, k, replace=False))
    coeffs, sets, oracle = [], [], Fraction(0)
    for i, j in zip(cuts[:-1], cuts[1:]):
        a, b = i / 2**m, j / 2**m
        c = float(rng.integers(-64, 65)) / 8
        coeffs.append(c)
        # cells of the dyadic paving touching the right end of [0, 1] are closed
        sets.append(IntervalSet.closed(a, b) if b == 1 else IntervalSet.half_open(a, b))
        oracle += Fraction(c) * (Fraction(b) - Fraction(a))
    return SimpleFunction(coeffs, sets), float(oracle)


def test_criterion_03_simple_function_exactness(report):
    rng = np.random.default_rng(SEED + 3)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(50):
        m = int(rng.integers(1, 7))
        f, oracle = _random_simple(rng, m)
        r = net_riemann_integral(f, L, chain=dyadic_chain(L.space.omega, 0, m + 3), stop_early=False)
        refined = [s for s in r.steps if s.step >= m]
        bad += not (r.certified and all(s.value[0] == oracle for s in refined) and r.value.coords[0] == oracle)
    elapsed = time.perf_counter() - t0
    report(bad == 0, f"{50 - bad}/50 simple functions exact from the refining step", elapsed, 5)


def test_criterion_04_integral_laws(report):
    rng = np.random.default_rng([SEED, 4])
    t0 = time.perf_counter()
    rows = harness.suite_laws(rng, pairs=100)
    elapsed = time.perf_counter() - t0
    failed = [r["name"] for r in rows if not r["passed"]]
    step_exact = all(r["properties"][p]["step_exact"] for r in rows for p in ("positivity", "isotonicity"))
    report(not failed and step_exact and len(rows) >= 100, f"{len(rows) - len(failed)}/{len(rows)} pairs pass {failed[:3]}", elapsed, 30)


def test_criterion_05_uniform_convergence(report):
    rng = np.random.default_rng([SEED, 5])
    t0 = time.perf_counter()
    rows = [("x+2^-n", laws.verify_uniform_convergence(lambda n: f"x + 2^-{n}", "x", UniformRegulatorSequence.geometric(), L))]
    for i in range(20):
        text, lip = harness.random_polynomial(rng)
        f = as_integrand(text)
        seq, u = harness.staircase_family(f, lip)
        rows.append((f"staircase {i}", laws.verify_uniform_convergence(seq, f, u, L, seed=i)))
    elapsed = time.perf_counter() - t0
    failed = [n for n, r in rows if not r["passed"]]
    n_ok = all(len(r["rows"]) == 20 for _, r in rows)
    report(not failed and n_ok, f"{len(rows) - len(failed)}/{len(rows)} families pass {failed[:3]}", elapsed, 60)


def test_criterion_06_null_sets(report):
    rng = np.random.default_rng([SEED, 6])
    t0 = time.perf_counter()
    rows = harness.suite_nullsets(rng, fixtures=20)
    elapsed = time.perf_counter() - t0
    zeros = all(r["properties"]["null_integral_zero"]["value"] == [0.0] for r in rows)
    failed = [r["name"] for r in rows if not r["passed"]]
    report(zeros and not failed and len(rows) == 20, f"{20 - len(failed)}/20 fixtures pass, null integrals exactly 0: {zeros}", elapsed, 20)


def test_criterion_07_pavlakos_vs_s_star(report):
    rng = np.random.default_rng([SEED, 7])
    t0 = time.perf_counter()
    e = ElementaryFunction.from_elemseries(dsl.parse_function("elemseries(2^-i, dyadic)"))
    rows = [("1/3", laws.pavlakos_vs_s_star(e, L))]
    third = abs(rows[0][1]["pavlakos"][0] - 1 / 3)
    for i in range(10):
        text, lip = harness.random_polynomial(rng, nonnegative=True)
        f = as_integrand(text)
        seq, u = harness.staircase_family(f, lip)
        rows.append((str(i), laws.pavlakos_vs_s_star(f, L, seq, u)))
    elapsed = time.perf_counter() - t0
    failed = [n for n, r in rows if not (r["passed"] and r["residual"] <= 1e-5)]
    worst = max(r["residual"] for _, r in rows)
    ok = not failed and third <= 1e-5
    report(ok, f"{11 - len(failed)}/11 agree, worst residual={worst:.2e}, |pavlakos - 1/3|={third:.2e}", elapsed, 30)


def test_criterion_08_s_star_vs_sion(report):
    rng = np.random.default_rng([SEED, 8])
    mu = VectorMeasure(L, [1.0, -2.0])
    t0 = time.perf_counter()
    rows = []
    for i in range(10):
        text = harness.random_piecewise(rng) if i % 2 else harness.random_polynomial(rng)[0]
        rows.append(laws.s_star_vs_sion(text, mu))
    elapsed = time.perf_counter() - t0
    failed = sum(not r["passed"] for r in rows)
    worst = max(r["residual"] for r in rows)
    report(failed == 0, f"{10 - failed}/10 agree in R^2, worst residual={worst:.2e}", elapsed, 30)


def test_criterion_09_choquet(report):
    fx = ExprFunction("x", monotone="increasing")
    t0 = time.perf_counter()
    a = choquet_integral(fx, Capacity(L))
    b = choquet_integral(fx, Capacity.power(L, 2))
    c = laws.choquet_vs_net_riemann(fx, L)
    elapsed = time.perf_counter() - t0
    ea, eb = abs(a.value.coords[0] - 0.5), abs(b.value.coords[0] - 1 / 3)
    ok = ea <= 1e-6 and eb <= 1e-6 and c["passed"]
    report(ok, f"length err={ea:.2e}, length^2 err={eb:.2e}, additive residual={c['residual']:.2e}", elapsed, 10)


def test_criterion_10_summability(report):
    rng = np.random.default_rng([SEED, 10])
    t0 = time.perf_counter()
    ok, notes = True, []
    for scale in ([1.0], [1.0, -3.0, 0.5]):
        scale = np.asarray(scale)
        terms = TermStream(lambda n, s=scale: s * 0.5 ** (n - 1), scale.size, lambda depth, s=scale: np.abs(s) * 0.5**depth / 0.5)
        s = unconditional_sum(terms, 60, permutation_trials=20, seed=int(rng.integers(1 << 30)), nonnegative=False)
        resid = float(np.max(np.abs(s.value.coords - 2 * scale)))
        ok &= resid <= float(np.max(s.tail_bound.coords)) and s.permutation_deviation == 0
        notes.append(f"d={scale.size} resid={resid:.1e}")
    x = list(rng.uniform(0, 1, (50, 3)))
    same = conditional_sum(TermStream.from_sequence(x), 50) == unconditional_sum(TermStream.from_sequence(x), 50).value
    elapsed = time.perf_counter() - t0
    report(ok and same, f"{', '.join(notes)}, conditional == unconditional: {same}", elapsed, 5)


def test_criterion_11_fremlin(report):
    rng = np.random.default_rng([SEED, 11])
    phi = SelectorFunction.identity(16)
    t0 = time.perf_counter()
    good = 0
    for _ in range(50):
        a = np.sort(rng.uniform(0, 1, (3, 3, 3)), axis=2)[:, :, ::-1]
        b = fremlin_combiner_search(a, 1.0, phi, 3)
        good += b is not None and all(fremlin_inequality_check(a, b, 1.0, phi, k, 3) for k in range(1, 4))
    zero_fails = not fremlin_inequality_check(np.full((3, 3, 3), 0.5), np.zeros((3, 3)), 1.0, phi, 1, 3)
    elapsed = time.perf_counter() - t0
    report(good == 50 and zero_fails, f"{good}/50 combiners satisfy the inequality, zero-b fails: {zero_fails}", elapsed, 20)


def test_criterion_12_divergence_honesty(report, tmp_path, monkeypatch, capsys):
    from pathlib import Path

    monkeypatch.setenv("RIESZINT_OUTPUT_DIR", str(tmp_path))
    t0 = time.perf_counter()
    f = "dyadic_indicator(40)"
    verdicts = []
    for seed in range(3):
        pols = [TagPolicy("seeded-random", seed)]
        verdicts.append(net_riemann_integral(f, L, policies=pols, stop_early=False).verdict)
        verdicts.append(net_riemann_integral(f, L, policies=[TagPolicy("left")] + pols).verdict)
    verdicts.append(s_star_partition_integral(f, L, tag_policies=[TagPolicy("left"), TagPolicy("seeded-random", 3)]).verdict)
    cfg = Path(__file__).resolve().parents[1] / "configs" / "dyadic_random_tags.ini"
    code = cli.main(["run", str(cfg)])
    elapsed = time.perf_counter() - t0
    never = IntegralVerdict.CERTIFIED not in verdicts
    ok = never and code in (2, 3)
    report(ok, f"verdicts={sorted({v.value for v in verdicts})}, cli exit={code}", elapsed, 10)

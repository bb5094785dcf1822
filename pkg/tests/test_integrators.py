from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszint import dsl
from rieszint.errors import ContractViolation, StructuralError
from rieszint.integrands import (
    CallableFunction,
    ElementaryFunction,
    ExprFunction,
    SimpleFunction,
    as_integrand,
    staircase,
)
from rieszint.integrators import (
    FunctionNet,
    IntegralVerdict,
    UniformRegulatorSequence,
    abstract_lebesgue_integral,
    choquet_integral,
    henstock_integral,
    net_riemann_integral,
    pavlakos_elementary_integral,
    pavlakos_integral,
    riemann_sum,
    s_star_partition_integral,
    saks_integral,
    sion_integral,
)
from rieszint.lattice import RieszValue
from rieszint.measures import Capacity, CofiniteCharge, LengthMeasure, VectorMeasure
from rieszint.partitions import (
    Gauge,
    TagPolicy,
    Truncation,
    dyadic_chain,
    graded_chain,
    uniform_tagged_partition,
)
from rieszint.sets import IntervalSet, finite_space

from oracles import riemann_poly

L = LengthMeasure()
UNIT = IntervalSet.closed(0, 1)
FX = ExprFunction("x", monotone="increasing")
C = dict(certified=IntegralVerdict.CERTIFIED, inconclusive=IntegralVerdict.INCONCLUSIVE, diverged=IntegralVerdict.DIVERGED)


def test_riemann_sum_examples():
    P = uniform_tagged_partition(UNIT, 4, TagPolicy("left"))
    assert riemann_sum("x", L, P) == RieszValue([0.375])
    assert riemann_sum("vec(x, 1)", L, P) == RieszValue([0.375, 1.0])
    assert riemann_sum("2.5", L, uniform_tagged_partition(UNIT, 7, TagPolicy("seeded-random", 3))) == RieszValue([2.5])


@given(st.lists(st.integers(-8, 8), min_size=1, max_size=4), st.integers(1, 40), st.sampled_from(["left", "midpoint", "right"]))
def test_riemann_sum_matches_exact_oracle(coeffs, n, kind):
    text = " + ".join(f"{c}*x^{i}" for i, c in enumerate(coeffs))
    P = uniform_tagged_partition(UNIT, n, TagPolicy(kind))
    theta = {"left": 0, "midpoint": Fraction(1, 2), "right": 1}[kind]
    expect = float(riemann_poly(coeffs, n, theta))
    got = riemann_sum(text, L, P).coords[0]
    assert abs(got - expect) <= 1e-13 * max(1.0, sum(abs(c) for c in coeffs))


def test_net_riemann_identity():
    r = net_riemann_integral("x", L)
    assert r.certified and abs(r.value.coords[0] - 0.5) <= 1e-6
    assert np.all(r.steps[-1].oscillation <= r.cauchy_bound.coords)


def test_net_riemann_simple_function_exact():
    f = SimpleFunction([2.0, -1.0], [IntervalSet.half_open(0, 0.25), IntervalSet.closed(0.5, 1)])
    r = net_riemann_integral(f, L)
    assert r.certified and r.value.coords[0] == 0.0
    assert len(r.steps) == 3


def test_net_riemann_dyadic_indicator():
    f = "dyadic_indicator(40)"
    r = net_riemann_integral(f, L, policies=[TagPolicy("seeded-random", 1)], stop_early=False)
    assert r.verdict is C["inconclusive"]
    r = net_riemann_integral(f, L, policies=[TagPolicy("left"), TagPolicy("seeded-random", 1)])
    assert r.verdict is C["diverged"]


def test_net_riemann_variants_agree():
    A = IntervalSet.half_open(0.25, 0.75)
    a = net_riemann_integral("x^2", L, A=A, chain=dyadic_chain(A, 0, 14), tol=1e-4)
    b = net_riemann_integral("x^2", L, A=A, chain=dyadic_chain(UNIT, 0, 14), variant="indicator", tol=1e-4)
    assert abs(a.value.coords[0] - b.value.coords[0]) <= a.cauchy_bound.coords[0] + b.cauchy_bound.coords[0]
    exact = (0.75**3 - 0.25**3) / 3
    assert abs(a.value.coords[0] - exact) <= a.cauchy_bound.coords[0]


def test_net_riemann_no_modulus_is_not_certified():
    f = CallableFunction(lambda x: np.sin(1 / (x + 1e-3)), bound=1.0)
    r = net_riemann_integral(f, L, chain=dyadic_chain(UNIT, 0, 10))
    assert r.verdict is not C["certified"]


def test_s_star_examples():
    assert s_star_partition_integral("1.5", L).value == RieszValue([1.5])
    N = IntervalSet.point(0.3) | IntervalSet.point(0.6)
    assert s_star_partition_integral("1/x", L, A=N).value.is_zero()
    r = s_star_partition_integral("x", L, depth=40, refinements=12)
    assert abs(r.value.coords[0] - 0.5) <= 1e-5 and r.certified


def test_s_star_requires_sigma_additive():
    mu = CofiniteCharge(finite_space(8))
    with pytest.raises(ContractViolation, match="integrators.s_star_partition_integral"):
        s_star_partition_integral("x", mu)


def test_s_star_tag_disagreement_diverges():
    r = s_star_partition_integral("dyadic_indicator(40)", L, tag_policies=[TagPolicy("left"), TagPolicy("seeded-random", 2)])
    assert r.verdict is C["diverged"]


def test_sion_examples():
    c = sion_integral("1.5", L)
    assert c.certified and abs(c.value.coords[0] - 1.5) <= c.cauchy_bound.coords[0]
    a = sion_integral("x", L)
    b = s_star_partition_integral("x", L)
    assert abs(a.value.coords[0] - 0.5) <= 1e-5
    assert abs(a.value.coords[0] - b.value.coords[0]) <= a.cauchy_bound.coords[0] + b.cauchy_bound.coords[0]
    slow = sion_integral("x", L, truncation=Truncation("linear"))
    assert slow.verdict is C["inconclusive"]


def test_henstock_examples():
    r = henstock_integral("x", L)
    assert r.certified and abs(r.value.coords[0] - 0.5) <= 1e-6
    gauges = [Gauge.around(0.5, 2.0**-m * 1e-3, 2.0**-m) for m in range(1, 25)]
    r = henstock_integral("piecewise(x == 0.5, 1, 0)", L, gauge_schedule=gauges)
    assert abs(r.value.coords[0]) <= 1e-6 and r.verdict is not C["diverged"]
    for s in henstock_integral("0.75", L).steps:
        assert s.value == (0.75,)


def test_pavlakos_elementary_examples():
    finite = ElementaryFunction.finite([2.0, 3.0], [(0, 0.25, True, False), (0.5, 1, True, True)])
    r = pavlakos_elementary_integral(finite, L)
    assert r.value == RieszValue([2.0]) and r.certified
    e = ElementaryFunction.from_elemseries(dsl.parse_function("elemseries(2^-i, dyadic)"))
    assert abs(pavlakos_elementary_integral(e, L).value.coords[0] - 1 / 3) <= 1e-9
    z = ElementaryFunction.finite([0.0], [(0, 1, True, True)])
    assert pavlakos_elementary_integral(z, L).value.is_zero()


def test_pavlakos_missing_tail_inconclusive():
    e = ElementaryFunction.dyadic(lambda i: 2.0**-i)
    assert pavlakos_elementary_integral(e, L).verdict is C["inconclusive"]


def test_pavlakos_staircase():
    f = as_integrand("x")
    u = UniformRegulatorSequence.geometric()
    r = pavlakos_integral(f, lambda n: staircase(f, n), u, L, levels=range(1, 21))
    assert abs(r.value.coords[0] - 0.5) <= 2.0**-20 + 1e-6
    r2 = pavlakos_integral(f, lambda n: staircase(f, n, anchor=1.0), u, L, levels=range(1, 21))
    assert abs(r.value.coords[0] - r2.value.coords[0]) <= r.cauchy_bound.coords[0] + r2.cauchy_bound.coords[0]


def test_pavlakos_envelope_violation():
    f = as_integrand("x")
    with pytest.raises(ContractViolation, match="integrators.pavlakos_integral"):
        pavlakos_integral(f, lambda n: staircase(f, n), UniformRegulatorSequence.geometric(1e-3), L, levels=range(1, 4))


def test_pavlakos_elementary_f_is_fixed_point():
    e = ElementaryFunction.finite([1.0, 4.0], [(0, 0.5, True, False), (0.5, 1, True, True)])
    u = UniformRegulatorSequence.geometric()
    r = pavlakos_integral(e, lambda n: e, u, L, levels=range(1, 4))
    assert r.value == pavlakos_elementary_integral(e, L).value


def test_abstract_lebesgue():
    f = SimpleFunction([2.0], [IntervalSet.half_open(0, 0.5)])
    base = lambda g: net_riemann_integral(g, L)
    r = abstract_lebesgue_integral(f, [FunctionNet([f, f], [0.0, 0.0])], base, L)
    assert r.value == RieszValue([1.0]) and r.certified

    fx = as_integrand("x")
    base = lambda g: pavlakos_elementary_integral(g, L)
    net1 = FunctionNet([staircase(fx, n) for n in range(14, 19)], [2.0**-n for n in range(14, 19)])
    net2 = FunctionNet([staircase(fx, n, anchor=1.0) for n in range(14, 19)], [2.0**-n for n in range(14, 19)])
    r = abstract_lebesgue_integral(fx, [net1, net2], base, L, tol=1e-4)
    assert r.verdict is C["certified"] and abs(r.value.coords[0] - 0.5) <= 1e-4
    off = as_integrand("x + 0.1")
    net3 = FunctionNet([staircase(off, n) for n in range(14, 19)], [2.0**-n for n in range(14, 19)])
    assert abstract_lebesgue_integral(fx, [net1, net3], base, L).verdict is C["diverged"]


def test_saks_examples():
    A = IntervalSet.closed(0, 0.5)
    base = lambda f, S: net_riemann_integral(f, L, A=S, chain=dyadic_chain(S, 0, 20))
    r = saks_integral("x", L, [A, A, A], base)
    assert r.value == base(as_integrand("x"), A).value

    ks = [10, 20]
    sets = [IntervalSet.closed(0, 1 - 2.0**-k) for k in ks]
    r = saks_integral("(1 - x)^2", L, sets, base, tail=lambda i: 2.0 ** (-3 * ks[i]) / 3)
    assert abs(r.value.coords[0] - 1 / 3) <= 1e-6 and r.certified and r.info["trend"] == "increasing"

    ks = [8, 16, 24, 32, 36]
    sets = [IntervalSet.closed(2.0**-k, 1) for k in ks]
    gbase = lambda f, S: net_riemann_integral(f, L, A=S, chain=graded_chain(S, S.hull()[0], 2, 14, shells=40), tol=5e-5)
    r = saks_integral("1/sqrt(x)", L, sets, gbase, tail=lambda i: 2 * 2.0 ** (-ks[i] / 2), tol=1e-4)
    assert abs(r.value.coords[0] - 2) <= 1e-4 and r.certified


def test_saks_rejects_decreasing_chain():
    sets = [IntervalSet.closed(0, 1), IntervalSet.closed(0, 0.5)]
    with pytest.raises(ContractViolation, match="integrators.saks_integral"):
        saks_integral("x", L, sets, lambda f, S: net_riemann_integral(f, L, A=S))


def test_choquet_examples():
    assert choquet_integral("0.7", Capacity(L)).value == RieszValue([0.7])
    r = choquet_integral(FX, Capacity(L))
    assert abs(r.value.coords[0] - 0.5) <= 1e-6 and r.certified
    r = choquet_integral(FX, Capacity.power(L, 2))
    assert abs(r.value.coords[0] - 1 / 3) <= 1e-6 and r.certified


def test_choquet_rejects_non_monotone():
    with pytest.raises(StructuralError):
        choquet_integral(ExprFunction("sin(7*x) + 1"), Capacity(L))
    with pytest.raises(ContractViolation):
        choquet_integral(ExprFunction("x - 0.5", monotone="increasing"), Capacity(L))


def test_vector_measure_products():
    mu = VectorMeasure(L, [1.0, -2.0])
    r = net_riemann_integral("x", mu)
    assert np.all(np.abs(r.value.coords - [0.5, -1.0]) <= r.cauchy_bound.coords)
    r = net_riemann_integral("vec(x, 1)", mu)
    assert np.all(np.abs(r.value.coords - [0.5, -2.0]) <= r.cauchy_bound.coords)


def test_bad_tolerance():
    with pytest.raises(StructuralError):
        net_riemann_integral("x", L, tol=0)

import numpy as np
import pytest

from rieszint import laws
from rieszint.errors import ContractViolation
from rieszint.integrators import UniformRegulatorSequence
from rieszint.measures import LengthMeasure, VectorMeasure
from rieszint.sets import IntervalSet

L = LengthMeasure()
GEO = UniformRegulatorSequence.geometric()


def test_integral_laws_pass_for_polynomials():
    res = laws.verify_integral_laws("x", "1 - x^2", L)
    assert res["passed"]
    assert res["properties"]["additivity"]["residual"] <= res["properties"]["additivity"]["bound"]


def test_integral_laws_vector_measure():
    res = laws.verify_integral_laws("x", "piecewise(x < 0.3, 1, -2)", VectorMeasure(L, [1.0, 0.5]))
    assert res["passed"] and res["properties"]["triangle"]["applies"]


def test_order_laws_skipped_for_signed_measure():
    res = laws.verify_integral_laws("x", "piecewise(x < 0.3, 1, -2)", VectorMeasure(L, [1.0, -0.5]))
    assert res["passed"] and not res["properties"]["triangle"]["applies"]
    assert res["properties"]["triangle"]["residual"] > 0


def test_uniform_convergence_shifted_family():
    res = laws.verify_uniform_convergence(lambda n: f"x + 2^-{n}", "x", GEO, L, n_max=8)
    assert res["passed"] and len(res["rows"]) == 8
    assert res["gap"] <= res["gap_bound"]


def test_uniform_convergence_rejects_bad_envelope():
    with pytest.raises(ContractViolation):
        laws.verify_uniform_convergence(lambda n: "x + 1", "x", GEO, L, n_max=2)


def test_uniform_convergence_almost_everywhere():
    N = IntervalSet.point(0.25)
    res = laws.verify_uniform_convergence(lambda n: f"x + piecewise(x == 0.25, 50, 2^-{n})", "x", GEO, L, null_set=N, n_max=4)
    assert res["passed"]


def test_null_sets():
    N = IntervalSet.point(0.3) | IntervalSet.point(0.7)
    res = laws.verify_null_sets("piecewise(x < 0.5, x, 2)", L, N)
    assert res["passed"]
    assert res["properties"]["null_integral_zero"]["value"] == [0.0]


def test_null_sets_requires_null():
    with pytest.raises(ContractViolation):
        laws.verify_null_sets("x", L, IntervalSet.closed(0, 0.5))


def test_s_star_vs_sion_vector():
    res = laws.s_star_vs_sion("x^2", VectorMeasure(L, [1.0, -2.0]))
    assert res["passed"] and not res["diverged"]


def test_choquet_vs_net_riemann():
    from rieszint.integrands import ExprFunction

    assert laws.choquet_vs_net_riemann(ExprFunction("x", monotone="increasing"), L)["passed"]


def test_nu_sigma_additivity():
    res = laws.nu_sigma_additivity("1 + x", L)
    assert res["passed"] and res["tail"] > 0
    assert np.isfinite(res["bound"])

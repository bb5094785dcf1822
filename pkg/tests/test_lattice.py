import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszint.errors import StructuralError
from rieszint.lattice import (
    ProductKind,
    ProductRule,
    RieszValue,
    abs_parts,
    apply_product,
    join_meet,
    leq,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def values(d):
    return st.lists(finite, min_size=d, max_size=d).map(RieszValue)


dims = st.sampled_from([1, 2, 4])


@st.composite
def pair(draw):
    d = draw(dims)
    return draw(values(d)), draw(values(d))


@st.composite
def triple(draw):
    d = draw(dims)
    return draw(values(d)), draw(values(d)), draw(values(d))


def test_leq_examples():
    assert leq(RieszValue([1, 2]), RieszValue([2, 3]))
    assert not leq(RieszValue([1, 3]), RieszValue([2, 2]))
    a = RieszValue([0.3, -1])
    assert leq(a, a)


def test_join_meet_examples():
    s, i = join_meet(RieszValue([1, 3]), RieszValue([2, 2]))
    assert s == RieszValue([2, 3]) and i == RieszValue([1, 2])
    s, i = join_meet(RieszValue([-1, 0]), RieszValue([0, -1]))
    assert s == RieszValue([0, 0]) and i == RieszValue([-1, -1])


def test_abs_parts_examples():
    ab, p, n = abs_parts(RieszValue([-1, 2]))
    assert (ab, p, n) == (RieszValue([1, 2]), RieszValue([0, 2]), RieszValue([1, 0]))
    z = RieszValue.zero(3)
    assert abs_parts(z) == (z, z, z)
    a = RieszValue([1.5, 0, 2])
    assert abs_parts(a) == (a, a, z)


def test_product_examples():
    assert apply_product(ProductRule("scalar*vector", 1, 2), RieszValue([2]), RieszValue([1, 3])) == RieszValue([2, 6])
    assert apply_product(ProductRule("componentwise", 2, 2), RieszValue([1, 2]), RieszValue([3, 4])) == RieszValue([3, 8])
    rule = ProductRule("componentwise", 2, 2)
    y = RieszValue([1, 2])
    lo = apply_product(rule, RieszValue([1, 1]), y)
    hi = apply_product(rule, RieszValue([2, 1]), y)
    assert lo == RieszValue([1, 2]) and hi == RieszValue([2, 2]) and lo <= hi


def test_product_rule_validation():
    with pytest.raises(StructuralError):
        ProductRule("scalar*scalar", 2, 1)
    with pytest.raises(StructuralError):
        ProductRule("componentwise", 2, 3)
    with pytest.raises(StructuralError):
        apply_product(ProductRule("componentwise", 2, 2), RieszValue([1]), RieszValue([1, 2]))
    assert ProductRule.infer(1, 3).kind is ProductKind.SCALAR_VECTOR
    assert ProductRule.infer(3, 1).kind is ProductKind.VECTOR_SCALAR
    with pytest.raises(StructuralError):
        ProductRule.infer(2, 3)


def test_mismatched_dimensions_rejected():
    with pytest.raises(StructuralError):
        RieszValue([1, 2]) + RieszValue([1])
    with pytest.raises(StructuralError):
        RieszValue([])


@given(pair())
def test_join_meet_bounds(ab):
    a, b = ab
    s, i = join_meet(a, b)
    assert a <= s and b <= s and i <= a and i <= b
    assert s + i == a + b


@given(values(4))
def test_decomposition_identities(a):
    ab, p, n = abs_parts(a)
    assert a == p - n
    assert (p & n).is_zero()
    assert ab == p + n
    assert RieszValue.zero(4) <= p and RieszValue.zero(4) <= n


@given(triple())
def test_lattice_laws(abc):
    a, b, c = abc
    assert (a | b) == (b | a) and (a & b) == (b & a)
    assert ((a | b) | c) == (a | (b | c))
    assert (a | (a & b)) == a and (a & (a | b)) == a
    assert (a | (b & c)) == ((a | b) & (a | c))


@given(pair())
def test_order_is_partial(ab):
    a, b = ab
    if a <= b and b <= a:
        assert a == b


@given(values(2), values(2))
def test_archimedean_sample(a, b):
    a, b = abs(a), abs(b)
    if not a.is_zero():
        n = 1
        while (a * n) <= b:
            n *= 2
        assert not (a * n) <= b


@given(dims, st.floats(-100, 100), st.data())
def test_bilinearity(d, alpha, data):
    rule = ProductRule("componentwise", d, d)
    x, x2, y = (data.draw(values(d)) for _ in range(3))
    lhs = apply_product(rule, x * alpha + x2, y).coords
    rhs = (apply_product(rule, x, y) * alpha + apply_product(rule, x2, y)).coords
    scale = np.maximum(1.0, np.abs(alpha * x.coords * y.coords) + np.abs(x2.coords * y.coords))
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)


@given(dims, st.data())
def test_product_isotone_on_positive_cone(d, data):
    rule = ProductRule("componentwise", d, d)
    x, dx, y = (abs(data.draw(values(d))) for _ in range(3))
    assert apply_product(rule, x, y) <= apply_product(rule, x + dx, y)

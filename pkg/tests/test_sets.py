import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from rieszint.sets import IntervalSet, finite_space, interval_space

GRID = np.linspace(-0.25, 1.25, 61)


@st.composite
def interval_sets(draw):
    s = IntervalSet()
    for _ in range(draw(st.integers(0, 3))):
        a = draw(st.sampled_from(GRID[::4]))
        b = draw(st.sampled_from(GRID[::4]))
        a, b = min(a, b), max(a, b)
        lc, rc = draw(st.booleans()), draw(st.booleans())
        if a == b:
            lc = rc = True
        s = s | IntervalSet.interval(float(a), float(b), lc, rc)
    return s


def member(S, x=GRID):
    return S.contains(x)


@given(interval_sets(), interval_sets())
def test_boolean_ops_match_membership(A, B):
    assert np.array_equal(member(A | B), member(A) | member(B))
    assert np.array_equal(member(A & B), member(A) & member(B))
    assert np.array_equal(member(A - B), member(A) & ~member(B))
    assert np.array_equal(member(A ^ B), member(A) ^ member(B))


@given(interval_sets(), interval_sets())
def test_subset_and_disjoint(A, B):
    assert (A & B) <= A
    assert (A - B).isdisjoint(B)
    assert (A | B) == (B | A)


@given(interval_sets())
def test_length_additive(A):
    B = IntervalSet.closed(0.0, 0.5)
    assert abs((A | B).length() + (A & B).length() - A.length() - B.length()) <= 1e-12


def test_closed_and_half_open():
    A = IntervalSet.closed(0, 1)
    assert 0 in A and 1 in A
    H = IntervalSet.half_open(0, 0.5)
    assert 0 in H and 0.5 not in H
    assert IntervalSet.point(0.5).length() == 0
    assert (IntervalSet.half_open(0, 0.5) | IntervalSet.closed(0.5, 1)) == A


def test_spaces():
    S = interval_space()
    assert S.omega == IntervalSet.closed(0, 1)
    F = finite_space(4)
    assert F.is_finite and F.omega == frozenset(range(4))
    assert F.complement(frozenset({1, 3})) == frozenset({0, 2})

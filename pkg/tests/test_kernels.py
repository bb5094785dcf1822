import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszint import _kernels as k

from oracles import exact_dot

floats = st.floats(-1e200, 1e200, allow_nan=False, allow_infinity=False)
needs_numba = pytest.mark.skipif(not k.NUMBA_AVAILABLE, reason="numba missing")


@given(st.lists(floats, max_size=200))
def test_fsum_matches_math_fsum(xs):
    assert k.fsum_numpy(np.array(xs)) == math.fsum(xs)


@needs_numba
@given(st.lists(floats, max_size=200))
def test_backends_bit_identical(xs):
    x = np.array(xs, dtype=np.float64)
    assert k.fsum_numba(x) == k.fsum_numpy(x)
    cols = np.stack([x, x[::-1]], axis=1) if x.size else np.zeros((0, 2))
    assert np.array_equal(k.column_fsum_numba(cols), k.column_fsum_numpy(cols))


@needs_numba
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=100))
def test_suffix_extrema_backends(xs):
    x = np.array(xs)
    a, b = k.suffix_extrema_numba(x), k.suffix_extrema_numpy(x)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert a[0][0] == x.max() and a[1][0] == x.min()


def test_fsum_cancellation():
    assert k.fsum(np.array([1e16, 1.0, -1e16])) == 1.0
    assert k.fsum(np.array([0.1] * 10)) == 1.0


@given(st.lists(st.tuples(st.floats(-1e100, 1e100), st.floats(-1e100, 1e100)), min_size=1, max_size=50))
def test_exact_product_sum_is_correctly_rounded(pairs):
    a = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    assert k.exact_product_sum(a, b)[0] == exact_dot(a.tolist(), b.tolist())


def test_two_product_error_free():
    p, e = k.two_product(np.array([0.1]), np.array([0.3]))
    from fractions import Fraction

    assert Fraction(p[0]) + Fraction(e[0]) == Fraction(0.1) * Fraction(0.3)


def test_env_flag_selects_numpy():
    code = "from rieszint import _kernels as k; print(k.backend())"
    env = dict(os.environ, RIESZINT_PURE_NUMPY="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["RIESZINT_PURE_NUMPY"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("numba" if k.NUMBA_AVAILABLE else "numpy")

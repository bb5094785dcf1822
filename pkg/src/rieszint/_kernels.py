"""Hot reduction kernels with a numba path and a pure-numpy path.

Both paths return bit-identical results: the summation kernel is
correctly rounded (Shewchuk partials with the CPython ``math.fsum`` final
rounding step), so the value does not depend on reduction order or backend.

Set ``RIESZINT_PURE_NUMPY=1`` before import to force the numpy path.
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_FLAG = "RIESZINT_PURE_NUMPY"


def _flag_set(value):
    return value is not None and value.strip().lower() not in ("", "0", "false", "no")


try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not _flag_set(os.environ.get(_ENV_FLAG))


# ---------------------------------------------------------------- numpy path


def fsum_numpy(x):
    x = np.asarray(x, dtype=np.float64)
    return math.fsum(x.tolist())


def column_fsum_numpy(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        return np.array([fsum_numpy(a)])
    return np.array([math.fsum(a[:, k].tolist()) for k in range(a.shape[1])])


def suffix_extrema_numpy(a):
    """Running max/min taken from the end, one column per coordinate."""
    a = np.asarray(a, dtype=np.float64)
    rev = a[::-1]
    smax = np.maximum.accumulate(rev, axis=0)[::-1]
    smin = np.minimum.accumulate(rev, axis=0)[::-1]
    return smax, smin


# ---------------------------------------------------------------- numba path

if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def _fsum_nb(x):
        n = x.shape[0]
        for k in range(n):
            if not np.isfinite(x[k]):
                s = 0.0
                for j in range(n):
                    s += x[j]
                return s
        partials = np.empty(128, dtype=np.float64)
        m = 0
        for k in range(n):
            v = x[k]
            i = 0
            for j in range(m):
                y = partials[j]
                if abs(v) < abs(y):
                    v, y = y, v
                hi = v + y
                lo = y - (hi - v)
                if lo != 0.0:
                    partials[i] = lo
                    i += 1
                v = hi
            partials[i] = v
            m = i + 1
        if m == 0:
            return 0.0
        m -= 1
        hi = partials[m]
        lo = 0.0
        while m > 0:
            v = hi
            m -= 1
            y = partials[m]
            hi = v + y
            yr = hi - v
            lo = y - yr
            if lo != 0.0:
                break
        if m > 0 and ((lo < 0.0 and partials[m - 1] < 0.0) or (lo > 0.0 and partials[m - 1] > 0.0)):
            y = lo * 2.0
            v = hi + y
            yr = v - hi
            if y == yr:
                hi = v
        return hi

    @numba.njit(cache=True)
    def _column_fsum_nb(a):
        d = a.shape[1]
        out = np.empty(d, dtype=np.float64)
        for k in range(d):
            out[k] = _fsum_nb(np.ascontiguousarray(a[:, k]))
        return out

    @numba.njit(cache=True)
    def _suffix_extrema_nb(a):
        n, d = a.shape
        smax = np.empty_like(a)
        smin = np.empty_like(a)
        for k in range(d):
            hi = -np.inf
            lo = np.inf
            for i in range(n - 1, -1, -1):
                v = a[i, k]
                if v > hi:
                    hi = v
                if v < lo:
                    lo = v
                smax[i, k] = hi
                smin[i, k] = lo
        return smax, smin

    def fsum_numba(x):
        return float(_fsum_nb(np.ascontiguousarray(x, dtype=np.float64).ravel()))

    def column_fsum_numba(a):
        a = np.asarray(a, dtype=np.float64)
        if a.ndim == 1:
            a = a[:, None]
        return _column_fsum_nb(np.ascontiguousarray(a))

    def suffix_extrema_numba(a):
        a = np.asarray(a, dtype=np.float64)
        squeeze = a.ndim == 1
        if squeeze:
            a = a[:, None]
        smax, smin = _suffix_extrema_nb(np.ascontiguousarray(a))
        if squeeze:
            return smax[:, 0], smin[:, 0]
        return smax, smin

else:  # pragma: no cover
    fsum_numba = column_fsum_numba = suffix_extrema_numba = None


if USE_NUMBA:
    fsum = fsum_numba
    column_fsum = column_fsum_numba
    suffix_extrema = suffix_extrema_numba
else:
    fsum = fsum_numpy
    column_fsum = column_fsum_numpy
    suffix_extrema = suffix_extrema_numpy


def backend():
    return "numba" if USE_NUMBA else "numpy"


_SPLITTER = 134217729.0  # 2**27 + 1


def two_product(a, b):
    """Error-free product: p + e == a * b exactly (Veltkamp/Dekker), elementwise."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    with np.errstate(all="ignore"):
        p = a * b
        ca = _SPLITTER * a
        a_hi = ca - (ca - a)
        a_lo = a - a_hi
        cb = _SPLITTER * b
        b_hi = cb - (cb - b)
        b_lo = b - b_hi
        e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    e = np.where(np.isfinite(e) & np.isfinite(p), e, 0.0)
    return p, e


def exact_product_sum(a, b):
    """Correctly rounded column sums of the elementwise products a * b.

    ``a`` and ``b`` broadcast to an (n, d) array.
    """
    p, e = two_product(a, b)
    if p.ndim == 1:
        p = p[:, None]
        e = e[:, None]
    if p.shape[0] == 0:
        return np.zeros(p.shape[1])
    return column_fsum(np.concatenate((p, e), axis=0))

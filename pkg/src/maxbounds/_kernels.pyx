# cython: language_level=3
"""Compiled path kernels.

Same contracts as :mod:`maxbounds._kernels_py`; every function here has a
pure-Python twin there.  Integer results agree exactly between the two,
floating-point reductions up to summation order.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


def abs_max_rows(const double[:, ::1] values):
    cdef Py_ssize_t m = values.shape[0], n = values.shape[1], i, j
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef double best, v
    with nogil:
        for i in range(m):
            best = 0.0
            for j in range(n):
                v = fabs(values[i, j])
                if v > best:
                    best = v
            o[i] = best
    return out


cdef Py_ssize_t _scan(const double[::1] y, double a, double b, Py_ssize_t[::1] buf) noexcept nogil:
    cdef Py_ssize_t n = y.shape[0], j, count = 0
    cdef bint seeking_low = True
    for j in range(n):
        if seeking_low:
            if y[j] < a:
                buf[count] = j
                count += 1
                seeking_low = False
        else:
            if y[j] > b:
                buf[count] = j
                count += 1
                seeking_low = True
    return count


def upcross_times(const double[::1] y, double a, double b):
    buf = np.empty(y.shape[0], dtype=np.intp)
    cdef Py_ssize_t[::1] bv = buf
    cdef Py_ssize_t count
    with nogil:
        count = _scan(y, a, b, bv)
    return buf[:count].astype(np.int64)


def upcross_counts(const double[:, ::1] values, double a, double b):
    cdef Py_ssize_t m = values.shape[0], n = values.shape[1], i, j, u
    cdef bint seeking_low
    out = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for i in range(m):
            u = 0
            seeking_low = True
            for j in range(n):
                if seeking_low:
                    if values[i, j] < a:
                        seeking_low = False
                elif values[i, j] > b:
                    u += 1
                    seeking_low = True
            o[i] = u
    return out


def lemma3_check_rows(const double[:, ::1] values, double a, double b, Py_ssize_t k_extra):
    """Evaluate the pathwise up-crossing inequality for k = 1 .. U + k_extra on every row.

    Returns ``(n_checks, n_violations, first_bad_row)``; ``first_bad_row`` is -1
    when nothing failed.
    """
    cdef Py_ssize_t m = values.shape[0], n = values.shape[1]
    cdef Py_ssize_t i, k, count, u, lo, hi, first_bad = -1
    cdef long long checks = 0, bad = 0
    cdef double width = b - a, lhs, rhs, y_lo, y_hi, y_end
    buf = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] bv = buf
    with nogil:
        for i in range(m):
            count = _scan(values[i, :], a, b, bv)
            u = count // 2
            y_end = values[i, n - 1]
            for k in range(1, u + k_extra + 1):
                lo = 2 * k - 2
                hi = 2 * k - 1
                y_lo = values[i, bv[lo]] if lo < count else y_end
                y_hi = values[i, bv[hi]] if hi < count else y_end
                lhs = width if u >= k else 0.0
                rhs = y_hi - y_lo
                if lo < count and hi >= count:
                    rhs = -(y_end - y_lo) + rhs
                checks += 1
                if lhs > rhs:
                    bad += 1
                    if first_bad < 0:
                        first_bad = i
    return int(checks), int(bad), int(first_bad)


def pair_moment_means(const double[:, ::1] values, double p):
    """Matrix of sample means of ``|X_j - X_i|^p`` over rows, for all column pairs."""
    cdef Py_ssize_t m = values.shape[0], n = values.shape[1], r, i, j
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double d
    # p = 2 and p = 4 are the common cases; multiply instead of calling pow
    cdef int mode = 2 if p == 2.0 else (4 if p == 4.0 else 0)
    with nogil:
        for r in range(m):
            for i in range(n):
                for j in range(i + 1, n):
                    d = fabs(values[r, j] - values[r, i])
                    if mode == 2:
                        o[i, j] += d * d
                    elif mode == 4:
                        d = d * d
                        o[i, j] += d * d
                    else:
                        o[i, j] += pow(d, p)
        for i in range(n):
            for j in range(i + 1, n):
                o[i, j] /= m
                o[j, i] = o[i, j]
    return out

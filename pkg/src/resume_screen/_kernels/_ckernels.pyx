# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled similarity/correlation kernels.

Twin of ``_pykernels`` with identical algorithms (left-to-right double
accumulation, two-pass Pearson) so results match the fallback bit-for-bit
on strict-IEEE builds. Compiled with -O3 but no -ffast-math: associativity
and NaN semantics must stay exact.
"""

from array import array

from libc.math cimport sqrt, fabs, NAN

IMPLEMENTATION = "cython"


def dot(double[::1] a, double[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += a[i] * b[i]
    return acc


def norm(double[::1] a):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += a[i] * a[i]
    return sqrt(acc)


def cosine(double[::1] a, double[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double num = 0.0, na = 0.0, nb = 0.0, x, y
    for i in range(n):
        x = a[i]
        y = b[i]
        num += x * y
        na += x * x
        nb += y * y
    if na == 0.0 or nb == 0.0:
        return NAN
    return num / (sqrt(na) * sqrt(nb))


def row_norms(float[::1] matrix, Py_ssize_t dim):
    cdef Py_ssize_t n_rows = matrix.shape[0] // dim
    cdef Py_ssize_t row, i, base
    cdef double acc, v
    out = array("d", bytes(8 * n_rows))
    cdef double[::1] o = out
    for row in range(n_rows):
        base = row * dim
        acc = 0.0
        for i in range(dim):
            v = matrix[base + i]
            acc += v * v
        o[row] = sqrt(acc)
    return out


def scan_scores(double[::1] query, float[::1] matrix, double[::1] norms, Py_ssize_t dim):
    cdef Py_ssize_t n_rows = matrix.shape[0] // dim
    cdef Py_ssize_t row, i, base
    cdef double qn = 0.0, acc, rn
    for i in range(dim):
        qn += query[i] * query[i]
    qn = sqrt(qn)
    out = array("d", bytes(8 * n_rows))
    cdef double[::1] o = out
    for row in range(n_rows):
        rn = norms[row]
        if rn == 0.0:
            o[row] = NAN
            continue
        base = row * dim
        acc = 0.0
        for i in range(dim):
            acc += query[i] * matrix[base + i]
        o[row] = acc / (qn * rn)
    return out


def pearson(double[::1] x, double[::1] y):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double sx = 0.0, sy = 0.0, mx, my
    cdef double sxx = 0.0, syy = 0.0, sxy = 0.0, dx, dy
    for i in range(n):
        sx += x[i]
        sy += y[i]
    mx = sx / n
    my = sy / n
    for i in range(n):
        dx = x[i] - mx
        dy = y[i] - my
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    if sxx == 0.0 or syy == 0.0:
        return NAN
    return sxy / (sqrt(sxx) * sqrt(syy))


def mae(double[::1] x, double[::1] y):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += fabs(x[i] - y[i])
    return acc / n

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: CSR matvec and the fused Chebyshev recurrence.

A pure numpy twin lives in ``_kernels_py``; ``specrank.kernels`` picks
whichever is importable. Dense operators go through BLAS either way.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef void _csr_matvec(const cnp.int64_t[:] indptr, const cnp.int64_t[:] indices,
                      const double[:] data, const double[:] x, double[:] out) noexcept nogil:
    cdef Py_ssize_t i, jj
    cdef double acc
    for i in range(indptr.shape[0] - 1):
        acc = 0.0
        for jj in range(indptr[i], indptr[i + 1]):
            acc += data[jj] * x[indices[jj]]
        out[i] = acc


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix given by (indptr, indices, data)."""
    cdef cnp.int64_t[:] ip = indptr
    cdef cnp.int64_t[:] ix = indices
    cdef double[:] dv = data
    cdef double[:] xv = x
    out = np.empty(indptr.shape[0] - 1)
    cdef double[:] ov = out
    with nogil:
        _csr_matvec(ip, ix, dv, xv, ov)
    return out


def cheb_probe_table(indptr, indices, data, double center, double halfwidth, v, int degree):
    """Chebyshev recurrence table for one probe over a shifted-scaled CSR matrix.

    Runs w_{k+1} = 2 B w_k - w_{k-1} with B = (A - center I) / halfwidth and
    returns the column y[k] = v . w_k for k = 0..degree (exactly ``degree``
    matrix products).
    """
    cdef cnp.int64_t[:] ip = indptr
    cdef cnp.int64_t[:] ix = indices
    cdef double[:] dv = data
    cdef double[:] vv = v
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, k
    cdef double acc, tmp

    y = np.empty(degree + 1)
    cdef double[:] yv = y
    w0 = v.copy()
    w1 = np.empty(n)
    scratch = np.empty(n)
    cdef double[:] w0v = w0
    cdef double[:] w1v = w1
    cdef double[:] sv = scratch

    with nogil:
        acc = 0.0
        for i in range(n):
            acc += vv[i] * vv[i]
        yv[0] = acc

        _csr_matvec(ip, ix, dv, w0v, w1v)
        acc = 0.0
        for i in range(n):
            w1v[i] = (w1v[i] - center * w0v[i]) / halfwidth
            acc += vv[i] * w1v[i]
        if degree >= 1:
            yv[1] = acc

        for k in range(2, degree + 1):
            _csr_matvec(ip, ix, dv, w1v, sv)
            acc = 0.0
            for i in range(n):
                tmp = 2.0 * ((sv[i] - center * w1v[i]) / halfwidth) - w0v[i]
                w0v[i] = w1v[i]
                w1v[i] = tmp
                acc += vv[i] * tmp
            yv[k] = acc
    return y

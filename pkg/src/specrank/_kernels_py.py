"""Pure numpy fallback for the compiled kernels.

Same signatures as the Cython module ``specrank._kernels``; selected by
``specrank.kernels`` when the extension is unavailable.
"""

import numpy as np


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix given by (indptr, indices, data)."""
    out = np.zeros(indptr.shape[0] - 1)
    if data.shape[0] == 0:
        return out
    prod = data * x[indices]
    row_nnz = np.diff(indptr)
    nonempty = row_nnz > 0
    # reduceat repeats the segment start for empty rows, so feed it only
    # the offsets of nonempty rows and scatter the sums back.
    out[nonempty] = np.add.reduceat(prod, indptr[:-1][nonempty])
    return out


def cheb_probe_table(indptr, indices, data, center, halfwidth, v, degree):
    """Chebyshev recurrence table for one probe over a shifted-scaled CSR matrix.

    Runs w_{k+1} = 2 B w_k - w_{k-1} with B = (A - center I) / halfwidth and
    returns the column y[k] = v . w_k for k = 0..degree (exactly ``degree``
    matrix products).
    """
    y = np.empty(degree + 1)
    w0 = v.copy()
    y[0] = v @ v
    w1 = (csr_matvec(indptr, indices, data, v) - center * v) / halfwidth
    if degree >= 1:
        y[1] = v @ w1
    for k in range(2, degree + 1):
        w0, w1 = w1, 2.0 * ((csr_matvec(indptr, indices, data, w1) - center * w1) / halfwidth) - w0
        y[k] = v @ w1
    return y

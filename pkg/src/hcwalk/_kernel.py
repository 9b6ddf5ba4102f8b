"""Hot loop of the measured walk: CSR matvec, final-vertex measurement, projection.

The numba-compiled kernel runs a whole chunk of steps per call so the Python
overhead disappears from runs that need 1e7+ steps.  A plain NumPy fallback
with the identical contract exists both for environments without numba and
as an independent cross-check in the tests.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None


def _step_chunk_impl(data, indices, indptr, psi, scratch, fs, fe, p_out):
    n = psi.shape[0]
    for s in range(p_out.shape[0]):
        for i in range(n):
            acc = 0j
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * psi[indices[k]]
            scratch[i] = acc
        arrived = 0.0
        for i in range(fs, fe):
            a = scratch[i]
            arrived += a.real * a.real + a.imag * a.imag
            scratch[i] = 0j
        p_out[s] = arrived
        for i in range(n):
            psi[i] = scratch[i]


def step_chunk_numpy(data, indices, indptr, psi, scratch, fs, fe, p_out):
    """Vectorized fallback with the same contract as the compiled kernel.

    Advances ``psi`` in place by ``len(p_out)`` measured-walk steps and
    records the per-step arrival probability at the final-vertex slice
    ``[fs, fe)``.
    """
    import scipy.sparse as sp

    n = psi.shape[0]
    matrix = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    for s in range(p_out.shape[0]):
        out = matrix @ psi
        seg = out[fs:fe]
        p_out[s] = float(np.real(np.vdot(seg, seg)))
        out[fs:fe] = 0
        psi[:] = out


if njit is not None:
    step_chunk = njit(cache=True)(_step_chunk_impl)
else:  # pragma: no cover
    step_chunk = step_chunk_numpy

"""Hot numerical kernels with two interchangeable implementations.

Each kernel exists in a numba ``@njit`` version and a pure-numpy version.
The active implementation is chosen once at import time: set the environment
variable ``ICLLAB_NO_NUMBA=1`` to force the numpy path (also the automatic
fallback when numba is not importable).  ``benchmarks/bench_kernels.py``
compares the two.

Kernels:

* ``accumulate_gram`` — stream a block of rank-one regression features
  phi = vec(outer(xq_row, v_row)) into the normal-equations matrix
  A += sum phi phi^T and vector b += sum y phi.
* ``residual_energies`` — squared-residual energies ||ys - xs w_j||^2 of one
  context against every candidate task vector (the inner loop of the
  posterior-weighted baseline estimator).
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("ICLLAB_NO_NUMBA", "").strip() not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        import numba as nb
    except ImportError:  # pragma: no cover - environment dependent
        USE_NUMBA = False


def _accumulate_gram_numpy(A, b, xq, v, y):
    c = xq.shape[0]
    D = A.shape[0]
    phi = np.einsum("nd,ne->nde", xq, v).reshape(c, D)
    A += phi.T @ phi
    b += phi.T @ y


def _residual_energies_numpy(xs, ys, tasks):
    resid = ys[:, None] - xs @ tasks.T
    return np.einsum("lk,lk->k", resid, resid)


if USE_NUMBA:

    @nb.njit(cache=True)
    def _accumulate_gram_numba(A, b, xq, v, y):  # pragma: no cover - jitted
        c, d = xq.shape
        e = v.shape[1]
        D = d * e
        phi = np.empty((c, D))
        for n in range(c):
            for i in range(d):
                xi = xq[n, i]
                base = i * e
                for j in range(e):
                    phi[n, base + j] = xi * v[n, j]
        A += np.dot(phi.T, phi)
        b += np.dot(phi.T, y)

    @nb.njit(cache=True)
    def _residual_energies_numba(xs, ys, tasks):  # pragma: no cover - jitted
        preds = np.dot(xs, tasks.T)
        ell, k = preds.shape
        out = np.zeros(k)
        for i in range(ell):
            yi = ys[i]
            for j in range(k):
                r = yi - preds[i, j]
                out[j] += r * r
        return out

    def accumulate_gram(A, b, xq, v, y):
        _accumulate_gram_numba(A, b, xq, v, y)

    def residual_energies(xs, ys, tasks):
        return _residual_energies_numba(xs, ys, tasks)

else:
    accumulate_gram = _accumulate_gram_numpy
    residual_energies = _residual_energies_numpy

"""Hot numeric kernels: batch three-term recurrences and Clenshaw sums.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
fallback with identical semantics.  The active backend is chosen once at
import time: set ``HERMLAG_DISABLE_NUMBA=1`` in the environment to force
the numpy path (also used automatically when numba is unavailable).

The stability-critical convention everywhere: the decaying envelope
(``exp(-y/2)`` for Laguerre, ``exp(-y^2/2)`` for Hermite) is folded into
the recurrence seeds, so no intermediate ever holds a bare polynomial
value.

Index conventions:

* ``glf_table(y, alpha, n_max)`` -> shape ``(n_max+1, y.size)`` with row n
  holding ``exp(-y/2) * L_n^(alpha)(y)``.
* ``ghf_table(y, a, c, s0, s1, n_max)`` -> same layout for the normalized
  Hermite-type family with seeds ``s0*exp(-y^2/2)``, ``s1*y*exp(-y^2/2)``
  and recurrence ``p_{n+1} = a[n]*y*p_n - c[n]*p_{n-1}``; ``a``/``c`` are
  read at indices ``1..n_max-1``.
* Clenshaw kernels read ``a``/``c`` at indices ``1..N+1`` where
  ``N = coefs.size - 1`` (pad the arrays accordingly).
"""

from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("HERMLAG_DISABLE_NUMBA", "0") not in ("1", "true", "yes")

if _WANT_NUMBA:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# pure-numpy implementations (reference semantics)
# ---------------------------------------------------------------------------


def _glf_table_np(y, alpha, n_max):
    out = np.empty((n_max + 1, y.size))
    env = np.exp(-0.5 * y)
    out[0] = env
    if n_max == 0:
        return out
    out[1] = (1.0 + alpha - y) * env
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + 1 + alpha - y) * out[n] - (n + alpha) * out[n - 1]) / (
            n + 1
        )
    return out


def _ghf_table_np(y, a, c, s0, s1, n_max):
    out = np.empty((n_max + 1, y.size))
    env = np.exp(-0.5 * y * y)
    out[0] = s0 * env
    if n_max == 0:
        return out
    out[1] = s1 * y * env
    for n in range(1, n_max):
        out[n + 1] = a[n] * y * out[n] - c[n] * out[n - 1]
    return out


def _glf_clenshaw_np(y, coefs, alpha):
    N = coefs.size - 1
    env = np.exp(-0.5 * y)
    if N == 0:
        return coefs[0] * env
    b1 = np.zeros_like(y)
    b2 = np.zeros_like(y)
    for n in range(N, 0, -1):
        # A_n(y) = (2n+1+alpha-y)/(n+1), B_{n+1} = -(n+1+alpha)/(n+2)
        b0 = (
            coefs[n]
            + (2 * n + 1 + alpha - y) / (n + 1) * b1
            - ((n + 1 + alpha) / (n + 2)) * b2
        )
        b2 = b1
        b1 = b0
    p0 = env
    p1 = (1.0 + alpha - y) * env
    # S = (a_0 + B_1*b_2) p_0 + b_1 p_1 with B_1 = -(1+alpha)/2
    return (coefs[0] - 0.5 * (1 + alpha) * b2) * p0 + b1 * p1


def _ghf_clenshaw_np(y, coefs, a, c, s0, s1):
    N = coefs.size - 1
    env = np.exp(-0.5 * y * y)
    if N == 0:
        return coefs[0] * s0 * env
    b1 = np.zeros_like(y)
    b2 = np.zeros_like(y)
    for n in range(N, 0, -1):
        b0 = coefs[n] + a[n] * y * b1 - c[n + 1] * b2
        b2 = b1
        b1 = b0
    p0 = s0 * env
    p1 = s1 * y * env
    return (coefs[0] - c[1] * b2) * p0 + b1 * p1


# ---------------------------------------------------------------------------
# numba versions
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _glf_table_nb(y, alpha, n_max):  # pragma: no cover - via dispatch
        m = y.size
        out = np.empty((n_max + 1, m))
        for j in range(m):
            env = np.exp(-0.5 * y[j])
            out[0, j] = env
            if n_max >= 1:
                out[1, j] = (1.0 + alpha - y[j]) * env
            for n in range(1, n_max):
                out[n + 1, j] = (
                    (2 * n + 1 + alpha - y[j]) * out[n, j] - (n + alpha) * out[n - 1, j]
                ) / (n + 1)
        return out

    @njit(cache=True)
    def _ghf_table_nb(y, a, c, s0, s1, n_max):  # pragma: no cover
        m = y.size
        out = np.empty((n_max + 1, m))
        for j in range(m):
            env = np.exp(-0.5 * y[j] * y[j])
            out[0, j] = s0 * env
            if n_max >= 1:
                out[1, j] = s1 * y[j] * env
            for n in range(1, n_max):
                out[n + 1, j] = a[n] * y[j] * out[n, j] - c[n] * out[n - 1, j]
        return out

    @njit(cache=True)
    def _glf_clenshaw_nb(y, coefs, alpha):  # pragma: no cover
        m = y.size
        N = coefs.size - 1
        res = np.empty(m)
        for j in range(m):
            env = np.exp(-0.5 * y[j])
            if N == 0:
                res[j] = coefs[0] * env
                continue
            b1 = 0.0
            b2 = 0.0
            for n in range(N, 0, -1):
                b0 = (
                    coefs[n]
                    + (2 * n + 1 + alpha - y[j]) / (n + 1) * b1
                    - ((n + 1 + alpha) / (n + 2)) * b2
                )
                b2 = b1
                b1 = b0
            p0 = env
            p1 = (1.0 + alpha - y[j]) * env
            res[j] = (coefs[0] - 0.5 * (1 + alpha) * b2) * p0 + b1 * p1
        return res

    @njit(cache=True)
    def _ghf_clenshaw_nb(y, coefs, a, c, s0, s1):  # pragma: no cover
        m = y.size
        N = coefs.size - 1
        res = np.empty(m)
        for j in range(m):
            env = np.exp(-0.5 * y[j] * y[j])
            if N == 0:
                res[j] = coefs[0] * s0 * env
                continue
            b1 = 0.0
            b2 = 0.0
            for n in range(N, 0, -1):
                b0 = coefs[n] + a[n] * y[j] * b1 - c[n + 1] * b2
                b2 = b1
                b1 = b0
            p0 = s0 * env
            p1 = s1 * y[j] * env
            res[j] = (coefs[0] - c[1] * b2) * p0 + b1 * p1
        return res


if HAVE_NUMBA:
    glf_table = _glf_table_nb
    ghf_table = _ghf_table_nb
    glf_clenshaw = _glf_clenshaw_nb
    ghf_clenshaw = _ghf_clenshaw_nb
    BACKEND = "numba"
else:
    glf_table = _glf_table_np
    ghf_table = _ghf_table_np
    glf_clenshaw = _glf_clenshaw_np
    ghf_clenshaw = _ghf_clenshaw_np
    BACKEND = "numpy"

"""Hot numeric kernels.

Two kernels carry the inner loops of the package:

* ``batch_conditional_mi`` evaluates a list of Gaussian conditional mutual
  informations ``I(A;B|C)`` for a whole batch of joint covariance matrices.
  The covariance optimizer calls it on tens of thousands of candidates per
  search, so it is the dominant cost of every Gaussian bound.
* ``entropy_rows`` reduces rows of probability tables to base-2 entropies
  for the finite-alphabet grid searches.

Each kernel has a numba implementation and a vectorized numpy fallback with
identical semantics; ``relaysec._accel`` decides which one is exported.

Conditional mutual information is computed through Schur complements
(sequential Gaussian conditioning, a.k.a. the sweep operator)::

    I(A;B|C) = 1/2 [ logdet S_{B|C} - logdet S_{B|A,C} ]

which is the same quantity as the four-logdet formula but never needs the
determinant of a singular input block.  A variable whose residual variance
falls below ``SINGULAR_TOL`` (relative to its prior variance) is treated as
deterministic: it is skipped as a conditioning variable, and as a target it
contributes ``log(RIDGE)`` so that deterministic targets cancel between the
two passes.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

SINGULAR_TOL = 1e-12
RIDGE = 1e-12
# negative MIs above -NEG_MI_TOL * (largest prior variance in the term) are
# rounding: cancellation in a Schur complement loses digits in proportion to
# the variance being cancelled
NEG_MI_TOL = 1e-10
LN2 = math.log(2.0)
_LOG_RIDGE = math.log(RIDGE)


# --------------------------------------------------------------------------
# Gaussian conditional mutual information
# --------------------------------------------------------------------------


@njit(cache=True)
def _sweep_out(W, k, n):
    piv = W[k, k]
    for i in range(n):
        if i == k:
            continue
        wik = W[i, k]
        if wik == 0.0:
            continue
        f = wik / piv
        for j in range(n):
            if j != k:
                W[i, j] -= f * W[k, j]
    for i in range(n):
        W[i, k] = 0.0
        W[k, i] = 0.0


@njit(cache=True)
def _cond_logvar(S, scale, cond_mask, target_mask, W):
    n = S.shape[0]
    for i in range(n):
        for j in range(n):
            W[i, j] = S[i, j]
    for k in range(n):
        if (cond_mask >> k) & 1:
            if W[k, k] > SINGULAR_TOL * scale[k]:
                _sweep_out(W, k, n)
    total = 0.0
    for k in range(n):
        if (target_mask >> k) & 1:
            v = W[k, k]
            if v > SINGULAR_TOL * scale[k]:
                total += math.log(v)
                _sweep_out(W, k, n)
            else:
                total += _LOG_RIDGE
    return total


@njit(cache=True)
def _batch_conditional_mi_numba(sigma, masks):
    nb = sigma.shape[0]
    n = sigma.shape[1]
    nt = masks.shape[0]
    out = np.empty((nb, nt))
    W = np.empty((n, n))
    scale = np.empty(n)
    for b in range(nb):
        S = sigma[b]
        for k in range(n):
            scale[k] = max(1.0, abs(S[k, k]))
        for t in range(nt):
            a = masks[t, 0]
            bm = masks[t, 1]
            c = masks[t, 2]
            l1 = _cond_logvar(S, scale, c, bm, W)
            l2 = _cond_logvar(S, scale, a | c, bm, W)
            mi = 0.5 * (l1 - l2) / LN2
            if mi < 0.0:
                big = 1.0
                for k in range(n):
                    if ((a | bm | c) >> k) & 1:
                        big = max(big, scale[k])
                if mi > -NEG_MI_TOL * big:
                    mi = 0.0
                else:
                    mi = np.nan
            out[b, t] = mi
    return out


def _sweep_out_np(W, k, active):
    piv = W[:, k, k]
    safe = np.where(active, piv, 1.0)
    f = np.where(active[:, None], W[:, :, k] / safe[:, None], 0.0)
    upd = f[:, :, None] * W[:, k, None, :]
    W -= upd
    W[active, k, :] = 0.0
    W[active, :, k] = 0.0


def _cond_logvar_np(sigma, scale, cond_mask, target_mask):
    n = sigma.shape[1]
    W = sigma.copy()
    for k in range(n):
        if (cond_mask >> k) & 1:
            active = W[:, k, k] > SINGULAR_TOL * scale[:, k]
            if active.any():
                _sweep_out_np(W, k, active)
    total = np.zeros(sigma.shape[0])
    for k in range(n):
        if (target_mask >> k) & 1:
            v = W[:, k, k]
            active = v > SINGULAR_TOL * scale[:, k]
            total += np.where(active, np.log(np.where(active, v, 1.0)), _LOG_RIDGE)
            if active.any():
                _sweep_out_np(W, k, active)
    return total


def _batch_conditional_mi_numpy(sigma, masks):
    scale = np.maximum(1.0, np.abs(np.diagonal(sigma, axis1=1, axis2=2)))
    out = np.empty((sigma.shape[0], masks.shape[0]))
    for t, (a, b, c) in enumerate(masks):
        l1 = _cond_logvar_np(sigma, scale, int(c), int(b))
        l2 = _cond_logvar_np(sigma, scale, int(a) | int(c), int(b))
        mi = 0.5 * (l1 - l2) / LN2
        involved = [k for k in range(sigma.shape[1]) if ((int(a) | int(b) | int(c)) >> k) & 1]
        tol = NEG_MI_TOL * scale[:, involved].max(axis=1)
        mi = np.where((mi < 0.0) & (mi > -tol), 0.0, mi)
        out[:, t] = np.where(mi < 0.0, np.nan, mi)
    return out


def batch_conditional_mi(sigma, masks, use_numba=None):
    """Conditional MIs in bits for every covariance in a batch.

    Parameters
    ----------
    sigma : array (N, n, n)
        Joint covariance matrices (n <= 62).
    masks : int array (T, 3)
        Bitmasks over the n variables for the groups ``A, B, C`` of each term.

    Returns
    -------
    array (N, T)
        ``I(A;B|C)`` per sample and term.  Entries more negative than
        ``-NEG_MI_TOL`` times the largest prior variance in the term (a
        numeric failure) come back as NaN; smaller negative rounding residue
        is clamped to zero.
    """
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if sigma.ndim != 3 or sigma.shape[1] != sigma.shape[2]:
        raise ValueError("sigma must have shape (N, n, n)")
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _batch_conditional_mi_numba(sigma, masks)
    return _batch_conditional_mi_numpy(sigma, masks)


# --------------------------------------------------------------------------
# Discrete entropy rows
# --------------------------------------------------------------------------


@njit(cache=True)
def _entropy_rows_numba(P):
    m, k = P.shape
    out = np.empty(m)
    for i in range(m):
        h = 0.0
        for j in range(k):
            p = P[i, j]
            if p > 0.0:
                h -= p * math.log(p)
        out[i] = h / LN2
    return out


def _entropy_rows_numpy(P):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0.0, P * np.log(np.where(P > 0.0, P, 1.0)), 0.0)
    return -terms.sum(axis=1) / LN2


def entropy_rows(P, use_numba=None):
    """Base-2 entropy of each row of a 2-D array of probabilities (0 log 0 = 0)."""
    P = np.ascontiguousarray(P, dtype=np.float64)
    if P.ndim != 2:
        raise ValueError("expected a 2-D array")
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _entropy_rows_numba(P)
    return _entropy_rows_numpy(P)

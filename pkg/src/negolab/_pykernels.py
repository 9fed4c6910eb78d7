"""NumPy implementations of the hot kernels.

Used when the compiled extension is unavailable, and as the reference the
compiled kernels are tested against.
"""

import numpy as np


def halfspace_mask(points, A, b, lo, hi, slack):
    points = np.asarray(points, dtype=float)
    ok = np.all(points >= lo - slack, axis=1) & np.all(points <= hi + slack, axis=1)
    if len(b):
        ok &= np.all(points @ A.T <= b + slack, axis=1)
    return ok


def argmax_lex(values, points, tie_tol):
    """Index of the best value; ties within ``tie_tol`` go to the lexicographically smallest point.

    Returns -1 when no value is finite.
    """
    v = np.where(np.isnan(values), -np.inf, values)
    if v.size == 0:
        return -1
    best = v.max()
    if best == -np.inf:
        return -1
    idx = np.flatnonzero(v >= best - tie_tol)
    if idx.size == 1:
        return int(idx[0])
    cand = points[idx]
    # lexsort keys: last key is primary
    order = np.lexsort(cand.T[::-1])
    return int(idx[order[0]])


def hausdorff(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(max(d2.min(axis=1).max(), d2.min(axis=0).max())))


def count_dominating(values, thresholds, mask):
    ok = np.all(values >= thresholds[:, None], axis=0) & mask
    return int(np.count_nonzero(ok))

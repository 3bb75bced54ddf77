"""Quadratic-time reference matcher with the same greedy rule as the fast matcher.

Used only to cross-check ``find_coincidences``; shares no code with it.
"""

import numpy as np


def brute_force_matches(t_a, t_b, window_ps):
    """List of (index_a, index_b) pairs; t_a, t_b are int64 arrays already on one clock."""
    t_a = np.asarray(t_a, dtype=np.int64)
    t_b = np.asarray(t_b, dtype=np.int64)
    free = np.ones(t_b.size, dtype=bool)
    out = []
    for i in np.argsort(t_a, kind="stable"):
        d = np.abs(t_b - t_a[i])
        ok = free & (d <= window_ps)
        if not ok.any():
            continue
        cand = np.flatnonzero(ok)
        j = int(cand[np.argmin(d[cand])])  # first minimum = earliest B tag
        free[j] = False
        out.append((int(i), j))
    return out

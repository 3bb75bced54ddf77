import math

import numpy as np
import pytest

from spookybound.analysis import bound_timeline, interval_result, is_violating
from spookybound.geo_relativity import BaselineGeometry, FrameVelocity, speed_bound_optimal

GEOM = BaselineGeometry.from_positions((0, 0, 0), (0, 15e3, 0))


def _interval(k, s_target, n=1000):
    counts = np.zeros((2, 2, 2, 2), dtype=np.int64)
    e = s_target / 4
    same = int(round(n * (1 - e) / 2))
    for sa, sb in ((0, 0), (1, 0), (0, 1)):
        counts[sa, sb] = [[same // 2, (n - same) // 2], [(n - same) // 2, same // 2]]
    counts[1, 1] = [[(n - same) // 2, same // 2], [same // 2, (n - same) // 2]]
    return interval_result(k, k * 1800.0, (k + 1) * 1800.0, counts)


def test_bound_only_for_violations():
    ivs = [_interval(0, 2.6), _interval(1, 1.5), _interval(2, 2.7)]
    assert is_violating(ivs[0]) and not is_violating(ivs[1])
    tl = bound_timeline(ivs, GEOM, 6.84e-6, FrameVelocity(1e-3))
    assert tl.conclusive and tl.n_violating == 2
    assert tl.per_interval[1] is None
    expected = speed_bound_optimal(6.84e-6, FrameVelocity(1e-3), 1800.0).bound_over_c
    assert tl.summary.bound_over_c == pytest.approx(expected)
    assert tl.per_interval[0].bound_over_c == pytest.approx(expected)


def test_inconclusive():
    tl = bound_timeline([_interval(0, 1.9)], GEOM, 6.84e-6, FrameVelocity(1e-3))
    assert not tl.conclusive and tl.summary is None


def test_min_sigmas_threshold():
    iv = _interval(0, 2.1, n=200)
    assert is_violating(iv)
    assert not is_violating(iv, min_sigmas=5.0)

"""Windowed coincidence matching of two sorted tag streams.

Greedy rule: A tags are taken in time order; each takes the unused B tag
with the smallest |t_B' - t_A| inside the window, ties going to the earlier
B tag. A tag is used at most once. The two-pointer pass is amortized
O(n_A + n_B) and runs incrementally: an A tag is decided as soon as all B
tags that could fall in its window have been seen.
"""

from __future__ import annotations

from typing import NamedTuple

import numba
import numpy as np

from ..errors import UsageError
from .sync import ClockSolution

PAIR_DTYPE = np.dtype([
    ("index_a", "<i8"), ("index_b", "<i8"),
    ("t_a_ps", "<i8"), ("dt_ps", "<i8"),
    ("channel_a", "u1"), ("setting_a", "u1"),
    ("channel_b", "u1"), ("setting_b", "u1"),
])

_NO_HORIZON = np.iinfo(np.int64).max


@numba.njit(cache=True)
def _greedy_kernel(ta, tb, used, window, horizon, out_a, out_b):
    na = ta.size
    nb = tb.size
    lo = 0
    n = 0
    for i in range(na):
        t = ta[i]
        if horizon != _NO_HORIZON and t + window >= horizon:
            return i, n
        lo_t = t - window
        while lo < nb and tb[lo] < lo_t:
            lo += 1
        hi_t = t + window
        best = -1
        best_d = window + 1
        j = lo
        while j < nb and tb[j] <= hi_t:
            if not used[j]:
                d = tb[j] - t
                if d < 0:
                    d = -d
                if d < best_d:
                    best = j
                    best_d = d
            j += 1
        if best >= 0:
            used[best] = True
            out_a[n] = i
            out_b[n] = best
            n += 1
    return na, n


class CoincidencePair(NamedTuple):
    index_a: int
    index_b: int
    dt_ps: int


def _check_sorted(name, t, last):
    if t.size and (np.any(t[1:] < t[:-1]) or (last is not None and t[0] < last)):
        raise UsageError(f"{name} stream is not sorted by timestamp")


class CoincidenceMatcher:
    """Incremental matcher; feed chunks of both streams, then call ``finish``."""

    def __init__(self, window_ps: int, clock: ClockSolution | None = None):
        if not window_ps > 0:
            raise UsageError("window_ps must be positive")
        self.window = int(window_ps)
        self.clock = clock
        self._a_tags = None
        self._a_t = np.zeros(0, dtype=np.int64)
        self._a_base = 0
        self._b_tags = None
        self._b_t = np.zeros(0, dtype=np.int64)
        self._b_used = np.zeros(0, dtype=np.bool_)
        self._b_base = 0
        self._last_a = None
        self._last_b = None
        self.n_a = 0
        self.n_b = 0

    def _append(self, tags_a, tags_b):
        if tags_a is not None and tags_a.size:
            ta = tags_a["timestamp_ps"].astype(np.int64)
            _check_sorted("A", ta, self._last_a)
            self._last_a = int(ta[-1])
            self.n_a += ta.size
            self._a_tags = tags_a if self._a_tags is None or not self._a_tags.size \
                else np.concatenate([self._a_tags, tags_a])
            self._a_t = np.concatenate([self._a_t, ta])
        if tags_b is not None and tags_b.size:
            raw = tags_b["timestamp_ps"].astype(np.int64)
            _check_sorted("B", raw, None if self._last_b is None else self._last_b[0])
            tb = raw if self.clock is None else self.clock.to_a_clock(raw)
            self._last_b = (int(raw[-1]), int(tb[-1]))
            self.n_b += raw.size
            self._b_tags = tags_b if self._b_tags is None or not self._b_tags.size \
                else np.concatenate([self._b_tags, tags_b])
            self._b_t = np.concatenate([self._b_t, tb])
            self._b_used = np.concatenate([self._b_used, np.zeros(tb.size, dtype=np.bool_)])

    def _run(self, final: bool) -> np.ndarray:
        ta, tb = self._a_t, self._b_t
        if final:
            horizon = _NO_HORIZON
        elif self._last_b is None or self._last_a is None:
            return np.zeros(0, dtype=PAIR_DTYPE)
        else:
            horizon = self._last_b[1]
        out_a = np.empty(ta.size, dtype=np.int64)
        out_b = np.empty(ta.size, dtype=np.int64)
        stop, n = _greedy_kernel(ta, tb, self._b_used, self.window, horizon, out_a, out_b)
        ia, ib = out_a[:n], out_b[:n]
        pairs = np.empty(n, dtype=PAIR_DTYPE)
        pairs["index_a"] = ia + self._a_base
        pairs["index_b"] = ib + self._b_base
        pairs["t_a_ps"] = ta[ia]
        pairs["dt_ps"] = tb[ib] - ta[ia]
        if n:
            pairs["channel_a"] = self._a_tags["channel"][ia]
            pairs["setting_a"] = self._a_tags["setting"][ia]
            pairs["channel_b"] = self._b_tags["channel"][ib]
            pairs["setting_b"] = self._b_tags["setting"][ib]
        # Drop everything no undecided A tag can reach.
        self._a_base += stop
        if self._a_tags is not None:
            self._a_tags = self._a_tags[stop:]
        self._a_t = ta[stop:]
        if final:
            keep = tb.size
        else:
            reach = self._a_t[0] if self._a_t.size else self._last_a
            keep = int(np.searchsorted(tb, reach - self.window, side="left"))
        self._b_base += keep
        self._b_tags = self._b_tags[keep:] if self._b_tags is not None else None
        self._b_t = tb[keep:]
        self._b_used = self._b_used[keep:]
        return pairs

    def feed(self, tags_a=None, tags_b=None) -> np.ndarray:
        self._append(tags_a, tags_b)
        return self._run(final=False)

    def finish(self) -> np.ndarray:
        return self._run(final=True)


def find_coincidences(tags_a: np.ndarray, tags_b: np.ndarray, clock: ClockSolution | None,
                      window_ps: int) -> np.ndarray:
    """All coincidences of two in-memory streams, as a PAIR_DTYPE array sorted by A time."""
    m = CoincidenceMatcher(window_ps, clock)
    first = m.feed(tags_a, tags_b)
    rest = m.finish()
    return np.concatenate([first, rest])


def as_pairs(pairs: np.ndarray):
    return [CoincidencePair(int(p["index_a"]), int(p["index_b"]), int(p["dt_ps"])) for p in pairs]

"""Per-setting correlation estimates and per-interval CHSH values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..quantum_model import DEFAULT_CHSH_SIGNS, chsh_value

# Order matching chsh_value: E(a,b), E(a',b), E(a,b'), E(a',b').
SETTING_ORDER = ((0, 0), (1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class CorrelationEstimate:
    setting_a: int
    setting_b: int
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int

    @property
    def n(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    @property
    def valid(self) -> bool:
        return self.n > 0

    @property
    def e_value(self) -> float:
        if not self.valid:
            return math.nan
        return (self.n_pp + self.n_mm - self.n_pm - self.n_mp) / self.n

    @property
    def sigma_e(self) -> float:
        if not self.valid:
            return math.nan
        e = self.e_value
        return math.sqrt(max(1.0 - e * e, 0.0) / self.n)


def counts_from_pairs(pairs: np.ndarray) -> np.ndarray:
    """Counts indexed [setting_a, setting_b, channel_a, channel_b]; channel 0 is outcome +1."""
    flat = (pairs["setting_a"].astype(np.int64) * 8 + pairs["setting_b"] * 4
            + pairs["channel_a"] * 2 + pairs["channel_b"])
    return np.bincount(flat, minlength=16).reshape(2, 2, 2, 2)


def estimates_from_counts(counts: np.ndarray) -> tuple:
    out = []
    for sa, sb in SETTING_ORDER:
        c = counts[sa, sb]
        out.append(CorrelationEstimate(sa, sb, int(c[0, 0]), int(c[0, 1]), int(c[1, 0]), int(c[1, 1])))
    return tuple(out)


def estimate_correlations(pairs: np.ndarray, interval=None) -> tuple:
    """Four estimates in SETTING_ORDER; ``interval`` = (start_ps, end_ps) on A's clock."""
    if interval is not None:
        lo, hi = interval
        pairs = pairs[(pairs["t_a_ps"] >= lo) & (pairs["t_a_ps"] < hi)]
    return estimates_from_counts(counts_from_pairs(pairs))


@dataclass(frozen=True)
class IntervalResult:
    interval_index: int
    start_s: float
    end_s: float
    correlations: tuple
    s_value: float | None
    sigma_s: float | None

    @property
    def valid(self) -> bool:
        return self.s_value is not None

    @property
    def violation_sigmas(self) -> float | None:
        if not self.valid:
            return None
        excess = self.s_value - 2.0
        if self.sigma_s == 0.0:
            return math.copysign(math.inf, excess) if excess else 0.0
        return excess / self.sigma_s

    @property
    def n_coincidences(self) -> int:
        return sum(c.n for c in self.correlations)


def interval_result(index, start_s, end_s, counts, signs=DEFAULT_CHSH_SIGNS) -> IntervalResult:
    est = estimates_from_counts(counts)
    if not all(e.valid for e in est):
        return IntervalResult(index, start_s, end_s, est, None, None)
    s = chsh_value(*(e.e_value for e in est), signs=signs)
    sigma = math.sqrt(sum(e.sigma_e ** 2 for e in est))
    return IntervalResult(index, start_s, end_s, est, s, sigma)


@dataclass(frozen=True)
class IntervalPartition:
    """Windows of length T starting every ``stride_s`` on A's corrected clock.

    Contiguous partitions use ``stride_s == T_s``. ``n_windows`` may be left
    as None, in which case it is inferred from the last A tag at finish time.
    """

    T_s: float
    stride_s: float | None = None
    n_windows: int | None = None

    def __post_init__(self):
        if not self.T_s > 0:
            raise ValueError("T_s must be positive")
        if self.stride_s is None:
            object.__setattr__(self, "stride_s", self.T_s)
        if not 0 < self.stride_s <= self.T_s:
            raise ValueError("stride_s must lie in (0, T_s]")

    @classmethod
    def overlapping(cls, span_s: float, T_s: float, n_windows: int):
        """``n_windows`` windows of length T evenly spread over ``[0, span_s]``."""
        if n_windows < 2:
            return cls(T_s, T_s, n_windows)
        return cls(T_s, (span_s - T_s) / (n_windows - 1), n_windows)

    @property
    def contiguous(self) -> bool:
        return self.stride_s == self.T_s

    def infer_count(self, last_t_s: float) -> int:
        # Trailing windows short by under 1% of T still count as complete.
        return max(0, int(math.floor((last_t_s - self.T_s) / self.stride_s + 0.01)) + 1)

    def bounds(self, k):
        start = k * self.stride_s
        return start, start + self.T_s


class IntervalAccumulator:
    """Accumulates per-window coincidence counts from streamed pairs."""

    def __init__(self, partition: IntervalPartition):
        self.partition = partition
        self.flat = np.zeros(0, dtype=np.int64)

    def add(self, pairs: np.ndarray):
        if not pairs.size:
            return
        p = self.partition
        t = pairs["t_a_ps"].astype(float) * 1e-12
        cell = (pairs["setting_a"].astype(np.int64) * 8 + pairs["setting_b"] * 4
                + pairs["channel_a"] * 2 + pairs["channel_b"])
        if p.contiguous:
            ks = [np.floor(t / p.T_s).astype(np.int64)]
            masks = [np.ones(t.size, dtype=bool)]
        else:
            last_k = np.floor(t / p.stride_s).astype(np.int64)
            reach = int(math.ceil(p.T_s / p.stride_s)) + 1
            ks, masks = [], []
            for m in range(reach):
                k = last_k - m
                start = k * p.stride_s
                ks.append(k)
                masks.append((k >= 0) & (t >= start) & (t < start + p.T_s))
        for k, mask in zip(ks, masks):
            k = k[mask]
            if not k.size:
                continue
            idx = k * 16 + cell[mask]
            counts = np.bincount(idx, minlength=self.flat.size)
            if counts.size > self.flat.size:
                self.flat = np.concatenate([self.flat, np.zeros(counts.size - self.flat.size, np.int64)])
            self.flat += counts

    def results(self, n_windows: int, signs=DEFAULT_CHSH_SIGNS) -> list:
        need = n_windows * 16
        flat = self.flat[:need]
        if flat.size < need:
            flat = np.concatenate([flat, np.zeros(need - flat.size, np.int64)])
        grid = flat.reshape(n_windows, 2, 2, 2, 2)
        out = []
        for k in range(n_windows):
            start, end = self.partition.bounds(k)
            out.append(interval_result(k, start, end, grid[k], signs))
        return out

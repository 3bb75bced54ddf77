"""Relative clock recovery from the sync-pulse streams.

Pulses are associated by pulse index, gated by the coarse (GPS-level)
offset bound, then B's timestamps are fitted as an affine function of A's.
The fit is accumulated chunk by chunk with pairwise-merged centered moments,
so arbitrarily long runs can be processed in bounded memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from ..errors import SyncError

DEFAULT_COARSE_BOUND_S = 100e-6


@dataclass(frozen=True)
class ClockSolution:
    """B's clock as ``t_B = offset + (1 + drift) * t_A``."""

    offset_s: float
    drift_s_per_s: float
    residual_rms_s: float
    n_pulses: int = 0

    @property
    def offset_ps(self) -> float:
        return self.offset_s * 1e12

    def to_a_clock(self, t_b_ps) -> np.ndarray:
        """Map B timestamps onto A's clock as int64 ps: (t_B - offset) / (1 + drift)."""
        t = np.asarray(t_b_ps).astype(np.int64)
        off = self.offset_ps
        d = self.drift_s_per_s
        corr = off + (t.astype(float) - off) * (d / (1.0 + d))
        return t - np.rint(corr).astype(np.int64)


IDENTITY_CLOCK = ClockSolution(0.0, 0.0, 0.0)


class ClockFit:
    """Streaming least-squares fit of ``t_B - t_A`` against ``t_A``."""

    def __init__(self):
        self.n = 0
        self.x_ref = None
        self.mean_x = 0.0
        self.mean_r = 0.0
        self.sxx = 0.0
        self.sxr = 0.0
        self.srr = 0.0

    def add(self, t_a_ps: np.ndarray, t_b_ps: np.ndarray):
        ta = np.asarray(t_a_ps).astype(np.int64)
        tb = np.asarray(t_b_ps).astype(np.int64)
        m = ta.size
        if m == 0:
            return
        if self.x_ref is None:
            self.x_ref = int(ta[0])
        x = (ta - self.x_ref).astype(float)
        r = (tb - ta).astype(float)
        mx, mr = x.mean(), r.mean()
        dx, dr = x - mx, r - mr
        sxx, sxr, srr = float(dx @ dx), float(dx @ dr), float(dr @ dr)
        n = self.n
        tot = n + m
        ddx, ddr = mx - self.mean_x, mr - self.mean_r
        w = n * m / tot
        self.sxx += sxx + ddx * ddx * w
        self.sxr += sxr + ddx * ddr * w
        self.srr += srr + ddr * ddr * w
        self.mean_x += ddx * m / tot
        self.mean_r += ddr * m / tot
        self.n = tot

    def solution(self) -> ClockSolution:
        if self.n < 2 or self.sxx <= 0.0:
            raise SyncError(f"need at least 2 associated sync pulses spanning time, got {self.n}")
        d = self.sxr / self.sxx
        offset_ps = self.mean_r - d * (self.x_ref + self.mean_x)
        sse = max(self.srr - self.sxr * d, 0.0)
        return ClockSolution(offset_ps * 1e-12, d, math.sqrt(sse / self.n) * 1e-12, self.n)


def associate(sync_a: np.ndarray, sync_b: np.ndarray, coarse_offset_bound_s: float):
    """Matched (t_A, t_B) arrays for pulses with equal index and |t_B - t_A| within the bound."""
    _, ia, ib = np.intersect1d(sync_a["pulse_index"], sync_b["pulse_index"],
                               assume_unique=True, return_indices=True)
    ta = sync_a["timestamp_ps"][ia].astype(np.int64)
    tb = sync_b["timestamp_ps"][ib].astype(np.int64)
    keep = np.abs(tb - ta) <= coarse_offset_bound_s * 1e12
    return ta[keep], tb[keep], ia.size


def synchronize_clocks(sync_a: np.ndarray, sync_b: np.ndarray,
                       coarse_offset_bound_s: float = DEFAULT_COARSE_BOUND_S) -> ClockSolution:
    return synchronize_stream([(sync_a, sync_b)], coarse_offset_bound_s)


def synchronize_stream(chunks: Iterable, coarse_offset_bound_s: float = DEFAULT_COARSE_BOUND_S) -> ClockSolution:
    """Fit over an iterable of index-aligned ``(sync_a, sync_b)`` chunks."""
    fit = ClockFit()
    n_common = 0
    for sa, sb in chunks:
        ta, tb, common = associate(sa, sb, coarse_offset_bound_s)
        n_common += common
        fit.add(ta, tb)
    if n_common == 0:
        raise SyncError("no pulse indices in common between the two sync streams")
    if fit.n < 2:
        raise SyncError(f"only {fit.n} of {n_common} common pulses lie within the coarse offset bound")
    return fit.solution()


def index_join_blocks(blocks_a: Iterable, blocks_b: Iterable) -> Iterator:
    """Re-chunk two independently blocked sync streams into index-aligned chunks."""
    it_a, it_b = iter(blocks_a), iter(blocks_b)
    pend_a = pend_b = None
    done_a = done_b = False
    while not (done_a and done_b):
        if not done_a:
            blk = next(it_a, None)
            if blk is None:
                done_a = True
            else:
                pend_a = blk if pend_a is None else np.concatenate([pend_a, blk])
        if not done_b:
            blk = next(it_b, None)
            if blk is None:
                done_b = True
            else:
                pend_b = blk if pend_b is None else np.concatenate([pend_b, blk])
        if pend_a is None or pend_b is None or not pend_a.size or not pend_b.size:
            continue
        if done_a and done_b:
            break
        # Indices up to the smaller maximum are complete on both sides.
        lim = min(int(pend_a["pulse_index"][-1]), int(pend_b["pulse_index"][-1]))
        if done_a:
            lim = int(pend_b["pulse_index"][-1])
        if done_b:
            lim = int(pend_a["pulse_index"][-1])
        ka = int(np.searchsorted(pend_a["pulse_index"], lim, side="right"))
        kb = int(np.searchsorted(pend_b["pulse_index"], lim, side="right"))
        yield pend_a[:ka], pend_b[:kb]
        pend_a, pend_b = pend_a[ka:], pend_b[kb:]
    if pend_a is not None and pend_b is not None and pend_a.size and pend_b.size:
        yield pend_a, pend_b

"""End-to-end analysis: sync fit, streamed matching, per-interval CHSH."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ..constants import COINCIDENCE_WINDOW_S
from ..quantum_model import DEFAULT_CHSH_SIGNS
from .chsh import IntervalAccumulator, IntervalPartition
from .coincidence import CoincidenceMatcher
from .sync import DEFAULT_COARSE_BOUND_S, ClockSolution, synchronize_stream

DEFAULT_WINDOW_PS = int(round(COINCIDENCE_WINDOW_S * 1e12))


@dataclass
class DtStats:
    """Running moments of matched-pair time differences (ps)."""

    n: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    def add(self, dt):
        d = np.asarray(dt, dtype=float)
        self.n += d.size
        self.total += float(d.sum())
        self.total_sq += float(d @ d)

    @property
    def mean_ps(self) -> float:
        return self.total / self.n if self.n else math.nan

    @property
    def std_ps(self) -> float:
        if self.n < 2:
            return math.nan
        return math.sqrt(max(self.total_sq / self.n - self.mean_ps ** 2, 0.0))


@dataclass
class AnalysisResult:
    clock: ClockSolution
    intervals: list
    n_tags_a: int
    n_tags_b: int
    n_pairs: int
    dt: DtStats = field(default_factory=DtStats)
    last_a_s: float = 0.0


def analyze_tag_stream(tag_chunks: Iterable, clock: ClockSolution, partition: IntervalPartition,
                       window_ps: int = DEFAULT_WINDOW_PS, signs=DEFAULT_CHSH_SIGNS,
                       pair_sink=None) -> AnalysisResult:
    """Match and bin a stream of ``(tags_a, tags_b)`` chunks (either side may be empty)."""
    matcher = CoincidenceMatcher(window_ps, clock)
    acc = IntervalAccumulator(partition)
    dt = DtStats()
    n_pairs = 0

    def consume(pairs):
        nonlocal n_pairs
        n_pairs += pairs.size
        dt.add(pairs["dt_ps"])
        acc.add(pairs)
        if pair_sink is not None:
            pair_sink(pairs)

    for ta, tb in tag_chunks:
        consume(matcher.feed(ta, tb))
    consume(matcher.finish())
    last_a = (matcher._last_a or 0) * 1e-12
    n = partition.n_windows if partition.n_windows is not None else partition.infer_count(last_a)
    return AnalysisResult(clock, acc.results(n, signs), matcher.n_a, matcher.n_b, n_pairs, dt, last_a)


def analyze(sync_chunks: Iterable, tag_chunks: Iterable, T_s: float,
            window_ps: int = DEFAULT_WINDOW_PS,
            coarse_offset_bound_s: float = DEFAULT_COARSE_BOUND_S,
            partition: IntervalPartition | None = None, signs=DEFAULT_CHSH_SIGNS) -> AnalysisResult:
    """Two passes: clock fit over all sync chunks, then matching over the tag chunks."""
    clock = synchronize_stream(sync_chunks, coarse_offset_bound_s)
    part = partition if partition is not None else IntervalPartition(T_s)
    return analyze_tag_stream(tag_chunks, clock, part, window_ps, signs)


def chsh_per_interval(tags_a: np.ndarray, tags_b: np.ndarray, clock: ClockSolution,
                      window_ps: int = DEFAULT_WINDOW_PS, T_s: float = 1800.0,
                      partition: IntervalPartition | None = None, signs=DEFAULT_CHSH_SIGNS) -> list:
    part = partition if partition is not None else IntervalPartition(T_s)
    return analyze_tag_stream([(tags_a, tags_b)], clock, part, window_ps, signs).intervals


def zip_blocks(blocks_a: Iterable, blocks_b: Iterable):
    """Pair up two independently blocked tag streams for ``analyze_tag_stream``."""
    for ta, tb in itertools.zip_longest(blocks_a, blocks_b):
        yield ta, tb

"""Clock sync, coincidence matching, CHSH per interval and the bound timeline."""

from .chsh import (
    SETTING_ORDER,
    CorrelationEstimate,
    IntervalAccumulator,
    IntervalPartition,
    IntervalResult,
    counts_from_pairs,
    estimate_correlations,
    estimates_from_counts,
    interval_result,
)
from .coincidence import PAIR_DTYPE, CoincidenceMatcher, CoincidencePair, as_pairs, find_coincidences
from .pipeline import (
    DEFAULT_WINDOW_PS,
    AnalysisResult,
    analyze,
    analyze_tag_stream,
    chsh_per_interval,
    zip_blocks,
)
from .sync import (
    DEFAULT_COARSE_BOUND_S,
    IDENTITY_CLOCK,
    ClockFit,
    ClockSolution,
    associate,
    index_join_blocks,
    synchronize_clocks,
    synchronize_stream,
)
from .timeline import BoundTimeline, bound_timeline, is_violating

__all__ = [
    "DEFAULT_COARSE_BOUND_S", "DEFAULT_WINDOW_PS", "IDENTITY_CLOCK", "PAIR_DTYPE", "SETTING_ORDER",
    "AnalysisResult", "BoundTimeline", "ClockFit", "ClockSolution", "CoincidenceMatcher",
    "CoincidencePair", "CorrelationEstimate", "IntervalAccumulator", "IntervalPartition",
    "IntervalResult", "analyze", "analyze_tag_stream", "as_pairs", "associate", "bound_timeline",
    "chsh_per_interval", "counts_from_pairs", "estimate_correlations", "estimates_from_counts",
    "find_coincidences", "index_join_blocks", "interval_result", "is_violating",
    "synchronize_clocks", "synchronize_stream", "zip_blocks",
]

"""Two-station time-tag generation.

Runs are generated in emission-time chunks so that a 12-hour run never has
to fit in memory. Every random quantity is drawn from a generator seeded by
``(seed, stream, chunk index)``, so a run is a pure function of the configs,
the seed and ``chunk_s``. Sync pulses and detection tags use disjoint
streams and can be generated independently of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from ..quantum_model import NoisySingletState, optimal_settings, sample_outcomes
from .config import SourceConfig, StationConfig
from .settings import SettingSchedule

TAG_DTYPE = np.dtype([("timestamp_ps", "<u8"), ("channel", "u1"), ("setting", "u1")])
SYNC_DTYPE = np.dtype([("timestamp_ps", "<u8"), ("pulse_index", "<u4")])
TRUTH_DTYPE = np.dtype([
    ("emission_ps", "<i8"),
    ("detected_a", "?"), ("detected_b", "?"),
    ("setting_a", "u1"), ("setting_b", "u1"),
    ("outcome_a", "i1"), ("outcome_b", "i1"),
])

DEFAULT_CHUNK_S = 100.0
# Gaussian jitter is truncated here; needed for exact chunk-boundary ordering.
JITTER_CLIP_SIGMAS = 8.0

_STREAM_SCHEDULE, _STREAM_PAIRS, _STREAM_DARK, _STREAM_SYNC = range(4)


class TimeTagRecord(NamedTuple):
    timestamp_ps: int
    channel: int
    setting: int
    station: str


def records(tags: np.ndarray, station: str):
    for t in tags:
        yield TimeTagRecord(int(t["timestamp_ps"]), int(t["channel"]), int(t["setting"]), station)


def empty_tags() -> np.ndarray:
    return np.zeros(0, dtype=TAG_DTYPE)


@dataclass(frozen=True)
class ClockModel:
    """local = true * (1 + drift) + offset, quantized down to ``resolution_ps``."""

    offset_s: float = 0.0
    drift_s_per_s: float = 0.0
    resolution_ps: int = 1

    @classmethod
    def from_station(cls, cfg: StationConfig):
        return cls(cfg.clock_offset_s, cfg.clock_drift_s_per_s, cfg.tdc_resolution_ps)

    def stamp(self, t0_ps: int, rel_ps: np.ndarray) -> np.ndarray:
        """Local integer timestamps for true times ``t0_ps + rel_ps``."""
        rel = np.asarray(rel_ps, dtype=float)
        local_rel = rel + (t0_ps + rel) * self.drift_s_per_s + self.offset_s * 1e12
        res = self.resolution_ps
        ticks = t0_ps // res + np.floor((t0_ps % res + local_rel) / res).astype(np.int64)
        return ticks * res

    def stamp_scalar(self, t_ps: float) -> int:
        base = int(math.floor(t_ps))
        return int(self.stamp(base, np.array([t_ps - base]))[0])


def relative_clock(a: ClockModel, b: ClockModel):
    """(offset_s, drift) of B's clock as an affine function of A's clock."""
    ratio = (1.0 + b.drift_s_per_s) / (1.0 + a.drift_s_per_s)
    return b.offset_s - a.offset_s * ratio, ratio - 1.0


@dataclass
class GroundTruth:
    """Detected pairs (at least one photon registered) plus the true clock models."""

    pairs: np.ndarray  # TRUTH_DTYPE
    n_emitted: int
    clock_a: ClockModel
    clock_b: ClockModel
    schedule_a: SettingSchedule
    schedule_b: SettingSchedule

    @property
    def relative_clock(self):
        return relative_clock(self.clock_a, self.clock_b)


class TagChunk(NamedTuple):
    tags_a: np.ndarray
    tags_b: np.ndarray
    truth: np.ndarray | None
    n_emitted: int


class SyncChunk(NamedTuple):
    sync_a: np.ndarray
    sync_b: np.ndarray


@dataclass
class SimulatedRun:
    tags_a: np.ndarray
    sync_a: np.ndarray
    tags_b: np.ndarray
    sync_b: np.ndarray
    truth: GroundTruth


def _root(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def _rng(root: np.random.SeedSequence, *key) -> np.random.Generator:
    ss = np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + tuple(key))
    return np.random.Generator(np.random.PCG64(ss))


def schedules(a: StationConfig, b: StationConfig, seed):
    root = _root(seed)
    return (SettingSchedule.from_rng(a, _rng(root, _STREAM_SCHEDULE, 0)),
            SettingSchedule.from_rng(b, _rng(root, _STREAM_SCHEDULE, 1)))


def _chunk_edges_ps(src: SourceConfig, chunk_s: float):
    if not (chunk_s > 0):
        raise ValueError("chunk_s must be positive")
    total = int(round(src.duration_s * 1e12))
    step = int(round(chunk_s * 1e12))
    edges = list(range(0, total, step)) + [total]
    return list(zip(edges[:-1], edges[1:]))


def _angles(cfg: StationConfig, station: int) -> np.ndarray:
    if cfg.angles_rad is not None:
        return np.array(cfg.angles_rad)
    return np.array(optimal_settings().station_angles()[station])


def _sort_tags(ts, channel, setting) -> np.ndarray:
    order = np.lexsort((setting, channel, ts))
    out = np.empty(ts.size, dtype=TAG_DTYPE)
    out["timestamp_ps"] = ts[order]
    out["channel"] = channel[order]
    out["setting"] = setting[order]
    return out


def _jitter(rng, n, sigma_ps):
    if sigma_ps == 0.0:
        return np.zeros(n)
    return np.clip(rng.standard_normal(n), -JITTER_CLIP_SIGMAS, JITTER_CLIP_SIGMAS) * sigma_ps


class _ReorderBuffer:
    """Holds back tags that a later chunk could still precede."""

    def __init__(self):
        self.pending = empty_tags()

    def push(self, tags: np.ndarray, cutoff_ps: int | None) -> np.ndarray:
        if self.pending.size:
            merged = np.concatenate([self.pending, tags])
            order = np.lexsort((merged["setting"], merged["channel"], merged["timestamp_ps"]))
            merged = merged[order]
        else:
            merged = tags
        if cutoff_ps is None:
            self.pending = empty_tags()
            return merged
        split = int(np.searchsorted(merged["timestamp_ps"], np.uint64(max(cutoff_ps, 0)), side="left"))
        self.pending = merged[split:]
        return merged[:split]


def iter_tag_chunks(src: SourceConfig, a: StationConfig, b: StationConfig, seed,
                    chunk_s: float = DEFAULT_CHUNK_S, with_truth: bool = True) -> Iterator[TagChunk]:
    """Detection tags at both stations, globally sorted across the yielded chunks."""
    root = _root(seed)
    sched = schedules(a, b, root)
    clocks = (ClockModel.from_station(a), ClockModel.from_station(b))
    stations = (a, b)
    angle_tables = (_angles(a, 0), _angles(b, 1))
    state = NoisySingletState(src.visibility)
    ea, eb = a.efficiency, b.efficiency
    p_any = 1.0 - (1.0 - ea) * (1.0 - eb)
    delays_ps = [cfg.optical_delay_s * 1e12 for cfg in stations]
    sigmas_ps = [cfg.detector_jitter_sigma_s * 1e12 for cfg in stations]
    buffers = (_ReorderBuffer(), _ReorderBuffer())
    edges = _chunk_edges_ps(src, chunk_s)

    for k, (t0, t1) in enumerate(edges):
        last = k == len(edges) - 1
        rng = _rng(root, _STREAM_PAIRS, k)
        span = t1 - t0
        n_emit = int(rng.poisson(src.pair_rate_hz * span * 1e-12))
        n_det = int(rng.binomial(n_emit, p_any)) if p_any > 0 else 0
        rel = np.sort(rng.random(n_det)) * span
        cat = rng.random(n_det) * p_any
        both = cat < ea * eb
        det_a = cat < ea  # both, or A only
        det_b = both | (cat >= ea)
        # True arrival (before detector jitter) selects the active basis.
        arr_a = t0 + np.rint(rel + delays_ps[0]).astype(np.int64)
        arr_b = t0 + np.rint(rel + delays_ps[1]).astype(np.int64)
        set_a = sched[0].setting_at(arr_a)
        set_b = sched[1].setting_at(arr_b)
        out_a, out_b = sample_outcomes(state, angle_tables[0][set_a], angle_tables[1][set_b], rng)
        jit_a = _jitter(rng, n_det, sigmas_ps[0])
        jit_b = _jitter(rng, n_det, sigmas_ps[1])

        per_station = []
        for s, (det, sett, out, jit) in enumerate(((det_a, set_a, out_a, jit_a),
                                                    (det_b, set_b, out_b, jit_b))):
            ts = clocks[s].stamp(t0, rel[det] + delays_ps[s] + jit[det])
            chan = (out[det] < 0).astype(np.uint8)
            settings = sett[det]
            # Dark counts over this chunk's slice of detection time.
            drng = _rng(root, _STREAM_DARK, k, s)
            w0 = 0.0 if k == 0 else t0 + delays_ps[s]
            w1 = t1 + delays_ps[s]
            n_dark = int(drng.poisson(stations[s].dark_rate_hz * (w1 - w0) * 1e-12))
            dark_true = w0 + np.sort(drng.random(n_dark)) * (w1 - w0)
            dark_ts = clocks[s].stamp(t0, dark_true - t0)
            dark_set = sched[s].setting_at(np.rint(dark_true).astype(np.int64))
            dark_chan = drng.integers(0, 2, n_dark).astype(np.uint8)
            all_ts = np.concatenate([ts, dark_ts])
            if all_ts.size and all_ts.min() < 0:
                raise ValueError("negative local timestamp; increase clock_offset_s")
            tags = _sort_tags(all_ts, np.concatenate([chan, dark_chan]),
                              np.concatenate([settings, dark_set]))
            cutoff = None if last else clocks[s].stamp_scalar(
                t1 + delays_ps[s] - JITTER_CLIP_SIGMAS * sigmas_ps[s])
            per_station.append(buffers[s].push(tags, cutoff))

        truth = None
        if with_truth:
            truth = np.empty(n_det, dtype=TRUTH_DTYPE)
            truth["emission_ps"] = t0 + np.rint(rel).astype(np.int64)
            truth["detected_a"] = det_a
            truth["detected_b"] = det_b
            truth["setting_a"] = set_a
            truth["setting_b"] = set_b
            truth["outcome_a"] = out_a
            truth["outcome_b"] = out_b
        yield TagChunk(per_station[0], per_station[1], truth, n_emit)


def iter_sync_chunks(src: SourceConfig, a: StationConfig, b: StationConfig, seed,
                     chunk_s: float = DEFAULT_CHUNK_S) -> Iterator[SyncChunk]:
    """Sync pulses emitted at exactly ``sync_rate_hz`` in true time, stamped at both stations.

    Pulses travel co-axially with the photons, so each arrives after that
    station's optical delay.
    """
    root = _root(seed)
    period = src.sync_period_ps
    stations = (a, b)
    clocks = (ClockModel.from_station(a), ClockModel.from_station(b))
    for k, (t0, t1) in enumerate(_chunk_edges_ps(src, chunk_s)):
        first = -(-t0 // period)
        stop = -(-t1 // period)
        idx = np.arange(first, stop, dtype=np.int64)
        out = []
        for s in (0, 1):
            rng = _rng(root, _STREAM_SYNC, k, s)
            rel = (idx * period - t0) + stations[s].optical_delay_s * 1e12 \
                + _jitter(rng, idx.size, stations[s].sync_jitter_sigma_s * 1e12)
            rec = np.empty(idx.size, dtype=SYNC_DTYPE)
            rec["timestamp_ps"] = clocks[s].stamp(t0, rel)
            rec["pulse_index"] = idx
            out.append(rec)
        yield SyncChunk(out[0], out[1])


def simulate_run(src: SourceConfig, a: StationConfig, b: StationConfig, seed,
                 chunk_s: float = DEFAULT_CHUNK_S) -> SimulatedRun:
    """In-memory run: ``(tags_A, sync_A, tags_B, sync_B, ground truth)``."""
    ta, tb, truth, sa, sb = [], [], [], [], []
    n_emit = 0
    for ch in iter_tag_chunks(src, a, b, seed, chunk_s):
        ta.append(ch.tags_a)
        tb.append(ch.tags_b)
        truth.append(ch.truth)
        n_emit += ch.n_emitted
    for ch in iter_sync_chunks(src, a, b, seed, chunk_s):
        sa.append(ch.sync_a)
        sb.append(ch.sync_b)
    sched = schedules(a, b, seed)
    gt = GroundTruth(np.concatenate(truth), n_emit, ClockModel.from_station(a),
                     ClockModel.from_station(b), sched[0], sched[1])
    return SimulatedRun(np.concatenate(ta), np.concatenate(sa), np.concatenate(tb),
                        np.concatenate(sb), gt)

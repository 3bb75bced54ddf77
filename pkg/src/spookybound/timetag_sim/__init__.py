"""Simulated two-station time-tag streams."""

from .config import SourceConfig, StationConfig
from .fileio import (
    StreamWriter,
    iter_sync,
    iter_tags,
    read_sync,
    read_tags,
    read_tags_csv,
    write_sync,
    write_tags,
    write_tags_csv,
)
from .settings import SettingSchedule, SettingStream, generate_setting_stream
from .simulate import (
    DEFAULT_CHUNK_S,
    SYNC_DTYPE,
    TAG_DTYPE,
    TRUTH_DTYPE,
    ClockModel,
    GroundTruth,
    SimulatedRun,
    TimeTagRecord,
    iter_sync_chunks,
    iter_tag_chunks,
    records,
    relative_clock,
    schedules,
    simulate_run,
)

__all__ = [
    "DEFAULT_CHUNK_S", "SYNC_DTYPE", "TAG_DTYPE", "TRUTH_DTYPE", "ClockModel", "GroundTruth",
    "SettingSchedule", "SettingStream", "SimulatedRun", "SourceConfig", "StationConfig",
    "StreamWriter", "TimeTagRecord", "generate_setting_stream", "iter_sync", "iter_sync_chunks",
    "iter_tag_chunks", "iter_tags", "read_sync", "read_tags", "read_tags_csv", "records",
    "relative_clock", "schedules", "simulate_run", "write_sync", "write_tags", "write_tags_csv",
]

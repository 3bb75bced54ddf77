"""Binary time-tag (QTT1) and sync-pulse (QSP1) files, plus CSV tag input.

Header (16 bytes, little-endian): 4-byte magic, u16 version, u8 station
(0 = A, 1 = B), 9 reserved zero bytes. Tag records are 10 bytes
(u64 timestamp_ps, u8 channel, u8 setting); sync records are 12 bytes
(u64 timestamp_ps, u32 pulse_index).
"""

from __future__ import annotations

import csv
import os
import struct
from pathlib import Path

import numpy as np

from ..errors import ParseError
from .simulate import SYNC_DTYPE, TAG_DTYPE

TAG_MAGIC = b"QTT1"
SYNC_MAGIC = b"QSP1"
FORMAT_VERSION = 1
HEADER_SIZE = 16
_HEADER = struct.Struct("<4sHB9s")
STATIONS = {"A": 0, "B": 1}
STATION_NAMES = {v: k for k, v in STATIONS.items()}

DEFAULT_READ_CHUNK = 1 << 22


def _header(magic, station) -> bytes:
    return _HEADER.pack(magic, FORMAT_VERSION, STATIONS[station], bytes(9))


def _dtype_for(magic):
    return TAG_DTYPE if magic == TAG_MAGIC else SYNC_DTYPE


class StreamWriter:
    """Appends record chunks to a file; the file appears atomically on close."""

    def __init__(self, path, magic, station):
        self.path = Path(path)
        self.tmp = self.path.with_name(self.path.name + ".part")
        self.dtype = _dtype_for(magic)
        self._fh = open(self.tmp, "wb")
        self._fh.write(_header(magic, station))
        self.count = 0
        self._last = None

    def write(self, recs: np.ndarray):
        if recs.dtype != self.dtype:
            raise TypeError(f"expected dtype {self.dtype}, got {recs.dtype}")
        if recs.size:
            ts = recs["timestamp_ps"]
            if np.any(ts[1:] < ts[:-1]) or (self._last is not None and ts[0] < self._last):
                raise ValueError("records must be written in timestamp order")
            self._last = ts[-1]
        self._fh.write(recs.tobytes())
        self.count += recs.size

    def close(self):
        self._fh.close()
        os.replace(self.tmp, self.path)

    def abort(self):
        self._fh.close()
        self.tmp.unlink(missing_ok=True)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, *_):
        if exc_type is None:
            self.close()
        else:
            self.abort()


def write_tags(path, records: np.ndarray, station: str = "A"):
    with StreamWriter(path, TAG_MAGIC, station) as w:
        w.write(np.ascontiguousarray(records, dtype=TAG_DTYPE))


def write_sync(path, records: np.ndarray, station: str = "A"):
    with StreamWriter(path, SYNC_MAGIC, station) as w:
        w.write(np.ascontiguousarray(records, dtype=SYNC_DTYPE))


def read_header(path, magic):
    with open(path, "rb") as fh:
        raw = fh.read(HEADER_SIZE)
    if len(raw) < HEADER_SIZE:
        raise ParseError(path, len(raw), f"file shorter than the {HEADER_SIZE}-byte header")
    got, version, station, reserved = _HEADER.unpack(raw)
    if got != magic:
        raise ParseError(path, 0, f"bad magic {got!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise ParseError(path, 4, f"unsupported version {version}")
    if station not in STATION_NAMES:
        raise ParseError(path, 6, f"bad station code {station}")
    return STATION_NAMES[station]


def _iter_records(path, magic, chunk):
    path = str(path)
    station = read_header(path, magic)
    dtype = _dtype_for(magic)
    size = os.path.getsize(path)
    body = size - HEADER_SIZE
    n, extra = divmod(body, dtype.itemsize)
    if extra:
        raise ParseError(path, HEADER_SIZE + n * dtype.itemsize,
                         f"truncated record ({extra} of {dtype.itemsize} bytes)")
    if n == 0:
        return station, iter(())
    mm = np.memmap(path, dtype=dtype, mode="r", offset=HEADER_SIZE, shape=(n,))

    def gen():
        last = None
        for start in range(0, n, chunk):
            block = np.array(mm[start:start + chunk])
            ts = block["timestamp_ps"]
            bad = np.flatnonzero(ts[1:] < ts[:-1])
            if last is not None and ts[0] < last:
                bad = np.concatenate([[-1], bad])
            if bad.size:
                i = start + int(bad[0]) + 1
                raise ParseError(path, HEADER_SIZE + i * dtype.itemsize, "timestamps out of order")
            if magic == TAG_MAGIC:
                for field, off in (("channel", 8), ("setting", 9)):
                    badv = np.flatnonzero(block[field] > 1)
                    if badv.size:
                        i = start + int(badv[0])
                        raise ParseError(path, HEADER_SIZE + i * dtype.itemsize + off,
                                         f"{field} value {int(block[field][badv[0]])} not in {{0, 1}}")
            last = ts[-1]
            yield block

    return station, gen()


def iter_tags(path, chunk=DEFAULT_READ_CHUNK):
    """(station, iterator of TAG_DTYPE blocks); validated lazily block by block."""
    return _iter_records(path, TAG_MAGIC, chunk)


def iter_sync(path, chunk=DEFAULT_READ_CHUNK):
    return _iter_records(path, SYNC_MAGIC, chunk)


def _collect(dtype, blocks):
    blocks = list(blocks)
    return np.concatenate(blocks) if blocks else np.zeros(0, dtype=dtype)


def read_tags(path):
    """Whole tag file (QTT1 or CSV by extension); returns (station, records)."""
    if str(path).endswith(".csv"):
        return None, read_tags_csv(path)
    station, blocks = iter_tags(path)
    return station, _collect(TAG_DTYPE, blocks)


def read_sync(path):
    station, blocks = iter_sync(path)
    return station, _collect(SYNC_DTYPE, blocks)


def read_tags_csv(path) -> np.ndarray:
    """CSV with columns timestamp_ps, channel, setting; '#' lines and a header row are skipped."""
    rows = []
    offset = 0
    with open(path, "rb") as fh:
        for raw in fh:
            line = raw.decode("utf-8").strip()
            here = offset
            offset += len(raw)
            if not line or line.startswith("#"):
                continue
            cells = next(csv.reader([line]))
            if cells[0].strip() == "timestamp_ps":
                continue
            try:
                ts, ch, st = (int(c) for c in cells)
            except ValueError:
                raise ParseError(path, here, f"cannot parse row {line!r}") from None
            if ts < 0 or ch not in (0, 1) or st not in (0, 1):
                raise ParseError(path, here, f"value out of range in row {line!r}")
            if rows and ts < rows[-1][0]:
                raise ParseError(path, here, "timestamps out of order")
            rows.append((ts, ch, st))
    out = np.zeros(len(rows), dtype=TAG_DTYPE)
    if rows:
        arr = np.array(rows, dtype=np.int64)
        out["timestamp_ps"] = arr[:, 0]
        out["channel"] = arr[:, 1]
        out["setting"] = arr[:, 2]
    return out


def write_tags_csv(path, records: np.ndarray):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("timestamp_ps", "channel", "setting"))
        for r in records:
            w.writerow((int(r["timestamp_ps"]), int(r["channel"]), int(r["setting"])))

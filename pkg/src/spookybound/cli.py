"""Command-line entry point: simulate, analyze, bound, sweep, verify, reproduce."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import constants
from .analysis import (
    IntervalPartition,
    analyze_tag_stream,
    bound_timeline,
    index_join_blocks,
    synchronize_stream,
    zip_blocks,
)
from .errors import ConfigError, DomainError, ParseError, SyncError, UsageError
from .geo_relativity import (
    experiment_geometry,
    FrameVelocity,
    speed_bound_optimal,
    sweep_bound,
    verify_loopholes,
    write_report_csv,
    write_sweep_csv,
)
from .runconfig import RunConfig, load_config, require_events
from .timetag_sim import (
    SYNC_DTYPE,
    TAG_DTYPE,
    TRUTH_DTYPE,
    ClockModel,
    StreamWriter,
    iter_sync,
    iter_sync_chunks,
    iter_tag_chunks,
    iter_tags,
    read_tags_csv,
    relative_clock,
)
from .timetag_sim.fileio import SYNC_MAGIC, TAG_MAGIC

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_PARSE = 3
EXIT_SYNC = 4
EXIT_INCONCLUSIVE = 5

STREAM_FILES = {"tags_a": "tags_A.qtt", "tags_b": "tags_B.qtt",
                "sync_a": "sync_A.qsp", "sync_b": "sync_B.qsp"}


def _provenance(cfg: RunConfig, seed) -> str:
    return f"config_sha256={cfg.sha256} seed={seed}"


def _write_atomic(path: Path, text: str):
    tmp = path.with_name(path.name + ".part")
    tmp.write_text(text)
    os.replace(tmp, path)


def _seed(args, cfg):
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        raise ConfigError("seed", "an explicit seed is required (--seed or run.seed)")
    if seed < 0 or seed >= 2**64:
        raise ConfigError("seed", "must be an unsigned 64-bit integer")
    return seed


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise ConfigError("out", f"{out} is not writable")
    return out


def cmd_simulate(args, cfg: RunConfig) -> int:
    seed = _seed(args, cfg)
    out = _outdir(args)
    src, a, b = cfg.source, cfg.station_a, cfg.station_b
    writers = {
        "tags_a": StreamWriter(out / STREAM_FILES["tags_a"], TAG_MAGIC, "A"),
        "tags_b": StreamWriter(out / STREAM_FILES["tags_b"], TAG_MAGIC, "B"),
        "sync_a": StreamWriter(out / STREAM_FILES["sync_a"], SYNC_MAGIC, "A"),
        "sync_b": StreamWriter(out / STREAM_FILES["sync_b"], SYNC_MAGIC, "B"),
    }
    truth_path = out / "ground_truth_pairs.bin"
    truth_tmp = truth_path.with_name(truth_path.name + ".part")
    truth_fh = open(truth_tmp, "wb") if cfg.truth_pairs else None
    n_emitted = n_truth = 0
    try:
        for ch in iter_tag_chunks(src, a, b, seed, cfg.chunk_s, with_truth=cfg.truth_pairs):
            writers["tags_a"].write(ch.tags_a)
            writers["tags_b"].write(ch.tags_b)
            n_emitted += ch.n_emitted
            if truth_fh is not None:
                truth_fh.write(ch.truth.tobytes())
                n_truth += ch.truth.size
        for ch in iter_sync_chunks(src, a, b, seed, cfg.chunk_s):
            writers["sync_a"].write(ch.sync_a)
            writers["sync_b"].write(ch.sync_b)
    except BaseException:
        for w in writers.values():
            w.abort()
        if truth_fh is not None:
            truth_fh.close()
            truth_tmp.unlink(missing_ok=True)
        raise
    for w in writers.values():
        w.close()
    if truth_fh is not None:
        truth_fh.close()
        os.replace(truth_tmp, truth_path)
    ca, cb = ClockModel.from_station(a), ClockModel.from_station(b)
    off, drift = relative_clock(ca, cb)
    truth = {
        "provenance": _provenance(cfg, seed),
        "seed": seed,
        "n_emitted_pairs": n_emitted,
        "n_truth_records": n_truth if cfg.truth_pairs else None,
        "truth_pairs_file": truth_path.name if cfg.truth_pairs else None,
        "truth_dtype": [[n, TRUTH_DTYPE[n].str] for n in TRUTH_DTYPE.names],
        "counts": {k: w.count for k, w in writers.items()},
        "clock_a": {"offset_s": ca.offset_s, "drift_s_per_s": ca.drift_s_per_s},
        "clock_b": {"offset_s": cb.offset_s, "drift_s_per_s": cb.drift_s_per_s},
        "relative_clock_b": {"offset_s": off, "drift_s_per_s": drift},
        "source": vars(src),
        "station_a": vars(a),
        "station_b": vars(b),
    }
    _write_atomic(out / "ground_truth.json", json.dumps(truth, indent=2, sort_keys=True) + "\n")
    print(f"wrote {', '.join(f'{k}={w.count}' for k, w in writers.items())} to {out}")
    return EXIT_OK


def _stream_paths(args):
    base = Path(args.input) if args.input else None
    paths = {}
    for key, default in STREAM_FILES.items():
        given = getattr(args, key)
        if given is None and base is None:
            raise ConfigError(key.replace("_", "-"), "path required (or --in DIR)")
        paths[key] = Path(given) if given is not None else base / default
    return paths


def _tag_blocks(path):
    if str(path).endswith(".csv"):
        return iter([read_tags_csv(path)])
    _, blocks = iter_tags(path)
    return blocks


def _expected_singles(cfg: RunConfig, st):
    d = cfg.source.duration_s
    return cfg.source.pair_rate_hz * d * st.efficiency + st.dark_rate_hz * (d + st.optical_delay_s)


def cmd_analyze(args, cfg: RunConfig) -> int:
    seed = args.seed if args.seed is not None else cfg.seed
    out = _outdir(args)
    paths = _stream_paths(args)
    an = cfg.analysis
    _, sync_a = iter_sync(paths["sync_a"])
    _, sync_b = iter_sync(paths["sync_b"])
    clock = synchronize_stream(index_join_blocks(sync_a, sync_b), an.coarse_offset_bound_s)
    if an.n_windows is not None and an.span_s is not None:
        part = IntervalPartition.overlapping(an.span_s, an.T_s, an.n_windows)
    else:
        part = IntervalPartition(an.T_s, n_windows=an.n_windows)
    res = analyze_tag_stream(zip_blocks(_tag_blocks(paths["tags_a"]), _tag_blocks(paths["tags_b"])),
                             clock, part, an.window_ps)
    bc = cfg.bound
    geom = experiment_geometry()
    tl = bound_timeline(res.intervals, geom, bc.rho, FrameVelocity(bc.beta, bc.theta_rad),
                        period_T_s=an.T_s, omega=bc.omega, min_sigmas=bc.min_sigmas)

    buf = io.StringIO()
    buf.write(f"# {_provenance(cfg, seed)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("interval_index", "start_s", "S", "sigma_S", "violation_sigmas", "bound_over_c"))
    for iv, bound in zip(res.intervals, tl.per_interval):
        w.writerow((iv.interval_index, repr(iv.start_s),
                    "" if iv.s_value is None else repr(iv.s_value),
                    "" if iv.sigma_s is None else repr(iv.sigma_s),
                    "" if iv.violation_sigmas is None else repr(iv.violation_sigmas),
                    "" if bound is None else repr(bound.bound_over_c)))
    _write_atomic(out / "intervals.csv", buf.getvalue())

    summary = {
        "provenance": _provenance(cfg, seed),
        "clock": {"offset_s": clock.offset_s, "drift_s_per_s": clock.drift_s_per_s,
                  "residual_rms_s": clock.residual_rms_s, "n_pulses": clock.n_pulses},
        "n_tags_a": res.n_tags_a, "n_tags_b": res.n_tags_b, "n_pairs": res.n_pairs,
        "dt_mean_ps": res.dt.mean_ps, "dt_std_ps": res.dt.std_ps,
        "n_intervals": len(res.intervals), "n_violating": tl.n_violating,
        "summary_bound_over_c": tl.summary.bound_over_c if tl.conclusive else None,
        "conclusive": tl.conclusive,
    }
    if args.summary:
        for key, st, n in (("a", cfg.station_a, res.n_tags_a), ("b", cfg.station_b, res.n_tags_b)):
            exp = _expected_singles(cfg, st)
            summary[f"expected_tags_{key}"] = exp
            summary[f"z_tags_{key}"] = (n - exp) / math.sqrt(exp) if exp > 0 else None
    _write_atomic(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if args.summary:
        print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"{len(res.intervals)} intervals, {tl.n_violating} violating; "
          + (f"bound V/c >= {tl.summary.bound_over_c:.6g}" if tl.conclusive else "bound INCONCLUSIVE"))
    return EXIT_OK if tl.conclusive else EXIT_INCONCLUSIVE


def cmd_bound(args, cfg: RunConfig) -> int:
    out = _outdir(args)
    bc = cfg.bound
    rho = bc.rho if args.rho is None else args.rho
    beta = bc.beta if args.beta is None else args.beta
    theta = bc.theta_rad if args.theta is None else args.theta
    T = bc.T_s if args.T is None else args.T
    r = speed_bound_optimal(rho, FrameVelocity(beta, theta), T, omega=bc.omega)
    buf = io.StringIO()
    write_sweep_csv(buf, [r], comment=_provenance(cfg, args.seed if args.seed is not None else cfg.seed))
    _write_atomic(out / "bound.csv", buf.getvalue())
    print(f"V_sa/c >= {r.bound_over_c:.6g}  (rho={rho:.6g}, beta={beta:.6g}, theta={theta:.6g}, T={T:g} s)")
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    out = _outdir(args)
    sc = cfg.sweep
    res = sweep_bound(sc.rho, sc.T_s, sc.beta_grid, sc.theta_grid, omega=sc.omega)
    buf = io.StringIO()
    write_sweep_csv(buf, res, comment=_provenance(cfg, args.seed if args.seed is not None else cfg.seed))
    _write_atomic(out / "sweep.csv", buf.getvalue())
    print(f"wrote {len(res)} rows to {out / 'sweep.csv'}")
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    out = _outdir(args)
    rep = verify_loopholes(*require_events(cfg))
    buf = io.StringIO()
    write_report_csv(buf, rep, comment=_provenance(cfg, args.seed if args.seed is not None else cfg.seed))
    _write_atomic(out / "loophole_report.csv", buf.getvalue())
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.description}")
    print("overall:", "PASS" if rep.passed else "FAIL")
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


def cmd_reproduce(args, cfg: RunConfig) -> int:
    from .reproduce import all_checks, format_table

    omega = constants.OMEGA_EARTH if args.omega is None else args.omega
    rows = all_checks(omega=omega, full=args.full)
    table = format_table(rows)
    sys.stdout.write(table)
    if args.out:
        _write_atomic(_outdir(args) / "reproduce.txt", table)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spookybound", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--seed", type=int, help="RNG seed (overrides run.seed)")
    common.add_argument("--out", default=".", help="output directory")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="write time-tag and sync streams")

    an = sub.add_parser("analyze", parents=[common], help="per-interval CHSH and bounds from streams")
    an.add_argument("--in", dest="input", help="directory holding the four stream files")
    for key in STREAM_FILES:
        an.add_argument(f"--{key.replace('_', '-')}", dest=key)
    an.add_argument("--summary", action="store_true", help="print counts, clock fit and expectations")

    bd = sub.add_parser("bound", parents=[common], help="optimal lower bound for one (beta, theta)")
    bd.add_argument("--rho", type=float)
    bd.add_argument("--beta", type=float)
    bd.add_argument("--theta", type=float, help="radians")
    bd.add_argument("--T", type=float, help="interval length, seconds")

    sub.add_parser("sweep", parents=[common], help="bound surface over a (beta, theta) grid")
    sub.add_parser("verify", parents=[common], help="space-like separation checks from [events]")

    rp = sub.add_parser("reproduce", parents=[common], help="table of all reproduced numbers")
    rp.add_argument("--full", action="store_true", help="run the 12-hour closed-loop simulation")
    rp.add_argument("--omega", type=float, help="override Earth's angular velocity (rad/s)")
    rp.set_defaults(out=None)
    return p


COMMANDS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "bound": cmd_bound,
            "sweep": cmd_sweep, "verify": cmd_verify, "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SyncError as exc:
        print(f"sync failure: {exc}", file=sys.stderr)
        return EXIT_SYNC
    except (DomainError, UsageError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

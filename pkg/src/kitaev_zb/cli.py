"""Command-line entry point: ``kitaev-zb simulate|zb-extract|oracle-check``.

Exit codes: 0 success, 2 configuration or input-format error, 3 numerical
runtime error, 4 file I/O error. ``KITAEV_ZB_THREADS`` caps BLAS/FFT threads.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from contextlib import nullcontext
from dataclasses import replace
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .config import ConfigError, RunConfig, load_config
from .drive import make_off_schedule, make_resonant_schedule, make_windowed_schedule, sample_times
from .errors import KitaevZbError
from .observables import TrajectoryRecord, extract_zb, record_trajectory
from .oracle import OracleEvolver, iter_states_oracle
from .spectral import CHUNK_ROWS, iter_states
from .state import SpinorField, delta_packet, gaussian_packet, separated_packet, unwrapped_offsets

log = logging.getLogger("kitaev_zb")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "KITAEV_ZB_THREADS"
TRAJECTORY_HEADER = ("t", "mean_j_particle", "mean_j_hole", "separation", "norm_particle", "norm_hole")
SNAPSHOT_HEADER = ("j", "occupation_signed", "particle_prob", "hole_prob")
COMPARISON_HEADER = ("t", "max_state_diff")
ORACLE_TOL = 1e-8


class CsvFormatError(KitaevZbError, ValueError):
    pass


def fmt(x) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def initial_state(config: RunConfig) -> SpinorField:
    spec, n = config.initial, config.params.n_sites
    if spec.kind == "delta":
        return delta_packet(n, spec.center, spec.spinor)
    if spec.offset:
        return separated_packet(n, spec.center, spec.offset, spec.sigma, spec.spinor)
    return gaussian_packet(n, spec.center, spec.sigma, spec.spinor)


def build_schedule(config: RunConfig):
    spec, params = config.schedule, config.params
    if spec.kind == "resonant":
        return make_resonant_schedule(params, spec.n_periods, spec.offset_ticks)
    if spec.kind == "windowed":
        return make_windowed_schedule(params, spec.on_periods, spec.stop_half_periods,
                                      spec.resume_periods)
    return make_off_schedule()


def _compared(spectral, oracle, diffs: list):
    for (t_s, p_s, h_s), (t_o, p_o, h_o) in zip(spectral, oracle, strict=True):
        if not np.array_equal(t_s, t_o):
            raise RuntimeError("spectral and oracle samples fell out of step")
        diff = np.maximum(np.abs(p_s - p_o).max(axis=-1), np.abs(h_s - h_o).max(axis=-1))
        diffs.append((t_s, diff))
        yield t_s, p_s, h_s


def simulate(config: RunConfig) -> tuple[TrajectoryRecord, np.ndarray | None]:
    """Run the configured evolution; returns the record and, for engine=both, the diffs."""
    state = initial_state(config)
    schedule = build_schedule(config)
    params = config.params
    times = sample_times(schedule, 0.0, config.t_final, config.dt_out)

    diffs: list = []
    if config.engine == "spectral":
        def factory(ts):
            return iter_states(state, params, schedule, ts)
    elif config.engine == "oracle":
        evolver = OracleEvolver(params)

        def factory(ts):
            return iter_states_oracle(state, params, schedule, ts, evolver)
    else:
        evolver = OracleEvolver(params)

        def factory(ts):
            return _compared(iter_states(state, params, schedule, ts, CHUNK_ROWS),
                             iter_states_oracle(state, params, schedule, ts, evolver, CHUNK_ROWS),
                             diffs)

    record = record_trajectory(factory, times, state, snapshot_times=config.snapshots)
    comparison = None
    if diffs:
        t_all = np.concatenate([t for t, _ in diffs])
        d_all = np.concatenate([d for _, d in diffs])
        comparison = np.column_stack([t_all, d_all])[np.isin(t_all, times)]
    return record, comparison


def write_trajectory(path: Path, record: TrajectoryRecord) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER)
        cols = (record.times, record.mean_j_particle, record.mean_j_hole, record.separation,
                record.norm_particle, record.norm_hole)
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])


def write_snapshot(path: Path, snapshot, reference: int) -> None:
    n = snapshot.particle_prob.size
    offsets = unwrapped_offsets(n, reference)
    order = np.argsort(offsets)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_HEADER)
        for i in order:
            w.writerow([str(int(offsets[i])), fmt(snapshot.occupation[i]),
                        fmt(snapshot.particle_prob[i]), fmt(snapshot.hole_prob[i])])


def write_comparison(path: Path, comparison: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARISON_HEADER)
        for t, diff in comparison:
            w.writerow([fmt(t), fmt(diff)])


def run(config: RunConfig) -> int:
    """Simulate and write every configured output file."""
    record, comparison = simulate(config)
    write_trajectory(config.outputs.trajectory, record)
    for i, snap in enumerate(record.snapshots):
        write_snapshot(config.snapshot_path(i), snap, record.reference)
    if comparison is not None:
        write_comparison(config.outputs.comparison, comparison)
    return EXIT_OK


def read_trajectory(path: str | Path) -> TrajectoryRecord:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != TRAJECTORY_HEADER:
        raise CsvFormatError(f"{path}: header must be {','.join(TRAJECTORY_HEADER)}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    except ValueError as exc:
        raise CsvFormatError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != len(TRAJECTORY_HEADER) or data.shape[0] < 3:
        raise CsvFormatError(f"{path}: expected at least 3 rows of {len(TRAJECTORY_HEADER)} columns")
    t, mp, mh, _, n_p, n_h = data.T
    if np.any(np.diff(t) <= 0):
        raise CsvFormatError(f"{path}: time column must be strictly increasing")
    return TrajectoryRecord(t, mp, mh, n_p, n_h)


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return nullcontext()
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring %s=%r (not an integer)", THREADS_ENV, raw)
        return nullcontext()
    return threadpool_limits(limits=max(1, n))


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    if args.engine:
        config = _with_engine(config, args.engine)
    return run(config)


def _with_engine(config: RunConfig, engine: str) -> RunConfig:
    return replace(config, engine=engine)


def _cmd_oracle_check(args) -> int:
    config = _with_engine(load_config(args.config), "both")
    record, comparison = simulate(config)
    write_trajectory(config.outputs.trajectory, record)
    write_comparison(config.outputs.comparison, comparison)
    worst = float(comparison[:, 1].max())
    print(f"max_state_diff={worst:.3e}")
    return EXIT_OK if worst <= args.tol else EXIT_NUMERIC


def _cmd_zb_extract(args) -> int:
    amplitude, period = extract_zb(read_trajectory(args.csv))
    print(f"amplitude={amplitude:.9f} period={period:.9f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kitaev-zb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configuration and write CSV outputs")
    p.add_argument("config", type=Path)
    p.add_argument("--engine", choices=("spectral", "oracle", "both"),
                   help="override the engine named in the config")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("zb-extract", help="measure ZB amplitude and period from a trajectory CSV")
    p.add_argument("csv", type=Path)
    p.set_defaults(func=_cmd_zb_extract)

    p = sub.add_parser("oracle-check", help="run spectral and dense engines side by side")
    p.add_argument("config", type=Path)
    p.add_argument("--tol", type=float, default=ORACLE_TOL)
    p.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        with _thread_limit():
            return args.func(args)
    except (ConfigError, CsvFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KitaevZbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Piecewise-constant schedules for the sign of the hopping amplitude.

Time is counted in integer ticks of one half ZB period, T/2 = pi / (2 (mu + 2 tp)).
Boundary times are only formed as ``tick * half_period`` so that a flip after a
million ticks lands exactly where a flip after one tick would predict.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchUnsupportedError, ScheduleError
from .model import ChainParams, approx_zb_parameters, is_magic

NEAR_MAGIC_TOL = 0.05


@dataclass(frozen=True)
class Schedule:
    """Sign of tp as a right-continuous step function of time.

    ``start_ticks[i]`` is where segment ``i`` begins; its sign ``signs[i]``
    holds until the next start. The final sign persists past ``total_ticks``.
    An empty schedule means the modulation is off (sign +1 throughout).
    """

    start_ticks: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    signs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    half_period: float | None = None
    total_ticks: int = 0

    def __post_init__(self):
        ticks = np.asarray(self.start_ticks, dtype=np.int64)
        signs = np.asarray(self.signs, dtype=np.int8)
        if ticks.shape != signs.shape or ticks.ndim != 1:
            raise ScheduleError("start_ticks and signs must be 1-d and equally long")
        if ticks.size:
            if ticks[0] != 0:
                raise ScheduleError("the first segment must start at tick 0")
            if np.any(np.diff(ticks) <= 0):
                raise ScheduleError("segment start ticks must be strictly increasing")
            if not np.all(np.abs(signs) == 1):
                raise ScheduleError("segment signs must be +1 or -1")
            if self.half_period is None or not self.half_period > 0:
                raise ScheduleError("a non-empty schedule needs a positive half_period")
            if self.total_ticks < ticks[-1]:
                raise ScheduleError("total_ticks ends before the last segment starts")
        ticks.setflags(write=False)
        signs.setflags(write=False)
        object.__setattr__(self, "start_ticks", ticks)
        object.__setattr__(self, "signs", signs)

    def __len__(self):
        return int(self.start_ticks.size)

    @property
    def is_off(self) -> bool:
        return self.start_ticks.size == 0

    def boundary_times(self) -> np.ndarray:
        """Start time of every segment after the first."""
        if self.is_off:
            return np.zeros(0)
        return self.start_ticks[1:] * self.half_period

    def segments_between(self, t0: float, t1: float) -> list[tuple[float, float, int]]:
        """Constant-sign pieces ``(start, end, sign)`` covering [t0, t1]."""
        if t0 < 0:
            raise ScheduleError(f"schedule is undefined before t = 0 (got t0 = {t0!r})")
        if t1 < t0:
            raise ScheduleError("t1 must not precede t0")
        if self.is_off:
            return [(t0, t1, 1)]
        starts = self.start_ticks * self.half_period
        cuts = starts[(starts > t0) & (starts < t1)]
        edges = np.concatenate([[t0], cuts, [t1]])
        idx = np.searchsorted(starts, edges[:-1], side="right") - 1
        signs = self.signs[idx]
        return [(float(a), float(b), int(s)) for a, b, s in zip(edges[:-1], edges[1:], signs)]


def tp_sign_at(schedule: Schedule, t: float) -> int:
    if t < 0:
        raise ScheduleError(f"t must be non-negative, got {t!r}")
    if schedule.is_off:
        return 1
    starts = schedule.start_ticks * schedule.half_period
    idx = int(np.searchsorted(starts, t, side="right")) - 1
    return int(schedule.signs[idx])


def half_period(params: ChainParams) -> float:
    return approx_zb_parameters(params).period / 2.0


def schedule_from_tick_signs(params: ChainParams, tick_signs) -> Schedule:
    """Build a schedule from one sign per half-period tick; runs are merged."""
    tick_signs = np.asarray(tick_signs, dtype=np.int8)
    if tick_signs.size == 0:
        return Schedule()
    if not np.all(np.abs(tick_signs) == 1):
        raise ScheduleError("tick signs must be +1 or -1")
    change = np.flatnonzero(np.diff(tick_signs)) + 1
    starts = np.concatenate([[0], change]).astype(np.int64)
    return Schedule(starts, tick_signs[starts], half_period(params), int(tick_signs.size))


def _alternating(n_ticks: int) -> np.ndarray:
    return np.where(np.arange(n_ticks) % 2, -1, 1).astype(np.int8)


def make_off_schedule() -> Schedule:
    return Schedule()


def make_resonant_schedule(params: ChainParams, n_periods: int, offset_ticks: int = 0) -> Schedule:
    """Flip the sign of tp every half ZB period for ``n_periods`` periods.

    ``offset_ticks`` delays the start of the alternation by that many
    half-periods of unmodulated (+1) evolution.
    """
    if int(n_periods) != n_periods or n_periods < 1:
        raise ScheduleError(f"n_periods must be an integer >= 1, got {n_periods!r}")
    if offset_ticks < 0:
        raise ScheduleError("offset_ticks must be non-negative")
    if not is_magic(params, tol=NEAR_MAGIC_TOL):
        warnings.warn(
            "resonant modulation is only drift-exact at mu = 0, tp = d; "
            f"got mu={params.mu}, tp={params.tp}, d={params.d}",
            stacklevel=2,
        )
    ticks = np.concatenate([np.ones(int(offset_ticks), dtype=np.int8), _alternating(2 * int(n_periods))])
    return schedule_from_tick_signs(params, ticks)


def make_windowed_schedule(params: ChainParams, on_periods: int, stop_half_periods: int,
                           resume_periods: int) -> Schedule:
    """Alternate, pause with tp unflipped for ``stop_half_periods`` ticks, alternate again."""
    counts = {"on_periods": on_periods, "stop_half_periods": stop_half_periods,
              "resume_periods": resume_periods}
    for name, value in counts.items():
        if int(value) != value or value < 0:
            raise ScheduleError(f"{name} must be a non-negative integer, got {value!r}")
    ticks = np.concatenate([
        _alternating(2 * int(on_periods)),
        np.ones(int(stop_half_periods), dtype=np.int8),
        _alternating(2 * int(resume_periods)),
    ])
    if ticks.size == 0:
        return Schedule()
    return schedule_from_tick_signs(params, ticks)


def tick_time(schedule: Schedule, tick: int) -> float:
    if schedule.half_period is None:
        raise BranchUnsupportedError("an off schedule has no tick length")
    return tick * schedule.half_period


def sample_times(schedule: Schedule, t0: float, t1: float, dt_out: float) -> np.ndarray:
    """Output grid t0 + i*dt_out merged with every segment boundary inside [t0, t1].

    Grid points that fall within a hair of a boundary are replaced by the
    boundary itself so flips are sampled exactly.
    """
    if not dt_out > 0:
        raise ScheduleError(f"dt_out must be positive, got {dt_out!r}")
    if t1 < t0:
        raise ScheduleError("t1 must not precede t0")
    snap = 1e-9 * dt_out
    n = int(math.floor((t1 - t0) / dt_out + 1e-9))
    grid = t0 + np.arange(n + 1) * dt_out
    if t1 - grid[-1] > snap:
        grid = np.append(grid, t1)
    else:
        grid[-1] = t1
    bounds = schedule.boundary_times()
    bounds = bounds[(bounds > t0) & (bounds < t1)]
    if bounds.size:
        pos = np.searchsorted(bounds, grid)
        near = np.zeros(grid.shape, dtype=bool)
        for shift in (0, -1):
            idx = np.clip(pos + shift, 0, bounds.size - 1)
            near |= np.abs(grid - bounds[idx]) < snap
        grid = np.union1d(grid[~near], bounds)
    return grid


def walk_schedule(schedule: Schedule, times: np.ndarray):
    """Split sorted sample ``times`` over the constant-sign segments they span.

    Yields ``(start, end, sign, local)`` where ``local`` holds the sample
    times in [start, end), plus ``end`` itself for the final segment.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return
    if np.any(np.diff(times) <= 0):
        raise ScheduleError("sample times must be strictly increasing")
    pieces = schedule.segments_between(float(times[0]), float(times[-1]))
    lo = np.searchsorted(times, [p[0] for p in pieces], side="left")
    hi = np.searchsorted(times, [p[1] for p in pieces], side="left")
    hi[-1] = times.size
    for (start, end, sign), a, b in zip(pieces, lo, hi):
        yield start, end, sign, times[a:b]

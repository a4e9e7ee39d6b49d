import math
import warnings

import numpy as np
import pytest

from conftest import DRIFT_SPINOR
from kitaev_zb.drive import (
    Schedule, half_period, make_off_schedule, make_resonant_schedule, make_windowed_schedule,
    sample_times, schedule_from_tick_signs, tick_time, tp_sign_at, walk_schedule,
)
from kitaev_zb.errors import BranchUnsupportedError, ScheduleError
from kitaev_zb.model import ChainParams
from kitaev_zb.spectral import evolve_scheduled
from kitaev_zb.state import gaussian_packet

MAGIC = ChainParams(0.0, 1.0, 1.0, 256)
HALF = math.pi / 4


def test_half_period():
    assert half_period(MAGIC) == pytest.approx(HALF)
    assert half_period(ChainParams(1.0, 1.0, 0.5, 8)) == pytest.approx(math.pi / 6)
    with pytest.raises(BranchUnsupportedError):
        half_period(ChainParams(-3.0, 1.0, 0.5, 8))


def test_resonant_signs():
    s = make_resonant_schedule(MAGIC, 3)
    np.testing.assert_array_equal(s.start_ticks, np.arange(6))
    np.testing.assert_array_equal(s.signs, [1, -1, 1, -1, 1, -1])
    assert s.total_ticks == 6


def test_resonant_offset_prefix_merges():
    s = make_resonant_schedule(MAGIC, 2, offset_ticks=3)
    np.testing.assert_array_equal(s.start_ticks, [0, 4, 5, 6])
    np.testing.assert_array_equal(s.signs, [1, -1, 1, -1])


def test_windowed_signs():
    s = make_windowed_schedule(MAGIC, 1, 4, 1)
    # ticks: + - | + + + + | + -  -> merged
    np.testing.assert_array_equal(s.start_ticks, [0, 1, 2, 7])
    np.testing.assert_array_equal(s.signs, [1, -1, 1, -1])
    assert s.total_ticks == 8
    assert make_windowed_schedule(MAGIC, 0, 0, 0).is_off


def test_tp_sign_at_is_right_continuous():
    s = make_resonant_schedule(MAGIC, 1)
    assert tp_sign_at(s, 0.0) == 1
    assert tp_sign_at(s, np.nextafter(HALF, 0)) == 1
    assert tp_sign_at(s, HALF) == -1
    assert tp_sign_at(s, 2 * HALF) == -1
    assert tp_sign_at(s, 100.0) == -1
    assert tp_sign_at(make_off_schedule(), 3.0) == 1
    with pytest.raises(ScheduleError):
        tp_sign_at(s, -1e-9)


def test_boundaries_exact_after_a_million_ticks():
    n = 500_000
    s = make_resonant_schedule(MAGIC, n)
    b = s.boundary_times()
    assert b.size == 2 * n - 1
    ticks = np.arange(1, 2 * n)
    np.testing.assert_array_equal(b, ticks * s.half_period)
    assert tick_time(s, 2 * n - 1) == b[-1]
    assert tp_sign_at(s, b[-1]) == -1
    assert tp_sign_at(s, b[-2]) == 1


def test_schedule_validation():
    with pytest.raises(ScheduleError):
        Schedule(np.array([1]), np.array([1]), 1.0, 1)
    with pytest.raises(ScheduleError):
        Schedule(np.array([0, 0]), np.array([1, -1]), 1.0, 1)
    with pytest.raises(ScheduleError):
        Schedule(np.array([0]), np.array([2]), 1.0, 1)
    with pytest.raises(ScheduleError):
        Schedule(np.array([0]), np.array([1]), None, 1)
    with pytest.raises(ScheduleError):
        make_resonant_schedule(MAGIC, 0)
    with pytest.raises(ScheduleError):
        make_windowed_schedule(MAGIC, 1, -1, 1)
    with pytest.raises(ScheduleError):
        schedule_from_tick_signs(MAGIC, [1, 0])


def test_resonant_warns_away_from_magic():
    with pytest.warns(UserWarning):
        make_resonant_schedule(ChainParams(0.5, 1.0, 0.5, 8), 1)


def test_sample_times_include_boundaries():
    s = make_resonant_schedule(MAGIC, 2)
    t = sample_times(s, 0.0, 4 * HALF, 0.1)
    for b in s.boundary_times():
        assert b in t
    assert t[0] == 0.0 and t[-1] == 4 * HALF
    assert np.all(np.diff(t) > 0)
    with pytest.raises(ScheduleError):
        sample_times(s, 0.0, 1.0, 0.0)


def test_walk_schedule_partitions_samples():
    s = make_resonant_schedule(MAGIC, 2)
    t = sample_times(s, 0.0, 5.0, 0.05)
    pieces = list(walk_schedule(s, t))
    np.testing.assert_array_equal(np.concatenate([p[3] for p in pieces]), t)
    assert [p[2] for p in pieces] == [1, -1, 1, -1]
    assert pieces[-1][1] == 5.0


def _drift(n_periods, offset_ticks=0):
    state = gaussian_packet(256, 128, 5.0, DRIFT_SPINOR)
    sched = make_resonant_schedule(MAGIC, n_periods, offset_ticks)
    end = sched.total_ticks * HALF
    return evolve_scheduled(state, MAGIC, sched, 0.0, end, HALF / 8)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_drift_law_four_sites_per_period(n):
    rec = _drift(n)
    for m in range(n + 1):
        i = int(np.flatnonzero(rec.times == tick_time(make_resonant_schedule(MAGIC, n), 2 * m))[0])
        assert rec.center_separation[i] == pytest.approx(4 * m, abs=1e-9)
    np.testing.assert_allclose(rec.total_norm, 1.0, atol=1e-12)


def test_one_tick_offset_reverses_drift():
    rec = _drift(3, offset_ticks=1)
    # a free half period leaves the packets 2 sites apart, then they close at 4 per period
    first = rec.center_separation[np.argmin(np.abs(rec.times - HALF))]
    assert first == pytest.approx(2.0, abs=1e-9)
    assert rec.center_separation[-1] - first == pytest.approx(-12.0, abs=1e-9)


def _windowed(stop):
    state = gaussian_packet(256, 128, 5.0, DRIFT_SPINOR)
    sched = make_windowed_schedule(MAGIC, 3, stop, 4)

    def at(tick):
        rec = evolve_scheduled(state, MAGIC, sched, 0.0, tick_time(sched, tick), 0.5)
        return rec.center_separation[-1]
    return at


def test_windowed_whole_period_pause_keeps_direction():
    at = _windowed(4)
    assert at(6) == pytest.approx(12.0, abs=1e-9)
    assert at(10) == pytest.approx(12.0, abs=1e-9)
    assert at(14) == pytest.approx(20.0, abs=1e-9)


def test_windowed_half_integer_pause_reverses():
    at = _windowed(5)
    assert at(6) == pytest.approx(12.0, abs=1e-9)
    assert at(11) == pytest.approx(14.0, abs=1e-9)
    assert at(15) == pytest.approx(6.0, abs=1e-9)
    assert abs(at(18)) <= 1e-9

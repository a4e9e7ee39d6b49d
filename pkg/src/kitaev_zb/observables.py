"""Observables of lattice states and of recorded trajectories.

Mean positions use the weighting where each component's position is summed
against its own (unnormalised) probability, so a component that carries half
the norm contributes half its displacement. ``center_*`` quantities divide
that by the component norm and give the packet centre instead.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .errors import SeamProximityError, SeamProximityWarning, ZbExtractionError
from .state import SpinorField, unwrapped_offsets

SEAM_BAND = 2
SEAM_ERROR_WEIGHT = 0.01
SEAM_WARN_WEIGHT = 1e-12


def _seam_weight(prob: np.ndarray, x: np.ndarray, n_sites: int) -> np.ndarray:
    band = np.abs(x + 0.5) >= n_sites // 2 - SEAM_BAND
    return prob[..., band].sum(axis=-1)


def _check_seam(weight) -> None:
    worst = float(np.max(weight)) if np.size(weight) else 0.0
    if worst > SEAM_ERROR_WEIGHT:
        raise SeamProximityError(
            f"{worst:.3g} of the norm lies within {SEAM_BAND} sites of the periodic seam"
        )
    if worst > SEAM_WARN_WEIGHT:
        warnings.warn(
            f"{worst:.3g} of the norm lies within {SEAM_BAND} sites of the periodic seam; "
            "unwrapped mean positions are unreliable",
            SeamProximityWarning, stacklevel=3,
        )


def mean_positions(state: SpinorField, reference: int | None = None,
                   normalized: bool = False) -> tuple[float, float]:
    """Particle and hole mean positions relative to ``reference``.

    Parameters
    ----------
    state : SpinorField
    reference : int, optional
        Site that coordinates are unwrapped around; defaults to ``state.origin``.
    normalized : bool
        Divide each component by its own norm (packet centre) instead of
        weighting by it.
    """
    ref = state.origin if reference is None else int(reference)
    x = unwrapped_offsets(state.n_sites, ref)
    pp = np.abs(state.particle) ** 2
    hp = np.abs(state.hole) ** 2
    _check_seam(_seam_weight(pp + hp, x, state.n_sites))
    j_e, j_h = float(pp @ x), float(hp @ x)
    if normalized:
        n_e, n_h = pp.sum(), hp.sum()
        j_e = j_e / n_e if n_e > 0 else float("nan")
        j_h = j_h / n_h if n_h > 0 else float("nan")
    return j_e, j_h


def profile_fidelity(a: SpinorField, b: SpinorField) -> float:
    """|<a|b>| over both components; insensitive to a global phase."""
    if a.n_sites != b.n_sites:
        raise ValueError(f"dimension mismatch: {a.n_sites} vs {b.n_sites} sites")
    return float(abs(np.vdot(a.stacked(), b.stacked())))


def occupation_profile(state: SpinorField) -> np.ndarray:
    """Signed occupation |u_j|^2 - |v_j|^2; holes count negative."""
    return np.abs(state.particle) ** 2 - np.abs(state.hole) ** 2


@dataclass
class Snapshot:
    time: float
    particle_prob: np.ndarray
    hole_prob: np.ndarray

    @property
    def occupation(self) -> np.ndarray:
        return self.particle_prob - self.hole_prob


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    mean_j_particle: np.ndarray
    mean_j_hole: np.ndarray
    norm_particle: np.ndarray
    norm_hole: np.ndarray
    reference: int = 0
    snapshots: list[Snapshot] = field(default_factory=list)
    final_state: SpinorField | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def separation(self) -> np.ndarray:
        return self.mean_j_particle - self.mean_j_hole

    @property
    def total_norm(self) -> np.ndarray:
        return self.norm_particle + self.norm_hole

    @property
    def center_particle(self) -> np.ndarray:
        return self.mean_j_particle / self.norm_particle

    @property
    def center_hole(self) -> np.ndarray:
        return self.mean_j_hole / self.norm_hole

    @property
    def center_separation(self) -> np.ndarray:
        """Distance between the particle and hole packet centres."""
        return self.center_particle - self.center_hole


def record_trajectory(iter_factory, times, initial: SpinorField, snapshot_times=(),
                      reference: int | None = None) -> TrajectoryRecord:
    """Drive a state iterator over ``times`` and collect observables.

    ``iter_factory(eval_times)`` must yield ``(times, particle, hole)`` batches
    covering ``eval_times`` in order, with ``initial`` as the state at
    ``eval_times[0]``.
    """
    times = np.asarray(times, dtype=float)
    snaps = np.unique(np.asarray(snapshot_times, dtype=float))
    if snaps.size and (snaps[0] < times[0] or snaps[-1] > times[-1]):
        raise ValueError(
            f"snapshot times must lie in [{times[0]}, {times[-1]}], got {snaps.tolist()}"
        )
    eval_times = np.union1d(times, snaps)
    ref = initial.origin if reference is None else int(reference)
    n = initial.n_sites
    x = unwrapped_offsets(n, ref)

    cols = {key: [] for key in ("mp", "mh", "np", "nh", "seam")}
    snapshots = []
    last = None
    for chunk, particle, hole in iter_factory(eval_times):
        pp = np.abs(particle) ** 2
        hp = np.abs(hole) ** 2
        keep = np.isin(chunk, times)
        cols["mp"].append(pp[keep] @ x)
        cols["mh"].append(hp[keep] @ x)
        cols["np"].append(pp[keep].sum(axis=-1))
        cols["nh"].append(hp[keep].sum(axis=-1))
        cols["seam"].append(_seam_weight(pp + hp, x, n))
        for i in np.flatnonzero(np.isin(chunk, snaps)):
            snapshots.append(Snapshot(float(chunk[i]), pp[i].copy(), hp[i].copy()))
        last = (particle[-1], hole[-1])
    _check_seam(np.concatenate(cols["seam"]))

    final = SpinorField(last[0].copy(), last[1].copy(), initial.origin)
    return TrajectoryRecord(
        times=times,
        mean_j_particle=np.concatenate(cols["mp"]),
        mean_j_hole=np.concatenate(cols["mh"]),
        norm_particle=np.concatenate(cols["np"]),
        norm_hole=np.concatenate(cols["nh"]),
        reference=ref,
        snapshots=snapshots,
        final_state=final,
    )


def _parabola_vertex(y: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vertex offset (in samples) and height of the parabola through y[i-1:i+2]."""
    y0, y1, y2 = y[idx - 1], y[idx], y[idx + 1]
    curv = y0 - 2.0 * y1 + y2
    safe = np.where(curv == 0, 1.0, curv)
    shift = np.where(curv == 0, 0.0, 0.5 * (y0 - y2) / safe)
    height = y1 - 0.25 * (y0 - y2) * shift
    return shift, height


def _interior_extrema(y: np.ndarray, prominence: float):
    peaks, _ = find_peaks(y, prominence=prominence)
    peaks = peaks[(peaks > 0) & (peaks < y.size - 1)]
    return peaks


def separation_peaks(times, series) -> tuple[np.ndarray, np.ndarray]:
    """Times and heights of the local maxima of ``series``, refined by 3-point fits.

    Assumes a uniform sampling interval around each peak.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(series, dtype=float)
    if y.size < 3:
        return np.zeros(0), np.zeros(0)
    spread = float(np.ptp(y))
    prominence = max(1e-9, 1e-3 * spread)
    idx = _interior_extrema(y, prominence)
    if idx.size == 0:
        return np.zeros(0), np.zeros(0)
    shift, height = _parabola_vertex(y, idx)
    step = 0.5 * (t[idx + 1] - t[idx - 1])
    return t[idx] + shift * step, height


def extract_zb(record: TrajectoryRecord) -> tuple[float, float]:
    """ZB amplitude and period from the separation series of an unmodulated run.

    The amplitude is the peak-to-trough swing of the separation (for packets
    that start on top of each other this is simply its maximum). The period
    is the mean spacing of the interpolated maxima.
    """
    t = record.times
    y = record.separation
    peak_t, peak_y = separation_peaks(t, y)
    if peak_t.size < 2:
        raise ZbExtractionError(
            f"found {peak_t.size} separation peak(s); need at least 2 to measure a period"
        )
    _, trough_y = separation_peaks(t, -y)
    low = min(float(y.min()), float((-trough_y).min())) if trough_y.size else float(y.min())
    amplitude = float(peak_y.max()) - low
    period = float(np.mean(np.diff(peak_t)))
    return amplitude, period

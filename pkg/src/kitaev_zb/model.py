"""Kitaev chain parameters and the per-momentum two-band structure.

Units: hbar = 1, lattice constant = 1. The Bogoliubov-de Gennes block acting on
the paired spinor (particle at k, hole at -k) is

    H_eff(k) = xi(k) sigma_z - 2 d sin(k) sigma_y,

with xi(k) = -mu - 2 tp cos(k) and off-diagonal entry gap(k) = 2i d sin(k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BranchUnsupportedError

# strength below this (relative to the largest energy scale) counts as a gap closing
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class ChainParams:
    """Periodic Kitaev chain: chemical potential, hopping, pairing, length."""

    mu: float
    tp: float
    d: float
    n_sites: int

    def __post_init__(self):
        for name in ("mu", "tp", "d"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not self.d > 0:
            raise ValueError(f"d must be positive, got {self.d!r}")
        if int(self.n_sites) != self.n_sites or self.n_sites < 8 or self.n_sites % 2:
            raise ValueError(f"n_sites must be an even integer >= 8, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))

    def with_tp_sign(self, tp_sign: int) -> ChainParams:
        """Copy with the hopping multiplied by ``tp_sign`` (+1 or -1)."""
        if tp_sign not in (1, -1):
            raise ValueError(f"tp_sign must be +1 or -1, got {tp_sign!r}")
        return self if tp_sign == 1 else replace(self, tp=-self.tp)

    @property
    def energy_scale(self) -> float:
        return max(abs(self.mu), abs(self.tp), self.d)


def brillouin_grid(n_sites: int) -> np.ndarray:
    """Zone-centred grid k_m = 2 pi m / N - pi, m = 0..N-1."""
    return 2.0 * np.pi * np.arange(n_sites) / n_sites - np.pi


def xi(params: ChainParams, k):
    """Normal-state dispersion -mu - 2 tp cos(k)."""
    return -params.mu - 2.0 * params.tp * np.cos(k)


def gap(params: ChainParams, k):
    """Pairing function 2i d sin(k); odd in k."""
    return 2j * params.d * np.sin(k)


@dataclass(frozen=True)
class EffectiveField:
    """Pseudo-magnetic field seen by the (particle, hole) spinor at momentum k.

    ``axis`` is a unit vector (n_x, n_y, n_z) with n_x = 0. Where the field
    vanishes the axis is the zero vector and ``degenerate`` is set.
    """

    strength: np.ndarray | float
    axis: np.ndarray
    degenerate: np.ndarray | bool


def effective_field(params: ChainParams, k) -> EffectiveField:
    k_arr = np.asarray(k, dtype=float)
    h_z = xi(params, k_arr)
    h_y = -2.0 * params.d * np.sin(k_arr)
    strength = np.hypot(h_z, h_y)
    degenerate = strength <= DEGENERATE_RTOL * params.energy_scale
    safe = np.where(degenerate, 1.0, strength)
    n_y = np.where(degenerate, 0.0, h_y / safe)
    n_z = np.where(degenerate, 0.0, h_z / safe)
    axis = np.stack([np.zeros_like(n_y), n_y, n_z], axis=-1)
    if k_arr.ndim == 0:
        return EffectiveField(float(strength), axis, bool(degenerate))
    return EffectiveField(strength, axis, degenerate)


def h_eff(params: ChainParams, k) -> np.ndarray:
    """The 2x2 block [[xi, gap], [gap*, -xi]], broadcast over ``k``."""
    k_arr = np.asarray(k, dtype=float)
    e = xi(params, k_arr)
    delta = gap(params, k_arr)
    out = np.empty(k_arr.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = e
    out[..., 0, 1] = delta
    out[..., 1, 0] = np.conj(delta)
    out[..., 1, 1] = -e
    return out


def is_magic(params: ChainParams, tol: float = 1e-12) -> bool:
    """True when mu = 0 and tp = d to relative tolerance ``tol``.

    At this point the field strength equals 2d for every k, so all momentum
    components precess in phase.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return abs(params.mu) <= tol * params.d and abs(params.tp - params.d) <= tol * params.d


@dataclass(frozen=True)
class ZbPrediction:
    omega: float
    period: float
    amplitude: float


def approx_zb_parameters(params: ChainParams) -> ZbPrediction:
    """Small-k estimates of the ZB angular frequency, period and amplitude.

    Raises
    ------
    BranchUnsupportedError
        If mu + 2 tp <= 0.
    """
    m = params.mu + 2.0 * params.tp
    if not m > 0:
        raise BranchUnsupportedError(
            f"mu + 2*tp = {m!r} <= 0; only the mu + 2*tp > 0 branch is supported"
        )
    return ZbPrediction(omega=2.0 * m, period=math.pi / m, amplitude=2.0 * params.d / m)

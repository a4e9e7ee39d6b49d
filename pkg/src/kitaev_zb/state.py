"""Lattice states and the paired momentum representation.

A :class:`SpinorField` holds a particle amplitude and a hole amplitude on each
site of a periodic chain. Hole amplitudes are indexed so that the hole at array
position ``j`` pairs with momentum ``-k`` when the particle at ``j`` carries
``k``; in this bookkeeping particle and hole wavepackets drift in opposite
directions under the Kitaev Hamiltonian. The pairing is taken about the field's
``origin`` site, which the packet factories set to the packet centre.

Fourier convention (``o`` = origin)::

    f(k) = N^{-1/2} sum_j u_j exp(+i k (j - o))

and the mode spinor at ``k`` is ``(f(k), h(-k))`` with ``h`` the same transform
of the hole array.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import brillouin_grid

SPINOR_NORM_TOL = 1e-12


@dataclass
class SpinorField:
    particle: np.ndarray
    hole: np.ndarray
    origin: int = 0

    def __post_init__(self):
        self.particle = np.asarray(self.particle, dtype=complex)
        self.hole = np.asarray(self.hole, dtype=complex)
        if self.particle.ndim != 1 or self.particle.shape != self.hole.shape:
            raise ValueError("particle and hole must be 1-d arrays of equal length")
        self.origin = int(self.origin) % self.n_sites

    @property
    def n_sites(self) -> int:
        return self.particle.shape[0]

    def norms(self) -> tuple[float, float]:
        return (float(np.vdot(self.particle, self.particle).real),
                float(np.vdot(self.hole, self.hole).real))

    def norm(self) -> float:
        return sum(self.norms())

    def stacked(self) -> np.ndarray:
        """The 2N vector (particle; hole)."""
        return np.concatenate([self.particle, self.hole])

    def copy(self) -> SpinorField:
        return SpinorField(self.particle.copy(), self.hole.copy(), self.origin)


@dataclass
class KPairedField:
    """Mode spinors ``modes[m] = (f(k_m), h(-k_m))`` on the zone-centred grid."""

    modes: np.ndarray
    origin: int = 0

    def __post_init__(self):
        self.modes = np.asarray(self.modes, dtype=complex)
        if self.modes.ndim != 2 or self.modes.shape[1] != 2:
            raise ValueError("modes must have shape (N, 2)")

    @property
    def n_sites(self) -> int:
        return self.modes.shape[0]

    @property
    def k(self) -> np.ndarray:
        return brillouin_grid(self.n_sites)

    def norm(self) -> float:
        return float(np.vdot(self.modes, self.modes).real)


def _check_spinor(spinor) -> tuple[complex, complex]:
    a, b = (complex(c) for c in spinor)
    total = abs(a) ** 2 + abs(b) ** 2
    if abs(total - 1.0) > SPINOR_NORM_TOL:
        raise ValueError(f"spinor (a, b) must satisfy |a|^2 + |b|^2 = 1, got {total!r}")
    return a, b


def _check_site(n_sites: int, site: int) -> int:
    if int(site) != site or not 0 <= site < n_sites:
        raise ValueError(f"site index must be an integer in [0, {n_sites}), got {site!r}")
    return int(site)


def unwrapped_offsets(n_sites: int, reference: int) -> np.ndarray:
    """Signed distance of every site from ``reference`` in [-N/2, N/2)."""
    j = np.arange(n_sites)
    return (j - reference + n_sites // 2) % n_sites - n_sites // 2


def _gaussian(n_sites: int, center: int, sigma: float) -> np.ndarray:
    # |G|^2 is a discrete normal profile with standard deviation ~sigma
    x = unwrapped_offsets(n_sites, center)
    g = np.exp(-(x / (2.0 * sigma)) ** 2)
    return g / np.linalg.norm(g)


def _check_sigma(n_sites: int, sigma: float) -> float:
    sigma = float(sigma)
    if not 0 < sigma < n_sites / 8:
        raise ValueError(f"sigma must lie in (0, N/8) = (0, {n_sites / 8}), got {sigma!r}")
    return sigma


def gaussian_packet(n_sites: int, center: int, sigma: float, spinor) -> SpinorField:
    """Product state G(j - center) (a, b) with zero central momentum."""
    a, b = _check_spinor(spinor)
    center = _check_site(n_sites, center)
    sigma = _check_sigma(n_sites, sigma)
    g = _gaussian(n_sites, center, sigma)
    return SpinorField(a * g, b * g, origin=center)


def delta_packet(n_sites: int, site: int, spinor) -> SpinorField:
    a, b = _check_spinor(spinor)
    site = _check_site(n_sites, site)
    particle = np.zeros(n_sites, dtype=complex)
    hole = np.zeros(n_sites, dtype=complex)
    particle[site] = a
    hole[site] = b
    return SpinorField(particle, hole, origin=site)


def separated_packet(n_sites: int, center: int, offset: int, sigma: float, spinor) -> SpinorField:
    """Particle Gaussian at ``center + offset`` and hole Gaussian at ``center - offset``.

    Both components share one Gaussian profile and the pairing origin stays at
    ``center``, so every mode spinor is proportional to ``spinor``.
    """
    a, b = _check_spinor(spinor)
    center = _check_site(n_sites, center)
    sigma = _check_sigma(n_sites, sigma)
    offset = int(offset)
    if abs(offset) + 4 * sigma >= n_sites // 2 - 2:
        raise ValueError("separated packets would overlap the periodic seam")
    particle = a * _gaussian(n_sites, (center + offset) % n_sites, sigma)
    hole = b * _gaussian(n_sites, (center - offset) % n_sites, sigma)
    return SpinorField(particle, hole, origin=center)


def _site_to_k(x: np.ndarray, origin: int) -> np.ndarray:
    n = x.shape[-1]
    k = brillouin_grid(n)
    alternating = np.where(np.arange(n) % 2, -1.0, 1.0)
    return np.fft.ifft(alternating * x, axis=-1, norm="ortho") * np.exp(-1j * k * origin)


def _k_to_site(f: np.ndarray, origin: int) -> np.ndarray:
    n = f.shape[-1]
    k = brillouin_grid(n)
    alternating = np.where(np.arange(n) % 2, -1.0, 1.0)
    return alternating * np.fft.fft(f * np.exp(1j * k * origin), axis=-1, norm="ortho")


def _negate_k(values: np.ndarray) -> np.ndarray:
    # k_m -> -k_m is m -> (N - m) mod N on the zone-centred grid
    n = values.shape[-1]
    return values[..., (-np.arange(n)) % n]


def paired_modes(particle: np.ndarray, hole: np.ndarray, origin: int) -> tuple[np.ndarray, np.ndarray]:
    """Batched forward transform; returns (f(k), h(-k)) along the last axis."""
    return _site_to_k(particle, origin), _negate_k(_site_to_k(hole, origin))


def paired_sites(f: np.ndarray, h_neg: np.ndarray, origin: int) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`paired_modes`."""
    return _k_to_site(f, origin), _k_to_site(_negate_k(h_neg), origin)


def to_k_paired(field: SpinorField) -> KPairedField:
    f, h_neg = paired_modes(field.particle, field.hole, field.origin)
    return KPairedField(np.stack([f, h_neg], axis=-1), origin=field.origin)


def from_k_paired(kfield: KPairedField) -> SpinorField:
    particle, hole = paired_sites(kfield.modes[:, 0], kfield.modes[:, 1], kfield.origin)
    return SpinorField(particle, hole, origin=kfield.origin)

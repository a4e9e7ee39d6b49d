"""Brute-force real-space propagation by dense diagonalisation.

The Bogoliubov-de Gennes matrix is assembled directly from the lattice
Hamiltonian

    H = -mu sum c_j^+ c_j - sum (tp c_j^+ c_{j+1} + h.c.) - sum (d c_j^+ c_{j+1}^+ + h.c.)

on a ring, in the basis (u_j; v_j) where v_j multiplies c_j. No Fourier
transform is used anywhere in this module. A :class:`SpinorField` stores its
hole amplitudes reflected about ``origin`` (see :mod:`kitaev_zb.state`), so the
only bridge is the site permutation ``j -> 2*origin - j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drive import Schedule, sample_times, walk_schedule
from .errors import OracleDimensionError
from .model import ChainParams
from .observables import TrajectoryRecord, record_trajectory
from .state import SpinorField

MAX_ORACLE_SITES = 2048


@dataclass(frozen=True)
class BdgMatrix:
    """2N x 2N BdG matrix in the lattice basis (particle sites; hole sites)."""

    h: np.ndarray
    n_sites: int

    def blocks(self):
        n = self.n_sites
        return self.h[:n, :n], self.h[:n, n:], self.h[n:, :n], self.h[n:, n:]

    def in_field_basis(self, origin: int) -> np.ndarray:
        """The same operator acting on SpinorField.stacked() vectors."""
        perm = _field_permutation(self.n_sites, origin)
        return self.h[np.ix_(perm, perm)]


def _reflect(n_sites: int, origin: int) -> np.ndarray:
    return (2 * origin - np.arange(n_sites)) % n_sites


def _field_permutation(n_sites: int, origin: int) -> np.ndarray:
    # lattice index of each stacked SpinorField entry
    return np.concatenate([np.arange(n_sites), n_sites + _reflect(n_sites, origin)])


def build_bdg_matrix(params: ChainParams, tp_sign: int = 1) -> BdgMatrix:
    n = params.n_sites
    tp = params.with_tp_sign(tp_sign).tp
    j = np.arange(n)
    right = (j + 1) % n

    hop = np.zeros((n, n))
    hop[j, j] = -params.mu
    hop[j, right] = -tp
    hop[right, j] = -tp

    # c_j^+ c_{j+1}^+ with amplitude -d, written antisymmetrically
    pair = np.zeros((n, n))
    pair[j, right] = -params.d
    pair[right, j] = params.d

    h = np.zeros((2 * n, 2 * n), dtype=complex)
    h[:n, :n] = hop
    h[:n, n:] = pair
    h[n:, :n] = -pair.conj()
    h[n:, n:] = -hop.conj()
    return BdgMatrix(h, n)


class OracleEvolver:
    """Cached eigendecompositions of the BdG matrix for both signs of tp."""

    def __init__(self, params: ChainParams):
        if params.n_sites > MAX_ORACLE_SITES:
            raise OracleDimensionError(
                f"n_sites = {params.n_sites} exceeds the dense-oracle limit of {MAX_ORACLE_SITES}"
            )
        self.params = params
        self._eig = {}

    def eig(self, tp_sign: int):
        if tp_sign not in self._eig:
            self._eig[tp_sign] = np.linalg.eigh(build_bdg_matrix(self.params, tp_sign).h)
        return self._eig[tp_sign]

    def propagate(self, lattice_vec: np.ndarray, tp_sign: int, taus) -> np.ndarray:
        """exp(-i H tau) applied to a lattice-basis vector; rows follow ``taus``."""
        energies, vectors = self.eig(tp_sign)
        coeffs = vectors.conj().T @ lattice_vec
        phases = np.exp(-1j * np.outer(np.asarray(taus, dtype=float), energies))
        return (phases * coeffs) @ vectors.T


def _to_lattice(state: SpinorField) -> np.ndarray:
    out = np.empty(2 * state.n_sites, dtype=complex)
    out[_field_permutation(state.n_sites, state.origin)] = state.stacked()
    return out


def _from_lattice(vecs: np.ndarray, n_sites: int, origin: int):
    stacked = vecs[..., _field_permutation(n_sites, origin)]
    return stacked[..., :n_sites], stacked[..., n_sites:]


def _check(state: SpinorField, params: ChainParams):
    if state.n_sites != params.n_sites:
        raise ValueError(f"state has {state.n_sites} sites but params.n_sites = {params.n_sites}")


def evolve_oracle(state: SpinorField, params: ChainParams, tp_sign: int, t: float,
                  evolver: OracleEvolver | None = None) -> SpinorField:
    """exp(-i H_BdG t) applied to ``state`` by full diagonalisation."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    _check(state, params)
    evolver = evolver or OracleEvolver(params)
    vec = evolver.propagate(_to_lattice(state), tp_sign, [t])[0]
    particle, hole = _from_lattice(vec, state.n_sites, state.origin)
    return SpinorField(particle, hole, state.origin)


def iter_states_oracle(state: SpinorField, params: ChainParams, schedule: Schedule, times,
                       evolver: OracleEvolver | None = None, chunk_rows: int = 512):
    _check(state, params)
    evolver = evolver or OracleEvolver(params)
    vec = _to_lattice(state)
    for start, end, sign, local in walk_schedule(schedule, times):
        for i in range(0, local.size, chunk_rows):
            chunk = local[i:i + chunk_rows]
            vecs = evolver.propagate(vec, sign, chunk - start)
            particle, hole = _from_lattice(vecs, state.n_sites, state.origin)
            yield chunk, particle, hole
        vec = evolver.propagate(vec, sign, [end - start])[0]


def evolve_scheduled_oracle(state: SpinorField, params: ChainParams, schedule: Schedule,
                            t0: float, t1: float, dt_out: float, snapshot_times=(),
                            reference: int | None = None) -> TrajectoryRecord:
    evolver = OracleEvolver(params)
    times = sample_times(schedule, t0, t1, dt_out)
    return record_trajectory(
        lambda ts: iter_states_oracle(state, params, schedule, ts, evolver),
        times, state, snapshot_times=snapshot_times, reference=reference,
    )

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DRIFT_SPINOR, R2, random_field
from kitaev_zb.state import (
    KPairedField, SpinorField, delta_packet, from_k_paired, gaussian_packet, separated_packet,
    to_k_paired, unwrapped_offsets,
)

N = 64


@pytest.mark.parametrize("spinor", [DRIFT_SPINOR, (1, 0), (0, 1j), (0.6, 0.8j)])
def test_gaussian_component_norms(spinor):
    s = gaussian_packet(N, 32, 3.0, spinor)
    n_e, n_h = s.norms()
    assert n_e == pytest.approx(abs(spinor[0]) ** 2, abs=1e-14)
    assert n_h == pytest.approx(abs(spinor[1]) ** 2, abs=1e-14)
    assert s.origin == 32


def test_particle_only_spinor_leaves_hole_empty():
    s = gaussian_packet(N, 10, 2.0, (1, 0))
    assert np.all(s.hole == 0)


def test_gaussian_width_convention():
    # |G|^2 is a normal profile of standard deviation sigma
    s = gaussian_packet(256, 128, 6.0, (1, 0))
    x = unwrapped_offsets(256, 128)
    prob = np.abs(s.particle) ** 2
    assert prob @ x == pytest.approx(0.0, abs=1e-14)
    assert math.sqrt(prob @ x ** 2) == pytest.approx(6.0, rel=1e-10)


def test_gaussian_transform_real_positive_even():
    s = gaussian_packet(N, 20, 0.8, (1, 0))  # narrow, so no k-tail underflows
    f = to_k_paired(s).modes[:, 0]
    assert np.max(np.abs(f.imag)) < 1e-14
    assert np.all(f.real > 0)
    m = np.arange(1, N)
    np.testing.assert_allclose(f[m], f[N - m], atol=1e-14)


def test_delta_transform_is_flat():
    s = delta_packet(N, 17, DRIFT_SPINOR)
    modes = to_k_paired(s).modes
    np.testing.assert_allclose(np.abs(modes) ** 2, 1 / (2 * N), atol=1e-15)
    # every mode spinor is proportional to (1, -1)
    np.testing.assert_allclose(modes[:, 0], -modes[:, 1], atol=1e-15)
    np.testing.assert_allclose(modes[:, 0], R2 / math.sqrt(N), atol=1e-15)


def test_delta_packet_example():
    s = delta_packet(8, 3, (0.6, 0.8))
    assert s.particle[3] == 0.6
    assert s.hole[3] == 0.8
    assert s.norm() == pytest.approx(1.0)
    assert np.count_nonzero(s.particle) == 1


@pytest.mark.parametrize("offset", [0, 5, 20])
def test_separated_packet_modes_align_with_spinor(offset):
    a, b = 0.6, 0.8j
    s = separated_packet(256, 128, offset, 4.0, (a, b))
    x = unwrapped_offsets(256, 128)
    n_e, n_h = s.norms()
    assert (np.abs(s.particle) ** 2 @ x) / n_e == pytest.approx(offset, abs=1e-12)
    assert (np.abs(s.hole) ** 2 @ x) / n_h == pytest.approx(-offset, abs=1e-12)
    modes = to_k_paired(s).modes
    np.testing.assert_allclose(b * modes[:, 0], a * modes[:, 1], atol=1e-14)


def test_separated_packet_rejects_seam():
    with pytest.raises(ValueError):
        separated_packet(64, 32, 25, 2.0, DRIFT_SPINOR)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), origin=st.integers(0, 63))
def test_round_trip(seed, origin):
    s = random_field(np.random.default_rng(seed), 64, origin)
    back = from_k_paired(to_k_paired(s))
    np.testing.assert_allclose(back.particle, s.particle, atol=1e-13)
    np.testing.assert_allclose(back.hole, s.hole, atol=1e-13)
    assert back.origin == s.origin


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_transform_is_unitary(seed):
    s = random_field(np.random.default_rng(seed), 64, 7)
    assert to_k_paired(s).norm() == pytest.approx(s.norm(), abs=1e-13)


def test_plane_wave_modes_translate_particle_and_hole_oppositely():
    k = KPairedField(np.zeros((N, 2)), origin=30).k
    modes = np.stack([np.exp(2j * k), -np.exp(2j * k)], axis=-1) / math.sqrt(2 * N)
    s = from_k_paired(KPairedField(modes, origin=30))
    expect_p = np.zeros(N)
    expect_p[32] = R2
    expect_h = np.zeros(N)
    expect_h[28] = -R2
    np.testing.assert_allclose(s.particle, expect_p, atol=1e-14)
    np.testing.assert_allclose(s.hole, expect_h, atol=1e-14)


def test_zero_field():
    s = SpinorField(np.zeros(16), np.zeros(16))
    assert to_k_paired(s).norm() == 0.0
    assert from_k_paired(to_k_paired(s)).norm() == 0.0


def test_copy_is_independent():
    s = delta_packet(8, 0, (1, 0))
    c = s.copy()
    c.particle[0] = 0
    assert s.particle[0] == 1


@pytest.mark.parametrize("call", [
    lambda: gaussian_packet(64, 32, 3.0, (1, 1)),
    lambda: gaussian_packet(64, 32, 0.0, (1, 0)),
    lambda: gaussian_packet(64, 32, 8.0, (1, 0)),
    lambda: gaussian_packet(64, 64, 2.0, (1, 0)),
    lambda: delta_packet(64, -1, (1, 0)),
    lambda: delta_packet(64, 2.5, (1, 0)),
    lambda: SpinorField(np.zeros(4), np.zeros(5)),
    lambda: KPairedField(np.zeros((4, 3))),
])
def test_invalid_inputs(call):
    with pytest.raises(ValueError):
        call()


def test_unwrapped_offsets():
    np.testing.assert_array_equal(unwrapped_offsets(8, 6), [2, 3, -4, -3, -2, -1, 0, 1])

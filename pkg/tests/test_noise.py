import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robust_pulses.geometry import total_error_distance
from robust_pulses.metrics import unitary_gate_fidelity
from robust_pulses.noise import (
    amplitude_noise, axis_noise, noise_family, noisy_hamiltonian, static_detuning, three_axis_static, zz_noise,
    zz_operator,
)
from robust_pulses.pulses import RCP_LIBRARY, XYPulse, ReferencePulse, hamiltonian_of
from robust_pulses.quantum import SX, SZ, I2, TimeGrid, is_hermitian, propagate, su2_exp, tensor

PULSE = RCP_LIBRARY["xpi_all"]
TS = np.linspace(0, 50, 11)


@pytest.mark.parametrize("source", [static_detuning(0.0), amplitude_noise(0.0), three_axis_static(0, 0, 0), zz_noise(0.0, "1")])
def test_zero_amplitude_is_zero_operator(source):
    assert np.allclose(source.hamiltonian(PULSE, TS), 0.0)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_noise_operators_hermitian(dx, dy, dz):
    for s in three_axis_static(dx, dy, dz).split() + [amplitude_noise(dx), static_detuning(dz)]:
        assert all(is_hermitian(h) for h in s.hamiltonian(PULSE, TS))


def test_static_detuning_adds_half_sigma_z():
    assert np.allclose(static_detuning(0.4).hamiltonian(PULSE, [3.0])[0], 0.2 * SZ)


def test_amplitude_noise_follows_envelope():
    h = amplitude_noise(0.1).hamiltonian(PULSE, TS)
    drive = hamiltonian_of(PULSE)(TS)
    assert np.allclose(h, 0.1 * drive)


def test_amplitude_noise_over_rotation():
    env = ReferencePulse.for_angle("cosine", np.pi, 40.0)
    p = XYPulse(env)
    u = propagate(noisy_hamiltonian(p, [amplitude_noise(0.05)]), TimeGrid(40.0, 1000))[-1]
    infid = 1 - unitary_gate_fidelity(u, su2_exp([np.pi, 0, 0]))
    assert infid == pytest.approx((2 / 3) * np.sin(0.05 * np.pi / 2) ** 2, rel=1e-6)


def test_amplitude_noise_minus_one_cancels_drive():
    u = propagate(noisy_hamiltonian(PULSE, [amplitude_noise(-1.0)]), TimeGrid(50.0, 500))[-1]
    assert np.allclose(u, I2, atol=1e-12)


def test_three_axis_single_axis_reduces():
    (x,), = [[s for s in three_axis_static(0.3, 0, 0).split() if s.axes]]
    assert np.allclose(x.hamiltonian(PULSE, [1.0]), axis_noise("x", 0.3).hamiltonian(PULSE, [1.0]))


def test_zz_spectator_one_equals_negative_detuning():
    xi = 0.05
    grid = TimeGrid(50.0, 1000)
    u_red = propagate(noisy_hamiltonian(PULSE, [zz_noise(xi, "1")]), grid)[-1]
    u_det = propagate(noisy_hamiltonian(PULSE, [static_detuning(-xi)]), grid)[-1]
    assert np.allclose(u_red, u_det)
    # two-qubit picture with the spectator prepared in |1>
    h1 = hamiltonian_of(PULSE)

    def h2(t):
        return np.stack([tensor(h, I2) for h in h1(t)]) + zz_operator(xi)

    u2 = propagate(h2, grid)[-1]
    block = u2[np.ix_([1, 3], [1, 3])]
    assert np.allclose(block, u_red, atol=1e-10)


def test_zz_rejects_bad_spectator():
    with pytest.raises(ValueError):
        zz_noise(0.1, "2")


def test_distance_linear_at_first_order():
    p = RCP_LIBRARY["xpi_r"].rescale(1.0)
    g = ReferencePulse.amplitude_matched("gaussian", np.pi, 2 * np.pi * 0.0375)
    ratios = [total_error_distance(g, [static_detuning(e)]) / e for e in (1e-3, 1e-4, 1e-5)]
    assert abs(ratios[1] - ratios[2]) < 0.02 * abs(ratios[0] - ratios[1]) + 1e-6 * ratios[2]
    assert ratios[2] > 0


def test_noise_family_kinds():
    assert noise_family("detuning")(0.2).amplitude == pytest.approx(0.1)
    assert noise_family("zz", spectator="0")(0.2).amplitude == pytest.approx(0.1)
    with pytest.raises(ValueError):
        noise_family("bogus")

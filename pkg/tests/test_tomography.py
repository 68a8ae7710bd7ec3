import numpy as np
import pytest

from robust_pulses.benchmarking import DecoherenceSetting, decoherence_channel, decoherence_kraus
from robust_pulses.metrics import unitary_gate_fidelity
from robust_pulses.noise import noisy_hamiltonian, static_detuning
from robust_pulses.pulses import RCP_LIBRARY, amplitude_matched_reference
from robust_pulses.quantum import I2, SX, TimeGrid, propagate, su2_exp
from robust_pulses.tomography import (
    ProcessMatrix, chi_of_unitary, kraus_channel, process_fidelity_from_average, pulse_channel, qpt, qpt_fidelity,
    unitary_channel,
)

from conftest import haar_unitary


def random_channel(rng, n_kraus=3):
    a = rng.normal(size=(n_kraus * 2, 2)) + 1j * rng.normal(size=(n_kraus * 2, 2))
    q, _ = np.linalg.qr(a)  # isometry: stacked Kraus operators
    return [q[2 * k: 2 * k + 2] for k in range(n_kraus)]


def test_identity_and_pauli_channels():
    chi = qpt(unitary_channel(I2)).chi
    expect = np.zeros((4, 4)); expect[0, 0] = 1
    assert np.allclose(chi, expect, atol=1e-12)
    chi = qpt(unitary_channel(su2_exp([np.pi, 0, 0]))).chi
    expect = np.zeros((4, 4)); expect[1, 1] = 1
    assert np.allclose(chi, expect, atol=1e-12)


def test_reconstruction_exact_on_random_channels(rng):
    for _ in range(50):
        ks = random_channel(rng)
        ch = kraus_channel(ks)
        pm = qpt(ch)
        assert pm.is_trace_preserving()
        assert np.allclose(pm.chi, pm.chi.conj().T, atol=1e-10)
        rho = np.array([[0.6, 0.1 - 0.3j], [0.1 + 0.3j, 0.4]])
        assert np.allclose(pm.apply(rho), ch(rho), atol=1e-8)


def test_decoherence_channel_is_not_unitary():
    pm = qpt(decoherence_channel(DecoherenceSetting(1.0, 1.0), 500.0))
    assert pm.is_trace_preserving()
    assert np.trace(pm.chi).real == pytest.approx(1.0)
    assert pm.chi[0, 0].real < 1.0


def test_qpt_fidelity_edge_cases():
    x = chi_of_unitary(su2_exp([np.pi, 0, 0]))
    assert qpt_fidelity(x, x) == pytest.approx(1.0)
    assert qpt_fidelity(x, chi_of_unitary(I2)) == pytest.approx(0.0, abs=1e-15)


def test_qpt_of_unitary_matches_chi_of_unitary(rng):
    u = haar_unitary(rng)
    assert np.allclose(qpt(unitary_channel(u)).chi, chi_of_unitary(u).chi, atol=1e-12)


def test_rcp_under_detuning_agrees_with_unitary_prediction():
    p = RCP_LIBRARY["xpi_r"]
    grid = TimeGrid(50.0, 2000)
    noise = [static_detuning(2 * np.pi * 1e-3)]
    target = su2_exp([np.pi, 0, 0])
    f_qpt = qpt_fidelity(qpt(pulse_channel(p, noise, grid)), chi_of_unitary(target))
    u = propagate(noisy_hamiltonian(p, noise), grid)[-1]
    assert f_qpt == pytest.approx(process_fidelity_from_average(unitary_gate_fidelity(u, target)), abs=1e-6)


def test_gaussian_qpt_valley():
    g = amplitude_matched_reference("gaussian", np.pi)
    target = chi_of_unitary(su2_exp([np.pi, 0, 0]))
    f = [qpt_fidelity(qpt(pulse_channel(g, [static_detuning(2 * np.pi * d)])), target) for d in (0, 2e-3, 4e-3)]
    assert f[0] > f[1] > f[2]


def test_pulse_channel_with_trailing_channel():
    g = amplitude_matched_reference("cosine", np.pi)
    after = decoherence_channel(DecoherenceSetting(20.0, 25.0), g.duration)
    pm = qpt(pulse_channel(g, after=after))
    assert pm.is_trace_preserving()
    assert qpt_fidelity(pm, chi_of_unitary(su2_exp([np.pi, 0, 0]))) < 1.0

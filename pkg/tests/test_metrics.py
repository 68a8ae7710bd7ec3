import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robust_pulses.geometry import rotation_half_angle
from robust_pulses.metrics import (
    ChannelLiouville, avg_fidelity_from_distance, avg_fidelity_liouville, avg_gate_fidelity, fidelity_report,
    liouville_from_kraus, liouville_from_map, liouville_from_unitary, noise_margin, pauli_basis, process_fidelity,
    unitary_gate_fidelity, worst_case_bounds, worst_case_estimate,
)
from robust_pulses.noise import static_detuning
from robust_pulses.pulses import amplitude_matched_reference
from robust_pulses.quantum import I2, SX, SY, SZ, TimeGrid, dagger, su2_exp

from conftest import haar_unitary


def test_average_fidelity_monte_carlo_haar_states(rng):
    """Average over 1e5 Haar-random pure states agrees with the closed form."""
    u, v = haar_unitary(rng), haar_unitary(rng)
    psi = rng.normal(size=(100_000, 2)) + 1j * rng.normal(size=(100_000, 2))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    overlaps = np.abs(np.einsum("ni,ij,nj->n", psi.conj(), dagger(v) @ u, psi)) ** 2
    assert overlaps.mean() == pytest.approx(unitary_gate_fidelity(u, v), abs=5e-3)


@pytest.mark.parametrize("d", [2, 4])
def test_pedersen_matches_liouville(rng, d):
    for _ in range(10):
        u, v = haar_unitary(rng, d), haar_unitary(rng, d)
        assert unitary_gate_fidelity(u, v) == pytest.approx(avg_gate_fidelity(u, v), abs=1e-12)


def test_process_fidelity_relation(rng):
    u, v = haar_unitary(rng), haar_unitary(rng)
    assert unitary_gate_fidelity(u, v) == pytest.approx((2 * process_fidelity(u, v) + 1) / 3)


def test_pauli_basis_orthonormal():
    b = pauli_basis(2)
    gram = np.einsum("iab,jba->ij", dagger(b), b)
    assert np.allclose(gram, np.eye(16))
    assert np.allclose(b[0], np.eye(4) / 2)


def test_liouville_of_depolarizing_channel():
    p = 0.1
    kraus = [np.sqrt(1 - 3 * p / 4) * I2] + [np.sqrt(p / 4) * s for s in (SX, SY, SZ)]
    c = liouville_from_kraus(kraus)
    assert np.allclose(c.L, np.diag([1, 1 - p, 1 - p, 1 - p]))
    assert c.trace_of_identity_image == pytest.approx(2.0)
    assert avg_fidelity_liouville(c) == pytest.approx(1 - p / 2)


def test_liouville_composition_matches_product(rng):
    u, v = haar_unitary(rng), haar_unitary(rng)
    c = liouville_from_unitary(u).compose(liouville_from_unitary(v))
    assert np.allclose(c.L, liouville_from_unitary(u @ v).L)


def test_liouville_non_trace_preserving_map():
    c = liouville_from_map(lambda rho: 0.5 * rho, 2)
    assert c.trace_of_identity_image == pytest.approx(1.0)
    with pytest.raises(ValueError):
        liouville_from_map(lambda rho: rho, 3)


@given(st.lists(st.floats(-4, 4), min_size=3, max_size=3))
def test_distance_formula_matches_liouville(g):
    u = su2_exp(g)
    R = rotation_half_angle(u)
    assert avg_fidelity_liouville(liouville_from_unitary(u)) == pytest.approx(avg_fidelity_from_distance(R), abs=1e-12)


def test_worst_case_estimate_inside_band(rng):
    for R in rng.uniform(0, 0.4, 100):
        r = 1 - avg_fidelity_from_distance(R)
        lower, upper = worst_case_bounds(r)
        # translated to fidelity: 1 - upper <= 1 - |sin R| <= 1 - lower
        assert 1 - upper <= worst_case_estimate(R) <= 1 - lower + 1e-12


def test_worst_case_bounds_values():
    lo, hi = worst_case_bounds(0.006)
    assert lo == pytest.approx(np.sqrt(1.5 * 0.006))
    assert hi == pytest.approx(np.sqrt(6 * 0.006))
    with pytest.raises(ValueError):
        worst_case_bounds(-0.1)


def test_fidelity_report_fields():
    rep = fidelity_report(0.1, noise=0.5)
    assert rep.F_avg == pytest.approx(1 - (2 / 3) * np.sin(0.1) ** 2)
    assert rep.F_worst == pytest.approx(1 - np.sin(0.1))
    assert rep.D_lower <= rep.D_upper
    assert set(rep.row()) == {"noise", "F_avg", "F_worst", "R", "D_lower", "D_upper"}


def test_noise_margin_grows_as_threshold_relaxes():
    p = amplitude_matched_reference("cosine", np.pi)
    grid = TimeGrid(p.duration, 300)
    strict = noise_margin(p, static_detuning, 0.995, grid)
    loose = noise_margin(p, static_detuning, 0.99, grid)
    assert 0 < strict < loose


def test_noise_margin_matches_closed_form_for_free_precession():
    """Zero drive: R = Delta T / 2, so the margin solves 1 - sin(Delta T/2) = f."""
    from robust_pulses.pulses import AnalyticEnvelope, XYPulse
    T = 20.0
    p = XYPulse(AnalyticEnvelope(T, lambda t: 0 * t))
    m = noise_margin(p, static_detuning, 0.99, TimeGrid(T, 10))
    exact = 2 * np.arcsin(0.01) / T
    assert exact - 2 * np.pi * 1e-5 <= m <= exact

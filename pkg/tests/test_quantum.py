import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from robust_pulses.quantum import (
    PAULIS, SX, SY, SZ, BranchAmbiguityWarning, TimeGrid, constant, cumulative_products, expm_hermitian,
    is_unitary, mhz_to_rad_per_ns, pauli_vector, propagate, rad_per_ns_to_mhz, su2_exp, su2_log, tensor,
)

from conftest import haar_unitary

vec3 = st.lists(st.floats(-3.0, 3.0), min_size=3, max_size=3)


def test_unit_conversion_round_trip():
    assert mhz_to_rad_per_ns(1000.0) == pytest.approx(2 * np.pi)
    assert rad_per_ns_to_mhz(mhz_to_rad_per_ns(37.5)) == pytest.approx(37.5)


@given(vec3)
def test_su2_exp_matches_dense_expm(g):
    gen = np.einsum("k,kij->ij", g, PAULIS)
    assert np.allclose(su2_exp(g), expm(-0.5j * gen), atol=1e-12)


@given(vec3)
def test_su2_log_inverts_exp(g):
    g = np.asarray(g)
    theta = np.linalg.norm(g)
    if theta > np.pi - 1e-3:
        return
    assert np.allclose(su2_log(su2_exp(g)), g, atol=1e-8)


def test_su2_log_warns_at_pi():
    with pytest.warns(BranchAmbiguityWarning):
        su2_log(-1j * SX)


def test_su2_log_ignores_global_phase():
    g = np.array([0.3, -0.2, 0.5])
    assert np.allclose(su2_log(np.exp(0.7j) * su2_exp(g)), g)


def test_pauli_vector_extracts_components():
    m = 0.2 * SX - 0.4 * SY + 1.5 * SZ + 3.0 * np.eye(2)
    assert np.allclose(pauli_vector(m), [0.2, -0.4, 1.5])


def test_expm_hermitian_general_dimension(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = a + a.conj().T
    assert np.allclose(expm_hermitian(h, 0.3), expm(-0.3j * h))


def test_cumulative_products_order(rng):
    mats = np.stack([haar_unitary(rng) for _ in range(11)])
    out = cumulative_products(mats)
    ref = np.eye(2)
    for k in range(11):
        ref = mats[k] @ ref
        assert np.allclose(out[k], ref)


def test_propagate_constant_matches_closed_form():
    h = 0.5 * 0.3 * SX + 0.5 * 0.1 * SZ
    us = propagate(constant(h), TimeGrid(7.0, 50))
    assert np.allclose(us[0], np.eye(2))
    assert np.allclose(us[-1], expm(-7.0j * h))
    assert all(is_unitary(u) for u in us)


def test_propagate_second_order_in_step():
    """Midpoint rule error falls as dt^2 on a time-dependent Hamiltonian."""

    def h(t):
        t = np.atleast_1d(t)
        return 0.5 * (np.sin(0.3 * t)[:, None, None] * SX + (0.2 * t / 10)[:, None, None] * SZ)

    ref = propagate(h, TimeGrid(10.0, 8000))[-1]
    errs = [np.linalg.norm(propagate(h, TimeGrid(10.0, n))[-1] - ref) for n in (50, 100)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_propagate_rejects_non_hermitian():
    with pytest.raises(ValueError):
        propagate(constant(np.array([[0, 1], [0, 0]], dtype=complex)), TimeGrid(1.0, 4))


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)
    with pytest.raises(ValueError):
        TimeGrid(-1.0, 10)
    g = TimeGrid(2.0, 4, t0=1.0)
    assert np.allclose(g.times, [1.0, 1.5, 2.0, 2.5, 3.0])
    assert np.allclose(g.midpoints, [1.25, 1.75, 2.25, 2.75])


def test_check_resolution_rejects_coarse_grid():
    with pytest.raises(ValueError):
        TimeGrid(50.0, 10).check_resolution(1.0)
    TimeGrid(50.0, 2000).check_resolution(0.3)


def test_tensor_kron_order():
    assert np.allclose(tensor(SZ, np.eye(2)), np.kron(SZ, np.eye(2)))
    assert tensor(SX, SY, SZ).shape == (8, 8)

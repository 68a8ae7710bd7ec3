import numpy as np
import pytest

from robust_pulses.geometry import (
    ErrorCurve, error_curve, error_curves, error_distance, frenet_frame, rotation_half_angle, total_error_distance,
)
from robust_pulses.noise import amplitude_noise, static_detuning, three_axis_static
from robust_pulses.pulses import RCP_LIBRARY, AnalyticEnvelope, XYPulse, amplitude_matched_reference, simulate
from robust_pulses.quantum import SZ, TimeGrid, su2_exp

RCP = RCP_LIBRARY["xpi_r"]
GAUSS = amplitude_matched_reference("gaussian", np.pi)


def test_curve_starts_at_origin_and_speed_matches_tangent():
    c = error_curve(GAUSS, static_detuning(1.0))
    assert np.allclose(c.r[0], 0.0)
    # z noise: the tangent is a rotated unit sigma_z, so the speed is one
    assert np.allclose(c.speed, 1.0, atol=1e-12)
    fd = np.linalg.norm(np.gradient(c.r, c.times, axis=0), axis=1)[5:-5]
    assert np.allclose(fd, c.speed[5:-5], rtol=1e-3)


def test_arc_length_increments():
    c = error_curve(RCP, amplitude_noise(1.0))
    steps = np.linalg.norm(np.diff(c.r, axis=0), axis=1)
    # chords match the integrated speed except where the drive changes sign
    assert steps.sum() == pytest.approx(c.arc_length, rel=1e-5)
    z = error_curve(RCP, static_detuning(1.0))
    zsteps = np.linalg.norm(np.diff(z.r, axis=0), axis=1)
    assert np.allclose(zsteps, np.diff(z.times), rtol=1e-5)


def test_undriven_z_curve_is_straight():
    p = XYPulse(AnalyticEnvelope(10.0, lambda t: 0 * t))
    c = error_curve(p, static_detuning(1.0), TimeGrid(10.0, 100))
    assert np.allclose(c.r, np.outer(c.times, [0, 0, 1]))


@pytest.mark.parametrize("noise", [static_detuning(1.0), amplitude_noise(1.0)])
def test_first_order_distance_matches_exact(noise):
    """Taylor oracle: R(eps) = eps |r(T)| + O(eps^2) for a non-robust pulse."""
    c = error_curve(GAUSS, noise)
    eps = 1e-5
    exact = total_error_distance(GAUSS, [noise.scaled(eps * noise.amplitude)])
    assert exact == pytest.approx(eps * noise.amplitude * error_distance(c), rel=1e-4)


def test_robust_pulse_curve_closes_and_suppresses_error():
    c = error_curve(RCP, static_detuning(1.0))
    assert c.closure < 1e-2
    noise = [static_detuning(2 * np.pi * 1e-3)]
    assert total_error_distance(RCP, noise) < 0.1 * total_error_distance(GAUSS, noise)


def test_curve_end_converges_under_grid_refinement():
    ends = [error_curve(GAUSS, static_detuning(1.0), TimeGrid(GAUSS.duration, n)).end for n in (250, 500, 4000)]
    e1, e2 = np.linalg.norm(ends[0] - ends[2]), np.linalg.norm(ends[1] - ends[2])
    assert e1 / e2 == pytest.approx(4.0, rel=0.2)


def test_checkpoint_continuation():
    T = RCP.duration
    full = error_curve(RCP, static_detuning(1.0), TimeGrid(T, 2000))
    u_mid = simulate(RCP, TimeGrid(T / 2, 1000))[-1]
    second = error_curve(RCP, static_detuning(1.0), TimeGrid(T / 2, 1000, t0=T / 2), initial=u_mid)
    assert np.allclose(full.end - full.r[1000], second.end, atol=1e-6)


def test_independent_noise_needs_split():
    noise = three_axis_static(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        error_curve(RCP, noise)
    assert len(error_curves(RCP, [noise])) == 3


def test_rotation_half_angle_range(rng):
    for _ in range(50):
        g = rng.normal(size=3) * 3
        R = rotation_half_angle(np.exp(1j * rng.uniform(0, 6)) * su2_exp(g))
        assert 0 <= R <= np.pi / 2
        assert np.sin(R) == pytest.approx(abs(np.sin(np.linalg.norm(g) / 2)), abs=1e-12)


def test_frenet_circle():
    rho = 3.0
    ts = np.linspace(0, 6 * np.pi * rho, 3001)
    r = np.stack([rho * np.cos(ts / rho), rho * np.sin(ts / rho), 0 * ts], 1)
    f = frenet_frame(ErrorCurve(ts, r))
    assert np.allclose(f.curvature[f.valid], 1 / rho, atol=1e-8)
    assert np.allclose(f.torsion[f.valid], 0.0, atol=1e-8)


def test_frenet_helix_and_orthonormality():
    a, b = 2.0, 0.5
    c2 = a * a + b * b
    s = np.linspace(0, 40, 4001)
    r = np.stack([a * np.cos(s), a * np.sin(s), b * s], 1)
    f = frenet_frame(ErrorCurve(s, r))
    m = f.valid
    assert np.allclose(f.curvature[m], a / c2, rtol=1e-6)
    assert np.allclose(f.torsion[m], b / c2, rtol=1e-6)
    T, N, B = f.tangent[m], f.normal[m], f.binormal[m]
    frame = np.stack([T, N, B], axis=1)
    assert np.allclose(frame @ frame.transpose(0, 2, 1), np.eye(3), atol=1e-6)
    assert np.allclose(np.linalg.det(frame), 1.0, atol=1e-6)


def test_frenet_torsion_orientation_invariant():
    s = np.linspace(0, 20, 2001)
    r = np.stack([np.cos(s), np.sin(s), 0.3 * s], 1)
    f1 = frenet_frame(ErrorCurve(s, r))
    f2 = frenet_frame(ErrorCurve(s, r[::-1].copy()))
    m = f1.valid
    assert np.allclose(f1.torsion[m], f2.torsion[::-1][m], rtol=1e-6)


def test_frenet_excludes_edges_and_stationary_points():
    c = error_curve(RCP, static_detuning(1.0))
    f = frenet_frame(c)
    assert not f.valid[:6].any() and not f.valid[-6:].any()
    # the z-noise curve of an x pulse bends with the drive: kappa v = |Omega|
    m = f.valid
    om = RCP.omega_x(c.times)
    assert np.allclose(np.abs(f.curvature[m] * f.speed[m]), np.abs(om[m]), atol=1e-5)

"""Error curves, error distances and Frenet-frame diagnostics.

For a noise source ``eps * O(t)`` the leading-order error generator is
``r(t) . sigma`` with

    r(t) = int_0^t pauli_vector(U0(s)^dag O(s) U0(s)) ds,

stored per unit ``eps``. A closed curve, ``r(T) = 0``, means the gate is
robust to that noise to first order.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .noise import NoiseSource, noisy_hamiltonian
from .pulses import as_xy, hamiltonian_of
from .quantum import BranchAmbiguityWarning, TimeGrid, dagger, pauli_vector, propagate


@dataclass(frozen=True)
class ErrorCurve:
    times: np.ndarray
    r: np.ndarray
    rdot: Optional[np.ndarray] = None
    label: str = ""

    @property
    def speed(self) -> np.ndarray:
        return np.linalg.norm(self._rdot(), axis=1)

    def _rdot(self) -> np.ndarray:
        if self.rdot is not None:
            return self.rdot
        return _derivative(self.r, self.times[1] - self.times[0])

    @property
    def arc_length(self) -> float:
        return float(np.trapezoid(self.speed, self.times))

    @property
    def end(self) -> np.ndarray:
        return self.r[-1]

    @property
    def closure(self) -> float:
        """``|r(T)| / arc length``; zero for a closed curve."""
        length = self.arc_length
        return float(np.linalg.norm(self.end) / length) if length > 0 else 0.0


def _cumtrapz(y: np.ndarray, dt: float) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * dt, axis=0)
    return out


def curve_from_trajectory(us: np.ndarray, grid: TimeGrid, pulse, noise: NoiseSource) -> ErrorCurve:
    """Error curve of ``noise`` along a precomputed noise-free trajectory."""
    parts = noise.split()
    if len(parts) != 1:
        raise ValueError(
            f"noise {noise.label!r} has {len(parts)} independent directions; "
            "compute one curve per direction via NoiseSource.split()"
        )
    noise = parts[0]
    ts = grid.times
    ops = noise.unit_operator(pulse, ts)
    rdot = pauli_vector(dagger(us) @ ops @ us)
    return ErrorCurve(ts, _cumtrapz(rdot, grid.dt), rdot, noise.label)


def error_curve(pulse, noise: NoiseSource, grid: Optional[TimeGrid] = None, initial=None) -> ErrorCurve:
    """Per-unit-amplitude error curve of a single-direction noise source.

    ``initial`` is the noise-free propagator at ``grid.t0``; supplying it
    lets a curve be continued from a checkpoint.
    """
    p = as_xy(pulse)
    grid = grid or TimeGrid(p.duration, 2000)
    us = propagate(hamiltonian_of(p), grid)
    if initial is not None:
        us = us @ np.asarray(initial, dtype=complex)
    return curve_from_trajectory(us, grid, p, noise)


def error_curves(pulse, noises, grid: Optional[TimeGrid] = None) -> list:
    """Curves for a list of sources, splitting independent ones per axis."""
    p = as_xy(pulse)
    grid = grid or TimeGrid(p.duration, 2000)
    us = propagate(hamiltonian_of(p), grid)
    return [curve_from_trajectory(us, grid, p, part) for n in noises for part in n.split()]


def error_distance(curve: ErrorCurve) -> float:
    """``|r(T)|`` of a per-unit-amplitude curve."""
    return float(np.linalg.norm(curve.end))


def rotation_half_angle(ue: np.ndarray) -> float:
    """Half rotation angle of a 2x2 unitary after projection to SU(2).

    Both square roots of ``det`` are tried and the smaller angle kept, so
    the result lies in ``[0, pi/2]``.
    """
    s = ue / np.sqrt(np.linalg.det(ue))
    c = min(1.0, abs(np.trace(s).real) / 2.0)
    return float(np.arccos(c))


def total_error_distance(pulse, noises, grid: Optional[TimeGrid] = None, tol: float = 1e-9) -> float:
    """Exact total error distance of the error unitary ``U0(T)^dag U(T)``."""
    if isinstance(noises, NoiseSource):
        noises = [noises]
    p = as_xy(pulse)
    grid = grid or TimeGrid(p.duration, 2000)
    u0 = propagate(hamiltonian_of(p), grid)[-1]
    u = propagate(noisy_hamiltonian(p, noises), grid)[-1]
    r = rotation_half_angle(dagger(u0) @ u)
    if abs(r - np.pi / 2) < tol:
        warnings.warn("total error distance at branch edge", BranchAmbiguityWarning, stacklevel=2)
    return r


EDGE_ROWS = 6


@dataclass(frozen=True)
class FrenetFrame:
    times: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    binormal: np.ndarray
    curvature: np.ndarray
    torsion: np.ndarray
    speed: np.ndarray
    valid: np.ndarray


def _derivative(y: np.ndarray, dt: float) -> np.ndarray:
    """Fourth-order central differences; second order on the two edge rows."""
    d = np.empty_like(y)
    d[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * dt)
    d[1] = (y[2] - y[0]) / (2 * dt)
    d[-2] = (y[-1] - y[-3]) / (2 * dt)
    d[0] = (y[1] - y[0]) / dt
    d[-1] = (y[-1] - y[-2]) / dt
    return d


def frenet_frame(curve: ErrorCurve, speed_tol: float = 1e-9, bend_tol: float = 1e-6) -> FrenetFrame:
    """Tangent, normal, binormal, curvature and torsion along a curve.

    The normal is kept continuous through inflection points, so curvature is
    signed there. ``valid`` masks samples with vanishing speed or bending and
    the rows at each end whose stencils touch one-sided differences.
    """
    ts = curve.times
    dt = ts[1] - ts[0]
    rdot = curve._rdot()
    v = np.linalg.norm(rdot, axis=1)
    moving = v > speed_tol * max(1.0, float(v.max()))
    tangent = np.zeros_like(rdot)
    tangent[moving] = rdot[moving] / v[moving, None]
    tdot = _derivative(tangent, dt)
    bend = np.linalg.norm(tdot, axis=1)
    bending = bend > bend_tol * max(float(bend.max()), 1e-300)

    normal = np.zeros_like(tangent)
    normal[bending] = tdot[bending] / bend[bending, None]
    sign = np.ones(len(ts))
    prev = None
    for i in range(len(ts)):
        if not (bending[i] and moving[i]):
            continue
        if prev is not None and np.dot(normal[i], prev) < 0:
            normal[i] = -normal[i]
            sign[i] = -1.0
        prev = normal[i]
    kappa = np.zeros(len(ts))
    kappa[moving] = sign[moving] * bend[moving] / v[moving]
    binormal = np.cross(tangent, normal)
    bdot = _derivative(binormal, dt)
    tau = np.zeros(len(ts))
    ok = moving & bending
    tau[ok] = -np.einsum("ij,ij->i", bdot[ok], normal[ok]) / v[ok]
    valid = ok.copy()
    # each of the three chained differences widens the edge contamination by two rows
    valid[:EDGE_ROWS] = valid[-EDGE_ROWS:] = False
    return FrenetFrame(ts, tangent, normal, binormal, kappa, tau, v, valid)

"""Dense complex-matrix kernel: Pauli algebra, SU(2) maps and propagation.

Units throughout the package: time in ns, angular frequency in rad/ns.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SX, SY, SZ])
PAULI_BASIS = np.stack([I2, SX, SY, SZ])
AXES = {"x": SX, "y": SY, "z": SZ}

TWO_PI = 2.0 * np.pi


class BranchAmbiguityWarning(RuntimeWarning):
    """Rotation angle sits at the edge of the principal branch."""


def mhz_to_rad_per_ns(f_mhz):
    """Cyclic frequency in MHz to angular frequency in rad/ns."""
    return TWO_PI * np.asarray(f_mhz, dtype=float) * 1e-3


def rad_per_ns_to_mhz(w):
    return np.asarray(w, dtype=float) / TWO_PI * 1e3


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    d = u.shape[-1]
    return float(np.max(np.abs(dagger(u) @ u - np.eye(d)))) < tol


def is_hermitian(h: np.ndarray, tol: float = 1e-12) -> bool:
    return float(np.max(np.abs(h - dagger(h)))) < tol


def pauli_vector(m: np.ndarray) -> np.ndarray:
    """Components ``Re tr(sigma_k M) / 2`` for k = x, y, z.

    Works on a single 2x2 matrix or a stack ``(..., 2, 2)``.
    """
    return np.einsum("kij,...ji->...k", PAULIS, m).real / 2.0


def su2_exp(g) -> np.ndarray:
    """``exp(-i (theta/2) n.sigma)`` for the rotation vector ``g = theta n``.

    Accepts a single 3-vector or a stack of shape ``(..., 3)``.
    """
    g = np.asarray(g, dtype=float)
    theta = np.linalg.norm(g, axis=-1)
    half = theta / 2.0
    # sin(x)/x with the x -> 0 limit
    sinc = np.where(theta > 0, np.sin(half) / np.where(theta > 0, theta, 1.0), 0.5)
    gen = np.einsum("...k,kij->...ij", g, PAULIS)
    return np.cos(half)[..., None, None] * I2 - 1j * sinc[..., None, None] * gen


def su2_log(u: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Principal rotation vector ``theta n`` with ``theta in [0, pi]``.

    The global phase is removed by dividing by the principal square root
    of ``det U``. Near ``theta = pi`` the axis sign is ill-conditioned and a
    :class:`BranchAmbiguityWarning` is emitted.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u, 1e-8):
        raise ValueError("su2_log expects a 2x2 unitary")
    s = u / np.sqrt(np.linalg.det(u))
    # s = cos(theta/2) I - i sin(theta/2) n.sigma
    c = np.clip(np.trace(s).real / 2.0, -1.0, 1.0)
    n_sin = pauli_vector(1j * s)  # sin(theta/2) n
    if c < 0:
        # other sheet of SU(2): -s has the same rotation
        c, n_sin = -c, -n_sin
    half = np.arctan2(np.linalg.norm(n_sin), c)
    theta = 2.0 * half
    if abs(theta - np.pi) < tol:
        warnings.warn("rotation angle at pi: axis sign is ambiguous", BranchAmbiguityWarning, stacklevel=2)
    s_norm = np.linalg.norm(n_sin)
    if s_norm == 0.0:
        return np.zeros(3)
    return theta * n_sin / s_norm


@dataclass(frozen=True)
class TimeGrid:
    """Uniform discretisation of ``[t0, t0 + duration]`` into ``steps`` intervals."""

    duration: float
    steps: int
    t0: float = 0.0

    def __post_init__(self):
        if self.steps <= 0:
            raise ValueError("time grid needs at least one step")
        if not self.duration > 0:
            raise ValueError("time grid duration must be positive")

    @property
    def dt(self) -> float:
        return self.duration / self.steps

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.t0 + self.dt * (np.arange(self.steps) + 0.5)

    def check_resolution(self, peak_rate: float, per_period: int = 100) -> None:
        """Reject grids coarser than ``per_period`` steps per Rabi period."""
        if peak_rate <= 0:
            return
        period = TWO_PI / peak_rate
        if self.steps * period / self.duration < per_period:
            raise ValueError(
                f"{self.steps} steps over {self.duration} ns gives fewer than "
                f"{per_period} steps per Rabi period ({period:.3g} ns)"
            )


def default_grid(duration: float, steps_per_50ns: int = 2000) -> TimeGrid:
    return TimeGrid(duration, max(1, int(round(steps_per_50ns * duration / 50.0))))


def expm_hermitian(h: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i H dt)`` for a Hermitian matrix or stack of them."""
    h = np.asarray(h, dtype=complex)
    if h.shape[-1] == 2:
        # H = h0 I + h.sigma  ->  e^{-i h0 dt} * su2_exp(2 h dt)
        h0 = np.trace(h, axis1=-2, axis2=-1).real / 2.0
        vec = pauli_vector(h)
        return np.exp(-1j * h0 * dt)[..., None, None] * su2_exp(2.0 * dt * vec)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)[..., None, :]) @ dagger(v)


def cumulative_products(steps: np.ndarray) -> np.ndarray:
    """Left-ordered running products ``S_k ... S_1 S_0`` via a doubling scan."""
    out = np.array(steps, dtype=complex, copy=True)
    n = out.shape[0]
    shift = 1
    while shift < n:
        out[shift:] = out[shift:] @ out[:-shift]
        shift *= 2
    return out


Sampler = Callable[[np.ndarray], np.ndarray]


def propagate(h: Sampler, grid: TimeGrid, check: bool = True) -> np.ndarray:
    """Time-ordered propagator sampled on every grid point.

    ``h`` maps an array of times ``(n,)`` to Hamiltonians ``(n, d, d)``. Each
    step uses the exact exponential of the midpoint Hamiltonian. Returns an
    array ``(steps + 1, d, d)`` whose first entry is the identity.
    """
    hs = np.asarray(h(grid.midpoints), dtype=complex)
    if hs.ndim != 3 or hs.shape[0] != grid.steps:
        raise ValueError("Hamiltonian sampler must return an (n, d, d) stack")
    if check:
        scale = max(1.0, float(np.max(np.abs(hs))))
        if np.max(np.abs(hs - dagger(hs))) > 1e-12 * scale:
            raise ValueError("Hamiltonian sample is not Hermitian")
    d = hs.shape[-1]
    us = np.empty((grid.steps + 1, d, d), dtype=complex)
    us[0] = np.eye(d)
    us[1:] = cumulative_products(expm_hermitian(hs, grid.dt))
    return us


def final_unitary(h: Sampler, grid: TimeGrid) -> np.ndarray:
    return propagate(h, grid)[-1]


def constant(hmat: np.ndarray) -> Sampler:
    """Sampler returning the same matrix at every time."""
    hmat = np.asarray(hmat, dtype=complex)
    return lambda t: np.broadcast_to(hmat, (np.size(t),) + hmat.shape)

"""Simulated single-qubit process tomography by linear inversion.

The process matrix uses the unnormalized Pauli operators ``E = (I, X, Y, Z)``
so that ``rho -> sum_mn chi_mn E_m rho E_n^dag``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .noise import noisy_hamiltonian
from .pulses import as_xy
from .quantum import PAULI_BASIS, PAULIS, SZ, TimeGrid, dagger, pauli_vector, propagate, su2_exp

Channel = Callable[[np.ndarray], np.ndarray]

_s = 1 / np.sqrt(2)
INPUT_STATES = (
    np.array([1, 0], dtype=complex),
    np.array([_s, -1j * _s]),
    np.array([_s, _s], dtype=complex),
    np.array([0, 1], dtype=complex),
)
# pre-measurement rotations: identity, X(pi/2), Y(pi/2)
MEASUREMENT_ROTATIONS = (np.eye(2, dtype=complex), su2_exp([np.pi / 2, 0, 0]), su2_exp([0, np.pi / 2, 0]))


@dataclass(frozen=True)
class ProcessMatrix:
    dim: int
    chi: np.ndarray

    def is_trace_preserving(self, tol: float = 1e-8) -> bool:
        total = np.einsum("mn,nij,mjk->ik", self.chi, dagger(PAULI_BASIS), PAULI_BASIS)
        return bool(np.allclose(total, np.eye(self.dim), atol=tol))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return np.einsum("mn,mij,jk,nkl->il", self.chi, PAULI_BASIS, rho, dagger(PAULI_BASIS))


def _measured_bloch(rho: np.ndarray) -> np.ndarray:
    """Bloch vector recovered from the three rotated z expectation values."""
    observables = [dagger(r) @ SZ @ r for r in MEASUREMENT_ROTATIONS]
    rows = np.stack([pauli_vector(o) for o in observables])
    values = np.array([np.trace(r @ rho @ dagger(r) @ SZ).real for r in MEASUREMENT_ROTATIONS])
    return np.linalg.solve(rows, values)


def _state_from_bloch(b: np.ndarray) -> np.ndarray:
    return 0.5 * (np.eye(2) + np.einsum("k,kij->ij", b, PAULIS))


# vec(E_m rho E_n^dag) = (E_m kron conj(E_n)) vec(rho) for row-major vec
_CHI_BASIS = np.stack(
    [np.kron(em, en.conj()).ravel() for em in PAULI_BASIS for en in PAULI_BASIS], axis=1
)


def qpt(channel: Channel) -> ProcessMatrix:
    """Reconstruct ``chi`` of a qubit channel from four inputs and three bases."""
    rho_in = [np.outer(s, s.conj()) for s in INPUT_STATES]
    rho_out = [_state_from_bloch(_measured_bloch(channel(r))) for r in rho_in]
    r_in = np.stack([r.ravel() for r in rho_in], axis=1)
    r_out = np.stack([r.ravel() for r in rho_out], axis=1)
    superop = r_out @ np.linalg.inv(r_in)
    chi = np.linalg.solve(_CHI_BASIS, superop.ravel()).reshape(4, 4)
    return ProcessMatrix(2, chi)


def qpt_fidelity(chi_exp, chi_th) -> float:
    """``|Tr(a b^dag)| / sqrt(Tr(a a^dag) Tr(b b^dag))``."""
    a = chi_exp.chi if isinstance(chi_exp, ProcessMatrix) else np.asarray(chi_exp)
    b = chi_th.chi if isinstance(chi_th, ProcessMatrix) else np.asarray(chi_th)
    num = abs(np.trace(a @ dagger(b)))
    den = np.sqrt(np.trace(a @ dagger(a)).real * np.trace(b @ dagger(b)).real)
    return float(num / den)


def chi_of_unitary(u: np.ndarray) -> ProcessMatrix:
    c = np.einsum("mij,ji->m", PAULI_BASIS, u) / 2.0
    return ProcessMatrix(2, np.outer(c, c.conj()))


def unitary_channel(u: np.ndarray) -> Channel:
    return lambda rho: u @ rho @ dagger(u)


def kraus_channel(kraus: Sequence[np.ndarray]) -> Channel:
    return lambda rho: sum(k @ rho @ dagger(k) for k in kraus)


def pulse_channel(pulse, noises=(), grid: Optional[TimeGrid] = None, after: Optional[Channel] = None) -> Channel:
    """Channel of a simulated noisy pulse, optionally followed by ``after``."""
    p = as_xy(pulse)
    grid = grid or TimeGrid(p.duration, 2000)
    u = propagate(noisy_hamiltonian(p, noises), grid)[-1]
    ch = unitary_channel(u)
    return ch if after is None else (lambda rho: after(ch(rho)))


def process_fidelity_from_average(f_avg: float, d: int = 2) -> float:
    """``(F_avg (d+1) - 1) / d``."""
    return (f_avg * (d + 1) - 1) / d

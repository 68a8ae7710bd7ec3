"""Gate-quality measures: average and worst-case fidelities, diamond bounds.

Liouville matrices use the normalized Pauli basis (``I`` first) on each
qubit, so a unitary channel is an orthogonal matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import total_error_distance
from .quantum import PAULI_BASIS, TWO_PI, TimeGrid, dagger, tensor

MARGIN_RESOLUTION = TWO_PI * 1e-5  # 0.01 MHz in rad/ns


def unitary_gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Average gate fidelity of ``u`` against target ``v``.

    ``u`` may be a non-unitary block (e.g. a projection onto a computational
    subspace); the general form ``(tr MM^dag + |tr M|^2) / (d(d+1))`` with
    ``M = v^dag u`` reduces to ``(|tr M|^2 + d) / (d(d+1))`` for unitaries.
    """
    m = dagger(np.asarray(v, dtype=complex)) @ np.asarray(u, dtype=complex)
    d = m.shape[0]
    return float((np.trace(m @ dagger(m)).real + abs(np.trace(m)) ** 2) / (d * (d + 1)))


def process_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    d = np.shape(u)[0]
    return float(abs(np.trace(dagger(v) @ u)) ** 2 / d**2)


def pauli_basis(n_qubits: int) -> np.ndarray:
    """Normalized Pauli products ``(4**n, 2**n, 2**n)``, identity first."""
    single = PAULI_BASIS / np.sqrt(2.0)
    return np.stack([tensor(*ops) for ops in itertools.product(single, repeat=n_qubits)])


@dataclass(frozen=True)
class ChannelLiouville:
    dim: int
    L: np.ndarray

    @property
    def trace_of_identity_image(self) -> float:
        """``Tr E(I)``; equals ``d`` for trace-preserving maps."""
        return float(self.dim * self.L[0, 0].real)

    def compose(self, other: "ChannelLiouville") -> "ChannelLiouville":
        """Channel ``self o other`` (``other`` acts first)."""
        return ChannelLiouville(self.dim, self.L @ other.L)


def _n_qubits(d: int) -> int:
    n = int(round(np.log2(d)))
    if 2**n != d:
        raise ValueError(f"Liouville basis needs a qubit register, got d={d}")
    return n


def liouville_from_map(channel: Callable[[np.ndarray], np.ndarray], d: int) -> ChannelLiouville:
    """``L_ij = Tr(P_i E(P_j))`` for a linear map ``E`` on ``d x d`` matrices."""
    basis = pauli_basis(_n_qubits(d))
    images = np.stack([channel(p) for p in basis])
    L = np.einsum("iab,jba->ij", basis, images)
    if np.allclose(L.imag, 0.0, atol=1e-12):
        L = L.real
    return ChannelLiouville(d, L)


def liouville_from_kraus(kraus: Sequence[np.ndarray]) -> ChannelLiouville:
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    return liouville_from_map(lambda rho: sum(k @ rho @ dagger(k) for k in ks), ks[0].shape[0])


def liouville_from_unitary(u: np.ndarray) -> ChannelLiouville:
    return liouville_from_kraus([u])


def avg_fidelity_liouville(c: ChannelLiouville) -> float:
    """``(Tr L + Tr E(I)) / (d(d+1))``, the average fidelity to the identity."""
    d = c.dim
    return float((np.trace(c.L).real + c.trace_of_identity_image) / (d * (d + 1)))


def avg_gate_fidelity(u: np.ndarray, target: np.ndarray) -> float:
    """Average fidelity of ``u`` to ``target`` through the Liouville form."""
    return avg_fidelity_liouville(liouville_from_unitary(dagger(target) @ u))


def avg_fidelity_from_distance(R) -> np.ndarray:
    """``1 - (2/3) sin^2 R`` for a qubit error rotation of half-angle ``R``."""
    return 1.0 - (2.0 / 3.0) * np.sin(np.asarray(R, dtype=float)) ** 2


def worst_case_estimate(R) -> np.ndarray:
    """Worst-case fidelity estimate ``1 - |sin R|``."""
    return 1.0 - np.abs(np.sin(np.asarray(R, dtype=float)))


def worst_case_bounds(r: float, d: int = 2) -> tuple:
    """Diamond-distance bounds ``(sqrt((d+1)/d) sqrt(r), sqrt((d+1) d) sqrt(r))``.

    ``r = 1 - F_avg`` is the average error rate of a unitary error.
    """
    if r < 0:
        raise ValueError("average error rate must be non-negative")
    root = np.sqrt(r)
    return float(np.sqrt((d + 1) / d) * root), float(np.sqrt((d + 1) * d) * root)


@dataclass(frozen=True)
class FidelityReport:
    noise: float
    F_avg: float
    F_worst: float
    R: float
    D_lower: float
    D_upper: float

    def __post_init__(self):
        if self.D_lower > self.D_upper:
            raise ValueError("diamond bounds out of order")

    def row(self) -> dict:
        return asdict(self)


def fidelity_report(R: float, noise: float = 0.0) -> FidelityReport:
    """All single-qubit measures implied by a total error distance."""
    f_avg = float(avg_fidelity_from_distance(R))
    lower, upper = worst_case_bounds(max(0.0, 1.0 - f_avg))
    return FidelityReport(noise, f_avg, float(worst_case_estimate(R)), float(R), lower, upper)


def noise_margin(
    pulse,
    family: Callable[[float], object],
    threshold: float = 0.99,
    grid: Optional[TimeGrid] = None,
    resolution: float = MARGIN_RESOLUTION,
    scan_step: float = TWO_PI * 5e-5,
    limit: float = TWO_PI * 0.05,
) -> float:
    """Width ``eps_m`` of ``[0, eps_m]`` on which ``1 - |sin R(eps)|`` stays >= threshold.

    A coarse upward scan finds the first failing value, then bisection
    narrows it to ``resolution``. ``family`` maps a noise value to a source.
    """

    def good(eps):
        if eps == 0.0:
            return True
        R = total_error_distance(pulse, [family(eps)], grid)
        return float(worst_case_estimate(R)) >= threshold

    lo = 0.0
    hi = None
    eps = scan_step
    while eps <= limit:
        if not good(eps):
            hi = eps
            break
        lo = eps
        eps += scan_step
    if hi is None:
        return lo
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if good(mid):
            lo = mid
        else:
            hi = mid
    return lo

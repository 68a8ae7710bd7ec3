"""iSWAP robustness on a qubit pair and on a 3-level transmon pair.

Qubit model (basis ``|00>, |01>, |10>, |11>``, ``sigma_z|0> = |0>``)::

    H = -1/2 d1 Z1 - 1/2 d2 Z2 + 1/2 g(t) (X1 X2 + Y1 Y2)

On ``{|01>, |10>}`` this is ``g sigma_x - D_minus sigma_z`` with
``D_minus = (d1 - d2)/2``: a single qubit driven at ``Omega = 2 g`` with
z noise of strength ``-2 D_minus``. A z-robust X(pi) envelope halved is
therefore a robust iSWAP coupling.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize

from .metrics import unitary_gate_fidelity
from .optimize import OptimizationProblem, optimize
from .noise import static_detuning
from .pulses import ReferencePulse, XYPulse, as_xy, ladder
from .quantum import SX, SY, SZ, TWO_PI, TimeGrid, propagate, su2_exp, tensor

ISWAP = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex)
MODELS = ("qubit4", "transmon9")

# transmon-pair parameters in rad/ns
TRANSMON_ANHARMONICITY = (-TWO_PI * 0.236, -TWO_PI * 0.270)
TRANSMON_COUPLING = TWO_PI * 0.106
TRANSMON_DETUNING = TWO_PI * (6.734 - 7.7)


@dataclass(frozen=True)
class ISwapProblem:
    delta1: float
    delta2: float
    coupling: object  # envelope g(t) in rad/ns

    @property
    def delta_plus(self) -> float:
        return 0.5 * (self.delta1 + self.delta2)

    @property
    def delta_minus(self) -> float:
        return 0.5 * (self.delta1 - self.delta2)

    @property
    def duration(self) -> float:
        return as_xy(self.coupling).duration


def _g(coupling, t):
    return as_xy(coupling).omega_x(t)


def iswap_qubit_hamiltonian(p: ISwapProblem, t) -> np.ndarray:
    """Stack ``(n, 4, 4)`` of the qubit-pair Hamiltonian at times ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    static = -0.5 * p.delta1 * tensor(SZ, np.eye(2)) - 0.5 * p.delta2 * tensor(np.eye(2), SZ)
    flip = 0.5 * (tensor(SX, SX) + tensor(SY, SY))
    return static + _g(p.coupling, t)[:, None, None] * flip


@dataclass(frozen=True)
class _Scaled:
    """Envelope multiplied by a constant."""

    base: XYPulse
    factor: float

    @property
    def duration(self) -> float:
        return self.base.duration

    def __call__(self, t):
        return self.factor * self.base.omega_x(t)

    def derivative(self, t):
        h = 1e-6 * self.duration
        t = np.asarray(t, dtype=float)
        lo = np.clip(t - h, 0, self.duration)
        hi = np.clip(t + h, 0, self.duration)
        return self.factor * (self.base.omega_x(hi) - self.base.omega_x(lo)) / (hi - lo)


@dataclass(frozen=True)
class ReducedProblem:
    """Single-qubit view of the odd sector: drive ``2 g`` on x, z noise ``-2 D_minus``."""

    pulse: XYPulse
    noise: object
    phase_error: float  # D_plus, a pure single-qubit phase


def subspace_reduction(p: ISwapProblem) -> ReducedProblem:
    drive = coupling_from_drive(p.coupling, 2.0)
    return ReducedProblem(drive, static_detuning(-2.0 * p.delta_minus), p.delta_plus)


def coupling_from_drive(pulse, factor: float = 0.5) -> XYPulse:
    """Coupling envelope ``g = factor * Omega_x`` from a single-qubit drive."""
    return XYPulse(_Scaled(as_xy(pulse), factor), name=f"coupling[{as_xy(pulse).name}]")


def effective_zz(g: float, delta: float, u1: float, u2: float, pole_tol: float = 1e-3) -> float:
    """``xi = -g^2 (u1 + u2) / ((delta + u1)(u2 - delta))``.

    Warns when ``delta`` sits within ``pole_tol`` (relative) of ``-u1`` or ``u2``.
    """
    d1, d2 = delta + u1, u2 - delta
    scale = max(abs(u1), abs(u2))
    if min(abs(d1), abs(d2)) < pole_tol * scale:
        warnings.warn("detuning near a pole of the ZZ coefficient", RuntimeWarning, stacklevel=2)
    return float(-(g**2) * (u1 + u2) / (d1 * d2))


@dataclass(frozen=True)
class TransmonPair:
    anharmonicity: tuple = TRANSMON_ANHARMONICITY
    coupling: float = TRANSMON_COUPLING
    detuning: float = TRANSMON_DETUNING
    levels: int = 3

    def __post_init__(self):
        if any(u >= 0 for u in self.anharmonicity):
            raise ValueError("transmon anharmonicities must be negative")
        u1, u2 = self.anharmonicity
        if abs(self.detuning + u1) < 1e-12 or abs(u2 - self.detuning) < 1e-12:
            raise ValueError("detuning sits on a ZZ pole")

    def operators(self):
        a = ladder(self.levels)
        eye = np.eye(self.levels)
        return np.kron(a, eye), np.kron(eye, a)

    def hamiltonian(self, delta1: float, delta2: float, g: float) -> np.ndarray:
        """Static Hamiltonian in a frame where qubit j sits at detuning ``delta_j``."""
        a1, a2 = self.operators()
        n1, n2 = a1.conj().T @ a1, a2.conj().T @ a2
        u1, u2 = self.anharmonicity
        h = delta1 * n1 + delta2 * n2
        h = h + 0.5 * u1 * n1 @ (n1 - np.eye(len(n1))) + 0.5 * u2 * n2 @ (n2 - np.eye(len(n2)))
        return h + g * (a1.conj().T @ a2 + a1 @ a2.conj().T)

    def zz_exact(self) -> float:
        """``(E00 - E01 - E10 + E11)/2`` of the static dressed levels.

        Dressed states are matched to bare ones by maximum overlap.
        """
        h = self.hamiltonian(self.detuning, 0.0, self.coupling)
        w, v = np.linalg.eigh(h)
        lv = self.levels
        energy = {}
        for q1, q2 in ((0, 0), (0, 1), (1, 0), (1, 1)):
            k = q1 * lv + q2
            energy[(q1, q2)] = w[int(np.argmax(np.abs(v[k]) ** 2))]
        return 0.5 * (energy[0, 0] - energy[0, 1] - energy[1, 0] + energy[1, 1])

    def zz_formula(self) -> float:
        u1, u2 = self.anharmonicity
        # qubit 1 sits at ``detuning`` and qubit 2 at 0 in this frame
        return effective_zz(self.coupling, self.detuning, u1, u2)

    def computational_indices(self) -> list:
        return [q1 * self.levels + q2 for q1 in (0, 1) for q2 in (0, 1)]


def transmon_hamiltonian(pair: TransmonPair, p: ISwapProblem):
    """Time-dependent sampler of the resonant transmon pair under ``p``."""
    a1, a2 = pair.operators()
    base = pair.hamiltonian(p.delta1, p.delta2, 0.0)
    hop = a1.conj().T @ a2 + a1 @ a2.conj().T

    def h(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return base + _g(p.coupling, t)[:, None, None] * hop

    return h


def virtual_z_fidelity(u: np.ndarray, target: np.ndarray = ISWAP) -> tuple:
    """Fidelity after the best pair of single-qubit z phases.

    The correction ``diag(1, e^{i b}, e^{i a}, e^{i(a+b)})`` enters only
    through ``|sum_k D_k w_k|`` with ``w = diag(U target^dag)``, which is
    maximized numerically from a few phase-aligned starts.
    """
    w = np.diag(u @ target.conj().T)

    def corr(x):
        a, b = x
        return np.array([1.0, np.exp(1j * b), np.exp(1j * a), np.exp(1j * (a + b))])

    def neg(x):
        return -abs(np.sum(corr(x) * w))

    starts = [
        (-np.angle(w[2]) + np.angle(w[0]), -np.angle(w[1]) + np.angle(w[0])),
        (-np.angle(w[3]) + np.angle(w[1]), -np.angle(w[3]) + np.angle(w[2])),
        (0.0, 0.0),
    ]
    best = min((minimize(neg, s, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15}) for s in starts),
               key=lambda r: r.fun)
    d = np.diag(corr(best.x))
    return unitary_gate_fidelity(d @ u, target), best.x


def iswap_unitary(model: str, p: ISwapProblem, steps: int = 2000, pair: Optional[TransmonPair] = None) -> np.ndarray:
    """Final propagator on the computational subspace (4x4, possibly non-unitary)."""
    grid = TimeGrid(p.duration, steps)
    if model == "qubit4":
        return propagate(lambda t: iswap_qubit_hamiltonian(p, t), grid)[-1]
    if model == "transmon9":
        pair = pair or TransmonPair()
        u = propagate(transmon_hamiltonian(pair, p), grid)[-1]
        idx = pair.computational_indices()
        return u[np.ix_(idx, idx)]
    raise ValueError(f"model must be one of {MODELS}")


def conditional_phase(u: np.ndarray) -> float:
    """``arg U_11,11 - arg U_01,10 - arg U_10,01 + arg U_00,00`` relative to iSWAP."""
    ph = np.angle(u[3, 3]) - np.angle(u[1, 2]) - np.angle(u[2, 1]) + np.angle(u[0, 0])
    return float(np.angle(np.exp(1j * (ph + np.pi))))


def zz_phase_integral(coupling, pair: TransmonPair, steps: int = 2000) -> float:
    """Second-order conditional phase ``-int 2 xi(t) dt`` on resonance."""
    env = as_xy(coupling)
    ts = TimeGrid(env.duration, steps).times
    u1, u2 = pair.anharmonicity
    xi = -(env.omega_x(ts) ** 2) * (u1 + u2) / (u1 * u2)
    return float(-np.trapezoid(2 * xi, ts))


def iswap_fidelity_sweep(
    model: str,
    coupling,
    delta_minus: Sequence[float],
    steps: int = 2000,
    pair: Optional[TransmonPair] = None,
) -> np.ndarray:
    """Virtual-z corrected iSWAP fidelity for each odd-sector detuning.

    In the transmon model the conditional phase of the noise-free gate is
    calibrated once and removed, so the static ZZ shift is not counted
    against the gate.
    """
    fix = np.eye(4, dtype=complex)
    if model == "transmon9":
        u0 = iswap_unitary(model, ISwapProblem(0.0, 0.0, coupling), steps, pair)
        fix[3, 3] = np.exp(-1j * conditional_phase(u0))
    out = []
    for dm in delta_minus:
        u = fix @ iswap_unitary(model, ISwapProblem(dm, -dm, coupling), steps, pair)
        out.append(virtual_z_fidelity(u)[0])
    return np.array(out)


def high_fidelity_width(values: Sequence[float], fidelity: Sequence[float], threshold: float = 0.999) -> float:
    """Width of the contiguous region around the best point with fidelity above threshold.

    Edges are located by linear interpolation between samples.
    """
    x = np.asarray(values, dtype=float)
    f = np.asarray(fidelity, dtype=float)
    k = int(np.argmin(np.abs(x))) if np.any(f >= threshold) else None
    if k is None or f[k] < threshold:
        return 0.0
    lo = k
    while lo > 0 and f[lo - 1] >= threshold:
        lo -= 1
    hi = k
    while hi < len(x) - 1 and f[hi + 1] >= threshold:
        hi += 1

    def edge(i_in, i_out):
        if i_out < 0 or i_out >= len(x):
            return x[i_in]
        s = (f[i_in] - threshold) / (f[i_in] - f[i_out])
        return x[i_in] + s * (x[i_out] - x[i_in])

    return float(edge(hi, hi + 1) - edge(lo, lo - 1))


def fidelity_width(
    model: str,
    coupling,
    threshold: float = 0.999,
    limit: float = TWO_PI * 0.05,
    scan: int = 50,
    steps: int = 1000,
    pair: Optional[TransmonPair] = None,
) -> float:
    """Width of the ``D_minus`` interval around zero with fidelity above ``threshold``.

    Each side is scanned outward on ``scan`` points up to ``limit`` and the
    first crossing is refined with Brent's method.
    """
    fix = np.eye(4, dtype=complex)
    if model == "transmon9":
        u0 = iswap_unitary(model, ISwapProblem(0.0, 0.0, coupling), steps, pair)
        fix[3, 3] = np.exp(-1j * conditional_phase(u0))

    def margin(dm):
        u = fix @ iswap_unitary(model, ISwapProblem(dm, -dm, coupling), steps, pair)
        return virtual_z_fidelity(u)[0] - threshold

    if margin(0.0) < 0:
        return 0.0
    edges = []
    for sign in (1.0, -1.0):
        prev = 0.0
        edge = sign * limit
        for x in sign * np.linspace(limit / scan, limit, scan):
            if margin(x) < 0:
                edge = brentq(margin, prev, x, xtol=1e-9)
                break
            prev = x
        edges.append(edge)
    return float(edges[0] - edges[1])


def cosine_coupling(peak: float) -> XYPulse:
    """Raised-cosine coupling with ``int g dt = pi/2`` at the given peak."""
    return XYPulse(ReferencePulse.amplitude_matched("cosine", np.pi / 2, peak), name="cosine_coupling")


def design_iswap_coupling(
    duration: float = 50.0,
    n_components: int = 2,
    seed: int = 0,
    restarts: int = 16,
    max_iter: int = 300,
):
    """Robust iSWAP coupling from the single-qubit design problem.

    The odd-sector X(pi) drive is made robust to z noise through second
    order, and the restart with the smallest peak drive is kept. Returns
    ``(coupling, trace)``.
    """
    problem = OptimizationProblem(
        su2_exp([np.pi, 0, 0]),
        (static_detuning(1.0),),
        duration=duration,
        n_components=n_components,
        seed=seed,
        restarts=restarts,
        max_iter=max_iter,
        second_order=True,
        selection="min_peak",
    )
    drive, trace = optimize(problem)
    return coupling_from_drive(drive), trace

"""Clifford randomized benchmarking with coherent detuning and T1/T2 decay.

Every physical gate is a 4x4 real Pauli transfer matrix (normalized Pauli
basis, identity first): the unitary of the simulated pulse followed by a
decoherence channel for the pulse duration. Sequences are tracked exactly in
the Clifford group so the recovery gate is found by table lookup.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .metrics import liouville_from_kraus, liouville_from_unitary
from .noise import noisy_hamiltonian, static_detuning
from .pulses import (
    RCP_LIBRARY,
    REFERENCE_PEAK,
    XYPulse,
    amplitude_matched_reference,
    as_xy,
    rescale_to_peak,
)
from .quantum import I2, SZ, TimeGrid, propagate, su2_exp

GENERATORS = ("X", "Y", "X2", "-X2", "Y2", "-Y2")

_ROT = {
    "X": su2_exp([np.pi, 0, 0]),
    "Y": su2_exp([0, np.pi, 0]),
    "X2": su2_exp([np.pi / 2, 0, 0]),
    "-X2": su2_exp([-np.pi / 2, 0, 0]),
    "Y2": su2_exp([0, np.pi / 2, 0]),
    "-Y2": su2_exp([0, -np.pi / 2, 0]),
}

# time-ordered generator words for the 24 single-qubit Cliffords
CLIFFORD_WORDS = (
    (),
    ("X",), ("Y",), ("Y", "X"),
    ("X2", "Y2"), ("X2", "-Y2"), ("-X2", "Y2"), ("-X2", "-Y2"),
    ("Y2", "X2"), ("Y2", "-X2"), ("-Y2", "X2"), ("-Y2", "-X2"),
    ("X2",), ("-X2",), ("Y2",), ("-Y2",),
    ("-X2", "Y2", "X2"), ("-X2", "-Y2", "X2"),
    ("X", "Y2"), ("X", "-Y2"), ("Y", "X2"), ("Y", "-X2"),
    ("X2", "Y2", "X2"), ("-X2", "Y2", "-X2"),
)


def _same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    return abs(abs(np.trace(a.conj().T @ b)) - 2.0) < tol


@dataclass(frozen=True)
class CliffordGroup:
    unitaries: np.ndarray
    words: tuple
    table: np.ndarray
    inverse: np.ndarray

    def index_of(self, u: np.ndarray) -> int:
        for k, c in enumerate(self.unitaries):
            if _same_up_to_phase(c, u):
                return k
        raise ValueError("matrix is not a Clifford")

    @property
    def mean_gate_count(self) -> float:
        return float(np.mean([len(w) for w in self.words]))


def word_unitary(word: Sequence[str]) -> np.ndarray:
    u = I2.copy()
    for g in word:
        u = _ROT[g] @ u
    return u


def clifford_group() -> CliffordGroup:
    """The 24 Cliffords with ``table[a, b]`` = index of ``C_a C_b``."""
    us = np.stack([word_unitary(w) for w in CLIFFORD_WORDS])
    n = len(us)
    grp = CliffordGroup(us, CLIFFORD_WORDS, np.zeros((n, n), dtype=int), np.zeros(n, dtype=int))
    for a in range(n):
        for b in range(n):
            grp.table[a, b] = grp.index_of(us[a] @ us[b])
        grp.inverse[a] = int(np.flatnonzero(grp.table[a] == 0)[0])
    return grp


@dataclass(frozen=True)
class DecoherenceSetting:
    """Relaxation times in microseconds; ``inf`` disables a process."""

    T1: float = np.inf
    T2: float = np.inf

    def __post_init__(self):
        if self.T1 <= 0 or self.T2 <= 0:
            raise ValueError("T1 and T2 must be positive")
        if self.T2 > 2 * self.T1:
            raise ValueError("T2 cannot exceed 2 T1")

    @property
    def T_phi(self) -> float:
        """Pure dephasing time, ``1/T_phi = 1/T2 - 1/(2 T1)``."""
        rate = 1.0 / self.T2 - 0.5 / self.T1
        return np.inf if rate <= 0 else 1.0 / rate


def decoherence_kraus(s: DecoherenceSetting, tau_ns: float) -> list:
    """Amplitude damping followed by pure dephasing, as one Kraus list."""
    tau = tau_ns * 1e-3
    p = -np.expm1(-tau / s.T1)
    damp = [np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex), np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)]
    q = -np.expm1(-tau / s.T_phi) / 2
    dephase = [np.sqrt(1 - q) * I2, np.sqrt(q) * SZ]
    return [d @ a for d in dephase for a in damp]


def decoherence_channel(s: DecoherenceSetting, tau_ns: float):
    ks = decoherence_kraus(s, tau_ns)
    return lambda rho: sum(k @ rho @ k.conj().T for k in ks)


def decoherence_ptm(s: DecoherenceSetting, tau_ns: float) -> np.ndarray:
    return liouville_from_kraus(decoherence_kraus(s, tau_ns)).L


@dataclass(frozen=True)
class GateSet:
    name: str
    pulses: Mapping[str, XYPulse]

    def __post_init__(self):
        missing = [g for g in GENERATORS if g not in self.pulses]
        if missing:
            raise ValueError(f"gate set {self.name!r} lacks generators {missing}")

    def durations(self) -> dict:
        return {g: as_xy(p).duration for g, p in self.pulses.items()}


def _axis_family(pi_pulse: XYPulse, half_pulse: XYPulse) -> dict:
    return {
        "X": pi_pulse,
        "Y": pi_pulse.with_phase(pi_pulse.phase + np.pi / 2),
        "X2": half_pulse,
        "-X2": half_pulse.negated(),
        "Y2": half_pulse.with_phase(half_pulse.phase + np.pi / 2),
        "-Y2": half_pulse.with_phase(half_pulse.phase + np.pi / 2).negated(),
    }


def reference_gate_set(shape: str = "gaussian", peak: float = REFERENCE_PEAK) -> GateSet:
    """Amplitude-matched reference pulses at a shared peak drive."""
    pi_pulse = amplitude_matched_reference(shape, np.pi, peak)
    half = amplitude_matched_reference(shape, np.pi / 2, peak)
    return GateSet(shape, _axis_family(pi_pulse, half))


def rcp_gate_set(peak: float = REFERENCE_PEAK) -> GateSet:
    """Robust X(pi) at 50 ns and robust X(pi/2) stretched to the shared peak."""
    half = rescale_to_peak(RCP_LIBRARY["xpi2_r"], peak)
    return GateSet("rcp", _axis_family(RCP_LIBRARY["xpi_r"], half))


def generator_ptms(
    gates: GateSet,
    delta: float = 0.0,
    decoherence: Optional[DecoherenceSetting] = None,
    steps_per_ns: float = 40.0,
) -> dict:
    """PTM of every physical generator under detuning ``delta`` (rad/ns)."""
    noises = [static_detuning(delta)] if delta else []
    out = {}
    for g, pulse in gates.pulses.items():
        p = as_xy(pulse)
        grid = TimeGrid(p.duration, max(200, int(np.ceil(steps_per_ns * p.duration))))
        u = propagate(noisy_hamiltonian(p, noises), grid)[-1]
        ptm = liouville_from_unitary(u).L
        if decoherence is not None:
            ptm = decoherence_ptm(decoherence, p.duration) @ ptm
        out[g] = ptm
    return out


def clifford_ptms(group: CliffordGroup, gen_ptms: Mapping[str, np.ndarray]) -> np.ndarray:
    out = np.empty((len(group.words), 4, 4))
    for k, word in enumerate(group.words):
        m = np.eye(4)
        for g in word:
            m = gen_ptms[g] @ m
        out[k] = m
    return out


DEFAULT_LENGTHS = (1, 10, 25, 50, 100, 200, 300, 500, 750, 1000)
_RHO0 = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


def sequence_rng(seed: int, m: int, index: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, m, index)``.

    ``stream`` separates the Clifford draws (0) from shot sampling (1).
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, m, index, stream])))


@dataclass
class RBDataset:
    lengths: np.ndarray
    fidelities: np.ndarray
    descriptor: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def mean(self) -> np.ndarray:
        return self.fidelities.mean(axis=1)

    def rows(self) -> list:
        return [
            {"m": int(m), "seq_index": j, "fidelity": float(f)}
            for m, row in zip(self.lengths, self.fidelities)
            for j, f in enumerate(row)
        ]


def rb_sequences(
    cliff_ptms: np.ndarray,
    group: CliffordGroup,
    lengths: Sequence[int],
    n_seq: int,
    seed: int = 0,
    interleave: Optional[int] = None,
    interleave_ptm: Optional[np.ndarray] = None,
    shots: Optional[int] = None,
) -> np.ndarray:
    """Ground-state return probabilities, shape ``(len(lengths), n_seq)``.

    With ``interleave`` (a Clifford index) that gate follows every random
    Clifford, using ``interleave_ptm`` as its physical action.
    """
    out = np.empty((len(lengths), n_seq))
    for i, m in enumerate(lengths):
        draws = [sequence_rng(seed, m, j).integers(len(group.words), size=m) for j in range(n_seq)]
        idx = np.stack(draws) if m > 0 else np.zeros((n_seq, 0), dtype=int)
        phys = np.broadcast_to(np.eye(4), (n_seq, 4, 4)).copy()
        ideal = np.zeros(n_seq, dtype=int)
        for k in range(m):
            col = idx[:, k]
            phys = cliff_ptms[col] @ phys
            ideal = group.table[col, ideal]
            if interleave is not None:
                phys = interleave_ptm @ phys
                ideal = group.table[interleave, ideal]
        rec = group.inverse[ideal]
        phys = cliff_ptms[rec] @ phys
        rho = phys @ _RHO0
        p0 = np.clip((rho[:, 0] + rho[:, 3]) / np.sqrt(2.0), 0.0, 1.0)
        if shots:
            p0 = np.array([sequence_rng(seed, m, j, 1).binomial(shots, p) / shots for j, p in enumerate(p0)])
        out[i] = p0
    return out


def rb_run(
    gates: GateSet,
    delta: float = 0.0,
    decoherence: Optional[DecoherenceSetting] = None,
    lengths: Sequence[int] = DEFAULT_LENGTHS,
    n_seq: int = 20,
    seed: int = 0,
    interleave: Optional[str] = None,
    shots: Optional[int] = None,
) -> RBDataset:
    """Reference (or interleaved, with a generator name) RB of a gate set."""
    group = clifford_group()
    gen = generator_ptms(gates, delta, decoherence)
    cps = clifford_ptms(group, gen)
    inter_idx = inter_ptm = None
    if interleave is not None:
        if interleave not in GENERATORS:
            raise ValueError(f"interleaved gate must be one of {GENERATORS}")
        inter_idx = group.index_of(_ROT[interleave])
        inter_ptm = gen[interleave]
    fids = rb_sequences(cps, group, lengths, n_seq, seed, inter_idx, inter_ptm, shots)
    desc = {
        "gate_set": gates.name,
        "delta": float(delta),
        "T1_us": None if decoherence is None else float(decoherence.T1),
        "T2_us": None if decoherence is None else float(decoherence.T2),
        "interleave": interleave,
        "shots": shots,
    }
    return RBDataset(np.asarray(lengths), fids, desc, seed)


@dataclass(frozen=True)
class RBFit:
    A: float
    p: float
    B: float
    F_avg: float
    divisor: float

    @property
    def error_per_gate(self) -> float:
        return 1.0 - self.F_avg


def _decay(m, A, p, B):
    return A * p**m + B


def fit_decay(lengths, mean_fidelity, divisor: float = 3.75) -> RBFit:
    """Fit ``A p^m + B`` with ``p in (0, 1]`` and ``A, B in [0, 1]``."""
    lengths = np.asarray(lengths, dtype=float)
    y = np.asarray(mean_fidelity, dtype=float)
    # least_squares directly: curve_fit would also estimate an unused covariance
    res = least_squares(
        lambda x: _decay(lengths, *x) - y, [0.5, 0.999, 0.5], bounds=([0.0, 1e-9, 0.0], [1.0, 1.0, 1.0]),
        xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=10000,
    )
    A, p, B = res.x
    return RBFit(float(A), float(p), float(B), float(1.0 - (1.0 - p) / divisor), divisor)


def rb_fit(data: RBDataset, divisor: float = 3.75) -> RBFit:
    return fit_decay(data.lengths, data.mean, divisor)


def irb_fidelity(p_gate: float, p_ref: float) -> float:
    """Interleaved gate fidelity ``1 - (1 - p_gate/p_ref)/2``."""
    if p_gate > p_ref:
        warnings.warn("interleaved decay exceeds reference decay", RuntimeWarning, stacklevel=2)
    return 1.0 - (1.0 - p_gate / p_ref) / 2.0


def sequence_variance(data: RBDataset) -> np.ndarray:
    """Unbiased variance of the sequence fidelity at each length."""
    return data.fidelities.var(axis=1, ddof=1)

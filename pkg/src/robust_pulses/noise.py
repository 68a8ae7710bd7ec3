"""Quasi-static noise sources ``V(t) = sum_k eps_k v_k(t) sigma_k``.

A source carries an amplitude ``eps`` and a per-axis direction pattern.
Profiles are either constant (``v_k = direction_k``) or proportional to the
drive envelope (``v_k = direction_k * Omega_k(t) / 2``), which models
control-amplitude error.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pulses import FRAMES, as_xy, hamiltonian_of
from .quantum import AXES, SZ, Sampler, tensor

PROFILES = ("constant", "envelope")


@dataclass(frozen=True)
class NoiseSource:
    label: str
    amplitude: float
    direction: Mapping[str, float]
    profile: str = "constant"
    independent: bool = False
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown noise profile {self.profile!r}")
        bad = set(self.direction) - set(AXES)
        if bad:
            raise ValueError(f"unknown Pauli axes {sorted(bad)}")
        object.__setattr__(self, "direction", dict(self.direction))

    @property
    def axes(self) -> list:
        return [k for k, w in self.direction.items() if w != 0.0]

    def split(self) -> list:
        """One source per independent axis (identity for correlated sources)."""
        if not self.independent:
            return [self]
        return [
            NoiseSource(f"{self.label}_{k}", self.amplitude * w, {k: 1.0}, self.profile)
            for k, w in self.direction.items()
            if w != 0.0
        ]

    def unit_operator(self, pulse, t) -> np.ndarray:
        """Per-unit-amplitude noise operator stack ``(n, 2, 2)`` at times ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, 2, 2), dtype=complex)
        if self.profile == "constant":
            for k, w in self.direction.items():
                out += w * AXES[k]
            return out
        p = as_xy(pulse)
        rates = {"x": p.omega_x(t), "y": p.omega_y(t), "z": p.omega(t)}
        for k, w in self.direction.items():
            out += (0.5 * w * rates[k])[:, None, None] * AXES[k]
        return out

    def hamiltonian(self, pulse, t) -> np.ndarray:
        return self.amplitude * self.unit_operator(pulse, t)

    def scaled(self, amplitude: float) -> "NoiseSource":
        return replace(self, amplitude=amplitude)


def static_detuning(delta: float) -> NoiseSource:
    """Adds ``(delta/2) sigma_z``."""
    return NoiseSource("detuning", 0.5 * delta, {"z": 1.0}, meta={"value": delta})


def amplitude_noise(eps: float) -> NoiseSource:
    """Relative drive error: adds ``(eps/2)(Omega_x sigma_x + Omega_y sigma_y)``."""
    return NoiseSource("amplitude", eps, {"x": 1.0, "y": 1.0}, profile="envelope", meta={"value": eps})


def three_axis_static(dx: float, dy: float, dz: float) -> NoiseSource:
    """Independent constant ``(delta_k/2) sigma_k`` on each axis."""
    return NoiseSource(
        "three_axis", 1.0, {"x": 0.5 * dx, "y": 0.5 * dy, "z": 0.5 * dz}, independent=True,
        meta={"value": (dx, dy, dz)},
    )


def axis_noise(axis: str, delta: float) -> NoiseSource:
    """Single-axis constant ``(delta/2) sigma_axis``."""
    return NoiseSource(f"static_{axis}", 0.5 * delta, {axis: 1.0}, meta={"value": delta})


SPECTATORS = {"0": 1.0, "1": -1.0, "|0>": 1.0, "|1>": -1.0}


def zz_noise(xi: float, spectator: str) -> NoiseSource:
    """ZZ coupling to a spectator in a computational state, reduced to the target.

    ``(xi/2) sz (x) sz`` acts on the target as ``+-(xi/2) sigma_z`` with the sign
    of the spectator's ``sigma_z`` eigenvalue.
    """
    if spectator not in SPECTATORS:
        raise ValueError(f"spectator must be one of {sorted(SPECTATORS)}")
    sign = SPECTATORS[spectator]
    return NoiseSource("zz", 0.5 * sign * xi, {"z": 1.0}, meta={"value": xi, "spectator": spectator})


def zz_operator(xi: float) -> np.ndarray:
    """Two-qubit form ``(xi/2) sigma_z (x) sigma_z``."""
    return 0.5 * xi * tensor(SZ, SZ)


def noisy_hamiltonian(pulse, noises: Iterable[NoiseSource] = (), frame: str = "qubit-2level") -> Sampler:
    """Drive Hamiltonian plus every noise term.

    In the 3-level frame only z noise is supported; it enters as
    ``-delta * n``, which equals ``(delta/2) sigma_z`` on the qubit levels up to
    a global shift.
    """
    noises = list(noises)
    drive = hamiltonian_of(pulse, frame)
    if not noises:
        return drive
    if frame == "qubit-2level":
        def h(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            out = drive(t)
            for n in noises:
                out = out + n.hamiltonian(pulse, t)
            return out

        return h
    if frame not in FRAMES:
        raise ValueError(f"unknown frame {frame!r}")
    shift = 0.0
    for n in noises:
        if n.profile != "constant" or n.axes not in ([], ["z"]):
            raise ValueError("3-level frame supports constant z noise only")
        shift += n.amplitude * n.direction.get("z", 0.0)
    number = np.diag(np.arange(3.0)).astype(complex)

    def h3(t):
        return drive(t) - 2.0 * shift * number

    return h3


def noise_family(kind: str, **fixed):
    """Map a scalar noise value to a source (used by sweeps and margins).

    ``kind`` is one of detuning, amplitude, x, y, z, zz.
    """
    if kind == "detuning" or kind == "z":
        return static_detuning
    if kind == "amplitude":
        return amplitude_noise
    if kind in ("x", "y"):
        return lambda v: axis_noise(kind, v)
    if kind == "zz":
        spectator = fixed.get("spectator", "1")
        return lambda v: zz_noise(v, spectator)
    raise ValueError(f"unknown noise kind {kind!r}")


def decompose(noises: Sequence[NoiseSource]) -> list:
    out = []
    for n in noises:
        out.extend(n.split())
    return out


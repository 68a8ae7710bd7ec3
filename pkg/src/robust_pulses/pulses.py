"""Drive waveforms: sine-modulated Fourier pulses, reference envelopes, DRAG.

Amplitudes are angular frequencies (rad/ns) and the single-qubit drive is
``H = Omega_x/2 sigma_x + Omega_y/2 sigma_y``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import erf

from .quantum import SX, SY, TWO_PI, Sampler, TimeGrid, propagate


def _check_domain(t, duration):
    t = np.asarray(t, dtype=float)
    tol = 1e-9 * max(1.0, duration)
    if np.any(t < -tol) or np.any(t > duration + tol):
        raise ValueError(f"time outside [0, {duration}] ns")
    return np.clip(t, 0.0, duration)


@dataclass(frozen=True)
class FourierPulse:
    """``Omega(t) = sin(pi t/T) (a_0 + sum_n a_n cos(2 pi n t/T + phi_n))``."""

    duration: float
    a: tuple
    phi: tuple
    carrier_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))
        if len(self.a) != len(self.phi) + 1:
            raise ValueError("need N+1 amplitudes for N phases")
        if not self.duration > 0:
            raise ValueError("duration must be positive")

    @property
    def n_components(self) -> int:
        return len(self.phi)

    def __call__(self, t):
        t = _check_domain(t, self.duration)
        u = np.pi * t / self.duration
        series = self.a[0] + sum(
            an * np.cos(2 * n * u + ph) for n, (an, ph) in enumerate(zip(self.a[1:], self.phi), start=1)
        )
        out = np.sin(u) * series
        # the sine prefactor is exactly zero at the endpoints
        return np.where((t == 0.0) | (t == self.duration), 0.0, out)

    def derivative(self, t):
        t = _check_domain(t, self.duration)
        w = np.pi / self.duration
        u = w * t
        series = self.a[0] + sum(
            an * np.cos(2 * n * u + ph) for n, (an, ph) in enumerate(zip(self.a[1:], self.phi), start=1)
        )
        dseries = sum(
            -2 * n * w * an * np.sin(2 * n * u + ph)
            for n, (an, ph) in enumerate(zip(self.a[1:], self.phi), start=1)
        )
        return w * np.cos(u) * series + np.sin(u) * dseries

    def area(self) -> float:
        """Closed-form integral over ``[0, T]``.

        Uses ``int_0^pi sin(u) cos(2 n u) du = 2 / (1 - 4 n^2)``; the
        ``sin(2 n u)`` parts integrate to zero by symmetry about ``pi/2``.
        """
        total = 2.0 * self.a[0]
        for n, (an, ph) in enumerate(zip(self.a[1:], self.phi), start=1):
            total += an * np.cos(ph) * 2.0 / (1.0 - 4.0 * n * n)
        return self.duration / np.pi * total

    def rescale(self, alpha: float) -> "FourierPulse":
        """Stretch time by ``alpha`` and divide amplitudes by ``alpha``."""
        if not alpha > 0:
            raise ValueError("rescale factor must be positive")
        return replace(self, duration=self.duration * alpha, a=tuple(x / alpha for x in self.a))

    def params(self) -> np.ndarray:
        return np.concatenate([self.a, self.phi])

    @classmethod
    def from_params(cls, params, duration: float, carrier_phase: float = 0.0) -> "FourierPulse":
        params = np.asarray(params, dtype=float)
        n = (len(params) - 1) // 2
        return cls(duration, tuple(params[: n + 1]), tuple(params[n + 1 :]), carrier_phase)


@dataclass(frozen=True)
class ReferencePulse:
    """Gaussian (offset-subtracted, peak-normalised) or raised-cosine envelope.

    ``peak`` is signed; its sign sets the rotation sense.
    """

    shape: str
    duration: float
    peak: float
    sigma: Optional[float] = None

    def __post_init__(self):
        if self.shape not in ("gaussian", "cosine"):
            raise ValueError(f"unknown reference shape {self.shape!r}")
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if self.shape == "gaussian" and self.sigma is None:
            object.__setattr__(self, "sigma", self.duration / 6.0)

    def _unit(self, t):
        T = self.duration
        if self.shape == "cosine":
            return 0.5 * (1.0 - np.cos(TWO_PI * t / T))
        s = self.sigma
        off = np.exp(-((T / 2) ** 2) / (2 * s * s))
        return (np.exp(-((t - T / 2) ** 2) / (2 * s * s)) - off) / (1.0 - off)

    def _unit_derivative(self, t):
        T = self.duration
        if self.shape == "cosine":
            return np.pi / T * np.sin(TWO_PI * t / T)
        s = self.sigma
        off = np.exp(-((T / 2) ** 2) / (2 * s * s))
        return -(t - T / 2) / (s * s) * np.exp(-((t - T / 2) ** 2) / (2 * s * s)) / (1.0 - off)

    def unit_area(self) -> float:
        T = self.duration
        if self.shape == "cosine":
            return T / 2.0
        s = self.sigma
        off = np.exp(-((T / 2) ** 2) / (2 * s * s))
        gauss = s * np.sqrt(2 * np.pi) * erf(T / (2 * np.sqrt(2) * s))
        return (gauss - T * off) / (1.0 - off)

    def __call__(self, t):
        t = _check_domain(t, self.duration)
        return self.peak * self._unit(t)

    def derivative(self, t):
        t = _check_domain(t, self.duration)
        return self.peak * self._unit_derivative(t)

    def area(self) -> float:
        return self.peak * self.unit_area()

    @classmethod
    def for_angle(cls, shape: str, angle: float, duration: float, sigma_fraction: float = 1 / 6):
        """Envelope of fixed duration whose area equals ``angle``."""
        sigma = duration * sigma_fraction if shape == "gaussian" else None
        unit = cls(shape, duration, 1.0, sigma)
        return cls(shape, duration, angle / unit.unit_area(), sigma)

    @classmethod
    def amplitude_matched(cls, shape: str, angle: float, peak: float, sigma_fraction: float = 1 / 6):
        """Envelope with ``|peak|`` fixed; the duration is solved for the area."""
        # unit area is linear in T for a fixed sigma/T ratio
        probe = cls.for_angle(shape, 1.0, 1.0, sigma_fraction).unit_area()
        duration = abs(angle) / (abs(peak) * probe)
        return cls.for_angle(shape, angle, duration, sigma_fraction)


@dataclass(frozen=True)
class SampledEnvelope:
    """Envelope given by uniform samples on ``[0, T]`` (endpoints included)."""

    duration: float
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) < 3:
            raise ValueError("need at least three samples")

    @property
    def _grid(self):
        return np.linspace(0.0, self.duration, len(self.values))

    def __call__(self, t):
        t = _check_domain(t, self.duration)
        return np.interp(t, self._grid, self.values)

    def derivative(self, t):
        t = _check_domain(t, self.duration)
        grad = np.gradient(np.asarray(self.values), self._grid)
        return np.interp(t, self._grid, grad)

    def area(self) -> float:
        return float(np.trapezoid(self.values, self._grid))


@dataclass(frozen=True)
class AnalyticEnvelope:
    """Envelope from a vectorized callable, e.g. a chirped quadrature.

    Without ``deriv`` the derivative falls back to a central difference.
    """

    duration: float
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, t):
        return np.asarray(self.fn(_check_domain(t, self.duration)), dtype=float)

    def derivative(self, t):
        t = _check_domain(t, self.duration)
        if self.deriv is not None:
            return np.asarray(self.deriv(t), dtype=float)
        h = 1e-6 * self.duration
        return (self.fn(t + h) - self.fn(t - h)) / (2 * h)

    def area(self) -> float:
        ts = np.linspace(0.0, self.duration, 4001)
        return float(np.trapezoid(self.fn(ts), ts))


Envelope = Union[FourierPulse, ReferencePulse, SampledEnvelope, AnalyticEnvelope]


@dataclass(frozen=True)
class XYPulse:
    """Two-quadrature drive with optional first-order DRAG on the y quadrature.

    ``phase`` rotates the whole drive in the xy plane, so a Y rotation is
    the same envelope with ``phase = pi/2``.
    """

    x: Optional[Envelope]
    y: Optional[Envelope] = None
    phase: float = 0.0
    drag: float = 0.0
    anharmonicity: Optional[float] = None
    name: str = ""
    duration: float = field(init=False)

    def __post_init__(self):
        durations = {e.duration for e in (self.x, self.y) if e is not None}
        if not durations:
            raise ValueError("pulse needs at least one envelope")
        if len(durations) > 1 and max(durations) - min(durations) > 1e-9:
            raise ValueError("x and y envelopes must share a duration")
        object.__setattr__(self, "duration", max(durations))
        if self.drag != 0.0 and not self.anharmonicity:
            raise ValueError("DRAG needs a nonzero anharmonicity")

    def _base(self, t):
        t = np.asarray(t, dtype=float)
        bx = self.x(t) if self.x is not None else np.zeros_like(t)
        by = self.y(t) if self.y is not None else np.zeros_like(t)
        return bx, by + drag_quadrature(self, t)

    def omega_x(self, t):
        bx, by = self._base(t)
        return np.cos(self.phase) * bx - np.sin(self.phase) * by

    def omega_y(self, t):
        bx, by = self._base(t)
        return np.sin(self.phase) * bx + np.cos(self.phase) * by

    def omega(self, t):
        """Drive magnitude ``sqrt(Omega_x^2 + Omega_y^2)``."""
        bx, by = self._base(t)
        return np.hypot(bx, by)

    def peak(self, samples: int = 4001) -> float:
        return float(np.max(self.omega(np.linspace(0.0, self.duration, samples))))

    def rescale(self, alpha: float) -> "XYPulse":
        def _r(e):
            if e is None:
                return None
            if isinstance(e, FourierPulse):
                return e.rescale(alpha)
            if isinstance(e, ReferencePulse):
                sigma = None if e.sigma is None else e.sigma * alpha
                return ReferencePulse(e.shape, e.duration * alpha, e.peak / alpha, sigma)
            if not alpha > 0:
                raise ValueError("rescale factor must be positive")
            if isinstance(e, AnalyticEnvelope):
                f = e.fn
                return AnalyticEnvelope(e.duration * alpha, lambda t: f(t / alpha) / alpha)
            return SampledEnvelope(e.duration * alpha, tuple(v / alpha for v in e.values))

        return replace(self, x=_r(self.x), y=_r(self.y))

    def with_phase(self, phase: float) -> "XYPulse":
        return replace(self, phase=phase)

    def negated(self) -> "XYPulse":
        return replace(self, phase=self.phase + np.pi)


def as_xy(pulse) -> XYPulse:
    """Wrap a bare envelope as an x-quadrature drive."""
    if isinstance(pulse, XYPulse):
        return pulse
    phase = getattr(pulse, "carrier_phase", 0.0)
    return XYPulse(pulse, None, phase=phase)


def fourier_envelope(p: FourierPulse, t):
    return p(t)


def rescale(p, alpha: float):
    return p.rescale(alpha)


def drag_quadrature(p: XYPulse, t):
    """First-order DRAG term ``-drag * dOmega_x/dt / anharmonicity``."""
    t = np.asarray(t, dtype=float)
    if p.drag == 0.0 or p.x is None:
        return np.zeros_like(t)
    if not p.anharmonicity:
        raise ValueError("DRAG needs a nonzero anharmonicity")
    return -p.drag * p.x.derivative(t) / p.anharmonicity


FRAMES = ("qubit-2level", "transmon-3level")


def ladder(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels)), 1).astype(complex)


def hamiltonian_of(pulse, frame: str = "qubit-2level", anharmonicity: Optional[float] = None) -> Sampler:
    """Vectorised Hamiltonian sampler for a pulse in the rotating frame.

    ``transmon-3level`` adds the anharmonic shift on ``|2>`` and scales the
    1-2 drive element by sqrt(2).
    """
    p = as_xy(pulse)
    if frame == "qubit-2level":
        def h(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            ox, oy = p.omega_x(t), p.omega_y(t)
            return 0.5 * (ox[:, None, None] * SX + oy[:, None, None] * SY)

        return h
    if frame == "transmon-3level":
        u = anharmonicity if anharmonicity is not None else p.anharmonicity
        if u is None:
            raise ValueError("transmon frame needs an anharmonicity")
        a = ladder(3)
        qx = a + a.conj().T
        qy = 1j * (a.conj().T - a)
        static = np.diag([0.0, 0.0, u]).astype(complex)

        def h3(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            ox, oy = p.omega_x(t), p.omega_y(t)
            return static + 0.5 * (ox[:, None, None] * qx + oy[:, None, None] * qy)

        return h3
    raise ValueError(f"unknown frame {frame!r}; expected one of {FRAMES}")


def simulate(pulse, grid: Optional[TimeGrid] = None, frame: str = "qubit-2level", steps: int = 2000):
    """Noise-free propagator trajectory of ``pulse`` (default 2000 steps)."""
    p = as_xy(pulse)
    grid = grid or TimeGrid(p.duration, steps)
    return propagate(hamiltonian_of(p, frame), grid)


def _fourier(a, phi, T=50.0):
    return FourierPulse(T, tuple(a), tuple(phi))


# Robust pulses at T = 50 ns (amplitudes in rad/ns).
RCP_LIBRARY = {
    # X(pi), robust to z (frequency) noise
    "xpi_r": XYPulse(_fourier([0.01034, -0.25855, -0.03278], [-0.01523, -0.03790]), name="xpi_r"),
    # X(pi/2), robust to z noise; realised as a 5pi/2 rotation
    "xpi2_r": XYPulse(_fourier([0.34930, 0.30764, 0.00026], [-0.00305, -0.00609]), name="xpi2_r"),
    # X(pi), robust to z and control-amplitude noise
    "xpi_all": XYPulse(
        _fourier([-0.13158, -0.65450, -0.42338], [0.00214, 0.00734]),
        _fourier([-0.41686, -0.65453, -0.56110], [-0.00144, -0.00528]),
        name="xpi_all",
    ),
    # X(pi), robust to independent static x, y and z noise (N = 3)
    "xpi_all2": XYPulse(
        _fourier([0.00701, -0.23557, 0.03234, -0.24956], [0.00800, -0.60128, -0.02887]),
        _fourier([-0.32726, -0.12747, 0.16732, 0.06606], [0.03469, -0.07938, -0.09605]),
        name="xpi_all2",
    ),
}

RCP_TARGET_ANGLES = {"xpi_r": np.pi, "xpi2_r": np.pi / 2, "xpi_all": np.pi, "xpi_all2": np.pi}

# Peak drive shared by the reference gates, 2 pi x 37.5 MHz.
REFERENCE_PEAK = TWO_PI * 0.0375


def rescale_to_peak(pulse: XYPulse, peak: float = REFERENCE_PEAK) -> XYPulse:
    """Time-stretch ``pulse`` so its peak drive equals ``peak``."""
    return pulse.rescale(pulse.peak() / peak)


def amplitude_matched_reference(shape: str, angle: float, peak: float = REFERENCE_PEAK) -> XYPulse:
    return XYPulse(ReferencePulse.amplitude_matched(shape, angle, peak), name=f"{shape}_{angle:.4g}")

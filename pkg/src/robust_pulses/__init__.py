"""Robust single- and two-qubit control pulses from error-curve geometry."""
from .geometry import ErrorCurve, FrenetFrame, error_curve, frenet_frame, total_error_distance
from .metrics import avg_fidelity_from_distance, fidelity_report, noise_margin, unitary_gate_fidelity
from .noise import NoiseSource, amplitude_noise, static_detuning, three_axis_static, zz_noise
from .optimize import OptimizationProblem, optimize
from .pulses import RCP_LIBRARY, FourierPulse, ReferencePulse, XYPulse, amplitude_matched_reference
from .quantum import TimeGrid, mhz_to_rad_per_ns, propagate, rad_per_ns_to_mhz

__all__ = [
    "ErrorCurve", "FrenetFrame", "error_curve", "frenet_frame", "total_error_distance",
    "avg_fidelity_from_distance", "fidelity_report", "noise_margin", "unitary_gate_fidelity",
    "NoiseSource", "amplitude_noise", "static_detuning", "three_axis_static", "zz_noise",
    "OptimizationProblem", "optimize",
    "RCP_LIBRARY", "FourierPulse", "ReferencePulse", "XYPulse", "amplitude_matched_reference",
    "TimeGrid", "mhz_to_rad_per_ns", "propagate", "rad_per_ns_to_mhz",
]

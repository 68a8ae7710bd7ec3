"""Pulse files, CSV emission and run manifests.

Pulse files are YAML or JSON mappings with fields ``name, kind, T_ns, a,
phi, carrier_phase, drag_coeff, anharmonicity_MHz`` and an optional ``y``
block (``a``, ``phi``) for two-quadrature pulses.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import yaml

from .geometry import ErrorCurve, frenet_frame
from .pulses import (
    RCP_LIBRARY,
    FourierPulse,
    ReferencePulse,
    XYPulse,
    amplitude_matched_reference,
)
from .quantum import mhz_to_rad_per_ns, rad_per_ns_to_mhz

UNITS_NOTE = "units: time in ns; frequencies as f = omega/2pi in MHz; amplitudes dimensionless unless suffixed"

ANGLES = {"pi": np.pi, "pi2": np.pi / 2, "-pi": -np.pi, "-pi2": -np.pi / 2}


class PulseFileError(ValueError):
    pass


def pulse_to_dict(pulse: XYPulse) -> dict:
    x = pulse.x
    if not isinstance(x, FourierPulse) or (pulse.y is not None and not isinstance(pulse.y, FourierPulse)):
        raise PulseFileError("only Fourier-ansatz pulses can be written to a pulse file")
    out = {
        "name": pulse.name or "pulse",
        "kind": "fourier",
        "T_ns": float(x.duration),
        "a": [float(v) for v in x.a],
        "phi": [float(v) for v in x.phi],
        "carrier_phase": float(pulse.phase + x.carrier_phase),
        "drag_coeff": float(pulse.drag),
        "anharmonicity_MHz": None if pulse.anharmonicity is None else float(rad_per_ns_to_mhz(pulse.anharmonicity)),
    }
    if pulse.y is not None:
        out["y"] = {"a": [float(v) for v in pulse.y.a], "phi": [float(v) for v in pulse.y.phi]}
    return out


def pulse_from_dict(d: Mapping) -> XYPulse:
    kind = d.get("kind", "fourier")
    name = d.get("name", "")
    if kind == "library":
        return RCP_LIBRARY[d["name"]]
    if kind in ("gaussian", "cosine"):
        angle = float(d.get("angle", np.pi))
        if "T_ns" in d:
            return XYPulse(ReferencePulse.for_angle(kind, angle, float(d["T_ns"])), phase=float(d.get("carrier_phase", 0.0)), name=name)
        peak = mhz_to_rad_per_ns(d.get("peak_MHz", 37.5))
        return amplitude_matched_reference(kind, angle, float(peak))
    if kind != "fourier":
        raise PulseFileError(f"kind: unknown pulse kind {kind!r}")
    for key in ("T_ns", "a", "phi"):
        if key not in d:
            raise PulseFileError(f"{key}: missing field")
    T = float(d["T_ns"])
    x = FourierPulse(T, d["a"], d["phi"])
    y = FourierPulse(T, d["y"]["a"], d["y"]["phi"]) if d.get("y") else None
    anh = d.get("anharmonicity_MHz")
    return XYPulse(
        x, y,
        phase=float(d.get("carrier_phase", 0.0)),
        drag=float(d.get("drag_coeff", 0.0)),
        anharmonicity=None if anh is None else float(mhz_to_rad_per_ns(anh)),
        name=name,
    )


def save_pulse(pulse: XYPulse, path) -> None:
    path = Path(path)
    d = pulse_to_dict(pulse)
    if path.suffix == ".json":
        path.write_text(json.dumps(d, indent=2) + "\n")
    else:
        path.write_text(yaml.safe_dump(d, sort_keys=False))


def load_pulse(path) -> XYPulse:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"pulse file {path} not found")
    text = path.read_text()
    d = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    return pulse_from_dict(d)


def resolve_pulse(ref, base_dir: Path = Path(".")) -> XYPulse:
    """Pulse from a library name, ``shape:angle`` reference, file path or inline mapping."""
    if isinstance(ref, Mapping):
        return pulse_from_dict(ref)
    ref = str(ref)
    if ref in RCP_LIBRARY:
        return RCP_LIBRARY[ref]
    if ":" in ref:
        shape, angle = ref.split(":", 1)
        if shape in ("gaussian", "cosine") and angle in ANGLES:
            return amplitude_matched_reference(shape, ANGLES[angle])
    path = Path(ref) if Path(ref).is_absolute() else base_dir / ref
    return load_pulse(path)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_csv(path, rows: Iterable[Mapping], columns: Sequence[str], note: str = UNITS_NOTE) -> Path:
    """CSV with a ``#`` comment line carrying the unit convention."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(f"# {note}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])
    return path


def read_csv(path) -> list:
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


CURVE_COLUMNS = ("t_ns", "rx", "ry", "rz", "v", "kappa", "tau")


def curve_rows(curve: ErrorCurve) -> list:
    frame = frenet_frame(curve)
    return [
        {
            "t_ns": t, "rx": r[0], "ry": r[1], "rz": r[2], "v": v,
            "kappa": k if ok else None, "tau": tau if ok else None,
        }
        for t, r, v, k, tau, ok in zip(curve.times, curve.r, frame.speed, frame.curvature, frame.torsion, frame.valid)
    ]


def config_hash(config: Mapping) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(out_dir, config: Mapping, outputs: Sequence[str], version: str) -> Path:
    path = Path(out_dir) / "manifest.json"
    manifest = {
        "config": config,
        "config_sha256": config_hash(config),
        "seed": config.get("seed"),
        "version": version,
        "outputs": sorted(outputs),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path

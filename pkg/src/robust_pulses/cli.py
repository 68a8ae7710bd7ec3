"""Batch command line: one YAML config per experiment, CSV outputs plus a manifest.

Usage::

    robust-pulses sweep --config sweep.yaml --out results/ --threads 4

Frequencies in configs carry a ``_MHz`` suffix and mean ``f = omega / 2 pi``;
unsuffixed noise values are dimensionless (amplitude noise).
"""
from __future__ import annotations

import argparse
import sys
import zlib
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
import yaml

from . import experiments as ex
from .benchmarking import DEFAULT_LENGTHS, GENERATORS, DecoherenceSetting
from .geometry import error_curve
from .io import CURVE_COLUMNS, PulseFileError, curve_rows, resolve_pulse, save_pulse, write_csv, write_manifest
from .noise import axis_noise, noise_family, static_detuning
from .optimize import OptimizationProblem
from .pulses import as_xy
from .quantum import TimeGrid, mhz_to_rad_per_ns, rad_per_ns_to_mhz
from .twoqubit import MODELS, coupling_from_drive

KINDS = ("design", "curve", "sweep1d", "sweep2d", "qpt", "rb", "irb", "twoqubit", "margin", "fig3d")
COMMANDS = {
    "design": ("design",), "curve": ("curve",), "sweep": ("sweep1d", "sweep2d"), "qpt": ("qpt",),
    "rb": ("rb",), "irb": ("irb",), "twoqubit": ("twoqubit",), "margin": ("margin",), "fig3d": ("fig3d",),
}
STOCHASTIC = ("design", "rb", "irb", "twoqubit")
FREQUENCY_KINDS = ("detuning", "z", "x", "y", "zz")
NOISE_KINDS = FREQUENCY_KINDS + ("amplitude", "three_axis")


class ConfigError(ValueError):
    """Schema violation; the message starts with the offending field path."""


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def experiment_seed(seed: int, kind: str, stream: int = 0) -> int:
    """Derived 63-bit seed from a counter-based generator keyed by ``(seed, kind, stream)``."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(kind.encode()), int(stream)])
    return int(np.random.Generator(np.random.Philox(ss)).integers(2**63))


# ---- schema helpers -------------------------------------------------------

_MISSING = object()


def _field(cfg: Mapping, key: str, path: str, kind=None, default=_MISSING):
    if key not in cfg or cfg[key] is None:
        if default is _MISSING:
            raise ConfigError(f"{path}{key}: missing required field")
        return default
    v = cfg[key]
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}{key}: expected a number, got {v!r}")
        return float(v)
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{path}{key}: expected an integer, got {v!r}")
        return v
    if kind is bool and not isinstance(v, bool):
        raise ConfigError(f"{path}{key}: expected true/false, got {v!r}")
    if kind is str and not isinstance(v, str):
        raise ConfigError(f"{path}{key}: expected a string, got {v!r}")
    if kind is list and not isinstance(v, list):
        raise ConfigError(f"{path}{key}: expected a list, got {v!r}")
    if kind is dict and not isinstance(v, Mapping):
        raise ConfigError(f"{path}{key}: expected a mapping, got {v!r}")
    return v


def _numbers(v, path: str) -> list:
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise ConfigError(f"{path}: expected a list of numbers")
    return [float(x) for x in v]


def _choice(v, options, path: str):
    if v not in options:
        raise ConfigError(f"{path}: must be one of {list(options)}, got {v!r}")
    return v


def axis_values(spec: Mapping, path: str, frequency: bool) -> list:
    """Values from ``values[_MHz]`` or ``linspace[_MHz]: [start, stop, num]``, in internal units."""
    suffix = "_MHz" if frequency else ""
    wrong = "" if frequency else "_MHz"
    for key in ("values" + wrong, "linspace" + wrong):
        if key in spec:
            unit = "MHz" if frequency else "dimensionless"
            raise ConfigError(f"{path}.{key}: this axis is {unit}; use '{key.replace(wrong, '') + suffix}'")
    if "values" + suffix in spec:
        vals = _numbers(spec["values" + suffix], f"{path}.values{suffix}")
    elif "linspace" + suffix in spec:
        lin = spec["linspace" + suffix]
        if not isinstance(lin, list) or len(lin) != 3 or not isinstance(lin[2], int):
            raise ConfigError(f"{path}.linspace{suffix}: expected [start, stop, num]")
        a, b = _numbers(lin[:2], f"{path}.linspace{suffix}")
        vals = list(np.linspace(a, b, lin[2]))
    else:
        raise ConfigError(f"{path}.values{suffix}: missing required field")
    return [mhz_to_rad_per_ns(v) for v in vals] if frequency else vals


def noise_grid(spec, path: str):
    """``(kind, family, values)`` from a noise-axis mapping."""
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{path}: expected a mapping")
    kind = _choice(_field(spec, "kind", path + "."), NOISE_KINDS, f"{path}.kind")
    if kind == "three_axis":
        axis = _choice(_field(spec, "axis", path + ".", str), ("x", "y", "z"), f"{path}.axis")
        kind = "detuning" if axis == "z" else axis
    fixed = {}
    if kind == "zz":
        fixed["spectator"] = str(_field(spec, "spectator", path + ".", default="1"))
        if fixed["spectator"] not in ("0", "1"):
            raise ConfigError(f"{path}.spectator: must be '0' or '1'")
    return kind, noise_family(kind, **fixed), axis_values(spec, path, kind in FREQUENCY_KINDS)


def design_noises(items, path: str) -> tuple:
    """Unit-amplitude noise sources for the optimizer."""
    if not isinstance(items, list) or not items:
        raise ConfigError(f"{path}: expected a non-empty list of noise kinds")
    out = []
    for i, k in enumerate(items):
        k = _choice(k, NOISE_KINDS, f"{path}[{i}]")
        if k == "three_axis":
            out += [axis_noise("x", 1.0), axis_noise("y", 1.0), static_detuning(1.0)]
        else:
            out.append(noise_family(k)(1.0))
    return tuple(out)


def decoherence(spec, path: str) -> Optional[DecoherenceSetting]:
    if spec is None:
        return None
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{path}: expected a mapping with T1_us and T2_us")
    t1 = _field(spec, "T1_us", path + ".", float)
    t2 = _field(spec, "T2_us", path + ".", float)
    try:
        return DecoherenceSetting(t1, t2)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from None


def pulses_section(cfg: Mapping, base: Path, key: str = "pulses") -> dict:
    """Named pulses from a reference, a list of references or a name-to-reference mapping."""
    raw = _field(cfg, key, "")
    if isinstance(raw, str) or (isinstance(raw, Mapping) and "kind" in raw):
        raw = [raw]
    if isinstance(raw, Mapping):
        items = list(raw.items())
    elif isinstance(raw, list):
        items = [(r.get("name", f"pulse{i}") if isinstance(r, Mapping) else str(r), r) for i, r in enumerate(raw)]
    else:
        raise ConfigError(f"{key}: expected a pulse reference, list or mapping")
    out = {}
    for name, ref in items:
        try:
            out[str(name)] = resolve_pulse(ref, base)
        except (PulseFileError, FileNotFoundError, KeyError, ValueError) as e:
            raise ConfigError(f"{key}.{name}: {e}") from None
    return out


def target_of(cfg: Mapping, path: str = "target") -> np.ndarray:
    return ex.TARGETS[_choice(_field(cfg, "target", "", str, "X"), ex.TARGETS, path)]


# ---- config ---------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Validated experiment configuration (the raw mapping is kept for the manifest)."""

    kind: str
    raw: dict
    base_dir: Path = Path(".")
    seed: Optional[int] = None
    steps: int = 2000
    threads: int = 1

    @classmethod
    def from_mapping(cls, raw: Mapping, base_dir: Path = Path("."), command: Optional[str] = None,
                     seed=None, steps=None, threads=None) -> "ExperimentConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError("<root>: config must be a mapping")
        raw = dict(raw)
        allowed = COMMANDS[command] if command else KINDS
        default = allowed[0] if len(allowed) == 1 else _MISSING
        if command == "sweep" and "experiment" not in raw:
            default = "sweep2d" if "detuning" in raw and "epsilon" in raw else "sweep1d"
        kind = _choice(_field(raw, "experiment", "", str, default), allowed, "experiment")
        raw["experiment"] = kind
        if seed is not None:
            raw["seed"] = int(seed)
        if steps is not None:
            raw["steps"] = int(steps)
        if threads is not None:
            raw["threads"] = int(threads)
        cfg_seed = _field(raw, "seed", "", int, None)
        if cfg_seed is None and kind in STOCHASTIC:
            raise ConfigError(f"seed: required for {kind} experiments")
        if cfg_seed is not None and cfg_seed < 0:
            raise ConfigError("seed: must be non-negative")
        st = _field(raw, "steps", "", int, 2000)
        th = _field(raw, "threads", "", int, 1)
        if st < 10:
            raise ConfigError("steps: must be at least 10")
        if th < 1:
            raise ConfigError("threads: must be at least 1")
        return cls(kind, raw, Path(base_dir), cfg_seed, st, th)

    def manifest_config(self) -> dict:
        # the thread count never changes results, so it stays out of the hash
        return {k: v for k, v in self.raw.items() if k != "threads"}


def load_config(path, **overrides) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"<config>: file {path} not found")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"<config>: not parseable: {e}") from None
    return ExperimentConfig.from_mapping(raw or {}, path.parent, **overrides)


# ---- runners --------------------------------------------------------------


class _Outputs:
    """Tracks written files so a failed run leaves nothing behind."""

    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.paths: list = []

    def csv(self, name, rows, columns):
        self.paths.append(write_csv(self.dir / name, rows, columns))

    def add(self, path):
        self.paths.append(Path(path))

    def cleanup(self):
        for p in self.paths:
            Path(p).unlink(missing_ok=True)


SWEEP1D_COLUMNS = ("pulse", "noise", "F_avg", "F_worst", "R", "D_lower", "D_upper", "F_gate")


def _design(c: ExperimentConfig, out: _Outputs):
    d = _field(c.raw, "design", "", dict, {})
    problem = OptimizationProblem(
        target_of(d, "design.target"),
        design_noises(_field(d, "noises", "design.", list, ["detuning"]), "design.noises"),
        duration=_field(d, "duration_ns", "design.", float, 50.0),
        n_components=_field(d, "n_components", "design.", int, 2),
        mode=_choice(_field(d, "mode", "design.", str, "x"), ("x", "xy"), "design.mode"),
        seed=c.seed,
        tolerance=_field(d, "tolerance", "design.", float, 1e-4),
        max_iter=_field(d, "max_iter", "design.", int, 3000),
        restarts=_field(d, "restarts", "design.", int, 8),
        steps=_field(d, "steps", "design.", int, 1000),
        verify_steps=c.steps,
        second_order=_field(d, "second_order", "design.", bool, False),
        selection=_choice(_field(d, "selection", "design.", str, "first"), ("first", "min_peak"), "design.selection"),
    )
    pulse, trace, checks = ex.design_result(problem)
    pulse = type(pulse)(pulse.x, pulse.y, name=_field(d, "name", "design.", str, "designed"))
    rows = trace.rows()
    cols = ["iteration", "cost", "fidelity"] + [f"R{j}" for j in range(len(problem.noises))]
    out.csv("trace.csv", rows, cols)
    out.csv("robustness.csv", checks, ("noise", "distance", "closure", "slope"))
    path = out.dir / "pulse.yaml"
    save_pulse(pulse, path)
    out.add(path)
    summary = [{"converged": trace.converged, "restart": trace.restart, "verified_cost": trace.verified_cost,
                "peak_MHz": rad_per_ns_to_mhz(as_xy(pulse).peak())}]
    out.csv("summary.csv", summary, ("converged", "restart", "verified_cost", "peak_MHz"))


def _curve(c: ExperimentConfig, out: _Outputs):
    pulses = pulses_section(c.raw, c.base_dir)
    kinds = _field(c.raw, "noises", "", list, ["detuning"])
    noises = design_noises(kinds, "noises")
    for pname, p in pulses.items():
        grid = TimeGrid(as_xy(p).duration, c.steps)
        for n in noises:
            out.csv(f"curve_{pname}_{n.label}.csv", curve_rows(error_curve(p, n, grid)), CURVE_COLUMNS)


def _sweep1d(c: ExperimentConfig, out: _Outputs):
    pulses = pulses_section(c.raw, c.base_dir)
    kind, _, values = noise_grid(_field(c.raw, "noise", ""), "noise")
    with_qpt = _field(c.raw, "qpt", "", bool, False)
    rows = ex.sweep1d_rows(pulses, kind, values, target_of(c.raw), c.steps, with_qpt, c.threads)
    out.csv("sweep1d.csv", rows, SWEEP1D_COLUMNS + (("F_qpt",) if with_qpt else ()))


def _sweep2d(c: ExperimentConfig, out: _Outputs):
    pulses = pulses_section(c.raw, c.base_dir)
    eps = axis_values(_field(c.raw, "epsilon", "", dict), "epsilon", False)
    det = axis_values(_field(c.raw, "detuning", "", dict), "detuning", True)
    rows = ex.sweep2d_rows(pulses, eps, det, target_of(c.raw), c.steps, c.threads)
    out.csv("sweep2d.csv", rows, ("pulse", "epsilon", "delta_MHz", "F_gate", "F_qpt", "R"))


def _qpt(c: ExperimentConfig, out: _Outputs):
    pulses = pulses_section(c.raw, c.base_dir)
    det = axis_values(_field(c.raw, "detuning", "", dict), "detuning", True)
    rows = ex.qpt_rows(pulses, det, target_of(c.raw), c.steps, c.threads)
    out.csv("qpt.csv", rows, ("pulse", "noise_MHz", "F_qpt", "F_predicted"))


def _margin(c: ExperimentConfig, out: _Outputs):
    pulses = pulses_section(c.raw, c.base_dir)
    kind = _choice(_field(c.raw, "noise_kind", "", str, "detuning"), FREQUENCY_KINDS, "noise_kind")
    threshold = _field(c.raw, "threshold", "", float, 0.99)
    if not 0 < threshold < 1:
        raise ConfigError("threshold: must lie in (0, 1)")
    rows = ex.margin_rows(pulses, kind, threshold, c.steps, c.threads)
    out.csv("margin.csv", rows, ("pulse", "noise", "threshold", "margin_MHz"))


def _lengths(cfg) -> list:
    lengths = _field(cfg, "lengths", "", list, list(DEFAULT_LENGTHS))
    if any(isinstance(m, bool) or not isinstance(m, int) or m < 0 for m in lengths):
        raise ConfigError("lengths: expected non-negative integers")
    return lengths


def _rb(c: ExperimentConfig, out: _Outputs):
    sets = _field(c.raw, "gate_sets", "", list, ["gaussian", "rcp"])
    for i, g in enumerate(sets):
        _choice(g, ex.GATE_SETS, f"gate_sets[{i}]")
    det = axis_values(_field(c.raw, "detuning", "", dict, {"values_MHz": [0.0]}), "detuning", True)
    shots = _field(c.raw, "shots", "", int, None)
    data, fits, var = ex.rb_experiment(
        sets, det, decoherence(c.raw.get("decoherence"), "decoherence"), _lengths(c.raw),
        _field(c.raw, "n_seq", "", int, 20), experiment_seed(c.seed, "rb"),
        _field(c.raw, "divisor", "", float, 3.75), shots, c.threads,
    )
    out.csv("rb_data.csv", data, ("gate_set", "delta_MHz", "m", "seq_index", "fidelity"))
    out.csv("rb_fit.csv", fits, ("gate_set", "delta_MHz", "A", "p", "B", "F_avg", "divisor", "error_per_gate"))
    out.csv("rb_variance.csv", var, ("gate_set", "delta_MHz", "m", "sigma2"))


def _irb(c: ExperimentConfig, out: _Outputs):
    gate_set = _choice(_field(c.raw, "gate_set", "", str, "rcp"), ex.GATE_SETS, "gate_set")
    gates = _field(c.raw, "gates", "", list, list(GENERATORS))
    for i, g in enumerate(gates):
        _choice(g, GENERATORS, f"gates[{i}]")
    delta = mhz_to_rad_per_ns(_field(c.raw, "detuning_MHz", "", float, 0.0))
    rows = ex.irb_rows(gate_set, gates, delta, decoherence(c.raw.get("decoherence"), "decoherence"),
                       _lengths(c.raw), _field(c.raw, "n_seq", "", int, 20), experiment_seed(c.seed, "irb"),
                       c.threads)
    out.csv("irb.csv", rows, ("gate_set", "gate", "delta_MHz", "p_ref", "p_gate", "F_gate"))


def _twoqubit(c: ExperimentConfig, out: _Outputs):
    models = _field(c.raw, "models", "", list, list(MODELS))
    for i, m in enumerate(models):
        _choice(m, MODELS, f"models[{i}]")
    values = axis_values(_field(c.raw, "noise", "", dict), "noise", True)
    coupling = None
    if "drive" in c.raw:
        # an X(pi) drive on the odd sector maps to the coupling g = drive / 2
        coupling = coupling_from_drive(next(iter(pulses_section(c.raw, c.base_dir, "drive").values())))
    sweep, widths = ex.twoqubit_rows(models, values, coupling, min(c.steps, 1000), c.seed, c.threads)
    out.csv("twoqubit.csv", sweep, ("model", "noise_value_MHz", "fidelity_rcp", "fidelity_cosine"))
    out.csv("twoqubit_width.csv", widths, ("model", "width_rcp_MHz", "width_cosine_MHz", "ratio"))


def _fig3d(c: ExperimentConfig, out: _Outputs):
    eps = axis_values(_field(c.raw, "epsilon", "", dict), "epsilon", False)
    t_us = _numbers(_field(c.raw, "T_us", "", list), "T_us")
    if any(t <= 0 for t in t_us):
        raise ConfigError("T_us: decoherence times must be positive")
    rows = ex.fig3d_rows(eps, t_us, steps=c.steps, threads=c.threads)
    out.csv("fig3d.csv", rows, ("epsilon", "T_us", "F_rcp", "F_gauss", "diff", "abs_diff"))


RUNNERS = {
    "design": _design, "curve": _curve, "sweep1d": _sweep1d, "sweep2d": _sweep2d, "qpt": _qpt,
    "rb": _rb, "irb": _irb, "twoqubit": _twoqubit, "margin": _margin, "fig3d": _fig3d,
}


def run(config: ExperimentConfig, out_dir) -> list:
    """Run one experiment; returns the written paths (manifest last).

    On any failure the files written so far are removed and the error re-raised.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = _Outputs(out_dir)
    try:
        RUNNERS[config.kind](config, out)
        names = [str(p.relative_to(out_dir)) for p in out.paths]
        out.add(write_manifest(out_dir, config.manifest_config(), names, version()))
    except BaseException:
        out.cleanup()
        raise
    return out.paths


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-pulses", description="Robust control pulse experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {version()}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML experiment config")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--steps", type=int, help="time steps per pulse (overrides the config)")
    common.add_argument("--threads", type=int, help="worker threads (overrides the config)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run a {name} experiment")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, command=args.command, seed=args.seed, steps=args.steps, threads=args.threads)
        paths = run(cfg, args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (FileNotFoundError, PulseFileError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Row producers for the batch experiments.

Each function returns plain dict rows; the CLI layer handles configuration,
parallel fan-out and files. Noise values in rows are reported in MHz
(``f = omega / 2 pi``) for frequency noise and as plain numbers otherwise.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .benchmarking import (
    DecoherenceSetting,
    decoherence_ptm,
    rb_fit,
    rb_run,
    rcp_gate_set,
    reference_gate_set,
    sequence_variance,
    irb_fidelity,
)
from .geometry import error_curve, total_error_distance
from .metrics import ChannelLiouville, avg_fidelity_liouville, fidelity_report, liouville_from_unitary, noise_margin, unitary_gate_fidelity
from .noise import amplitude_noise, noise_family, static_detuning
from .optimize import OptimizationProblem, optimize, verify_robustness
from .pulses import REFERENCE_PEAK, RCP_LIBRARY, ReferencePulse, XYPulse, as_xy, rescale_to_peak
from .quantum import TimeGrid, mhz_to_rad_per_ns, propagate, rad_per_ns_to_mhz, su2_exp
from .noise import noisy_hamiltonian
from .tomography import chi_of_unitary, pulse_channel, qpt, qpt_fidelity, process_fidelity_from_average
from .twoqubit import (
    MODELS,
    coupling_from_drive,
    cosine_coupling,
    design_iswap_coupling,
    fidelity_width,
    iswap_fidelity_sweep,
)

TARGETS = {
    "I": np.eye(2, dtype=complex),
    "X": su2_exp([np.pi, 0, 0]),
    "Y": su2_exp([0, np.pi, 0]),
    "X2": su2_exp([np.pi / 2, 0, 0]),
    "Y2": su2_exp([0, np.pi / 2, 0]),
    "-X2": su2_exp([-np.pi / 2, 0, 0]),
    "-Y2": su2_exp([0, -np.pi / 2, 0]),
}

FREQUENCY_NOISE = ("detuning", "z", "x", "y", "zz")


def fan_out(fn: Callable, tasks: Sequence, threads: int = 1) -> list:
    """Apply ``fn`` to every task; results keep task order for any thread count."""
    if threads <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _grid(pulse, steps_per_50ns: int) -> TimeGrid:
    T = as_xy(pulse).duration
    return TimeGrid(T, max(200, int(round(steps_per_50ns * T / 50.0))))


def sweep1d_rows(pulses: dict, kind: str, values: Sequence[float], target, steps: int = 2000,
                 with_qpt: bool = False, threads: int = 1) -> list:
    """Fidelity measures of each pulse against one noise axis.

    ``values`` are in rad/ns for frequency noise, dimensionless otherwise.
    """
    family = noise_family(kind)
    tasks = [(name, p, v) for name, p in pulses.items() for v in values]

    def point(task):
        name, p, v = task
        grid = _grid(p, steps)
        noise = family(v)
        rep = fidelity_report(total_error_distance(p, [noise], grid), v)
        u = propagate(noisy_hamiltonian(as_xy(p), [noise]), grid)[-1]
        row = {"pulse": name, **rep.row(), "F_gate": unitary_gate_fidelity(u, target)}
        row["noise"] = rad_per_ns_to_mhz(v) if kind in FREQUENCY_NOISE else v
        if with_qpt:
            row["F_qpt"] = qpt_fidelity(qpt(pulse_channel(p, [noise], grid)), chi_of_unitary(target))
        return row

    return fan_out(point, tasks, threads)


def sweep2d_rows(pulses: dict, epsilons: Sequence[float], deltas: Sequence[float], target, steps: int = 2000,
                 threads: int = 1) -> list:
    """Gate and QPT fidelity over amplitude error and detuning (rad/ns)."""
    tasks = [(name, p, e, d) for name, p in pulses.items() for e in epsilons for d in deltas]

    def point(task):
        name, p, e, d = task
        grid = _grid(p, steps)
        noises = [amplitude_noise(e), static_detuning(d)]
        u = propagate(noisy_hamiltonian(as_xy(p), noises), grid)[-1]
        return {
            "pulse": name, "epsilon": e, "delta_MHz": rad_per_ns_to_mhz(d),
            "F_gate": unitary_gate_fidelity(u, target),
            "F_qpt": qpt_fidelity(qpt(pulse_channel(p, noises, grid)), chi_of_unitary(target)),
            "R": total_error_distance(p, noises, grid),
        }

    return fan_out(point, tasks, threads)


def qpt_rows(pulses: dict, values: Sequence[float], target, steps: int = 2000, threads: int = 1) -> list:
    """QPT fidelity under detuning next to the prediction from the simulated unitary."""
    tasks = [(name, p, v) for name, p in pulses.items() for v in values]

    def point(task):
        name, p, v = task
        grid = _grid(p, steps)
        noise = [static_detuning(v)]
        u = propagate(noisy_hamiltonian(as_xy(p), noise), grid)[-1]
        return {
            "pulse": name, "noise_MHz": rad_per_ns_to_mhz(v),
            "F_qpt": qpt_fidelity(qpt(pulse_channel(p, noise, grid)), chi_of_unitary(target)),
            "F_predicted": process_fidelity_from_average(unitary_gate_fidelity(u, target)),
        }

    return fan_out(point, tasks, threads)


def margin_rows(pulses: dict, kind: str, threshold: float, steps: int = 2000, threads: int = 1) -> list:
    family = noise_family(kind)

    def point(item):
        name, p = item
        m = noise_margin(p, family, threshold, _grid(p, steps))
        return {"pulse": name, "noise": kind, "threshold": threshold, "margin_MHz": rad_per_ns_to_mhz(m)}

    return fan_out(point, list(pulses.items()), threads)


def design_result(problem: OptimizationProblem):
    """Designed pulse, its trace rows and a robustness summary."""
    pulse, trace = optimize(problem)
    checks = [
        {"noise": e.label, "distance": e.distance, "closure": e.closure, "slope": e.slope}
        for e in verify_robustness(pulse, problem.noises, TimeGrid(problem.duration, problem.verify_steps))
    ]
    return pulse, trace, checks


GATE_SETS = {"gaussian": lambda: reference_gate_set("gaussian"), "cosine": lambda: reference_gate_set("cosine"),
             "rcp": rcp_gate_set}


def rb_experiment(gate_sets: Sequence[str], deltas: Sequence[float], decoherence: Optional[DecoherenceSetting],
                  lengths: Sequence[int], n_seq: int, seed: int, divisor: float = 3.75,
                  shots: Optional[int] = None, threads: int = 1):
    """Datasets, fits and variances for every (gate set, detuning) pair."""
    tasks = [(g, d) for g in gate_sets for d in deltas]

    def point(task):
        g, d = task
        data = rb_run(GATE_SETS[g](), d, decoherence, lengths, n_seq, seed, shots=shots)
        return g, d, data, rb_fit(data, divisor), sequence_variance(data)

    data_rows, fit_rows, var_rows = [], [], []
    for g, d, data, fit, var in fan_out(point, tasks, threads):
        f_mhz = rad_per_ns_to_mhz(d)
        data_rows += [{"gate_set": g, "delta_MHz": f_mhz, **r} for r in data.rows()]
        fit_rows.append({"gate_set": g, "delta_MHz": f_mhz, "A": fit.A, "p": fit.p, "B": fit.B,
                         "F_avg": fit.F_avg, "divisor": fit.divisor, "error_per_gate": fit.error_per_gate})
        var_rows += [{"gate_set": g, "delta_MHz": f_mhz, "m": int(m), "sigma2": v} for m, v in zip(data.lengths, var)]
    return data_rows, fit_rows, var_rows


def irb_rows(gate_set: str, gates: Sequence[str], delta: float, decoherence, lengths, n_seq: int, seed: int,
             threads: int = 1) -> list:
    gs = GATE_SETS[gate_set]()
    ref = rb_fit(rb_run(gs, delta, decoherence, lengths, n_seq, seed))

    def point(gate):
        p_gate = rb_fit(rb_run(gs, delta, decoherence, lengths, n_seq, seed, interleave=gate)).p
        return {"gate_set": gate_set, "gate": gate, "delta_MHz": rad_per_ns_to_mhz(delta),
                "p_ref": ref.p, "p_gate": p_gate, "F_gate": irb_fidelity(p_gate, ref.p)}

    return fan_out(point, list(gates), threads)


def twoqubit_rows(models: Sequence[str], values: Sequence[float], coupling=None, steps: int = 1000,
                  seed: int = 0, threads: int = 1):
    """iSWAP fidelity of a robust and an amplitude-matched cosine coupling.

    Returns ``(sweep_rows, width_rows)``; widths are at fidelity 0.999.
    """
    if coupling is None:
        coupling, _ = design_iswap_coupling(seed=seed)
    cosine = cosine_coupling(coupling.peak())

    def point(model):
        fr = iswap_fidelity_sweep(model, coupling, values, steps)
        fc = iswap_fidelity_sweep(model, cosine, values, steps)
        wr = fidelity_width(model, coupling, steps=steps)
        wc = fidelity_width(model, cosine, steps=steps)
        return model, fr, fc, wr, wc

    sweep, widths = [], []
    for model, fr, fc, wr, wc in fan_out(point, list(models), threads):
        sweep += [{"model": model, "noise_value_MHz": rad_per_ns_to_mhz(v), "fidelity_rcp": a, "fidelity_cosine": b}
                  for v, a, b in zip(values, fr, fc)]
        widths.append({"model": model, "width_rcp_MHz": rad_per_ns_to_mhz(wr),
                       "width_cosine_MHz": rad_per_ns_to_mhz(wc), "ratio": wr / wc if wc > 0 else float("inf")})
    return sweep, widths


def fig3d_pulses(peak: float = REFERENCE_PEAK):
    """Two-noise robust X(pi) stretched to 80 ns and a 34 ns Gaussian X(pi)."""
    rcp = RCP_LIBRARY["xpi_all"]
    rcp = rcp.rescale(80.0 / rcp.duration)
    gauss = XYPulse(ReferencePulse.for_angle("gaussian", np.pi, 34.0), name="gaussian_34ns")
    return rcp, gauss


def channel_fidelity(pulse, noises, decoherence: Optional[DecoherenceSetting], target, steps: int) -> float:
    """Average gate fidelity of the noisy pulse followed by decoherence for its duration."""
    p = as_xy(pulse)
    u = propagate(noisy_hamiltonian(p, noises), _grid(p, steps))[-1]
    L = liouville_from_unitary(u).L
    if decoherence is not None:
        L = decoherence_ptm(decoherence, p.duration) @ L
    rel = liouville_from_unitary(target).L.T @ L
    return avg_fidelity_liouville(ChannelLiouville(2, rel))


def fig3d_rows(epsilons: Sequence[float], t_values_us: Sequence[float], peak: float = REFERENCE_PEAK,
               steps: int = 2000, threads: int = 1) -> list:
    """``F_RCP - F_G`` over noise ``eps`` (with ``Delta = eps * peak``) and ``T1 = T2``."""
    rcp, gauss = fig3d_pulses(peak)
    target = TARGETS["X"]
    tasks = [(e, t) for e in epsilons for t in t_values_us]

    def point(task):
        e, t = task
        deco = None if not np.isfinite(t) else DecoherenceSetting(t, t)
        noises = [amplitude_noise(e), static_detuning(e * peak)]
        fr = channel_fidelity(rcp, noises, deco, target, steps)
        fg = channel_fidelity(gauss, noises, deco, target, steps)
        return {"epsilon": e, "T_us": t, "F_rcp": fr, "F_gauss": fg, "diff": fr - fg, "abs_diff": abs(fr - fg)}

    return fan_out(point, tasks, threads)


def curve_pulses_noises(pulse, kinds: Iterable[str], steps: int = 2000):
    """Error curves of a pulse for several unit noise kinds."""
    out = {}
    for k in kinds:
        noise = noise_family(k)(1.0)
        for part in noise.split():
            out[f"{k}" if part is noise else part.label] = error_curve(pulse, part, _grid(pulse, steps))
    return out

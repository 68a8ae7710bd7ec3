"""Design a detuning-robust X(pi) from scratch and check it.

The optimizer closes the error curve while keeping the gate; the result is
then written as a pulse file that the CLI can load.
"""
import sys

import numpy as np

from robust_pulses import OptimizationProblem, optimize, static_detuning
from robust_pulses.io import save_pulse
from robust_pulses.optimize import verify_robustness
from robust_pulses.quantum import TimeGrid, rad_per_ns_to_mhz, su2_exp

problem = OptimizationProblem(su2_exp([np.pi, 0, 0]), (static_detuning(1.0),), duration=50.0, n_components=2)
pulse, trace = optimize(problem)
print(f"restart {trace.restart}: {len(trace.cost)} accepted steps, cost {trace.verified_cost:.2e}")
print(f"peak drive {rad_per_ns_to_mhz(pulse.peak()):.1f} MHz")
for e in verify_robustness(pulse, problem.noises, TimeGrid(50.0, 4000)):
    print(f"{e.label}: closure {e.closure:.1e}, infidelity slope {e.slope:.2f}")

if len(sys.argv) > 1:
    save_pulse(pulse, sys.argv[1])
    print("wrote", sys.argv[1])

"""Cost of sweeping interaction time: composed powers vs direct integration.

A plateau of j cycles repeats one periodic propagator j times, so the
sweep over j needs three integrated segments once, then O(log j) matrix
products per point.  Direct integration would cost a full time integration
per point.  This script times both on the same configuration (reduced step
count; the ratio is what matters).
"""

import time

import numpy as np

from diracpairs import (build_basis, cycle_compose, figure_configs,
                        propagate, propagator_segments, with_plateau)
from dataclasses import replace

config, _ = figure_configs()["fig2"]
config = replace(config, numerics=replace(config.numerics,
                                          steps_per_cycle=128))
basis = build_basis(config.numerics, config.field)

j_values = list(range(0, 401))

t0 = time.perf_counter()
segments = propagator_segments(config, basis)
for j in j_values:
    cycle_compose(*segments, j)
composed = time.perf_counter() - t0
print(f"composed sweep over {len(j_values)} plateau lengths: {composed:.2f} s")

# measure direct integration on a few points and extrapolate linearly
sample = [5, 10, 20]
t0 = time.perf_counter()
for j in sample:
    propagate(with_plateau(config, j), basis)
measured = time.perf_counter() - t0
cycles_measured = sum(j + 2 * config.window.ramp_cycles for j in sample)
per_cycle = measured / cycles_measured
direct_estimate = sum(per_cycle * (j + 2 * config.window.ramp_cycles)
                      for j in j_values)
print(f"direct integration, measured {measured:.2f} s over {cycles_measured} "
      f"cycles -> estimated {direct_estimate:.1f} s for the full sweep")
print(f"speedup: {direct_estimate / composed:.0f}x")

# spot-check that composition is not an approximation
j = 32
direct = propagate(with_plateau(config, j), basis)
comp = cycle_compose(*segments, j)
print(f"max |composed - direct| at j={j}: "
      f"{np.max(np.abs(comp.matrix - direct.matrix)):.2e}")

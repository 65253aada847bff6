"""The truncated mode chain: momenta, energies, spin and helicity labels.

Each lattice point n carries four free Dirac modes (two bands times two
spin projections).  For the k0 = 0 subspace all momenta lie on the z axis,
so spin-z and helicity labels are exact. The same table is available from
the command line via `diracpairs dump-basis`.
"""

import math

import numpy as np

from diracpairs import (HelicityRelation, NumericsParams, build_basis,
                        field_from_si, free_hamiltonian)

field = field_from_si(4.9e17, 0.746, 0.2 * math.pi / 4, HelicityRelation.SAME)
numerics = NumericsParams(n_cut=2)
basis = build_basis(numerics, field)

print(f"{basis.dim} modes on the chain n in [-2, 2], k = {basis.k}\n")
print(f"{'idx':>3} {'n':>3} {'band':>6} {'spin':>5} "
      f"{'energy':>10} {'spin_z':>7} {'helicity':>9}")
for idx, n, band, spin, energy, spin_z, helicity in basis.table_rows():
    print(f"{idx:>3} {n:>3} {band:>6} {spin:>5} "
          f"{energy:>10.6f} {spin_z:>7.2f} {helicity:>9.2f}")

# every stored spinor is an exact eigenvector of alpha.p + beta
worst = 0.0
for mode in basis.modes:
    h = free_hamiltonian(np.asarray(mode.momentum))
    worst = max(worst, float(np.max(np.abs(
        h @ mode.spinor - mode.energy * mode.spinor))))
print(f"\nmax eigenvector residual over the table: {worst:.2e}")

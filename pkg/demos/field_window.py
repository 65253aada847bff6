"""Windowed two-beam field: envelope shape and vector-potential samples.

The vector potential of each beam is the analytic antiderivative of its
monochromatic electric field, multiplied by a sin^2/plateau window.  This
script prints the envelope at its landmarks, verifies that the reassembled
A(z) is real to machine precision, and writes a CSV of A(t) and E(t) at
z = 0 (the same data `diracpairs dump-field` produces).
"""

import math

import numpy as np

from diracpairs import (HelicityRelation, WindowParams, electric_field_at,
                        envelope, field_from_si, potential_at,
                        potential_vector_at, reconstruct_potential, xi)

field = field_from_si(4.9e17, 0.746, 0.2 * math.pi / 4, HelicityRelation.SAME)
window = WindowParams(ramp_cycles=2, plateau_cycles=4)

print(f"nonlinearity parameter xi = {xi(field):.4f}")
print(f"cycle duration = {field.cycle_duration:.4f} (units of 1/m0)")

print("\nenvelope landmarks (time in cycles):")
for t_c in (0.0, window.ramp_cycles / 2, window.ramp_cycles,
            window.ramp_cycles + window.plateau_cycles / 2,
            window.total_cycles):
    print(f"  w({t_c:4.1f}) = {envelope(t_c, window):.6f}")

# A(z) must be real once both Fourier components and their conjugates are
# summed; check the worst imaginary remainder over a z grid
t = (window.ramp_cycles + 0.3) * field.cycle_duration
pot = potential_at(t, field, window)
kz = np.linspace(0.0, 2.0 * np.pi, 256)
a_grid = reconstruct_potential(pot, kz)
up = np.exp(1j * kz)[:, None]
imag_part = np.abs((pot.c_plus_k * up + pot.c_minus_k / up
                    + pot.c_plus_k.conj() / up
                    + pot.c_minus_k.conj() * up).imag).max()
print(f"\nmax |Im A| on a z grid: {imag_part:.2e}  "
      f"(|A| scale {np.abs(a_grid).max():.3f} m0/e)")

rows = ["t_cycles,Ax,Ay,Az,Ex,Ey,Ez"]
for i in range(window.total_cycles * 32 + 1):
    t_c = i / 32
    t = t_c * field.cycle_duration
    a = potential_vector_at(0.0, t, field, window)
    e = electric_field_at(0.0, t, field, window)
    rows.append(",".join(f"{v:.9e}" for v in (t_c, *a, *e)))
with open("field_window.csv", "w") as fh:
    fh.write("\n".join(rows) + "\n")
print(f"\nwrote field_window.csv ({len(rows) - 1} samples at z=0)")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    fig, ax = plt.subplots(2, 1, sharex=True, figsize=(8, 5))
    ax[0].plot(data[:, 0], data[:, 1], label="$A_x$")
    ax[0].plot(data[:, 0], data[:, 2], label="$A_y$")
    ax[0].set_ylabel("A  [$m_0/e$]")
    ax[0].legend()
    ax[1].plot(data[:, 0], data[:, 4], label="$E_x$")
    ax[1].plot(data[:, 0], data[:, 5], label="$E_y$")
    ax[1].set_xlabel("time [cycles]")
    ax[1].set_ylabel("E  [$E_S$]")
    ax[1].legend()
    fig.tight_layout()
    fig.savefig("field_window.png", dpi=150)
    print("wrote field_window.png")
except ImportError:
    print("matplotlib not available; skipped the plot")

"""Radial density profiles below and above Omega_c2; saves profiles.png."""
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from gpdisc.grid import disc_grid
from gpdisc.radial import hole_mass, minimize_density_profile, validate_profile
from gpdisc.tf import PhysicalParams, critical_speeds, tf_energy, tf_solve

eps = 0.05
c2 = critical_speeds(eps).omega_c2
grid = disc_grid(2000)
fig, ax = plt.subplots(figsize=(6, 4))
for k in (0.0, 0.5, 1.0, 1.5, 2.0):
    p = PhysicalParams(eps, k * c2)
    prof = minimize_density_profile(p, grid)
    sol = tf_solve(p)
    d = validate_profile(prof, p)
    print(f"Omega={p.omega:7.2f}  E={prof.energy:10.3f}  E_TF={tf_energy(p):10.3f}  r_max={prof.r_max:.3f}  "
          f"maxima={d['local_maxima']}  hole mass={hole_mass(prof, sol.r_tf - 0.05):.2e}  it={prof.iterations}")
    ax.plot(grid.r, prof.values ** 2, label=f"{k:.1f} $\\Omega_{{c2}}$")
    ax.plot(grid.r, sol.density(grid.r), "k:", lw=0.6)
ax.set_xlabel("r")
ax.set_ylabel("density")
ax.legend()
fig.tight_layout()
fig.savefig("profiles.png", dpi=120)

"""Symmetric-vortex energies E_n and the second variation Q along the trial perturbation."""
from gpdisc.grid import disc_grid
from gpdisc.symmetry import q_finite_difference, quadratic_form_1d, symmetry_report
from gpdisc.tf import PhysicalParams, critical_speeds

eps = 0.05
p = PhysicalParams(eps, 2 * critical_speeds(eps).omega_c2)
grid = disc_grid(1000)
rep = symmetry_report(p, grid, ds=(2, 3, 4, 6))
print(f"Omega={p.omega:.2f}: n_bar={rep.n_bar}, E={rep.e_n_bar:.4f}, r*={rep.r_star:.4f}, tail mass {rep.tail_mass:.3f}")
for n, e in rep.meta["energies"].items():
    print(f"  E_{n} = {e:.4f}")
rin = (rep.n_bar, rep.f_n_bar, rep.mu_n_bar)
print(" d   closed form      direct 1D      2D finite difference")
for d, q in rep.q_values.items():
    print(f"{d:2d} {q:14.3f} {quadratic_form_1d(p, rin, d):14.3f} {q_finite_difference(p, rin, d)[0]:14.3f}")

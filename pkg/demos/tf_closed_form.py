"""Thomas-Fermi energies, hole radius and critical speeds for a few eps."""
import math

import numpy as np

from gpdisc.tf import PhysicalParams, critical_speeds, optimal_phase_tf, refined_tf_energy, tf_energy, tf_solve

for eps in (0.1, 0.05, 0.02, 0.01):
    cs = critical_speeds(eps)
    print(f"eps={eps:5.2f}  Omega_c1={cs.omega_c1:8.2f}  Omega_c2={cs.omega_c2:8.2f}  Omega_c3={cs.omega_c3:9.1f}")

# energy and hole radius across the second critical speed
eps = 0.05
c2 = critical_speeds(eps).omega_c2
print("\nOmega/Omega_c2   E_TF        R_TF")
for k in np.linspace(0.5, 3.0, 6):
    p = PhysicalParams(eps, k * c2)
    sol = tf_solve(p)
    print(f"{k:8.2f}   {tf_energy(p):11.3f}   {sol.r_tf:.4f}")
print(f"E_TF at Omega_c2 = {tf_energy(PhysicalParams(eps, c2)):.4f}  (-4/(3 pi eps^2) = {-4 / (3 * math.pi * eps ** 2):.4f})")

# refined functional: integer phase minimizing the energy at Omega0 = 0.25
p = PhysicalParams.from_omega0(0.02, 0.25)
e = {w: refined_tf_energy(p, w).energy for w in range(5, 35)}
best = min(e, key=e.get)
print(f"\neps=0.02 Omega0=0.25: best phase {best}, leading-order value {optimal_phase_tf(0.02):.2f}")

"""Vortices of a minimized lattice state and of a giant-vortex trial."""
import math

from gpdisc.gp2d import Schedule, TrialSpec, make_trial, minimize
from gpdisc.grid import disc_grid
from gpdisc.radial import giant_vortex_grid, minimize_density_profile, optimize_phase
from gpdisc.tf import PhysicalParams, tf_solve
from gpdisc.vortices import bulk_region, degree_on_circle, detect_vortices, vorticity_uniformity, zero_free_check

p = PhysicalParams(0.08, 12.0)
prof = minimize_density_profile(p, disc_grid(80))
psi, bd = minimize(make_trial(TrialSpec("vortex_lattice"), p, prof, 128), p, Schedule(max_iter=2000))
vs = detect_vortices(psi)
reg = bulk_region(p, prof)
u = vorticity_uniformity(vs, p, reg)
print(f"Omega={p.omega}: {len(vs)} vortices, total degree {vs.total_degree}, degree near the wall "
      f"{degree_on_circle(psi, psi.grid.r[-2])}")
print(f"bulk [{reg.r_in:.3f}, {reg.r_out:.3f}]: nu(S)/|S| = {u['global_ratio']:.3f}, "
      f"sectors {[round(s, 2) for s in u['sector_ratios']]}")
for v in vs.items:
    print(f"  r={v.r:.3f} theta={v.theta:.3f} degree={v.degree}")

q = PhysicalParams.from_omega0(0.05, 0.3)
w, gv, _ = optimize_phase(q, giant_vortex_grid(q, 400))
gpsi = make_trial(TrialSpec("giant_vortex"), q, gv, 256)
reg = bulk_region(q)
zf = zero_free_check(gpsi, reg, tf_solve(q))
print(f"\ngiant vortex at Omega0=0.3: phase {w}, winding {gv.winding}, degree on r_out "
      f"{degree_on_circle(gpsi, reg.r_out)}, zero free {zf['zero_free']}, min density {zf['min_density']:.3e}")
print("bulk vortices:", len(detect_vortices(gpsi).within(reg.r_in, reg.r_out)), "of", math.floor(q.omega))

"""Vortex cost H(r) on the giant-vortex annulus and the third-speed threshold; saves cost.png."""
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from gpdisc.cost import estimate_third_speed, gp_cost, tf_threshold
from gpdisc.tf import PhysicalParams

eps = 0.02
fig, ax = plt.subplots(figsize=(6, 4))
for o0 in (0.15, 0.25, 0.35, 0.45):
    cost, gv = gp_cost(PhysicalParams.from_omega0(eps, o0), 2000)
    print(f"Omega0={o0:.2f}: phase {gv.omega_phase}, min H on bulk {cost.min_h_bulk:9.3f} at r={cost.argmin_r:.3f}")
    ax.plot(cost.r, cost.h, label=f"$\\Omega_0$={o0}")
ax.axhline(0, color="k", lw=0.5)
ax.set_xlabel("r")
ax.set_ylabel("H(r)")
ax.legend()
fig.tight_layout()
fig.savefig("cost.png", dpi=120)

for e in (0.05, 0.02, 0.01, 0.005):
    print(f"TF-level threshold eps={e}: Omega0* = {tf_threshold(e, n=8000):.4f}")
curve = estimate_third_speed([0.05, 0.02], n=1000, level="gp")
print("GP-level thresholds:", [round(v, 4) for v in curve.omega0_star], "extrapolated", round(curve.limit, 4),
      "target", round(2 / (3 * 3.141592653589793), 4))

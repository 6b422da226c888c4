"""Vortex cost function on the giant-vortex annulus.

For the giant-vortex profile g on [R_<, 1] and n = [Omega] - omega:

    F(r)     = 2 int_{R_<}^r g^2(s) (Omega s - n / s) ds
    F_out(r) = F(1) * int_{R_<}^r g^2/s  /  int_{R_<}^1 g^2/s
    F_in     = F - F_out                      (F_in(1) = 0)
    H(r)     = g^2(r) |log eps| / 2 - |F_in(r)|

A vortex placed at r costs roughly pi H(r) (kinetic cost minus the gain from
the rotation); H > 0 on the bulk means vortices are unfavourable.
Arrays are returned on the abscissa [R_<, r_0, ..., r_{n-1}=1]: the grid nodes
preceded by the inner edge, where g takes the value of the first node (zero
slope).
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import BisectionFailed, DegenerateWeight, EmptyBulk, GridTooCoarse
from .radial import giant_vortex_grid, optimize_phase
from .tf import CostProfile, PhysicalParams, tf_cost_function, tf_cost_grid, tf_solve


def _abscissa(gv):
    grid = gv.profile.grid
    x = np.concatenate(([grid.r_lo], grid.r))
    g = gv.profile.values
    g = np.concatenate(([g[0]], g))
    return x, g


def _cumtrapz(y, x):
    return np.concatenate(([0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))))


def compute_F(gv):
    """F on the abscissa [R_<, nodes]; F(R_<) = 0."""
    x, g = _abscissa(gv)
    if x[0] == 0.0:
        x = x.copy()
        x[0] = 0.5 * x[1]  # the 1/s term is integrable against g^2 only away from 0
    integrand = 2.0 * g ** 2 * gv.b_field(x)
    return _cumtrapz(integrand, x)


def split_F(gv, F):
    """(f_in, f_out) with f_out carrying the boundary value F(1)."""
    x, g = _abscissa(gv)
    if x[0] == 0.0:
        x = x.copy()
        x[0] = 0.5 * x[1]
    w = _cumtrapz(g ** 2 / x, x)
    if w[-1] < 1e-14:
        raise DegenerateWeight(f"int g^2/s = {w[-1]:.3e}")
    f_out = F[-1] * (w / w[-1])
    f_in = F - f_out
    return f_in, f_out


def harmonicity_residual(gv, arr):
    """max over interior nodes of |(1/r) (r g^-2 arr')'| with centred differences."""
    x, g = _abscissa(gv)
    x, g, a = x[1:], g[1:], arr[1:]
    keep = g > 1e-3 * np.max(g)
    h = np.diff(x)
    xm = 0.5 * (x[1:] + x[:-1])
    gm2 = 0.5 * (g[1:] ** 2 + g[:-1] ** 2)
    flux = xm * np.diff(a) / h / gm2
    res = np.diff(flux) / (0.5 * (h[1:] + h[:-1])) / x[1:-1]
    sel = keep[1:-1] & keep[:-2] & keep[2:]
    return float(np.max(np.abs(res[sel]))) if np.any(sel) else 0.0


def gv_bulk_bounds(params):
    """[R_TF + eps/|log eps|, 1 - eps^3/2 |log eps|^2]."""
    le = params.log_eps
    eps = params.epsilon
    return tf_solve(params).r_tf + eps / le, 1.0 - eps ** 1.5 * le ** 2


def cost_function_H(gv, split, params):
    f_in, f_out = split
    x, g = _abscissa(gv)
    h = 0.5 * g ** 2 * params.log_eps - np.abs(f_in)
    lo, hi = gv_bulk_bounds(params)
    if lo >= hi:
        raise EmptyBulk(f"bulk bounds cross: [{lo:.4f}, {hi:.4f}]")
    sel = (x >= lo) & (x <= hi)
    if not np.any(sel):
        raise GridTooCoarse("no grid node in the bulk annulus")
    k = np.argmin(np.where(sel, h, np.inf))
    return CostProfile(r=x, f_total=f_in + f_out, f_out=f_out, f_in=f_in, h=h, bulk=(lo, hi),
                       min_h_bulk=float(h[k]), argmin_r=float(x[k]),
                       meta={"kind": "gp", "winding": gv.winding, "omega_phase": gv.omega_phase,
                             "positive": bool(h[k] > 0)})


def gp_cost(params, n_disc=4000, tol=1e-8):
    """Cost profile at the optimal phase for the given parameters."""
    grid = giant_vortex_grid(params, n_disc)
    w, gv, _ = optimize_phase(params, grid, tol=tol)
    F = compute_F(gv)
    return cost_function_H(gv, split_F(gv, F), params), gv


def _bisect(fun, lo, hi, tol):
    flo, fhi = fun(lo), fun(hi)
    if not (flo < 0 < fhi or fhi < 0 < flo):
        raise BisectionFailed(f"no sign change on [{lo}, {hi}] ({flo:.3g}, {fhi:.3g})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def tf_threshold(epsilon, n=8000, lo=0.05, hi=1.0, tol=1e-3):
    def f(o0):
        p = PhysicalParams.from_omega0(epsilon, o0)
        return tf_cost_function(p, tf_cost_grid(p, n)).min_h_bulk
    return _bisect(f, lo, hi, tol)


def _bulk_nonempty(epsilon, o0, min_width=0.0):
    lo, hi = gv_bulk_bounds(PhysicalParams.from_omega0(epsilon, o0))
    return hi - lo > min_width


def largest_valid_omega0(epsilon, lo, hi, tol=1e-4, min_width=0.0):
    """Largest Omega0 in [lo, hi] whose giant-vortex bulk is wider than min_width (hi if it is)."""
    if _bulk_nonempty(epsilon, hi, min_width):
        return hi
    if not _bulk_nonempty(epsilon, lo, min_width):
        raise EmptyBulk(f"eps={epsilon}: bulk empty on the whole bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _bulk_nonempty(epsilon, mid, min_width):
            lo = mid
        else:
            hi = mid
    return lo


def gp_threshold(epsilon, n_disc=4000, lo=0.05, hi=1.0, tol=1e-3):
    """Bracket top is lowered, when needed, to the largest Omega0 whose bulk spans 8 grid spacings."""
    def f(o0):
        p = PhysicalParams.from_omega0(epsilon, o0)
        return gp_cost(p, n_disc)[0].min_h_bulk
    try:
        hi = largest_valid_omega0(epsilon, lo, hi, min_width=8.0 / n_disc)
    except EmptyBulk as err:
        raise BisectionFailed(str(err)) from err
    return _bisect(f, lo, hi, tol)


@dataclass
class ThresholdCurve:
    epsilon: list
    omega0_star: list
    omega0_star_coarse: list
    limit: float
    tf_omega0_star: list
    level: str

    def rows(self):
        return list(zip(self.epsilon, self.omega0_star))


def richardson_limit(eps, values):
    """Extrapolate values linear in 1/|log eps| to eps -> 0 from the last two points."""
    if len(values) < 2:
        return float(values[-1])
    x = [1.0 / abs(math.log(e)) for e in eps[-2:]]
    y = values[-2:]
    return float(y[1] - (y[1] - y[0]) / (x[1] - x[0]) * x[1])


def estimate_third_speed(eps_list, n=4000, level="gp", tol=1e-3, bracket=(0.05, 1.0)):
    """Threshold Omega0*(eps) where the minimum of H over the bulk changes sign.

    Each threshold is computed on n and 2n point grids (refinement study);
    the TF-level threshold is computed alongside as a cross-check.
    """
    eps_list = list(eps_list)
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("epsilon values must decrease")
    find = gp_threshold if level == "gp" else tf_threshold
    coarse, fine, tfv = [], [], []
    for e in eps_list:
        try:
            coarse.append(find(e, n, bracket[0], bracket[1], tol))
            fine.append(find(e, 2 * n, bracket[0], bracket[1], tol))
        except BisectionFailed as err:
            raise BisectionFailed(f"eps={e}: {err}") from err
        tfv.append(tf_threshold(e, max(n, 8000), bracket[0], bracket[1], tol))
    return ThresholdCurve(eps_list, fine, coarse, richardson_limit(eps_list, fine), tfv, level)

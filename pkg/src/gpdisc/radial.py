"""Radial density profiles.

Minimizes the real radial functional

    E[g] = int |g'|^2 + V(r) g^2 + eps^-2 g^4      (2 pi r dr)

over unit-mass profiles with g(1) = 0, for two choices of V:
  * V = -Omega^2 r^2 on the disc: the density profile g of the rotating
    problem, whose energy is the reference energy carried by the density;
  * V = n^2/r^2 - 2 n Omega with n = [Omega] - omega on an annulus [R_<, 1]:
    the giant-vortex profile f_omega with free (zero-slope) inner boundary.
The integer omega is then optimized.
"""
from dataclasses import dataclass, field
import csv
import math
import warnings

import numpy as np
from scipy.linalg import solve_banded

from .descent import descend
from .errors import NotUnimodal, NotUnimodalWarning, PhaseOutOfWindow, RegimeWarning
from .grid import RadialGrid, laplacian_bands, neg_laplacian, radial_kinetic
from .tf import (PhysicalParams, critical_speeds, optimal_phase_tf, phase_window, tf_energy,
                 tf_solve)

DEFAULT_TOL = 1e-8
R_INNER_EXPONENT = 8.0 / 7.0


class RadialFunctional:
    """Discretization of E[g] on a RadialGrid with potential V."""

    def __init__(self, grid, potential, epsilon):
        self.grid = grid
        self.v = np.asarray(potential, dtype=float)
        self.eps2inv = epsilon ** -2
        self.epsilon = epsilon
        self.w = grid.weights
        self._bands = laplacian_bands(grid)

    def parts(self, g):
        kin = radial_kinetic(self.grid, g)
        pot = float(np.dot(self.w, self.v * g * g))
        inter = self.eps2inv * float(np.dot(self.w, g ** 4))
        return kin, pot, inter

    def energy(self, g):
        return sum(self.parts(g))

    def gradient(self, g):
        """L^2 gradient (H g with H = -Lap + V + 2 eps^-2 g^2); zero on the Dirichlet node."""
        out = neg_laplacian(self.grid, g) + self.v * g + 2.0 * self.eps2inv * g ** 3
        out[-1] = 0.0
        return out

    def energy_grad(self, g):
        return self.energy(g), self.gradient(g)

    def energy_delta(self, x, y, mu=0.0):
        """E(y) - E(x) - mu (M(y) - M(x)) assembled from (y - x)(y + x) products."""
        d, s = y - x, y + x
        kin = 2.0 * np.pi * float(np.sum(self.grid.faces * np.diff(d) * np.diff(s))) / self.grid.h
        coef = self.v - mu + self.eps2inv * (x * x + y * y)
        return kin + float(np.dot(self.w, d * s * coef))

    def inner(self, a, b):
        return float(np.dot(self.w, a * b))

    def mass(self, g):
        return self.inner(g, g)

    def mu(self, g):
        return self.energy(g) + self.eps2inv * float(np.dot(self.w, g ** 4))

    def residual(self, g):
        """eps^2 * || H g - mu g ||, mu taken from the Rayleigh quotient."""
        hg = self.gradient(g)
        m = self.inner(g, hg) / self.mass(g)
        r = hg - m * g
        r[-1] = 0.0
        return self.epsilon ** 2 * math.sqrt(self.inner(r, r))

    def precond(self, g, r, mu):
        lower, diag, upper = self._bands
        c = np.maximum(self.v + 6.0 * self.eps2inv * g * g - mu, 0.0)[:-1]
        ab = np.zeros((3, diag.size))
        ab[0, 1:] = upper
        ab[1] = diag + c
        ab[2, :-1] = lower
        z = np.zeros_like(r)
        z[:-1] = solve_banded((1, 1), ab, r[:-1])
        return z

    def minimize(self, g0, tol=DEFAULT_TOL, max_iter=5000):
        g0 = np.abs(np.asarray(g0, dtype=float)).copy()
        g0[-1] = 0.0

        def post(y):
            y = np.abs(y)
            y[-1] = 0.0
            return y

        return descend(g0, self.energy_grad, self.inner, self.precond, tol, max_iter=max_iter,
                       postprocess=post, residual_scale=self.epsilon ** 2,
                       energy_delta=self.energy_delta)


@dataclass
class RadialProfile:
    grid: RadialGrid
    values: np.ndarray
    energy: float
    mu_hat: float
    r_max: float
    residual: float = 0.0
    iterations: int = 0
    params: PhysicalParams = None
    meta: dict = field(default_factory=dict)

    @property
    def r(self):
        return self.grid.r

    def mass(self):
        return self.grid.integrate(self.values ** 2)


@dataclass
class GiantVortexProfile:
    profile: RadialProfile
    omega_phase: int
    winding: int
    r_inner: float
    energy: float
    params: PhysicalParams

    def b_field(self, r):
        """B_omega(r) = Omega r - ([Omega] - omega) / r."""
        r = np.asarray(r, dtype=float)
        return self.params.omega * r - self.winding / r


def _argmax_location(grid, g):
    k = int(np.argmax(g))
    return float(grid.r[k])


def _regime_check(params):
    eps = params.epsilon
    if params.omega >= eps ** -3 * params.log_eps ** -2:
        warnings.warn(f"Omega={params.omega:g} >= eps^-3 |log eps|^-2; asymptotic estimates "
                      "are not expected to hold", RegimeWarning, stacklevel=3)


def density_trial(params, r):
    """Regularized TF density: the TF profile with its inner edge smoothed over 1/Omega.

    With a hole, rho vanishes on [0, R_TF], grows quadratically on
    [R_TF, R_TF + 1/Omega] to meet rho_TF, and equals rho_TF beyond.  Not
    normalized.
    """
    sol = tf_solve(params)
    rho = sol.density(r)
    if sol.has_hole:
        R = sol.r_tf
        om = params.omega
        edge = sol.density(R + 1.0 / om)
        layer = (r >= R) & (r <= R + 1.0 / om)
        rho = np.where(r < R, 0.0, rho)
        rho = np.where(layer, om ** 2 * edge * (r - R) ** 2, rho)
    return rho


def _dirichlet_taper(r, width):
    return np.clip((1.0 - r) / width, 0.0, 1.0)


def density_functional(params, grid):
    return RadialFunctional(grid, -params.omega ** 2 * grid.r ** 2, params.epsilon)


def minimize_density_profile(params, grid, tol=DEFAULT_TOL, max_iter=5000, g0=None):
    """Minimizer g of the density functional with V = -Omega^2 r^2."""
    _regime_check(params)
    fun = density_functional(params, grid)
    r = grid.r
    if g0 is None:
        g0 = np.sqrt(density_trial(params, r)) * _dirichlet_taper(r, max(params.epsilon, 2 * grid.h))
        g0 += 1e-3 * np.max(g0) * (1.0 - r)
    res = fun.minimize(g0, tol=tol, max_iter=max_iter)
    g = res.x
    kin, pot, inter = fun.parts(g)
    e_tf = tf_energy(params)
    eps, om = params.epsilon, params.omega
    scale = 1.0 / eps + math.sqrt(eps) * om ** 1.5
    meta = {"kinetic": kin, "potential": pot, "interaction": inter, "e_tf": e_tf,
            "excess": res.energy - e_tf, "sandwich_scale": scale,
            "sandwich_ratio": (res.energy - e_tf) / scale, "accepted": res.accepted}
    return RadialProfile(grid, g, res.energy, res.mu, _argmax_location(grid, g), res.residual,
                         res.iterations, params, meta)


def inner_radius(params, exponent=R_INNER_EXPONENT):
    """R_< = R_TF - eps^exponent, clipped at 0."""
    return max(tf_solve(params).r_tf - params.epsilon ** exponent, 0.0)


def giant_vortex_grid(params, n_disc, exponent=R_INNER_EXPONENT):
    """Annulus grid on [R_<, 1] cut from the n_disc-point disc grid (nodes shared)."""
    grid, _ = RadialGrid(0.0, n_disc).annulus(inner_radius(params, exponent))
    return grid


def giant_vortex_functional(params, omega_phase, grid):
    n = math.floor(params.omega) - int(omega_phase)
    r = grid.r
    return RadialFunctional(grid, n * n / r ** 2 - 2.0 * n * params.omega, params.epsilon), n


def _gv_initial(params, n, grid):
    r = grid.r
    eps = params.epsilon
    from .tf import _refined_lambda
    lam = _refined_lambda(eps, n)
    rho = 0.5 * eps ** 2 * np.maximum(lam - n * n / r ** 2, 0.0)
    g0 = np.sqrt(rho) * _dirichlet_taper(r, max(eps, 2 * grid.h))
    return g0 + 1e-3 * max(np.max(g0), 1.0) * (1.0 - r)


def minimize_giant_vortex_profile(params, omega_phase, grid, tol=DEFAULT_TOL, window_const=1.0,
                                  max_iter=5000, g0=None):
    """Giant-vortex profile f_omega on the annulus grid (free inner boundary, Dirichlet at 1)."""
    omega_phase = int(omega_phase)
    if abs(omega_phase) > phase_window(params, window_const):
        raise PhaseOutOfWindow(f"|omega|={abs(omega_phase)} exceeds window "
                               f"{phase_window(params, window_const):.3f}")
    _regime_check(params)
    fun, n = giant_vortex_functional(params, omega_phase, grid)
    if g0 is None:
        g0 = _gv_initial(params, n, grid)
    res = fun.minimize(g0, tol=tol, max_iter=max_iter)
    kin, pot, inter = fun.parts(res.x)
    prof = RadialProfile(grid, res.x, res.energy, res.mu, _argmax_location(grid, res.x),
                         res.residual, res.iterations, params,
                         {"kinetic": kin, "potential": pot, "interaction": inter,
                          "accepted": res.accepted})
    return GiantVortexProfile(prof, omega_phase, n, grid.r_lo, res.energy, params)


def optimize_phase(params, grid, tol=DEFAULT_TOL, window_const=1.0, flank=2, fallback=True):
    """Integer minimization of the giant-vortex energy over omega.

    Walks downhill from round(2/(3 sqrt(pi) eps)), then checks that the energy
    increases monotonically over `flank` steps on each side.  If it does not,
    a scan over a window of width 8 * omega_TF is performed instead
    (NotUnimodalWarning), or NotUnimodal is raised when fallback is False.
    Returns (omega0, profile, info) where info lists every evaluated energy.
    """
    cache = {}
    w_tf = optimal_phase_tf(params.epsilon)
    win = phase_window(params, window_const)

    def energy(w):
        if w not in cache:
            if abs(w) > win:
                cache[w] = (math.inf, None)
            else:
                near = [k for k in cache if cache[k][1] is not None]
                g0 = None
                if near:
                    k = min(near, key=lambda k: abs(k - w))
                    g0 = cache[k][1].profile.values
                prof = minimize_giant_vortex_profile(params, w, grid, tol, window_const, g0=g0)
                cache[w] = (prof.energy, prof)
        return cache[w][0]

    w = int(round(w_tf))
    while True:
        e0, el, er = energy(w), energy(w - 1), energy(w + 1)
        if el < e0 and el <= er:
            w -= 1
        elif er < e0:
            w += 1
        else:
            break
    unimodal = True
    for side in (-1, 1):
        prev = energy(w)
        for k in range(1, flank + 1):
            e = energy(w + side * k)
            if not e > prev and math.isfinite(e):
                unimodal = False
            prev = e
    if not unimodal:
        if not fallback:
            raise NotUnimodal(f"non-monotone flanks around omega={w}")
        warnings.warn(f"non-monotone flanks around omega={w}; scanning", NotUnimodalWarning,
                      stacklevel=2)
        half = int(math.ceil(4 * w_tf))
        lo, hi = max(int(round(w_tf)) - half, -int(win)), min(int(round(w_tf)) + half, int(win))
        for k in range(lo, hi + 1):
            energy(k)
        w = min((k for k in cache if cache[k][1] is not None), key=lambda k: cache[k][0])
    info = {"energies": {k: v[0] for k, v in sorted(cache.items())}, "unimodal": unimodal}
    return w, cache[w][1], info


def phase_scan(params, grid, omegas, tol=DEFAULT_TOL, window_const=1.0):
    """Brute-force energies over the given integer phases (warm-started sequentially)."""
    out = {}
    g0 = None
    for w in omegas:
        prof = minimize_giant_vortex_profile(params, w, grid, tol, window_const, g0=g0)
        g0 = prof.profile.values
        out[int(w)] = prof.energy
    return out


def flux_balance(gv):
    """int f^2 (Omega - n / r^2): stays O(1) at the optimal phase."""
    g = gv.profile.values
    r = gv.profile.grid.r
    return gv.profile.grid.integrate(g ** 2 * (gv.params.omega - gv.winding / r ** 2))


def count_local_maxima(values, rel_tol=1e-9):
    """Local maxima after merging plateaus whose values agree within rel_tol * max."""
    v = np.asarray(values, dtype=float)
    tol = rel_tol * max(np.max(np.abs(v)), 1e-300)
    # collapse runs of nearly equal neighbours into one representative
    reps = [v[0]]
    for x in v[1:]:
        if abs(x - reps[-1]) > tol:
            reps.append(x)
    reps = np.array(reps)
    if reps.size == 1:
        return 1
    cnt = 0
    for i in range(reps.size):
        left = reps[i - 1] if i > 0 else -np.inf
        right = reps[i + 1] if i < reps.size - 1 else -np.inf
        if reps[i] > left and reps[i] > right:
            cnt += 1
    return cnt


def validate_profile(profile, params, delta=None):
    """Diagnostics for a converged density profile (pure report)."""
    eps, om = params.epsilon, params.omega
    le = params.log_eps
    g = profile.values
    r = profile.grid.r
    sol = tf_solve(params)
    rho = sol.density(r)
    oc2 = critical_speeds(eps).omega_c2
    if sol.has_hole:
        a = sol.r_tf + 1.0 / (eps * om * le ** 2)
        b = 1.0 - math.sqrt(eps / om) * le ** 1.5
        bound_scale = eps ** 1.75 * om ** 1.25
    else:
        a = 0.0
        b = 1.0 - eps * le
        bound_scale = math.sqrt(eps)
    sel = (r >= a) & (r <= b)
    dev = float(np.max(np.abs(g[sel] ** 2 - rho[sel]))) if np.any(sel) else float("nan")
    if delta is None:
        delta = eps ** (7.0 / 6.0)
    hole_r = sol.r_tf - delta
    inside = r < hole_r
    w = profile.grid.weights
    hole_mass = float(np.dot(w[inside], g[inside] ** 2)) if sol.has_hole else 0.0
    hole_max = float(np.max(g[inside] ** 2)) if sol.has_hole and np.any(inside) else 0.0
    return {
        "local_maxima": count_local_maxima(g),
        "pointwise_interval": (a, b),
        "pointwise_deviation": dev,
        "pointwise_bound_scale": bound_scale,
        "rho_tf_max": float(np.max(rho)),
        "hole_radius": hole_r if sol.has_hole else 0.0,
        "hole_mass": hole_mass,
        "hole_max_density": hole_max,
        "exp_bound_shape": eps * om * math.exp(-eps ** (-1.0 / 6.0)) if sol.has_hole else 0.0,
        "r_max": profile.r_max,
        "r_max_lower_bounds": {
            "basic": 1.0 - eps ** -1.5 * om ** -2 if om > 0 else -math.inf,
            "intermediate": 1.0 - eps ** -0.25 * om ** -0.75 if om > 0 else -math.inf,
            "improved": 1.0 - eps ** -0.625 * om ** -0.875 if om > 0 else -math.inf,
        },
        "above_omega_c2": om > oc2,
    }


def hole_mass(profile, radius):
    """Mass of g^2 inside the ball of the given radius."""
    r = profile.grid.r
    inside = r < radius
    return float(np.dot(profile.grid.weights[inside], profile.values[inside] ** 2))


def write_profile_csv(profile, path, params=None):
    params = params or profile.params
    r = profile.grid.r
    g = profile.values
    rho = tf_solve(params).density(r) if params is not None else np.full_like(r, np.nan)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["r", "g", "g_squared", "rho_tf"])
        for row in zip(r, g, g ** 2, rho):
            wr.writerow([repr(float(x)) for x in row])

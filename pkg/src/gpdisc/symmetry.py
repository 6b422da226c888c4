"""Symmetric vortices f(r) e^{i n theta} and their second variation.

E_n is the minimum of the GP energy over states f(r) e^{i n theta}.  At the
optimal winding n the stability of the symmetric vortex against the
perturbation

    Xi = (A + B) e^{i(n+d) theta} + (A - B) e^{i(n-d) theta},
    A = r^{d+1} f'          (r <= r*),   0 beyond,
    B = n r^d f             (r <= r*),   n r*^d f beyond,

(r* the maximum of f) is decided by the sign of the quadratic form Q[Xi],
which reduces to one-dimensional integrals.  An independent evaluation
differentiates the full 2D energy along Xi numerically.
"""
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .errors import MaxNotFound, NotUnimodal, NotUnimodalWarning
from .gp2d import GPFunctional2D, PolarGrid
from .radial import DEFAULT_TOL, RadialFunctional, RadialProfile
from .tf import optimal_phase_tf


def vortex_functional(params, n, grid):
    r = grid.r
    return RadialFunctional(grid, n * n / r ** 2 - 2.0 * n * params.omega, params.epsilon)


def _initial(params, n, grid):
    r = grid.r
    eps = params.epsilon
    g = np.sqrt(np.maximum(1.0 + params.omega ** 2 * eps ** 2 * r ** 2, 0.0))
    if n != 0:
        g = g * r ** min(abs(n), 4)
    return g * (1.0 - r) + 1e-6


def symmetric_vortex_energy(params, n, grid, tol=DEFAULT_TOL, g0=None, max_iter=5000):
    """(E_n, profile) for the best state f(r) e^{i n theta}; negative n uses (n, Omega) -> (-n, -Omega)."""
    n = int(n)
    fun = vortex_functional(params, n, grid)
    res = fun.minimize(_initial(params, n, grid) if g0 is None else g0, tol=tol, max_iter=max_iter)
    k = int(np.argmax(res.x))
    prof = RadialProfile(grid, res.x, res.energy, res.mu, float(grid.r[k]), res.residual,
                         res.iterations, params, {"winding": n, "accepted": res.accepted})
    return res.energy, prof


class _WindingCache:
    def __init__(self, params, grid, tol):
        self.params, self.grid, self.tol = params, grid, tol
        self.data = {}

    def __call__(self, n):
        if n not in self.data:
            near = sorted(self.data, key=lambda k: abs(k - n))
            g0 = self.data[near[0]][1].values if near else None
            self.data[n] = symmetric_vortex_energy(self.params, n, self.grid, self.tol, g0=g0)
        return self.data[n][0]


def _descend_integer(energy, start):
    n = start
    while True:
        e0, el, er = energy(n), energy(n - 1), energy(n + 1)
        if el < e0 and el <= er:
            n -= 1
        elif er < e0:
            n += 1
        else:
            return n


def optimize_winding(params, grid, tol=DEFAULT_TOL, flank=2, fallback=True, return_cache=False):
    """Integer minimizer of E_n (searches from round(Omega) and round(Omega) - round(omega_TF))."""
    cache = _WindingCache(params, grid, tol)
    om = params.omega
    seeds = {int(round(om)), int(round(om)) - int(round(optimal_phase_tf(params.epsilon)))}
    cands = [_descend_integer(cache, s) for s in sorted(seeds)]
    n = min(cands, key=cache)
    unimodal = len(set(cands)) == 1
    for side in (-1, 1):
        prev = cache(n)
        for k in range(1, flank + 1):
            e = cache(n + side * k)
            if not e > prev:
                unimodal = False
            prev = e
    if not unimodal:
        if not fallback:
            raise NotUnimodal(f"E_n not unimodal around n={n}")
        warnings.warn(f"E_n not unimodal around n={n}; scanning [0, 2 Omega]",
                      NotUnimodalWarning, stacklevel=2)
        for k in range(0, int(math.ceil(2 * om)) + 1):
            cache(k)
        n = min(cache.data, key=lambda k: cache.data[k][0])
    if return_cache:
        return n, cache.data
    return n


def winding_scan(params, grid, ns, tol=DEFAULT_TOL):
    cache = _WindingCache(params, grid, tol)
    return {int(k): cache(int(k)) for k in ns}


def profile_derivative(grid, f):
    """Centred first derivative on the profile nodes (one-sided at the ends)."""
    return np.gradient(f, grid.r, edge_order=2)


def max_location(profile):
    """Location r* of the maximum of f, refined by parabolic interpolation."""
    f = profile.values
    r = profile.grid.r
    k = int(np.argmax(f))
    if k == 0 or k == len(f) - 1:
        raise MaxNotFound(f"maximum at grid endpoint index {k}")
    y0, y1, y2 = f[k - 1], f[k], f[k + 1]
    den = y0 - 2 * y1 + y2
    shift = 0.5 * (y0 - y2) / den if den != 0 else 0.0
    return float(r[k] + shift * (r[k + 1] - r[k]))


def _interp_trapz(x, y, a, b):
    """Trapezoid integral of samples (x, y) over [a, b], endpoints by linear interpolation."""
    xs = np.concatenate(([a], x[(x > a) & (x < b)], [b]))
    ys = np.interp(xs, x, y)
    return float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)))


def second_variation(params, report_in, d, amplitude=1.0):
    """Closed-form Q for the perturbation of angular order d (d >= 2)."""
    n_bar, prof, mu = report_in
    if d < 2:
        raise ValueError("d must be an integer >= 2")
    r = prof.grid.r
    f = prof.values
    fp = profile_derivative(prof.grid, f)
    rs = max_location(prof)
    eps2inv = params.epsilon ** -2
    om = params.omega
    inner = r ** (2 * d + 2) * f * fp * ((d + 1) * mu - 2 * (d + 1) * eps2inv * f ** 2 + 2 * om * n_bar)
    x = np.concatenate(([0.0], r))
    q1 = _interp_trapz(x, np.concatenate(([0.0], inner)), 0.0, rs)
    q2 = _interp_trapz(r, f ** 2 / r, rs, 1.0)
    q = 8 * math.pi * q1 + 4 * math.pi * n_bar ** 2 * d ** 2 * rs ** (2 * d) * q2
    return amplitude ** 2 * q


def xi_components(prof, n_bar, d, r_star=None):
    """Radial amplitudes (A, B) of the perturbation on the profile nodes."""
    r = prof.grid.r
    f = prof.values
    rs = max_location(prof) if r_star is None else r_star
    fp = profile_derivative(prof.grid, f)
    inside = r <= rs
    A = np.where(inside, r ** (d + 1) * fp, 0.0)
    B = np.where(inside, n_bar * r ** d * f, n_bar * rs ** d * f)
    return A, B


def quadratic_form_1d(params, report_in, d):
    """Q evaluated directly as the quadratic form in (A, B) with angular integrals done analytically.

    Derivatives of A and B by finite differences; a cross-check of the closed
    form independent of the integration by parts behind it.
    """
    n, prof, mu = report_in
    r = prof.grid.r
    f = prof.values
    A, B = xi_components(prof, n, d)
    Ap = np.gradient(A, r, edge_order=2)
    Bp = np.gradient(B, r, edge_order=2)
    om, e2 = params.omega, params.epsilon ** -2
    integrand = (Ap ** 2 + Bp ** 2 + (n * n + d * d) * (A ** 2 + B ** 2) / r ** 2
                 + 4 * n * d * A * B / r ** 2 - 2 * om * n * (A ** 2 + B ** 2) - 4 * om * d * A * B
                 + 2 * e2 * f ** 2 * (3 * A ** 2 + B ** 2) - mu * (A ** 2 + B ** 2))
    return 4 * math.pi * prof.grid.integrate(integrand) / (2 * math.pi)


def q_finite_difference(params, report_in, d, steps=(1e-3, 5e-4), n_theta=None):
    """Q from the 2D energy: second difference of E(normalize(Psi + a Xi)) in a, Richardson-extrapolated."""
    n, prof, mu = report_in
    grid = prof.grid
    need = 2 * (abs(n) + d) + 2
    m = n_theta or int(2 ** math.ceil(math.log2(max(need, 16))))
    pg = PolarGrid(grid, m)
    th = pg.theta[None, :]
    A, B = xi_components(prof, n, d)
    psi = prof.values[:, None] * np.exp(1j * n * th)
    xi = (A + B)[:, None] * np.exp(1j * (n + d) * th) + (A - B)[:, None] * np.exp(1j * (n - d) * th)
    xi[-1] = 0.0
    fun = GPFunctional2D(pg, params)
    psi = psi / math.sqrt(fun.inner(psi, psi))
    mu2 = fun.breakdown(psi).mu
    scale = fun.inner(xi, xi)
    if scale == 0.0:
        return 0.0, [0.0 for _ in steps]
    xi = xi / math.sqrt(scale)  # steps are relative to a unit-norm direction
    vals = []
    for a in steps:
        y = psi + a * xi
        y = y / math.sqrt(fun.inner(y, y))
        vals.append(scale * fun.energy_delta(psi, y, mu2) / a ** 2)
    if len(steps) == 2:
        ratio = (steps[0] / steps[1]) ** 2
        q = (ratio * vals[1] - vals[0]) / (ratio - 1.0)
    else:
        q = vals[-1]
    return q, vals


@dataclass
class SymmetryReport:
    n_bar: int
    e_n_bar: float
    f_n_bar: RadialProfile
    mu_n_bar: float
    q_values: dict
    verdict: bool
    r_star: float = float("nan")
    tail_mass: float = float("nan")
    meta: dict = field(default_factory=dict)


def symmetry_report(params, grid, ds=(2, 3, 4), tol=DEFAULT_TOL):
    n, data = optimize_winding(params, grid, tol, return_cache=True)
    e, prof = data[n]
    rin = (n, prof, prof.mu_hat)
    q = {int(d): second_variation(params, rin, d) for d in ds}
    rs = max_location(prof)
    r = grid.r
    out = r >= rs
    tail = float(np.dot(grid.weights[out], prof.values[out] ** 2))
    return SymmetryReport(n, e, prof, prof.mu_hat, q, any(v < 0 for v in q.values()), rs, tail,
                          {"energies": {int(k): v[0] for k, v in sorted(data.items())}})

"""Closed-form Thomas-Fermi theory of the rotating condensate in the unit disc.

The TF functional is  E_TF[rho] = int (-Omega^2 r^2 rho + eps^-2 rho^2)  over
nonnegative unit-mass densities.  Its minimiser is explicit, develops a central
hole once Omega exceeds Omega_c2 = 2 / (sqrt(pi) eps), and all derived
quantities (energy, chemical potential, hole radius) are available in closed
form.  The refined functional with a giant-vortex phase and the TF-level cost
function used to locate the third critical speed also live here.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from .errors import GridTooCoarse, PhaseOutOfWindow, ValidationError
from .grid import RadialGrid

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class PhysicalParams:
    epsilon: float
    omega: float

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValidationError("epsilon", "must lie in (0, 1)")
        if not (self.omega >= 0.0 and math.isfinite(self.omega)):
            raise ValidationError("omega", "must be finite and >= 0")

    @property
    def log_eps(self):
        return abs(math.log(self.epsilon))

    @property
    def omega0(self):
        """Rotation in giant-vortex units, Omega * eps^2 |log eps|."""
        return self.omega * self.epsilon ** 2 * self.log_eps

    @classmethod
    def from_omega0(cls, epsilon, omega0):
        return cls(epsilon, omega0 / (epsilon ** 2 * abs(math.log(epsilon))))


@dataclass(frozen=True)
class CriticalSpeeds:
    omega_c1: float
    omega_c2: float
    omega_c3: float


def critical_speeds(epsilon):
    le = abs(math.log(epsilon))
    return CriticalSpeeds(le, 2.0 / (SQRT_PI * epsilon), 2.0 / (3.0 * math.pi * epsilon ** 2 * le))


@dataclass(frozen=True)
class TFSolution:
    params: PhysicalParams
    mu_tf: float
    r_tf: float
    has_hole: bool

    def density(self, r):
        """rho_TF(r) = (eps^2 mu + eps^2 Omega^2 r^2)_+ / 2."""
        eps, om = self.params.epsilon, self.params.omega
        r = np.asarray(r, dtype=float)
        return 0.5 * np.maximum(eps ** 2 * self.mu_tf + eps ** 2 * om ** 2 * r ** 2, 0.0)

    def mass(self):
        """Exact mass of the density (integral over the unit disc)."""
        eps, om = self.params.epsilon, self.params.omega
        s0 = self.r_tf ** 2
        # pi * int_{s0}^1 (eps^2/2)(mu + om^2 s) ds
        return math.pi * 0.5 * eps ** 2 * (self.mu_tf * (1 - s0) + 0.5 * om ** 2 * (1 - s0 ** 2))


def tf_solve(params):
    eps, om = params.epsilon, params.omega
    oc2 = 2.0 / (SQRT_PI * eps)
    if om > oc2:
        r_tf = math.sqrt(1.0 - oc2 / om)
        return TFSolution(params, -om ** 2 * r_tf ** 2, r_tf, True)
    return TFSolution(params, 2.0 / (math.pi * eps ** 2) - 0.5 * om ** 2, 0.0, False)


def tf_energy(params):
    eps, om = params.epsilon, params.omega
    if om <= 2.0 / (SQRT_PI * eps):
        return 1.0 / (math.pi * eps ** 2) - 0.5 * om ** 2 - math.pi * eps ** 2 * om ** 4 / 48.0
    return -om ** 2 * (1.0 - 4.0 / (3.0 * SQRT_PI * eps * om))


def phase_window(params, const=1.0):
    """Half-width of the admissible window |omega| <= C eps^-5/4 |log eps|^-3/4."""
    return const * params.epsilon ** -1.25 * params.log_eps ** -0.75


def optimal_phase_tf(epsilon):
    """Leading-order optimal phase 2 / (3 sqrt(pi) eps)."""
    return 2.0 / (3.0 * SQRT_PI * epsilon)


@dataclass(frozen=True)
class RefinedTF:
    omega_phase: int
    winding: int
    energy: float
    model: float
    lam: float
    r_inner: float


def _refined_lambda(eps, n):
    """Multiplier lambda such that rho = eps^2 (lambda - n^2/r^2)_+ / 2 has unit mass."""
    n2 = float(n) ** 2
    if n2 == 0.0:
        return 2.0 / (math.pi * eps ** 2)

    def mass(lam):
        s0 = min(n2 / lam, 1.0)
        return math.pi * 0.5 * eps ** 2 * (lam * (1 - s0) - n2 * math.log(1.0 / s0)) - 1.0

    lo = n2
    hi = n2 + 4.0 / (math.pi * eps ** 2) + 1.0
    while mass(hi) < 0:
        hi *= 2.0
    return brentq(mass, lo, hi, xtol=1e-14 * hi, rtol=1e-15, maxiter=500)


def refined_tf_energy(params, omega_phase, window_const=1.0):
    """TF functional with the centrifugal term of a giant vortex of winding [Omega] - omega.

    Returns the exact minimum and the quadratic model
    E_TF + (omega - 2/(3 sqrt(pi) eps))^2 + 2/(9 pi eps^2).
    """
    omega_phase = int(omega_phase)
    if abs(omega_phase) > phase_window(params, window_const):
        raise PhaseOutOfWindow(f"|omega|={abs(omega_phase)} exceeds window "
                               f"{phase_window(params, window_const):.3f}")
    eps, om = params.epsilon, params.omega
    n = math.floor(om) - omega_phase
    lam = _refined_lambda(eps, n)
    n2 = float(n) ** 2
    s0 = min(n2 / lam, 1.0)
    # int rho (n^2/r^2 + eps^-2 rho) with rho = eps^2 (lam - n^2/s)/2, s = r^2, dA = pi ds
    c = 0.5 * eps ** 2
    l1 = 1.0 - s0
    llog = math.log(1.0 / s0) if s0 > 0 else 0.0
    linv = (1.0 / s0 - 1.0) if s0 > 0 else 0.0
    cent = math.pi * c * n2 * (lam * llog - n2 * linv)
    inter = math.pi * eps ** -2 * c ** 2 * (lam ** 2 * l1 - 2 * lam * n2 * llog + n2 ** 2 * linv)
    energy = cent + inter - 2.0 * om * n
    model = tf_energy(params) + (omega_phase - optimal_phase_tf(eps)) ** 2 + 2.0 / (9.0 * math.pi * eps ** 2)
    return RefinedTF(omega_phase, n, energy, model, lam, math.sqrt(s0))


@dataclass
class CostProfile:
    """Cost function H(r) = g^2 |log eps| / 2 - |F_in(r)| and its ingredients.

    For the TF-level version f_total holds the TF integral, f_out is zero and
    f_in equals f_total.
    """
    r: np.ndarray
    f_total: np.ndarray
    f_out: np.ndarray
    f_in: np.ndarray
    h: np.ndarray
    bulk: tuple
    min_h_bulk: float
    argmin_r: float
    meta: dict = field(default_factory=dict)


def bulk_bounds_tf(params):
    """Inner bulk radius R_TF + eps/|log eps| (TF hole radius, zero without a hole)."""
    sol = tf_solve(params)
    return sol.r_tf + params.epsilon / params.log_eps


def tf_cost_function(params, grid):
    """TF-level cost H_TF(r) = |log eps| rho_TF / 2 - |F_TF(r)|.

    F_TF(r) = 2 int_{R_TF}^r (Omega s - n/s) rho_TF(s) ds with n = [Omega] - 2/(3 sqrt(pi) eps).
    Nodes inside the hole get F = 0.  Without a hole the integral starts at
    the first grid node.
    """
    sol = tf_solve(params)
    r = grid.r
    r0 = sol.r_tf
    inside = r >= r0
    if np.count_nonzero(inside) < 16:
        raise GridTooCoarse(f"only {np.count_nonzero(inside)} nodes in [R_TF, 1]")
    eps, om = params.epsilon, params.omega
    n = math.floor(om) - optimal_phase_tf(eps)
    rho = sol.density(r)
    rr = r[inside]
    if r0 > 0:
        rr = np.concatenate(([r0], rr))
    integrand = 2.0 * (om * rr - n / rr) * sol.density(rr)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(rr))))
    if r0 > 0:
        cum = cum[1:]
    f_tot = np.zeros_like(r)
    f_tot[inside] = cum
    h = 0.5 * params.log_eps * rho - np.abs(f_tot)
    r_bulk = bulk_bounds_tf(params)
    sel = r >= r_bulk
    if not np.any(sel):
        raise GridTooCoarse("no grid node beyond the bulk radius")
    k = np.argmin(np.where(sel, h, np.inf))
    return CostProfile(r=r, f_total=f_tot, f_out=np.zeros_like(r), f_in=f_tot.copy(), h=h,
                       bulk=(r_bulk, 1.0), min_h_bulk=float(h[k]), argmin_r=float(r[k]),
                       meta={"kind": "tf", "winding": n})


def tf_cost_grid(params, n=4000):
    """Uniform grid on [R_TF, 1] suitable for `tf_cost_function`."""
    return RadialGrid(tf_solve(params).r_tf, n)

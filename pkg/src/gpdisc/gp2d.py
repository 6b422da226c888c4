"""Full GP functional on the unit disc, discretized on a polar grid.

    E[psi] = int |grad psi|^2 - 2 Omega psi* L psi + eps^-2 |psi|^4,   L = -i d/dtheta,

with psi = 0 on the outer ring.  Radial derivatives use the finite-volume
stencil of `grid`; angular derivatives and L are diagonal in the Fourier
modes of each ring.  The Nyquist mode carries m^2 in the kinetic term and no
angular momentum, which keeps the discrete energy exactly invariant under
psi -> conj(psi), Omega -> -Omega.
"""
from dataclasses import dataclass, field, replace
import math
import struct

import numpy as np

from .descent import descend
from .errors import CutoffOutOfRange, DensityTooSmall, IoError, NoConvergence, NotNormalized, \
    ValidationError
from .grid import RadialGrid, neg_laplacian, laplacian_bands, solve_tridiagonal
from .radial import GiantVortexProfile, RadialProfile, density_trial, _dirichlet_taper
from .tf import PhysicalParams, tf_solve


@dataclass(frozen=True)
class PolarGrid:
    radial: RadialGrid
    n_theta: int

    @property
    def n_r(self):
        return self.radial.n

    @property
    def r(self):
        return self.radial.r

    @property
    def theta(self):
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def dtheta(self):
        return 2.0 * np.pi / self.n_theta

    @property
    def weights(self):
        """Quadrature weights (n_r, 1) for int over the disc (or annulus) of a nodal field."""
        return (self.radial.area * self.dtheta)[:, None]

    def modes(self):
        m = np.fft.fftfreq(self.n_theta, 1.0 / self.n_theta)
        m_rot = m.copy()
        if self.n_theta % 2 == 0:
            m_rot[self.n_theta // 2] = 0.0
        return m, m_rot

    def cartesian(self):
        r, t = self.r[:, None], self.theta[None, :]
        return r * np.cos(t), r * np.sin(t)


@dataclass
class Wavefunction2D:
    grid: PolarGrid
    values: np.ndarray
    params: PhysicalParams = None

    @property
    def n_r(self):
        return self.grid.n_r

    @property
    def n_theta(self):
        return self.grid.n_theta

    @property
    def mass(self):
        return float(np.sum(self.grid.weights * np.abs(self.values) ** 2))

    def normalized(self):
        v = self.values.copy()
        v[-1] = 0.0
        return Wavefunction2D(self.grid, v / math.sqrt(np.sum(self.grid.weights * np.abs(v) ** 2)),
                              self.params)

    def density(self):
        return np.abs(self.values) ** 2


@dataclass
class EnergyBreakdown:
    kinetic: float
    rotation: float
    interaction: float
    total: float
    mu: float
    magnetic_form_total: float


class GPFunctional2D:
    """Discrete GP energy, its gradient and a mode-wise preconditioner."""

    def __init__(self, grid, params):
        self.grid = grid
        self.params = params
        self.eps2inv = params.epsilon ** -2
        self.omega = params.omega
        self.W = grid.weights
        self.w_ring = 2.0 * np.pi * grid.radial.area
        m, m_rot = grid.modes()
        r = grid.r[:, None]
        self.m, self.m_rot = m, m_rot
        self.ang = m[None, :] ** 2 / r ** 2
        self.rot = -2.0 * self.omega * m_rot[None, :]
        self._bands = laplacian_bands(grid.radial)

    def _hat(self, psi):
        return np.fft.fft(psi, axis=1) / self.grid.n_theta

    def parts(self, psi):
        g = self.grid
        h = g.radial.h
        d = np.diff(psi, axis=0)
        kin_r = g.dtheta * float(np.sum(g.radial.faces[:, None] * np.abs(d) ** 2)) / h
        p2 = np.abs(self._hat(psi)) ** 2
        kin_a = float(np.sum(self.w_ring[:, None] * self.ang * p2))
        rot = float(np.sum(self.w_ring[:, None] * self.rot * p2))
        inter = self.eps2inv * float(np.sum(self.W * np.abs(psi) ** 4))
        return kin_r + kin_a, rot, inter

    def energy(self, psi):
        return sum(self.parts(psi))

    def gradient(self, psi):
        out = neg_laplacian(self.grid.radial, psi)
        out += np.fft.ifft((self.ang + self.rot) * np.fft.fft(psi, axis=1), axis=1)
        out += 2.0 * self.eps2inv * np.abs(psi) ** 2 * psi
        out[-1] = 0.0
        return out

    def energy_grad(self, psi):
        return self.energy(psi), self.gradient(psi)

    def inner(self, a, b):
        return float(np.sum(self.W * (a.real * b.real + a.imag * b.imag)))

    def energy_delta(self, x, y, mu=0.0):
        """E(y) - E(x) - mu (M(y) - M(x)) from (y - x), (y + x) products."""
        g = self.grid
        d, s = y - x, y + x
        kin_r = g.dtheta * float(np.sum(g.radial.faces[:, None] *
                                        np.real(np.conj(np.diff(d, axis=0)) * np.diff(s, axis=0)))) / g.radial.h
        dh, sh = self._hat(d), self._hat(s)
        quad = float(np.sum(self.w_ring[:, None] * (self.ang + self.rot) * np.real(np.conj(dh) * sh)))
        dm = np.real(np.conj(d) * s)
        loc = float(np.sum(self.W * dm * (self.eps2inv * (np.abs(x) ** 2 + np.abs(y) ** 2) - mu)))
        return kin_r + quad + loc

    def magnetic_form(self, psi):
        """Energy evaluated as |(grad - iA) psi|^2 - Omega^2 r^2 |psi|^2 + eps^-2 |psi|^4, A = Omega r e_theta."""
        g = self.grid
        h = g.radial.h
        r = g.r[:, None]
        d = np.diff(psi, axis=0)
        kin_r = g.dtheta * float(np.sum(g.radial.faces[:, None] * np.abs(d) ** 2)) / h
        ik = 1j * self.m.copy()
        if g.n_theta % 2 == 0:
            ik[g.n_theta // 2] = 0.0
        dth = np.fft.ifft(ik[None, :] * np.fft.fft(psi, axis=1), axis=1)
        cov = dth / r - 1j * self.omega * r * psi
        nyq = 0.0
        if g.n_theta % 2 == 0:
            k = g.n_theta // 2
            ph = np.abs(self._hat(psi)[:, k]) ** 2
            nyq = float(np.sum(self.w_ring * k ** 2 * ph / g.r ** 2))
        mag = float(np.sum(self.W * np.abs(cov) ** 2)) + nyq
        cent = float(np.sum(self.W * self.omega ** 2 * r ** 2 * np.abs(psi) ** 2))
        inter = self.eps2inv * float(np.sum(self.W * np.abs(psi) ** 4))
        return kin_r + mag - cent + inter

    def breakdown(self, psi):
        kin, rot, inter = self.parts(psi)
        tot = kin + rot + inter
        return EnergyBreakdown(kin, rot, inter, tot, tot + inter, self.magnetic_form(psi))

    def precond(self, psi, r, mu):
        """Per-mode solve of -Lap_r + (m/r - Omega r)^2 + c(r), c from the ring-averaged density."""
        lower, diag, upper = self._bands
        rad = self.grid.r[:-1, None]
        rho = np.mean(np.abs(psi[:-1]) ** 2, axis=1)[:, None]
        om = self.omega
        c = np.maximum(2.0 * self.eps2inv * rho - mu - om ** 2 * rad ** 2, 0.0) + 0.5 * self.eps2inv * rho
        shift = (self.ang[:-1] + self.rot) + om ** 2 * rad ** 2
        dg = diag[:, None] + shift + c
        rhat = np.fft.fft(r[:-1], axis=1)
        zhat = solve_tridiagonal(lower, dg, upper, rhat)
        z = np.zeros_like(r)
        z[:-1] = np.fft.ifft(zhat, axis=1)
        return z


@dataclass
class Schedule:
    max_iter: int = 2000
    tol: float = 1e-6
    use_cg: bool = True


def _check_normalized(psi):
    if abs(psi.mass - 1.0) > 1e-6:
        raise NotNormalized(f"mass {psi.mass:.12g}")


def assemble_energy(psi, params):
    _check_normalized(psi)
    return GPFunctional2D(psi.grid, params).breakdown(psi.values)


def minimize(psi0, params, schedule=None):
    """Normalized preconditioned gradient flow; returns (psi, breakdown).

    On exhaustion of the budget NoConvergence is raised carrying .psi and
    .breakdown of the final (best) iterate.
    """
    schedule = schedule or Schedule()
    fun = GPFunctional2D(psi0.grid, params)
    x0 = psi0.values.astype(complex).copy()
    x0[-1] = 0.0

    def post(y):
        y[-1] = 0.0
        return y

    try:
        res = descend(x0, fun.energy_grad, fun.inner, fun.precond, schedule.tol,
                      max_iter=schedule.max_iter, postprocess=post, use_cg=schedule.use_cg,
                      residual_scale=params.epsilon ** 2, energy_delta=fun.energy_delta)
    except NoConvergence as err:
        res = err.result
        err.psi = Wavefunction2D(psi0.grid, res.x, params)
        err.breakdown = fun.breakdown(res.x)
        raise
    psi = Wavefunction2D(psi0.grid, res.x, params)
    bd = fun.breakdown(res.x)
    psi.info = {"iterations": res.iterations, "accepted": res.accepted, "residual": res.residual,
                "energy_history": res.history}
    return psi, bd


# ---------------------------------------------------------------- trial states

@dataclass(frozen=True)
class TrialSpec:
    kind: str
    lattice_constant: float = None
    cutoff: float = None
    omega_phase: int = None
    seed: int = 0
    lattice: str = "triangular"
    offset: str = "origin"
    n_theta: int = 512
    phase_modes: int = 4
    phase_amplitude: float = 1.0


def lattice_constant(omega, lattice="triangular"):
    """Spacing of a lattice whose fundamental cell has area pi / Omega."""
    area = math.pi / omega
    if lattice == "triangular":
        return math.sqrt(2.0 * area / math.sqrt(3.0))
    if lattice == "rectangular":
        return math.sqrt(area)
    raise ValidationError("lattice", f"unknown lattice {lattice!r}")


def lattice_points(omega, lattice="triangular", spacing=None, offset="origin"):
    """Lattice points (complex) whose Wigner-Seitz cells lie inside the unit disc.

    offset "origin" puts a lattice point at the centre of the disc, "centroid"
    puts the centre of a triangle (triangular) or square (rectangular) there.
    """
    ell = spacing or lattice_constant(omega, lattice)
    if lattice == "triangular":
        a1, a2 = ell, ell * complex(0.5, math.sqrt(3.0) / 2.0)
        reach = ell / math.sqrt(3.0)
    elif lattice == "rectangular":
        a1, a2 = ell, 1j * ell
        reach = ell / math.sqrt(2.0)
    else:
        raise ValidationError("lattice", f"unknown lattice {lattice!r}")
    if offset == "origin":
        shift = 0.0
    elif offset == "centroid":
        shift = (a1 + a2) / 3.0 if lattice == "triangular" else (a1 + a2) / 2.0
    else:
        raise ValidationError("offset", f"unknown lattice offset {offset!r}")
    k = int(math.ceil(2.0 / ell)) + 2
    i, j = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1))
    z = (i * a1 + j * a2).ravel() - shift
    return z[np.abs(z) + reach <= 1.0 + 1e-12]


def cutoff_window(params):
    """(lower, upper) admissible cutoff: lower = min(eps, sqrt(eps/Omega)), upper = Omega^-1/2 / 2."""
    eps, om = params.epsilon, params.omega
    if om <= 0:
        raise ValidationError("omega", "vortex lattice needs Omega > 0")
    return min(eps, math.sqrt(eps / om)), 0.5 / math.sqrt(om)


def _embed(profile, grid_n=None):
    """Values of a radial profile on the disc grid from which its annulus grid was cut."""
    g = profile.grid
    if g.r_lo == 0.0:
        return g, profile.values
    j0 = int(round(g.r_lo / g.h))
    disc = RadialGrid(0.0, g.n + j0)
    if abs(disc.h - g.h) > 1e-12 * g.h:
        raise ValidationError("grid", "annulus grid is not cut from a disc grid")
    vals = np.concatenate((np.zeros(j0), profile.values))
    return disc, vals


def smooth_random_phase(grid, seed, modes=4, amplitude=1.0):
    rng = np.random.default_rng(seed)
    r, t = grid.r[:, None], grid.theta[None, :]
    phase = np.zeros((grid.n_r, grid.n_theta))
    for m in range(1, modes + 1):
        a, b = rng.normal(size=2) * amplitude / m
        phase += r ** m * (a * np.cos(m * t) + b * np.sin(m * t))
    return phase


def make_trial(spec, params, profile, n_theta=None):
    """Trial wavefunction of the requested kind on the profile's (disc) radial grid."""
    n_theta = n_theta or spec.n_theta
    if spec.kind == "giant_vortex":
        prof = profile.profile if isinstance(profile, GiantVortexProfile) else profile
        disc, f = _embed(prof)
        grid = PolarGrid(disc, n_theta)
        if isinstance(profile, GiantVortexProfile):
            n = profile.winding
        else:
            if spec.omega_phase is None:
                raise ValidationError("omega_phase", "required for giant_vortex trial")
            n = math.floor(params.omega) - int(spec.omega_phase)
        psi = f[:, None] * np.exp(1j * n * grid.theta[None, :])
        return Wavefunction2D(grid, psi, params).normalized()

    prof = profile.profile if isinstance(profile, GiantVortexProfile) else profile
    disc, g = _embed(prof)
    grid = PolarGrid(disc, n_theta)
    r = grid.r
    if spec.kind == "tf_seed":
        amp = np.sqrt(density_trial(params, r)) * _dirichlet_taper(r, max(params.epsilon, 2 * disc.h))
        phase = smooth_random_phase(grid, spec.seed, spec.phase_modes, spec.phase_amplitude)
        psi = amp[:, None] * np.exp(1j * phase)
        return Wavefunction2D(grid, psi, params).normalized()

    if spec.kind != "vortex_lattice":
        raise ValidationError("kind", f"unknown trial kind {spec.kind!r}")
    lo, hi = cutoff_window(params)
    t = spec.cutoff if spec.cutoff is not None else min(max(params.epsilon, lo), hi)
    if not (lo - 1e-15 <= t <= hi):
        raise CutoffOutOfRange(f"cutoff {t:g} outside [{lo:g}, {hi:g}]")
    pts = lattice_points(params.omega, spec.lattice, spec.lattice_constant, spec.offset)
    x, y = grid.cartesian()
    zeta = x + 1j * y
    phi = np.ones_like(zeta)
    xi = np.ones(zeta.shape)
    for z0 in pts:
        d = zeta - z0
        a = np.abs(d)
        phi *= np.where(a > 0, d / np.where(a > 0, a, 1.0), 1.0)
        xi = np.minimum(xi, a / t)
    xi = np.minimum(xi, 1.0)
    psi = g[:, None] * xi * phi
    psi[-1] = 0.0
    W = grid.weights
    m = float(np.sum(W * np.abs(psi) ** 2))
    out = Wavefunction2D(grid, psi / math.sqrt(m), params)
    out.info = {"c_squared": 1.0 / m, "cutoff": t, "lattice_points": pts,
                "lattice_constant": spec.lattice_constant or lattice_constant(params.omega, spec.lattice)}
    return out


# ---------------------------------------------------------------- decoupling

@dataclass
class DecoupledState:
    u: np.ndarray
    reduced_E: float
    reduced_F: float
    lambda_: float
    e_gp: float
    e_annulus: float
    e_hat: float
    identity_residual: float
    masked_fraction: float
    meta: dict = field(default_factory=dict)


def annulus_rows(psi_grid, ann_grid):
    """Index of the first disc-grid row belonging to the annulus grid."""
    h = psi_grid.radial.h
    if abs(h - ann_grid.h) > 1e-12 * h or psi_grid.radial.r_lo != 0.0:
        raise ValidationError("grid", "annulus grid is not cut from the wavefunction grid")
    j0 = int(round(ann_grid.r_lo / h))
    if j0 + ann_grid.n != psi_grid.n_r:
        raise ValidationError("grid", "annulus grid does not end on the outer ring")
    return j0


def decouple_energy(psi, gv, mask_threshold=1e-6, max_masked_fraction=0.1):
    """Split E[psi] into the giant-vortex profile energy and the energy of u = psi / (f e^{i n theta}).

    The identity E_A[psi] = E_hat + E_omega[u] holds exactly (up to the
    profile's Euler-Lagrange residual) when psi vanishes outside the annulus
    A = {r >= R_<} and is normalized there; E_A is the GP energy restricted to
    A with free inner boundary.  `identity_residual` is relative to |E_A|.
    """
    params = gv.params
    _check_normalized(psi)
    ann = gv.profile.grid
    j0 = annulus_rows(psi.grid, ann)
    full = GPFunctional2D(psi.grid, params)
    e_gp = full.energy(psi.values)
    mu = full.breakdown(psi.values).mu
    agrid = PolarGrid(ann, psi.n_theta)
    pa = psi.values[j0:]
    e_ann = GPFunctional2D(agrid, params).energy(pa)

    f = gv.profile.values
    n = gv.winding
    mask = f ** 2 > mask_threshold * np.max(f ** 2)
    interior = np.ones(ann.n, bool)
    interior[-1] = False
    frac = 1.0 - np.count_nonzero(mask[interior]) / np.count_nonzero(interior)
    if frac > max_masked_fraction:
        raise DensityTooSmall(f"mask removes {frac:.3f} of the annulus")
    theta = agrid.theta[None, :]
    u = np.zeros_like(pa)
    u[mask] = pa[mask] * np.exp(-1j * n * theta) / f[mask][:, None]

    r = ann.r
    h = ann.h
    M = agrid.n_theta
    fg = f * mask
    face_w = ann.faces * fg[:-1] * fg[1:]
    du = np.abs(np.diff(u, axis=0)) ** 2
    rad = agrid.dtheta * float(np.sum(face_w[:, None] * du)) / h
    # spectrum of u taken from psi's spectrum with the winding removed, so no wrap-around
    m_psi, m_rot = agrid.modes()
    ph = np.fft.fft(pa, axis=1) / M
    uh = np.zeros_like(ph)
    uh[mask] = ph[mask] / f[mask][:, None]
    m_u = m_psi - n
    w_ring = 2.0 * np.pi * ann.area * fg ** 2
    p2 = np.abs(uh) ** 2
    ang = float(np.sum(w_ring[:, None] * (m_u[None, :] ** 2 / r[:, None] ** 2) * p2))
    cur = float(np.sum(w_ring[:, None] * (-2.0 * (params.omega - n / r[:, None] ** 2) * m_u[None, :]) * p2))
    W = agrid.weights
    pot = params.epsilon ** -2 * float(np.sum(W * (fg ** 4)[:, None] * (1.0 - np.abs(u) ** 2) ** 2))
    reduced_E = rad + ang + cur + pot
    reduced_F = rad + ang + pot
    resid = abs(e_ann - (gv.energy + reduced_E)) / abs(e_ann)
    return DecoupledState(u=u, reduced_E=reduced_E, reduced_F=reduced_F,
                          lambda_=mu - gv.profile.mu_hat, e_gp=e_gp, e_annulus=e_ann,
                          e_hat=gv.energy, identity_residual=resid, masked_fraction=frac,
                          meta={"rows_offset": j0, "outside_energy": e_gp - e_ann})


# ---------------------------------------------------------------- checks

def smooth_directions(grid, count, seed, max_mode=6, max_power=4):
    """Random smooth complex fields vanishing on the outer ring."""
    rng = np.random.default_rng(seed)
    r, t = grid.r[:, None], grid.theta[None, :]
    out = []
    for _ in range(count):
        f = np.zeros((grid.n_r, grid.n_theta), complex)
        for m in range(-max_mode, max_mode + 1):
            for p in range(max_power + 1):
                c = complex(*rng.normal(size=2))
                f += c * r ** (abs(m) + p) * np.exp(1j * m * t)
        f *= (1.0 - r)
        f[-1] = 0.0
        out.append(f)
    return out


def gradient_check(psi, params, n_dirs=10, step=1e-6, seed=0):
    """Max relative error between 2 Re<G, d> and the central difference of E along d."""
    fun = GPFunctional2D(psi.grid, params)
    x = psi.values
    grad = fun.gradient(x)
    worst = 0.0
    for d in smooth_directions(psi.grid, n_dirs, seed):
        d = d / math.sqrt(fun.inner(d, d))
        an = 2.0 * fun.inner(grad, d)
        fd = (fun.energy(x + step * d) - fun.energy(x - step * d)) / (2.0 * step)
        worst = max(worst, abs(fd - an) / abs(an))
    return worst


def gradient_check_1d(functional, g, n_dirs=10, step=1e-6, seed=0):
    """Same check for a RadialFunctional (real profiles)."""
    rng = np.random.default_rng(seed)
    r = functional.grid.r
    grad = functional.gradient(g)
    worst = 0.0
    for _ in range(n_dirs):
        d = sum(rng.normal() * r ** p for p in range(6)) * (1.0 - r)
        d[-1] = 0.0
        d /= math.sqrt(functional.inner(d, d))
        an = 2.0 * functional.inner(grad, d)
        fd = (functional.energy(g + step * d) - functional.energy(g - step * d)) / (2.0 * step)
        worst = max(worst, abs(fd - an) / abs(an))
    return worst


# ---------------------------------------------------------------- I/O

_HEADER = struct.Struct("<qqdd")


def write_field(psi, path):
    p = psi.params
    eps, om = (p.epsilon, p.omega) if p is not None else (float("nan"), float("nan"))
    try:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(psi.n_r, psi.n_theta, eps, om))
            fh.write(np.ascontiguousarray(psi.values, dtype="<c16").tobytes())
    except OSError as err:
        raise IoError(path, str(err)) from err


def read_field(path, grid=None):
    """Read a field snapshot; the radial grid is the disc grid unless given."""
    try:
        with open(path, "rb") as fh:
            n_r, n_t, eps, om = _HEADER.unpack(fh.read(_HEADER.size))
            data = np.frombuffer(fh.read(), dtype="<c16")
    except OSError as err:
        raise IoError(path, str(err)) from err
    if data.size != n_r * n_t:
        raise IoError(path, "payload size does not match header")
    grid = grid or PolarGrid(RadialGrid(0.0, int(n_r)), int(n_t))
    params = PhysicalParams(eps, om) if math.isfinite(eps) else None
    return Wavefunction2D(grid, data.reshape(n_r, n_t).astype(complex), params)


def write_density_csv(psi, path):
    r, t = np.meshgrid(psi.grid.r, psi.grid.theta, indexing="ij")
    arr = np.column_stack((r.ravel(), t.ravel(), psi.density().ravel()))
    try:
        np.savetxt(path, arr, delimiter=",", header="r,theta,density", comments="", fmt="%.17g")
    except OSError as err:
        raise IoError(path, str(err)) from err


# ---------------------------------------------------------------- helpers

def hole_mass_2d(psi, radius):
    """Mass of |psi|^2 on the rings with r < radius."""
    sel = psi.grid.r < radius
    return float(np.sum(psi.grid.weights[sel] * psi.density()[sel]))


def perturb(psi, amplitude, seed=0):
    """psi times (1 + amplitude * smooth complex noise), renormalized; keeps psi's zeros."""
    if amplitude == 0.0:
        return psi.normalized()
    noise = smooth_directions(psi.grid, 1, seed, max_mode=8, max_power=2)[0]
    noise /= np.max(np.abs(noise))
    out = Wavefunction2D(psi.grid, psi.values * (1.0 + amplitude * noise), psi.params).normalized()
    out.info = getattr(psi, "info", {})
    return out


LATTICE_SEEDS = (("triangular", "origin"), ("triangular", "centroid"),
                 ("rectangular", "origin"), ("rectangular", "centroid"))


def minimize_lattice_seeds(params, profile, n_theta, schedule=None, seeds=LATTICE_SEEDS, cutoff=None):
    """Minimize from several vortex-lattice seeds and keep the lowest energy.

    Returns (psi, breakdown, runs) where runs lists (lattice, offset, energy,
    converged) for every seed.  Seeds whose descent does not converge still
    compete with their final iterate.
    """
    best = None
    runs = []
    for lattice, offset in seeds:
        spec = TrialSpec("vortex_lattice", lattice=lattice, offset=offset, cutoff=cutoff)
        psi0 = make_trial(spec, params, profile, n_theta)
        try:
            psi, bd = minimize(psi0, params, schedule)
            ok = True
        except NoConvergence as err:
            psi, bd, ok = err.psi, err.breakdown, False
            psi.info = {"iterations": err.iterations, "residual": err.residual}
        psi.info["seed"] = {"lattice": lattice, "offset": offset,
                            "points": len(psi0.info["lattice_points"]), "converged": ok}
        runs.append((lattice, offset, bd.total, ok))
        if best is None or bd.total < best[1].total:
            best = (psi, bd)
    return best[0], best[1], runs

"""Vortex detection and vorticity statistics on polar-grid wavefunctions.

Circulation is measured plaquette by plaquette with nearest-branch phase
increments, so the circulations of a set of cells always add up to the
circulation around its boundary.  The innermost ring bounds a central cell
that contains the origin.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import EmptyBulk, ThresholdInvalid, ZeroOnCircle
from .tf import critical_speeds, tf_solve

ZERO_MODULUS = 1e-12


@dataclass(frozen=True)
class Vortex:
    r: float
    theta: float
    degree: int
    core_scale: float

    @property
    def z(self):
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))


@dataclass
class VortexSet:
    items: list = field(default_factory=list)

    @property
    def total_degree(self):
        return int(sum(v.degree for v in self.items))

    def __len__(self):
        return len(self.items)

    def within(self, r_in, r_out):
        return VortexSet([v for v in self.items if r_in <= v.r < r_out])

    def to_json(self):
        return json.dumps({"total_degree": self.total_degree,
                           "items": [v.__dict__ for v in self.items]}, indent=1)

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("r,theta,degree,core_scale\n")
            for v in self.items:
                fh.write(f"{v.r!r},{v.theta!r},{v.degree},{v.core_scale!r}\n")


def edge_increments(values):
    """Nearest-branch phase increments along rings (k -> k+1) and spokes (j -> j+1)."""
    ring = np.angle(np.roll(values, -1, axis=1) * np.conj(values))
    spoke = np.angle(values[1:] * np.conj(values[:-1]))
    return ring, spoke


def plaquette_circulation(values):
    """Counter-clockwise circulation of each cell between rings j, j+1 and angles k, k+1.

    Returns (cells, centre) where cells has shape (n_r - 1, n_theta) and centre
    is the circulation around the innermost ring.
    """
    ring, spoke = edge_increments(values)
    cells = ring[1:] - ring[:-1] + spoke - np.roll(spoke, -1, axis=1)
    return cells, float(np.sum(ring[0]))


def _clusters(flags, centre_flag):
    """Connected components of flagged cells (periodic in theta); the centre touches row 0."""
    nr, nt = flags.shape
    seen = np.zeros_like(flags)
    comps = []
    start = []
    if centre_flag:
        start.append(("c",))
    for j, k in zip(*np.nonzero(flags)):
        start.append((int(j), int(k)))
    visited_centre = False
    for s in start:
        if s == ("c",):
            if visited_centre:
                continue
        elif seen[s]:
            continue
        comp = []
        stack = [s]
        while stack:
            c = stack.pop()
            if c == ("c",):
                if visited_centre:
                    continue
                visited_centre = True
                comp.append(c)
                stack.extend((0, k) for k in range(nt) if flags[0, k] and not seen[0, k])
                continue
            j, k = c
            if seen[j, k] or not flags[j, k]:
                continue
            seen[j, k] = True
            comp.append(c)
            for jj, kk in ((j + 1, k), (j - 1, k), (j, (k + 1) % nt), (j, (k - 1) % nt)):
                if 0 <= jj < nr and flags[jj, kk] and not seen[jj, kk]:
                    stack.append((jj, kk))
            if j == 0 and centre_flag and not visited_centre:
                stack.append(("c",))
        comps.append(comp)
    return comps


def detect_vortices(psi, amp_threshold=0.3):
    """Vortices of psi from plaquette circulations.

    A cell is flagged when its circulation is at least pi in magnitude and the
    smallest modulus at its corners is below amp_threshold * max|psi|; cells
    touching a (numerically) zero sample are always flagged.  Adjacent flagged
    cells are merged; the merged degree is the summed circulation / 2 pi.
    """
    if not 0.0 < amp_threshold < 1.0:
        raise ThresholdInvalid(f"amp_threshold={amp_threshold} not in (0, 1)")
    v = psi.values
    a = np.abs(v)
    amax = float(np.max(a))
    cells, centre = plaquette_circulation(v)
    corner_min = np.minimum(np.minimum(a[:-1], a[1:]),
                            np.minimum(np.roll(a[:-1], -1, axis=1), np.roll(a[1:], -1, axis=1)))
    degenerate = corner_min < ZERO_MODULUS * amax
    flags = ((np.abs(cells) >= np.pi) & (corner_min < amp_threshold * amax)) | degenerate
    flags[-1] = flags[-1] & ~degenerate[-1]  # cells on the Dirichlet ring are not vortices
    ring0_min = float(np.min(a[0]))
    centre_flag = abs(centre) >= np.pi and ring0_min < amp_threshold * amax
    r = psi.grid.r
    t = psi.grid.theta
    dt = psi.grid.dtheta
    rc = 0.5 * (r[:-1] + r[1:])
    area = rc * np.diff(r)
    items = []
    for comp in _clusters(flags, centre_flag):
        circ = 0.0
        wsum = 0.0
        zsum = 0.0j
        for c in comp:
            if c == ("c",):
                circ += centre
                w = math.pi * r[0] ** 2
                wsum += w
                continue
            j, k = c
            circ += cells[j, k]
            w = area[j] * dt
            wsum += w
            zsum += w * rc[j] * np.exp(1j * (t[k] + 0.5 * dt))
        d = int(round(circ / (2.0 * np.pi)))
        if d == 0:
            continue
        zc = zsum / wsum
        items.append(Vortex(float(abs(zc)), float(np.angle(zc) % (2 * np.pi)), d,
                            float(math.sqrt(wsum / math.pi))))
    items.sort(key=lambda v: (v.r, v.theta))
    return VortexSet(items)


def circle_samples(psi, r):
    """psi on the discrete circle of radius r (linear interpolation between rings)."""
    rr = psi.grid.r
    if r < rr[0] or r > rr[-1]:
        raise ValueError(f"radius {r} outside the grid")
    j = int(np.searchsorted(rr, r))
    if j < len(rr) and abs(rr[j] - r) <= 1e-12:
        return psi.values[j]
    j = max(j, 1)
    s = (r - rr[j - 1]) / (rr[j] - rr[j - 1])
    return (1.0 - s) * psi.values[j - 1] + s * psi.values[j]


def degree_on_circle(psi, r):
    """Winding number of psi around the circle of radius r."""
    c = circle_samples(psi, r)
    if np.min(np.abs(c)) < ZERO_MODULUS * np.max(np.abs(psi.values)):
        raise ZeroOnCircle(f"psi vanishes on the circle r={r}")
    inc = np.angle(np.roll(c, -1) * np.conj(c))
    return int(round(float(np.sum(inc)) / (2.0 * np.pi)))


@dataclass(frozen=True)
class BulkRegion:
    r_in: float
    r_out: float
    regime: str

    @property
    def area(self):
        return math.pi * (self.r_out ** 2 - self.r_in ** 2)


def bulk_region(params, profile=None, regime="auto", gamma=None, omega_bar=None):
    """Bulk annulus on which vorticity and zero-free statements are checked.

    moderate:     [R~, r_max] with R~ = 0 for Omega <= omega_bar / eps and
                  R~ = R_TF + gamma / (eps Omega) above (gamma = 1/|log eps| by default,
                  omega_bar / eps defaults to Omega_c2);
    giant_vortex: [R_TF + eps / |log eps|, 1 - eps^3/2 |log eps|^2].
    'auto' picks giant_vortex when Omega eps^2 |log eps| exceeds 2/(3 pi).
    """
    eps, om = params.epsilon, params.omega
    le = params.log_eps
    sol = tf_solve(params)
    if regime == "auto":
        regime = "giant_vortex" if params.omega0 > 2.0 / (3.0 * math.pi) else "moderate"
    if regime == "giant_vortex":
        r_in = sol.r_tf + eps / le
        r_out = 1.0 - eps ** 1.5 * le ** 2
    elif regime == "moderate":
        if profile is None:
            raise ValueError("moderate regime needs the density profile for r_max")
        gamma = 1.0 / le if gamma is None else gamma
        threshold = (omega_bar / eps) if omega_bar is not None else critical_speeds(eps).omega_c2
        r_in = 0.0 if om <= threshold else sol.r_tf + gamma / (eps * om)
        r_out = profile.r_max
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if not (0.0 <= r_in < r_out <= 1.0):
        raise EmptyBulk(f"bulk bounds cross: [{r_in:.4f}, {r_out:.4f}]")
    return BulkRegion(r_in, r_out, regime)


def vorticity_measure(vortices, params, r_in, r_out, theta_lo=0.0, theta_hi=2 * math.pi):
    """nu(S) = (2 pi / Omega) * sum of degrees of vortices in the sector-annulus S."""
    tot = 0
    for v in vortices.items:
        if r_in <= v.r < r_out and theta_lo <= v.theta < theta_hi:
            tot += v.degree
    return 2.0 * math.pi / params.omega * tot


def vorticity_uniformity(vortices, params, region, cells=4, offset=0.0):
    """Global ratio nu(S)/|S| and per-sector ratios over `cells` equal angular sectors."""
    if cells < 1:
        raise ValueError("cells must be positive")
    area = region.area
    rot = VortexSet([Vortex(v.r, (v.theta - offset) % (2 * math.pi), v.degree, v.core_scale)
                     for v in vortices.items])
    glob = vorticity_measure(rot, params, region.r_in, region.r_out) / area
    width = 2.0 * math.pi / cells
    sectors = [vorticity_measure(rot, params, region.r_in, region.r_out, i * width, (i + 1) * width)
               / (area / cells) for i in range(cells)]
    return {"global_ratio": glob, "sector_ratios": sectors,
            "dispersion": float(np.std(sectors)), "count": len(vortices.within(region.r_in, region.r_out)),
            "region": (region.r_in, region.r_out), "cells": cells}


def zero_free_check(psi, region, tf, dev_tol=0.5):
    """Minimum density and TF deviation on the bulk annulus.

    zero_free: min |psi|^2 > 0 on the region's nodes and no cell lying in the
    region carries a circulation of magnitude >= pi.
    tf_close: max ||psi|^2 - rho_TF|  <  dev_tol * max rho_TF on the region.
    """
    r = psi.grid.r
    sel = (r >= region.r_in) & (r <= region.r_out)
    dens = psi.density()[sel]
    rho = tf.density(r[sel])[:, None]
    cells, centre = plaquette_circulation(psi.values)
    csel = sel[:-1] & sel[1:]
    winding = bool(np.any(np.abs(cells[csel]) >= np.pi))
    if region.r_in <= r[0]:
        winding = winding or abs(centre) >= np.pi
    min_d = float(np.min(dens)) if dens.size else float("nan")
    dev = float(np.max(np.abs(dens - rho))) if dens.size else float("nan")
    rho_max = float(np.max(rho)) if dens.size else float("nan")
    zero_free = bool(dens.size and min_d > 0.0 and not winding)
    tf_close = bool(dens.size and dev < dev_tol * rho_max)
    return {"min_density": min_d, "max_tf_deviation": dev, "rho_tf_max": rho_max,
            "cells_with_winding": winding, "zero_free": zero_free, "tf_close": tf_close,
            "verdict": zero_free and tf_close}

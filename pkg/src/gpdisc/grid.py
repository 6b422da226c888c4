"""Radial finite-volume grid shared by the 1D and 2D solvers.

Nodes sit at cell centres r_j = r_lo + (j + 1/2) h, with h chosen so that the
last node lands exactly on r = 1 where the Dirichlet condition is imposed.
Faces are at r_lo + (j + 1) h.  No flux is taken through r_lo: at the origin
the face has zero area, on an annulus this is the natural (Neumann) condition.

Two grids built with the same spacing share nodes, so an annulus grid can be
cut out of a disc grid exactly (see `RadialGrid.annulus`).
"""
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class RadialGrid:
    r_lo: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValidationError("n", "need at least 3 radial nodes")
        if not 0.0 <= self.r_lo < 1.0:
            raise ValidationError("r_lo", "must lie in [0, 1)")

    @property
    def h(self):
        return (1.0 - self.r_lo) / (self.n - 0.5)

    @property
    def r(self):
        r = self.r_lo + (np.arange(self.n) + 0.5) * self.h
        r[-1] = 1.0
        return r

    @property
    def faces(self):
        """Radii of the n-1 faces between consecutive nodes."""
        return self.r_lo + (np.arange(self.n - 1) + 1.0) * self.h

    @property
    def area(self):
        """Per-node r * (cell width); multiply by 2*pi for the disc measure."""
        h = self.h
        a = self.r * h
        a[-1] = (1.0 - 0.25 * h) * 0.5 * h
        return a

    @property
    def weights(self):
        """Quadrature weights for integrals of radial functions against 2 pi r dr."""
        return 2.0 * np.pi * self.area

    def annulus(self, r_inner):
        """Sub-grid whose nodes are the nodes of this grid with r > r_inner (snapped to a face)."""
        h = self.h
        j0 = int(np.floor((r_inner - self.r_lo) / h + 1e-12))
        j0 = min(max(j0, 0), self.n - 3)
        return RadialGrid(self.r_lo + j0 * h, self.n - j0), j0

    def integrate(self, f):
        """Integral of a radial function f against 2 pi r dr."""
        return float(np.dot(self.weights, f))


def disc_grid(n):
    return RadialGrid(0.0, n)


def neg_laplacian(grid, g):
    """Discrete -(1/r)(r g')' with the conventions above; returned on all nodes.

    Acts along axis 0 so it also applies to (n_r, n_theta) arrays.
    """
    f = grid.faces
    a = grid.area
    h = grid.h
    d = np.diff(g, axis=0)
    shape = (-1,) + (1,) * (np.ndim(g) - 1)
    flux = f.reshape(shape) * d / h
    out = np.zeros_like(g)
    out[:-1] -= flux
    out[1:] += flux
    return out / a.reshape(shape)


def radial_kinetic(grid, g):
    """Sum over faces of 2 pi f_j |g_{j+1} - g_j|^2 / h (radial part of the Dirichlet form)."""
    d = np.diff(g, axis=0)
    f = grid.faces
    shape = (-1,) + (1,) * (np.ndim(g) - 1)
    return 2.0 * np.pi * float(np.sum(f.reshape(shape) * np.abs(d) ** 2)) / grid.h


def laplacian_bands(grid):
    """(lower, diag, upper) bands of the matrix of `neg_laplacian` restricted to nodes 0..n-2.

    The last node is the Dirichlet node and is excluded.
    """
    f = grid.faces
    a = grid.area[:-1]
    h = grid.h
    m = grid.n - 1
    diag = np.zeros(m)
    diag += f / h
    diag[1:] += f[:-1] / h
    diag /= a
    lower = -(f[:-1] / h) / a[1:]
    upper = -(f[:-1] / h) / a[:-1]
    return lower, diag, upper


def solve_tridiagonal(lower, diag, upper, rhs):
    """Thomas algorithm, vectorised over trailing axes of diag / rhs.

    lower, upper have length m-1 (broadcast against trailing axes); diag and rhs
    have leading length m.
    """
    m = diag.shape[0]
    c = np.empty(diag.shape, dtype=float)
    d = np.empty(rhs.shape, dtype=rhs.dtype)
    lo = lower.reshape((-1,) + (1,) * (diag.ndim - 1)) if diag.ndim > 1 else lower
    up = upper.reshape((-1,) + (1,) * (diag.ndim - 1)) if diag.ndim > 1 else upper
    c[0] = up[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, m):
        den = diag[i] - lo[i - 1] * c[i - 1]
        if i < m - 1:
            c[i] = up[i] / den
        d[i] = (rhs[i] - lo[i - 1] * d[i - 1]) / den
    x = np.empty_like(d)
    x[-1] = d[-1]
    for i in range(m - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x

"""Normalized gradient flow with backtracking on the unit-mass sphere.

Shared by the radial and 2D solvers.  The caller supplies the energy, its
L^2 gradient G (so that dE = 2 Re <G, dx>), the mass inner product and a
preconditioner.  Each step moves along the (preconditioned, optionally
conjugated) projected gradient, renormalizes, and is accepted only if the
energy decreases (Armijo).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence


@dataclass
class DescentResult:
    x: np.ndarray
    energy: float
    mu: float
    residual: float
    iterations: int
    accepted: int
    converged: bool
    history: list = field(default_factory=list)


def descend(x, energy_grad, inner, precond, tol, max_iter=5000, postprocess=None,
            use_cg=True, alpha0=1.0, raise_on_fail=True, residual_scale=1.0, energy_delta=None):
    """Minimize energy over {inner(x, x) = 1}.

    energy_grad(x) -> (E, G); inner(a, b) -> real part of the mass inner product;
    precond(x, r, mu) -> approximate inverse Hessian applied to r.
    energy_delta(x, y, mu), if given, returns E(y) - E(x) - mu (M(y) - M(x))
    computed without cancellation (M is the mass; both masses are 1, so this
    is the energy change with the round-off in the normalization removed).
    The line search then stays meaningful once the energy itself has
    converged to round-off.
    The stopping test is residual_scale * ||G - mu x|| < tol.
    """
    def normalize(y):
        return y / np.sqrt(inner(y, y))

    x = normalize(x)
    if postprocess is not None:
        x = postprocess(x)
    e, g = energy_grad(x)
    hist = [e]
    p_prev = r_prev = z_prev = None
    alpha = alpha0
    accepted = 0
    it = 0
    res = np.inf
    while True:
        mu = inner(x, g)
        r = g - mu * x
        res = residual_scale * np.sqrt(max(inner(r, r), 0.0))
        if res < tol:
            return DescentResult(x, e, mu, res, it, accepted, True, hist)
        if it >= max_iter:
            break
        it += 1
        z = precond(x, r, mu)
        z = z - inner(x, z) * x
        p = -z
        if use_cg and p_prev is not None:
            beta = max(0.0, inner(r, z - z_prev) / inner(r_prev, z_prev))
            q = -z + beta * p_prev
            q = q - inner(x, q) * x
            if inner(r, q) < 0:
                p = q
        slope = 2.0 * inner(r, p)
        if slope >= 0:
            p = -z
            slope = 2.0 * inner(r, p)
        a = min(1.0, 2.0 * alpha)
        ok = False
        while a > 1e-14:
            y = normalize(x + a * p)
            if postprocess is not None:
                y = postprocess(y)
            ey, gy = energy_grad(y)
            de = energy_delta(x, y, mu) if energy_delta is not None else ey - e
            if de <= 1e-4 * a * slope:
                ok = True
                break
            a *= 0.5
        if not ok:
            # energy differences have reached round-off; a plain steepest step is the last resort
            if p_prev is None:
                break
            p_prev = None
            continue
        alpha = a
        x, e, g = y, ey, gy
        hist.append(e)
        accepted += 1
        p_prev, r_prev, z_prev = p, r, z
    result = DescentResult(x, e, inner(x, g), res, it, accepted, False, hist)
    if raise_on_fail:
        err = NoConvergence(it, res)
        err.result = result
        raise err
    return result

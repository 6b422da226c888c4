import math

import numpy as np
import pytest

from gpdisc.cost import (_abscissa, compute_F, cost_function_H, estimate_third_speed, gp_cost,
                         harmonicity_residual, richardson_limit, split_F, tf_threshold)
from gpdisc.errors import BisectionFailed
from gpdisc.radial import giant_vortex_grid, optimize_phase
from gpdisc.tf import PhysicalParams


@pytest.fixture(scope="module")
def gv25():
    p = PhysicalParams.from_omega0(0.02, 0.25)
    w, gv, _ = optimize_phase(p, giant_vortex_grid(p, 2000))
    return p, gv


def test_F_boundary_values(gv25):
    p, gv = gv25
    F = compute_F(gv)
    f_in, f_out = split_F(gv, F)
    assert F[0] == 0.0
    assert f_in[-1] == pytest.approx(0.0, abs=1e-12 * np.max(np.abs(F)))
    assert np.allclose(f_in + f_out, F, rtol=0, atol=1e-12 * np.max(np.abs(F)))


def test_F_oracle_quadrature(gv25):
    # F(1) = 2 int g^2 (Omega s - n/s) ds by an independent fine quadrature of the interpolated profile
    p, gv = gv25
    x, g = _abscissa(gv)
    s = np.linspace(x[0], 1.0, 200001)
    gs = np.interp(s, x, g)
    integrand = 2 * gs ** 2 * (p.omega * s - gv.winding / s)
    ref = np.trapezoid(integrand, s)
    # F(1) is a near cancellation; compare against the size of the integrand
    assert abs(compute_F(gv)[-1] - ref) < 1e-4 * np.trapezoid(np.abs(integrand), s)


def test_f_out_is_harmonic(gv25):
    p, gv = gv25
    F = compute_F(gv)
    f_in, f_out = split_F(gv, F)
    assert harmonicity_residual(gv, f_out) < 1e-3 * harmonicity_residual(gv, F)
    assert harmonicity_residual(gv, f_in) > 0.5 * harmonicity_residual(gv, F)


def test_cost_sign():
    h45, _ = gp_cost(PhysicalParams.from_omega0(0.02, 0.45), 2000)
    h10, _ = gp_cost(PhysicalParams.from_omega0(0.02, 0.10), 2000)
    assert h45.min_h_bulk > 0 and h45.meta["positive"]
    assert h10.min_h_bulk < 0
    lo, hi = h45.bulk
    assert lo <= h45.argmin_r <= hi


def test_tf_threshold_window():
    v = tf_threshold(0.01, n=4000)
    assert 0.15 <= v <= 0.30


def test_bisection_failure():
    with pytest.raises(BisectionFailed):
        tf_threshold(0.02, n=2000, lo=0.5, hi=0.9)


def test_threshold_curve_tf_level():
    c = estimate_third_speed([0.05, 0.02], n=2000, level="tf", tol=2e-3)
    assert len(c.omega0_star) == 2
    assert c.omega0_star[1] < c.omega0_star[0]
    assert c.limit == pytest.approx(richardson_limit(c.epsilon, c.omega0_star))
    with pytest.raises(ValueError):
        estimate_third_speed([0.02, 0.05], level="tf")


def test_richardson_limit_exact_for_linear():
    eps = [0.05, 0.01]
    vals = [0.3 + 0.7 / abs(math.log(e)) for e in eps]
    assert richardson_limit(eps, vals) == pytest.approx(0.3, rel=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from gpdisc.errors import GridTooCoarse, PhaseOutOfWindow, ValidationError
from gpdisc.grid import RadialGrid
from gpdisc.tf import (PhysicalParams, critical_speeds, optimal_phase_tf, refined_tf_energy,
                       tf_cost_function, tf_cost_grid, tf_energy, tf_solve)

eps_st = st.floats(0.005, 0.5)


def test_constant_density_at_rest():
    p = PhysicalParams(0.1, 0.0)
    sol = tf_solve(p)
    assert not sol.has_hole and sol.r_tf == 0.0
    assert np.allclose(sol.density(np.linspace(0, 1, 11)), 1 / math.pi, rtol=1e-14)
    assert tf_energy(p) == pytest.approx(100 / math.pi, rel=1e-14)
    # direct quadrature of the TF functional at rho = 1/pi
    assert quad(lambda r: 2 * math.pi * r * (1 / math.pi) ** 2 / 0.01, 0, 1)[0] == pytest.approx(
        tf_energy(p), rel=1e-12)


def test_hole_radius_oracles():
    eps = 0.1
    p = PhysicalParams(eps, 4 / (math.sqrt(math.pi) * eps))
    sol = tf_solve(p)
    # independent: solve mass(mu) = 1 for the clipped density and locate its zero
    om = p.omega

    def mass(mu):
        r0 = math.sqrt(max(-mu / om ** 2, 0.0))
        return quad(lambda r: math.pi * r * eps ** 2 * (mu + om ** 2 * r ** 2), r0, 1)[0] - 1

    mu = brentq(mass, -om ** 2 + 1e-9, 0.0, xtol=1e-14)
    assert sol.r_tf == pytest.approx(math.sqrt(-mu) / om, rel=1e-9)
    assert sol.r_tf == pytest.approx(math.sqrt(0.5), rel=1e-12)
    c2 = PhysicalParams(eps, critical_speeds(eps).omega_c2)
    assert tf_solve(c2).r_tf == 0.0 and not tf_solve(c2).has_hole


def test_energy_at_second_critical_speed():
    eps = 0.1
    c2 = critical_speeds(eps).omega_c2
    expected = -4 / (3 * math.pi * eps ** 2)
    assert tf_energy(PhysicalParams(eps, c2)) == pytest.approx(expected, rel=1e-12)
    assert tf_energy(PhysicalParams(eps, c2 * (1 + 1e-14))) == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(-42.4413, abs=1e-4)


def test_critical_speeds_values():
    cs = critical_speeds(0.01)
    assert cs.omega_c2 == pytest.approx(112.838, abs=1e-3)
    assert cs.omega_c3 == pytest.approx(460.8, abs=0.05)
    assert critical_speeds(math.exp(-1)).omega_c1 == pytest.approx(1.0, rel=1e-15)


def test_params_validation():
    with pytest.raises(ValidationError):
        PhysicalParams(1.5, 0.0)
    with pytest.raises(ValidationError):
        PhysicalParams(0.1, -1.0)
    p = PhysicalParams.from_omega0(0.05, 0.25)
    assert p.omega0 == pytest.approx(0.25, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(eps=eps_st, k=st.floats(0.0, 20.0))
def test_mass_normalization(eps, k):
    p = PhysicalParams(eps, k * critical_speeds(eps).omega_c2)
    sol = tf_solve(p)
    assert sol.mass() == pytest.approx(1.0, abs=1e-12)
    m = quad(lambda r: 2 * math.pi * r * float(sol.density(r)), sol.r_tf, 1, epsabs=1e-13, epsrel=1e-13)[0]
    assert m == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(eps=eps_st, k1=st.floats(1.001, 50.0), k2=st.floats(1.001, 50.0))
def test_hole_radius_monotone(eps, k1, k2):
    c2 = critical_speeds(eps).omega_c2
    a, b = sorted((k1, k2))
    if b - a < 1e-6:
        return
    assert tf_solve(PhysicalParams(eps, a * c2)).r_tf < tf_solve(PhysicalParams(eps, b * c2)).r_tf


def test_hole_radius_tends_to_one():
    assert tf_solve(PhysicalParams(0.01, 1e6)).r_tf > 0.99


@settings(max_examples=40, deadline=None)
@given(eps=eps_st)
def test_branch_continuity(eps):
    c2 = critical_speeds(eps).omega_c2
    lo = tf_energy(PhysicalParams(eps, c2 * (1 - 1e-14)))
    hi = tf_energy(PhysicalParams(eps, c2 * (1 + 1e-14)))
    assert abs(lo - hi) < 1e-10 * abs(hi)


def test_refined_tf_argmin_near_optimal_phase():
    for eps in (0.05, 0.02, 0.01):
        p = PhysicalParams.from_omega0(eps, 0.25)
        half = int(min(100, math.floor(refined_window(p))))
        energies = {w: refined_tf_energy(p, w).energy for w in range(0, half + 1)}
        best = min(energies, key=energies.get)
        assert abs(best - optimal_phase_tf(eps)) <= 1.0
    # at eps = 0.01 the minimizer sits in {36, ..., 38}
    p = PhysicalParams.from_omega0(0.01, 0.25)
    energies = {w: refined_tf_energy(p, w).energy for w in range(0, 101)}
    assert min(energies, key=energies.get) in (36, 37, 38)


def refined_window(p):
    from gpdisc.tf import phase_window
    return phase_window(p)


def test_refined_tf_quadratic_model():
    p = PhysicalParams.from_omega0(0.01, 0.25)
    w0 = round(optimal_phase_tf(0.01))
    base = refined_tf_energy(p, w0)
    def e(w):
        return refined_tf_energy(p, w).energy

    for d in (1, 5, 10):
        # curvature in omega of the exact minimum matches the unit coefficient of the model
        assert (e(w0 + d) + e(w0 - d) - 2 * base.energy) / (2 * d * d) == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(PhaseOutOfWindow):
        refined_tf_energy(p, 10 ** 6)


def test_refined_tf_mass():
    p = PhysicalParams.from_omega0(0.02, 0.3)
    r = refined_tf_energy(p, 18)
    eps, n = p.epsilon, r.winding
    m = quad(lambda x: math.pi * x * eps ** 2 * max(r.lam - n * n / x ** 2, 0.0), r.r_inner, 1,
             epsabs=1e-13, epsrel=1e-12)[0]
    assert m == pytest.approx(1.0, abs=1e-9)


def test_tf_cost_function_properties():
    p = PhysicalParams.from_omega0(0.01, 0.25)
    cost = tf_cost_function(p, tf_cost_grid(p, 4000))
    # first node sits half a cell above R_TF; extrapolated to the hole edge H vanishes
    assert abs(1.5 * cost.h[0] - 0.5 * cost.h[1]) < 1e-6 * np.max(np.abs(cost.h))
    assert np.max(np.abs(np.diff(cost.h))) < 0.05 * np.max(np.abs(cost.h))  # continuous
    assert cost.min_h_bulk > 0
    q = PhysicalParams.from_omega0(0.01, 0.10)
    assert tf_cost_function(q, tf_cost_grid(q, 4000)).min_h_bulk < 0
    with pytest.raises(GridTooCoarse):
        tf_cost_function(p, RadialGrid(0.9, 5))

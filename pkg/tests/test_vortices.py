import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpdisc.errors import EmptyBulk, ThresholdInvalid, ZeroOnCircle
from gpdisc.gp2d import PolarGrid, TrialSpec, Wavefunction2D, make_trial
from gpdisc.grid import disc_grid
from gpdisc.radial import giant_vortex_grid, minimize_density_profile, optimize_phase
from gpdisc.tf import PhysicalParams, tf_solve
from gpdisc.vortices import (BulkRegion, Vortex, VortexSet, bulk_region, degree_on_circle,
                             detect_vortices, plaquette_circulation, vorticity_measure,
                             vorticity_uniformity, zero_free_check)


def field(fun, n_r=80, n_t=128):
    g = PolarGrid(disc_grid(n_r), n_t)
    x, y = g.cartesian()
    v = fun(x + 1j * y)
    v[-1] = 0.0
    return Wavefunction2D(g, v)


def bump(z):
    return np.exp(-np.abs(z) ** 2)


def test_single_vortex_off_centre():
    z0 = 0.3 + 0.2j
    vs = detect_vortices(field(lambda z: (z - z0) * bump(z)))
    assert len(vs) == 1
    v = vs.items[0]
    assert v.degree == 1
    assert abs(v.z - z0) < 0.05


def test_vortex_at_origin_and_antivortex():
    vs = detect_vortices(field(lambda z: z ** 2 * bump(z)))
    assert vs.total_degree == 2
    assert vs.items[0].r < 0.05
    vs = detect_vortices(field(lambda z: np.conj(z - 0.5) * bump(z)))
    assert [v.degree for v in vs.items] == [-1]


def test_degree_hundred():
    psi = field(lambda z: z ** 100 * np.ones_like(z), n_r=60, n_t=1024)
    assert degree_on_circle(psi, 0.8) == 100


@settings(max_examples=20, deadline=None)
@given(a=st.integers(-3, 3), b=st.integers(-3, 3))
def test_degree_additivity(a, b):
    # deg(uv) = deg u + deg v on a circle avoiding the zeros
    def pw(z, k):
        return z ** k if k >= 0 else np.conj(z) ** (-k)

    u = field(lambda z: pw(z - 0.2, a) + 0 * z)
    v = field(lambda z: pw(z + 0.3j, b) + 0 * z)
    uv = Wavefunction2D(u.grid, u.values * v.values)
    r = 0.7
    assert degree_on_circle(uv, r) == degree_on_circle(u, r) + degree_on_circle(v, r) == a + b


@settings(max_examples=20, deadline=None)
@given(c=st.floats(0.1, 10.0), phi=st.floats(0.0, 2 * math.pi))
def test_degree_homogeneous(c, phi):
    psi = field(lambda z: (z - 0.1) ** 3 + 0 * z)
    scaled = Wavefunction2D(psi.grid, c * np.exp(1j * phi) * psi.values)
    assert degree_on_circle(scaled, 0.6) == degree_on_circle(psi, 0.6) == 3


def test_circulation_sums_to_boundary():
    psi = field(lambda z: (z - 0.3) * (z + 0.4j) * np.conj(z - 0.5 + 0.5j) * bump(z))
    cells, centre = plaquette_circulation(psi.values)
    j = 50
    inside = centre + float(np.sum(cells[:j]))
    ring = psi.values[j]
    boundary = float(np.sum(np.angle(np.roll(ring, -1) * np.conj(ring))))
    assert inside == pytest.approx(boundary, abs=1e-9)


def test_zero_on_circle_and_threshold():
    psi = field(lambda z: np.real(z) + 0j)
    with pytest.raises(ZeroOnCircle):
        degree_on_circle(psi, psi.grid.r[10])
    with pytest.raises(ThresholdInvalid):
        detect_vortices(psi, amp_threshold=1.5)


def test_empty_set():
    vs = detect_vortices(field(bump))
    assert len(vs) == 0 and vs.total_degree == 0
    p = PhysicalParams(0.1, 5.0)
    u = vorticity_uniformity(vs, p, BulkRegion(0.0, 0.8, "moderate"))
    assert u["global_ratio"] == 0.0 and u["count"] == 0


def test_vorticity_measure_normalization():
    p = PhysicalParams(0.1, 10.0)
    vs = VortexSet([Vortex(0.5, 1.0, 1, 0.01), Vortex(0.5, 4.0, 2, 0.01), Vortex(0.95, 1.0, 1, 0.01)])
    assert vorticity_measure(vs, p, 0.0, 0.9) == pytest.approx(3 * 2 * math.pi / 10)
    u = vorticity_uniformity(vs, p, BulkRegion(0.0, 0.9, "moderate"), cells=2)
    assert sum(u["sector_ratios"]) / 2 == pytest.approx(u["global_ratio"])


def test_bulk_region_regimes():
    p = PhysicalParams(0.05, 10.0)
    prof = minimize_density_profile(p, disc_grid(400))
    reg = bulk_region(p, prof)
    assert reg.regime == "moderate" and reg.r_in == 0.0 and reg.r_out == prof.r_max
    q = PhysicalParams.from_omega0(0.05, 0.3)
    reg = bulk_region(q)
    assert reg.regime == "giant_vortex"
    assert tf_solve(q).r_tf < reg.r_in < reg.r_out < 1
    with pytest.raises(ValueError):
        bulk_region(p, regime="moderate")
    with pytest.raises(EmptyBulk):
        bulk_region(PhysicalParams.from_omega0(0.7, 0.3), regime="giant_vortex")


def test_giant_vortex_trial_has_no_bulk_vortices():
    p = PhysicalParams.from_omega0(0.05, 0.3)
    w, gv, _ = optimize_phase(p, giant_vortex_grid(p, 400))
    psi = make_trial(TrialSpec("giant_vortex"), p, gv, 256)
    reg = bulk_region(p)
    assert len(detect_vortices(psi).within(reg.r_in, reg.r_out)) == 0
    zf = zero_free_check(psi, reg, tf_solve(p))
    assert zf["zero_free"] and zf["tf_close"] and zf["verdict"]
    assert degree_on_circle(psi, reg.r_out) == math.floor(p.omega) - w


def test_vortex_set_outputs(tmp_path):
    vs = detect_vortices(field(lambda z: (z - 0.3) * bump(z)))
    vs.write_csv(tmp_path / "v.csv")
    data = np.loadtxt(tmp_path / "v.csv", delimiter=",", skiprows=1, ndmin=2)
    assert data.shape == (1, 4) and data[0, 2] == 1
    assert '"total_degree": 1' in vs.to_json()


def test_zero_free_sees_central_vortex():
    p = PhysicalParams(0.1, 8.0)
    psi = field(lambda z: z * bump(z))
    zf = zero_free_check(psi, BulkRegion(0.0, 0.8, "moderate"), tf_solve(p))
    assert zf["cells_with_winding"] and not zf["zero_free"]

import math

import numpy as np
import pytest

from gpdisc.errors import CutoffOutOfRange, IoError, NotNormalized
from gpdisc.gp2d import (GPFunctional2D, PolarGrid, Schedule, TrialSpec, Wavefunction2D,
                         assemble_energy, cutoff_window, gradient_check, lattice_constant,
                         lattice_points, make_trial, minimize, perturb, read_field, write_field)
from gpdisc.grid import disc_grid
from gpdisc.radial import minimize_density_profile
from gpdisc.tf import PhysicalParams
from gpdisc.vortices import degree_on_circle


@pytest.fixture(scope="module")
def moderate():
    p = PhysicalParams(0.1, 8.0)
    prof = minimize_density_profile(p, disc_grid(64))
    return p, prof


def test_rest_state_matches_radial_profile():
    p = PhysicalParams(0.1, 0.0)
    prof = minimize_density_profile(p, disc_grid(64))
    psi0 = make_trial(TrialSpec("tf_seed", seed=2), p, prof, 32)
    psi, bd = minimize(psi0, p, Schedule(max_iter=3000, tol=1e-8))
    assert bd.total == pytest.approx(prof.energy, rel=1e-7)
    assert np.allclose(np.abs(psi.values[:, 0]), prof.values, atol=1e-4)


def test_magnetic_form_agrees(moderate):
    p, prof = moderate
    psi = make_trial(TrialSpec("tf_seed", seed=5), p, prof, 64)
    bd = assemble_energy(psi, p)
    assert bd.magnetic_form_total == pytest.approx(bd.total, rel=1e-10)


def test_gradient_check_2d(moderate):
    p, prof = moderate
    psi = make_trial(TrialSpec("vortex_lattice"), p, prof, 64)
    assert gradient_check(psi, p, n_dirs=5) < 1e-5


def test_conjugation_symmetry(moderate):
    # E_Omega(conj psi) = E_{-Omega}(psi)
    p, prof = moderate
    psi = make_trial(TrialSpec("tf_seed", seed=1), p, prof, 64)
    conj = Wavefunction2D(psi.grid, np.conj(psi.values), p)
    neg = PhysicalParams(p.epsilon, 0.0)
    e_conj = GPFunctional2D(psi.grid, p).energy(conj.values)
    f0 = GPFunctional2D(psi.grid, neg)
    rot = GPFunctional2D(psi.grid, p).parts(psi.values)[1]
    assert e_conj == pytest.approx(f0.energy(psi.values) - rot, rel=1e-10)


def test_restart_is_stationary(moderate):
    p, prof = moderate
    psi0 = make_trial(TrialSpec("vortex_lattice"), p, prof, 64)
    psi, bd = minimize(psi0, p, Schedule(max_iter=3000, tol=1e-7))
    again, bd2 = minimize(psi, p, Schedule(max_iter=3000, tol=1e-7))
    assert again.info["iterations"] == 0
    assert bd2.total == bd.total


def test_energy_history_decreases(moderate):
    p, prof = moderate
    psi, _ = minimize(make_trial(TrialSpec("tf_seed"), p, prof, 64), p, Schedule(max_iter=300, tol=1e-6))
    h = np.array(psi.info["energy_history"])
    assert np.all(np.diff(h) <= 1e-9 * np.abs(h[1:]))


def test_not_normalized(moderate):
    p, prof = moderate
    psi = make_trial(TrialSpec("tf_seed"), p, prof, 32)
    with pytest.raises(NotNormalized):
        assemble_energy(Wavefunction2D(psi.grid, 2 * psi.values, p), p)


def test_field_round_trip(tmp_path, moderate):
    p, prof = moderate
    psi = make_trial(TrialSpec("tf_seed", seed=4), p, prof, 32)
    write_field(psi, tmp_path / "f.bin")
    back = read_field(tmp_path / "f.bin")
    assert np.array_equal(back.values, psi.values)
    assert back.params == p
    (tmp_path / "bad.bin").write_bytes(open(tmp_path / "f.bin", "rb").read()[:-16])
    with pytest.raises(IoError):
        read_field(tmp_path / "bad.bin")


def test_lattice_cells_and_winding(moderate):
    p, prof = moderate
    for lattice in ("triangular", "rectangular"):
        ell = lattice_constant(p.omega, lattice)
        area = ell * ell * (math.sqrt(3) / 2 if lattice == "triangular" else 1.0)
        assert area == pytest.approx(math.pi / p.omega, rel=1e-12)
        for offset in ("origin", "centroid"):
            pts = lattice_points(p.omega, lattice, offset=offset)
            assert np.all(np.abs(pts) < 1)
            psi = make_trial(TrialSpec("vortex_lattice", lattice=lattice, offset=offset), p, prof, 128)
            inside = int(np.sum(np.abs(pts) < 0.9))
            assert degree_on_circle(psi, 0.9) == inside or np.any(np.abs(np.abs(pts) - 0.9) < 0.05)
            assert 1.0 <= psi.info["c_squared"] < 2.0


def test_cutoff_range(moderate):
    p, prof = moderate
    lo, hi = cutoff_window(p)
    assert lo < hi
    with pytest.raises(CutoffOutOfRange):
        make_trial(TrialSpec("vortex_lattice", cutoff=2 * hi), p, prof, 32)


def test_giant_vortex_trial_winding():
    p = PhysicalParams(0.1, 8.0)
    prof = minimize_density_profile(p, disc_grid(64))
    psi = make_trial(TrialSpec("giant_vortex", omega_phase=3), p, prof, 32)
    assert degree_on_circle(psi, 0.5) == 5
    assert perturb(psi, 0.0).mass == pytest.approx(1.0, abs=1e-12)
    q = perturb(psi, 0.1, seed=3)
    assert q.mass == pytest.approx(1.0, abs=1e-12)
    assert not np.array_equal(q.values, psi.values)


def test_polar_grid_weights():
    g = PolarGrid(disc_grid(40), 16)
    assert float(np.sum(g.weights)) * g.n_theta == pytest.approx(math.pi, rel=1e-13)

"""Experiment orchestration: one run per mode, sweeps over (epsilon, Omega), result records."""
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, asdict
from importlib import resources
import json
import math
import os
import time

import numpy as np

from .config import ExperimentConfig
from .cost import compute_F, cost_function_H, estimate_third_speed, split_F
from .errors import EmptyBulk, GPDiscError, IoError, NoConvergence, ZeroOnCircle
from .gp2d import (Schedule, TrialSpec, hole_mass_2d, make_trial, minimize, minimize_lattice_seeds,
                   perturb, read_field, write_density_csv, write_field)
from .grid import disc_grid
from .radial import giant_vortex_grid, minimize_density_profile, optimize_phase, write_profile_csv
from .symmetry import q_finite_difference, second_variation, symmetry_report
from .tf import PhysicalParams, critical_speeds, tf_energy, tf_solve
from .vortices import bulk_region, degree_on_circle, detect_vortices, vorticity_uniformity, \
    zero_free_check

GV_REGIME = 2.0 / (3.0 * math.pi)


@dataclass
class ResultRecord:
    mode: str
    config: dict
    scalars: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    wall_clock: float = 0.0
    iterations: int = 0
    status: str = "ok"
    error: str = None

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(_clean(self.to_dict()), indent=1, allow_nan=False)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(**d)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def load_schema():
    return json.loads(resources.files("gpdisc").joinpath("result_record.schema.json").read_text())


def validate_record(record):
    import jsonschema
    jsonschema.validate(json.loads(record.to_json()), load_schema())


def _table(columns, rows):
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


def _params(e, o):
    return PhysicalParams(float(e), float(o))


def _schedule(cfg):
    return Schedule(max_iter=cfg.max_iter_2d, tol=cfg.tol_2d)


# ---------------------------------------------------------------- modes

def run_tf(cfg, out):
    rows = []
    for e, o in cfg.points():
        p = _params(e, o)
        sol = tf_solve(p)
        cs = critical_speeds(e)
        rows.append([e, o, tf_energy(p), sol.mu_tf, sol.r_tf, sol.has_hole, cs.omega_c1, cs.omega_c2,
                     cs.omega_c3])
    res = {"tf": _table(["epsilon", "omega", "e_tf", "mu_tf", "r_tf", "has_hole", "omega_c1",
                         "omega_c2", "omega_c3"], rows)}
    scal = dict(zip(res["tf"]["columns"], rows[0]))
    return scal, res, 0


def run_profile(cfg, out):
    rows, its = [], 0
    scal = {}
    for i, (e, o) in enumerate(cfg.points()):
        p = _params(e, o)
        prof = minimize_density_profile(p, disc_grid(cfg.n_r), tol=cfg.tol, max_iter=cfg.max_iter)
        its += prof.iterations
        path = os.path.join(out, f"profile_{i}.csv")
        write_profile_csv(prof, path)
        rows.append([e, o, prof.energy, prof.mu_hat, prof.r_max, prof.meta["e_tf"],
                     prof.meta["sandwich_ratio"], prof.residual, prof.iterations, path])
        if i == 0:
            scal = {"energy": prof.energy, "mu_hat": prof.mu_hat, "r_max": prof.r_max,
                    "e_tf": prof.meta["e_tf"]}
    return scal, {"profiles": _table(["epsilon", "omega", "energy", "mu_hat", "r_max", "e_tf",
                                      "sandwich_ratio", "residual", "iterations", "path"], rows)}, its


def run_giant_vortex(cfg, out):
    rows, its, scal, tables = [], 0, {}, {}
    for i, (e, o) in enumerate(cfg.points()):
        p = _params(e, o)
        grid = giant_vortex_grid(p, cfg.n_r)
        w, gv, info = optimize_phase(p, grid, tol=cfg.tol)
        its += gv.profile.iterations
        write_profile_csv(gv.profile, os.path.join(out, f"gv_profile_{i}.csv"))
        try:
            cost = cost_function_H(gv, split_F(gv, compute_F(gv)), p)
            hmin, pos = cost.min_h_bulk, cost.meta["positive"]
            tables[f"cost_{i}"] = _table(["r", "f_total", "f_in", "f_out", "h"],
                                         zip(cost.r, cost.f_total, cost.f_in, cost.f_out, cost.h))
        except EmptyBulk:
            hmin, pos = float("nan"), None
        rows.append([e, o, p.omega0, w, gv.winding, gv.energy, gv.r_inner, hmin, pos,
                     bool(info["unimodal"])])
        if i == 0:
            scal = {"omega_phase": w, "winding": gv.winding, "energy": gv.energy,
                    "min_h_bulk": hmin}
    tables["giant_vortex"] = _table(["epsilon", "omega", "omega0", "omega_phase", "winding", "energy",
                                     "r_inner", "min_h_bulk", "h_positive", "unimodal"], rows)
    return scal, tables, its


def prepare_state(cfg, p, seed, allow_gv=True):
    """Initial 2D state for one parameter point: (psi0, profile, label)."""
    prof = minimize_density_profile(p, disc_grid(cfg.n_r_2d), tol=cfg.tol, max_iter=cfg.max_iter)
    kind = cfg.kind
    if kind == "auto":
        # a smooth seed cannot nucleate vortices, so above Omega_c1 start from a lattice
        if allow_gv and p.omega0 > GV_REGIME:
            kind = "giant_vortex"
        elif p.omega > critical_speeds(p.epsilon).omega_c1:
            kind = "vortex_lattice"
        else:
            kind = "tf_seed"
    if cfg.field:
        psi0 = read_field(cfg.field)
        psi0.params = p
        return psi0, prof, "field"
    if kind == "giant_vortex":
        grid = giant_vortex_grid(p, cfg.n_r_2d)
        _, gv, _ = optimize_phase(p, grid, tol=cfg.tol)
        psi0 = make_trial(TrialSpec("giant_vortex"), p, gv, cfg.n_theta)
        psi0 = perturb(psi0, cfg.noise, seed)
        psi0.info = {"giant_vortex": gv}
        return psi0, prof, kind
    if kind == "vortex_lattice":
        spec = TrialSpec("vortex_lattice", lattice=cfg.lattice, offset=cfg.offset, cutoff=cfg.cutoff)
        return make_trial(spec, p, prof, cfg.n_theta), prof, kind
    return make_trial(TrialSpec("tf_seed", seed=seed), p, prof, cfg.n_theta), prof, kind


def _minimize(psi0, p, cfg):
    try:
        psi, bd = minimize(psi0, p, _schedule(cfg))
        return psi, bd, True, psi.info["iterations"]
    except NoConvergence as err:
        return err.psi, err.breakdown, False, err.iterations


def analyse_state(psi, prof, p, cfg):
    """Vortex statistics, hole masses and winding of a 2D state."""
    vs = detect_vortices(psi, cfg.amp_threshold)
    sol = tf_solve(p)
    ref = tf_solve(_params(p.epsilon, cfg.reference_factor * critical_speeds(p.epsilon).omega_c2))
    out = {"vortex_count": len(vs), "total_degree": vs.total_degree,
           "hole_radius": max(sol.r_tf - cfg.hole_margin, 0.0),
           "hole_mass": hole_mass_2d(psi, sol.r_tf - cfg.hole_margin),
           "hole_mass_reference": hole_mass_2d(psi, ref.r_tf - cfg.hole_margin)}
    try:
        reg = bulk_region(p, prof, gamma=cfg.gamma)
        u = vorticity_uniformity(vs, p, reg, cfg.cells)
        out.update(uniformity_ratio=u["global_ratio"], dispersion=u["dispersion"],
                   bulk_r_in=reg.r_in, bulk_r_out=reg.r_out, bulk_count=u["count"])
        zf = zero_free_check(psi, reg, sol)
        out.update(zero_free=zf["zero_free"], min_bulk_density=zf["min_density"])
    except EmptyBulk:
        out.update(uniformity_ratio=float("nan"), dispersion=float("nan"), bulk_r_in=float("nan"),
                   bulk_r_out=float("nan"), bulk_count=0, zero_free=None,
                   min_bulk_density=float("nan"))
    r = psi.grid.r
    try:
        out["degree"] = degree_on_circle(psi, float(r[-2]))
    except ZeroOnCircle:
        out["degree"] = None
    return out, vs


def run_minimize2d(cfg, out, analyse=False):
    scal, tables, its = {}, {}, 0
    rows = []
    for i, (e, o) in enumerate(cfg.points()):
        p = _params(e, o)
        seed = cfg.seed + i
        if cfg.kind == "vortex_lattice" and cfg.offset == "best":
            prof = minimize_density_profile(p, disc_grid(cfg.n_r_2d), tol=cfg.tol)
            psi, bd, runs = minimize_lattice_seeds(p, prof, cfg.n_theta, _schedule(cfg),
                                                   cutoff=cfg.cutoff)
            ok, it, label = psi.info["seed"]["converged"], psi.info["iterations"], "vortex_lattice"
            tables[f"lattice_seeds_{i}"] = _table(["lattice", "offset", "energy", "converged"], runs)
        else:
            psi0, prof, label = prepare_state(cfg, p, seed)
            psi, bd, ok, it = _minimize(psi0, p, cfg)
        its += it
        path = os.path.join(out, f"field_{i}.bin")
        write_field(psi, path)
        write_density_csv(psi, os.path.join(out, f"density_{i}.csv"))
        row = {"epsilon": e, "omega": o, "trial": label, "energy": bd.total, "mu": bd.mu,
               "kinetic": bd.kinetic, "rotation": bd.rotation, "interaction": bd.interaction,
               "converged": ok, "iterations": it, "field": path}
        if analyse:
            stats, vs = analyse_state(psi, prof, p, cfg)
            row.update(stats)
            vs.write_csv(os.path.join(out, f"vortices_{i}.csv"))
            with open(os.path.join(out, f"vortices_{i}.json"), "w") as fh:
                fh.write(vs.to_json())
            tables[f"vortices_{i}"] = _table(["r", "theta", "degree", "core_scale"],
                                             [[v.r, v.theta, v.degree, v.core_scale] for v in vs.items])
        rows.append(row)
        if i == 0:
            scal = {k: v for k, v in row.items() if k not in ("field", "trial")}
    cols = list(rows[0])
    tables["states"] = _table(cols, [[r[c] for c in cols] for r in rows])
    return scal, tables, its


def run_third_speed(cfg, out):
    curve = estimate_third_speed(cfg.epsilon, n=cfg.n_r, level=cfg.level, tol=cfg.bisect_tol)
    rows = list(zip(curve.epsilon, curve.omega0_star, curve.omega0_star_coarse, curve.tf_omega0_star))
    scal = {"limit": curve.limit, "target": GV_REGIME, "final": curve.omega0_star[-1],
            "monotone": all(b < a for a, b in zip(curve.omega0_star, curve.omega0_star[1:]))}
    return scal, {"threshold": _table(["epsilon", "omega0_star", "omega0_star_coarse",
                                       "tf_omega0_star"], rows)}, 0


def run_symmetry(cfg, out):
    scal, tables, its = {}, {}, 0
    rows = []
    for i, (e, o) in enumerate(cfg.points()):
        p = _params(e, o)
        rep = symmetry_report(p, disc_grid(cfg.n_r), ds=cfg.d, tol=cfg.tol)
        rin = (rep.n_bar, rep.f_n_bar, rep.mu_n_bar)
        qrows = []
        for d in cfg.d:
            qfd, _ = q_finite_difference(p, rin, d)
            qrows.append([d, rep.q_values[d], qfd])
        tables[f"q_vs_d_{i}"] = _table(["d", "q_closed_form", "q_finite_difference"], qrows)
        tables[f"winding_energies_{i}"] = _table(["n", "energy"], sorted(rep.meta["energies"].items()))
        write_profile_csv(rep.f_n_bar, os.path.join(out, f"symmetric_vortex_{i}.csv"))
        with open(os.path.join(out, f"symmetry_{i}.json"), "w") as fh:
            json.dump(_clean({"n_bar": rep.n_bar, "e_n_bar": rep.e_n_bar, "mu_n_bar": rep.mu_n_bar,
                              "q_values": rep.q_values, "verdict": rep.verdict, "r_star": rep.r_star,
                              "tail_mass": rep.tail_mass}), fh, indent=1)
        rows.append([e, o, rep.n_bar, rep.n_bar / o if o else float("nan"), rep.e_n_bar, rep.mu_n_bar,
                     rep.r_star, rep.tail_mass, rep.verdict])
        if i == 0:
            scal = {"n_bar": rep.n_bar, "e_n_bar": rep.e_n_bar, "mu_n_bar": rep.mu_n_bar,
                    "verdict": rep.verdict, "r_star": rep.r_star, "tail_mass": rep.tail_mass}
            scal.update({f"q_d{d}": q for d, q in rep.q_values.items()})
    tables["symmetry"] = _table(["epsilon", "omega", "n_bar", "n_bar_over_omega", "e_n_bar",
                                 "mu_n_bar", "r_star", "tail_mass", "symmetry_broken"], rows)
    return scal, tables, its


PHASE_COLUMNS = ["epsilon", "omega", "omega_over_c2", "omega0", "energy", "energy_1d", "vortex_count",
                 "total_degree", "hole_radius", "hole_mass", "hole_mass_reference", "uniformity_ratio",
                 "dispersion", "degree", "zero_free", "converged", "iterations"]


def phase_point(cfg, index, e, o):
    p = _params(e, o)
    psi0, prof, _ = prepare_state(cfg, p, cfg.seed + index, allow_gv=False)
    psi, bd, ok, it = _minimize(psi0, p, cfg)
    stats, _ = analyse_state(psi, prof, p, cfg)
    row = {"epsilon": e, "omega": o, "omega_over_c2": o / critical_speeds(e).omega_c2,
           "omega0": p.omega0, "energy": bd.total, "energy_1d": prof.energy, "converged": ok,
           "iterations": it}
    row.update(stats)
    return index, {c: row.get(c) for c in PHASE_COLUMNS}


def run_phase_diagram(cfg, out):
    points = cfg.points()
    results = {}
    log = os.path.join(out, "phase_diagram.jsonl")
    open(log, "w").close()
    threads = max(1, int(cfg.threads))

    def persist(index, row):  # single writer: only ever called from this thread
        results[index] = row
        with open(log, "a") as fh:
            fh.write(json.dumps(_clean({"index": index, **row})) + "\n")

    err = None
    if threads == 1:
        for i, (e, o) in enumerate(points):
            try:
                persist(*phase_point(cfg, i, e, o))
            except GPDiscError as exc:
                err = exc
                break
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(phase_point, cfg, i, e, o) for i, (e, o) in enumerate(points)]
            for f in as_completed(futs):
                try:
                    persist(*f.result())
                except GPDiscError as exc:
                    err = err or exc
    rows = [[results[i][c] for c in PHASE_COLUMNS] for i in sorted(results)]
    tables = {"phase_diagram": _table(PHASE_COLUMNS, rows)}
    if err is not None:
        err.partial = tables
        raise err
    its = sum(int(r[-1]) for r in rows)
    scal = {"points": len(rows)}
    return scal, tables, its


RUNNERS = {"tf": run_tf, "profile": run_profile, "giant-vortex": run_giant_vortex,
           "minimize2d": run_minimize2d,
           "vortices": lambda cfg, out: run_minimize2d(cfg, out, analyse=True),
           "third-speed": run_third_speed, "symmetry": run_symmetry,
           "phase-diagram": run_phase_diagram}


def run_experiment(config, out=None):
    """Run the configured experiment; artifacts go to `out` (default config.out)."""
    out = out or config.out
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as err:
        raise IoError(out, str(err)) from err
    t0 = time.perf_counter()
    started = time.time() - 1.0
    rec = ResultRecord(config.mode, config.to_dict())
    try:
        scal, tables, its = RUNNERS[config.mode](config, out)
    except GPDiscError as err:
        rec.status, rec.error = "failed", f"{type(err).__name__}: {err}"
        rec.tables = getattr(err, "partial", {})
        rec.wall_clock = time.perf_counter() - t0
        err.record = rec
        raise
    rec.scalars, rec.tables, rec.iterations = scal, tables, int(its)
    rec.wall_clock = time.perf_counter() - t0
    rec.artifacts = sorted(p for p in (os.path.join(out, f) for f in os.listdir(out))
                           if os.path.isfile(p) and os.path.getmtime(p) >= started)
    return rec

import json
import math
import os

import pytest
from hypothesis import given, settings, strategies as st

from gpdisc.cli import main
from gpdisc.config import parse_config, parse_range
from gpdisc.errors import ParseError, ValidationError
from gpdisc.gp2d import read_field
from gpdisc.outputs import emit_outputs, load_record, read_table_csv
from gpdisc.runner import ResultRecord, run_experiment, validate_record

CONFIGS = {
    "tf": "epsilon = 0.05\nomega = 0:60:20\n",
    "profile": "epsilon = 0.05\nomega_c2_factor = 0.5, 2.0\nn_r = 400\n",
    "giant-vortex": "epsilon = 0.05\nomega0 = 0.3\nn_r = 400\n",
    "minimize2d": "epsilon = 0.1\nomega = 8\n[grid]\nn_r_2d = 48\nn_theta = 64\n[trial]\nkind = vortex_lattice\n",
    "vortices": "epsilon = 0.1\nomega = 8\nn_r_2d = 48\nn_theta = 64\n",
    "symmetry": "epsilon = 0.05\nomega_c2_factor = 2\nn_r = 600\nd = 2,3\n",
    "phase-diagram": "epsilon = 0.1\nomega_c2_factor = 0.5:1.5:0.5\nn_r_2d = 32\nn_theta = 64\n"
                     "max_iter_2d = 400\n",
    "third-speed": "epsilon = 0.05, 0.02\nn_r = 1000\nlevel = tf\n",
}


def write_cfg(tmp_path, mode, extra=""):
    path = tmp_path / f"{mode}.cfg"
    path.write_text(f"mode = {mode}\n" + CONFIGS[mode] + extra)
    return str(path)


def test_minimal_config_defaults():
    cfg = parse_config("mode = tf\nepsilon = 0.1\nomega = 0\n")
    assert cfg.epsilon == [0.1] and cfg.omega == [0.0]
    assert cfg.n_r == 2000 and cfg.tol == 1e-8 and cfg.kind == "auto" and cfg.d == [2, 3, 4]


def test_epsilon_out_of_range():
    with pytest.raises(ValidationError) as err:
        parse_config("mode = tf\nepsilon = 1.5\nomega = 0\n")
    assert err.value.field == "epsilon"


def test_sweep_range():
    cfg = parse_config("mode = phase-diagram\nepsilon = 0.05\nomega = 10:200:10\n")
    assert len(cfg.points()) == 20
    assert cfg.omega[-1] == 200.0


def test_parse_errors():
    with pytest.raises(ParseError) as err:
        parse_config("mode = tf\nepsilon = 0.1\nomega = 0\nbogus = 3\n")
    assert err.value.line == 4
    with pytest.raises(ParseError):
        parse_config("mode = tf\n[grid]\nepsilon = 0.1\n")
    with pytest.raises(ParseError):
        parse_config("mode = tf\nthis line has no delimiter\n")
    with pytest.raises(ValidationError):
        parse_config("mode = tf\nepsilon = 0.1\nomega = 1\nomega0 = 0.2\n")
    with pytest.raises(ValidationError):
        parse_config("mode = third-speed\nepsilon = 0.01, 0.05\n")


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0, 100), n=st.integers(0, 50), step=st.floats(0.1, 10))
def test_range_arithmetic(a, n, step):
    b = a + n * step
    vals = parse_range(f"{a!r}:{b!r}:{step!r}", "x")
    assert len(vals) == n + 1
    assert vals[0] == a
    assert vals[-1] == pytest.approx(b, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("mode", sorted(CONFIGS))
def test_every_mode_runs(tmp_path, mode):
    out = tmp_path / "out"
    code = main([mode, "--config", write_cfg(tmp_path, mode), "--out", str(out), "--format", "csv,json,svg"])
    assert code == 0
    rec = load_record(out / "record.json")
    validate_record(rec)
    assert rec.status == "ok"
    assert rec.artifacts and all(os.path.exists(p) for p in rec.artifacts)
    assert any(p.endswith(".svg") for p in rec.artifacts) or mode == "tf"


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("mode = tf\nepsilon = 1.5\nomega = 0\n")
    assert main(["tf", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["tf", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["profile", "--config", write_cfg(tmp_path, "tf")]) == 2
    assert main(["tf", "--config", write_cfg(tmp_path, "tf"), "--format", "png"]) == 2
    # iteration budget too small: numerical failure
    fail = tmp_path / "fail.cfg"
    fail.write_text("mode = profile\nepsilon = 0.05\nomega = 10\nmax_iter = 2\n")
    assert main(["profile", "--config", str(fail), "--out", str(tmp_path / "f")]) == 3
    rec = load_record(tmp_path / "f" / "record.json")
    assert rec.status == "failed" and rec.error


def test_json_round_trip(tmp_path):
    cfg = parse_config("mode = " + "tf\n" + CONFIGS["tf"])
    rec = run_experiment(cfg, str(tmp_path))
    emit_outputs(rec, {"json"}, str(tmp_path))
    back = load_record(tmp_path / "record.json")
    assert back.scalars == json.loads(rec.to_json())["scalars"]
    assert back.to_json() == rec.to_json()
    again = ResultRecord.from_json(rec.to_json())
    assert again.scalars == back.scalars


def test_determinism(tmp_path):
    cfg = parse_config("mode = vortices\n" + CONFIGS["vortices"] + "kind = tf_seed\nseed = 7\n")
    a = run_experiment(cfg, str(tmp_path / "a"))
    b = run_experiment(cfg, str(tmp_path / "b"))
    assert a.scalars == b.scalars
    fa = read_field(tmp_path / "a" / "field_0.bin")
    fb = read_field(tmp_path / "b" / "field_0.bin")
    assert (fa.values == fb.values).all()


def test_threaded_sweep_matches_serial(tmp_path, monkeypatch):
    path = write_cfg(tmp_path, "phase-diagram")
    assert main(["phase-diagram", "--config", path, "--out", str(tmp_path / "s")]) == 0
    monkeypatch.setenv("GPDISC_THREADS", "3")
    assert main(["phase-diagram", "--config", path, "--out", str(tmp_path / "t")]) == 0
    s = load_record(tmp_path / "s" / "record.json")
    t = load_record(tmp_path / "t" / "record.json")
    assert t.config["threads"] == 3 and s.config["threads"] == 1
    rs, rt = s.tables["phase_diagram"]["rows"], t.tables["phase_diagram"]["rows"]
    assert len(rs) == len(rt) == 3
    for a, b in zip(rs, rt):
        for x, y in zip(a, b):
            if isinstance(x, float):
                assert y == pytest.approx(x, rel=1e-10, abs=1e-300)
            else:
                assert x == y
    lines = (tmp_path / "t" / "phase_diagram.jsonl").read_text().splitlines()
    assert sorted(json.loads(l)["index"] for l in lines) == [0, 1, 2]
    monkeypatch.setenv("GPDISC_THREADS", "zero")
    assert main(["phase-diagram", "--config", path, "--out", str(tmp_path / "u")]) == 2


def test_threshold_csv_one_row_per_epsilon(tmp_path):
    out = tmp_path / "o"
    assert main(["third-speed", "--config", write_cfg(tmp_path, "third-speed"), "--out", str(out)]) == 0
    cols, rows = read_table_csv(out / "threshold.csv")
    assert cols[0] == "epsilon" and [float(r[0]) for r in rows] == [0.05, 0.02]
    assert all(math.isfinite(float(r[1])) for r in rows)


def test_vortex_scatter_shows_lattice(tmp_path):
    from gpdisc.gp2d import TrialSpec, make_trial
    from gpdisc.grid import disc_grid
    from gpdisc.radial import minimize_density_profile
    from gpdisc.runner import ResultRecord, _table
    from gpdisc.tf import PhysicalParams
    from gpdisc.vortices import detect_vortices
    p = PhysicalParams(0.1, 8.0)
    psi = make_trial(TrialSpec("vortex_lattice"), p, minimize_density_profile(p, disc_grid(64)), 128)
    vs = detect_vortices(psi)
    pts = psi.info["lattice_points"]
    assert len(vs) == len(pts)
    for v in vs.items:
        assert min(abs(v.z - z) for z in pts) < 0.05
    rec = ResultRecord("vortices", {}, tables={"vortices_0": _table(
        ["r", "theta", "degree", "core_scale"], [[v.r, v.theta, v.degree, v.core_scale] for v in vs.items])})
    files = emit_outputs(rec, {"svg"}, str(tmp_path))
    assert str(tmp_path / "vortex_scatter_0.svg") in files

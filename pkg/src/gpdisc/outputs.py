"""Writing result records: JSON, one CSV per table, optional SVG plots."""
import csv
import json
import math
import os

import numpy as np

from .errors import IoError
from .runner import _clean

FORMATS = ("csv", "json", "svg")


def _write(path, writer):
    try:
        with open(path, "w", newline="") as fh:
            writer(fh)
    except OSError as err:
        raise IoError(path, str(err)) from err
    return path


def write_table_csv(table, path):
    def w(fh):
        wr = csv.writer(fh)
        wr.writerow(table["columns"])
        for row in table["rows"]:
            wr.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v) for v in row])
    return _write(path, w)


def read_table_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _column(table, name):
    k = table["columns"].index(name)
    return np.array([np.nan if r[k] is None else r[k] for r in table["rows"]], dtype=float)


def _plots(record):
    """(name, kind, payload) for the SVG figures available for this record."""
    t = record.tables
    out = []
    if "phase_diagram" in t:
        out.append(("energy_vs_omega", "line", (t["phase_diagram"], "omega", ["energy", "energy_1d"])))
        out.append(("hole_mass_vs_omega", "line", (t["phase_diagram"], "omega", ["hole_mass", "hole_mass_reference"])))
    for name in sorted(t):
        if name.startswith("cost_"):
            out.append((f"H_{name[5:]}", "line", (t[name], "r", ["h", "f_in"])))
        if name.startswith("vortices_"):
            out.append((f"vortex_scatter_{name[9:]}", "scatter", t[name]))
        if name.startswith("q_vs_d_"):
            out.append((f"Q_vs_d_{name[7:]}", "line", (t[name], "d", ["q_closed_form", "q_finite_difference"])))
    if "threshold" in t:
        out.append(("threshold_curve", "line", (t["threshold"], "epsilon", ["omega0_star", "tf_omega0_star"])))
    if "states" in t:
        out.append(("state_energy", "line", (t["states"], "omega", ["energy", "kinetic", "interaction"])))
    if "profiles" in t:
        out.append(("profile_energy", "line", (t["profiles"], "omega", ["energy", "e_tf"])))
    return out


def _svg(path, kind, payload):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(5, 4))
    if kind == "line":
        table, x, ys = payload
        xv = _column(table, x)
        for y in ys:
            ax.plot(xv, _column(table, y), "o-", ms=3, label=y)
        ax.set_xlabel(x)
        ax.legend()
    else:
        r, th, d = (_column(payload, c) for c in ("r", "theta", "degree"))
        t = np.linspace(0, 2 * math.pi, 200)
        ax.plot(np.cos(t), np.sin(t), "k-", lw=0.8)
        ax.scatter(r * np.cos(th), r * np.sin(th), c=d, s=12, cmap="coolwarm")
        ax.set_aspect("equal")
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg")
    except OSError as err:
        raise IoError(path, str(err)) from err
    finally:
        plt.close(fig)
    return path


def emit_outputs(record, formats=("csv", "json"), out="."):
    """Write the record; CSV and JSON are always produced.  Returns the list of written files."""
    formats = set(formats) | {"csv", "json"}
    bad = formats - set(FORMATS)
    if bad:
        raise ValueError(f"unknown formats {sorted(bad)}")
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as err:
        raise IoError(out, str(err)) from err
    files = []
    for name, table in record.tables.items():
        files.append(write_table_csv(table, os.path.join(out, f"{name}.csv")))
    if "svg" in formats:
        for name, kind, payload in _plots(record):
            files.append(_svg(os.path.join(out, f"{name}.svg"), kind, payload))
    record.artifacts = sorted(set(record.artifacts) | set(files))
    path = os.path.join(out, "record.json")
    text = record.to_json()
    files.append(_write(path, lambda fh: fh.write(text)))
    return files


def load_record(path):
    from .runner import ResultRecord
    with open(path) as fh:
        return ResultRecord(**json.load(fh))

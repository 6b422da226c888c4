"""Experiment configuration: flat key = value lines with optional [section] headers.

Keys before the first header may be any known key; keys inside a section must
belong to it.  Numeric ranges are written a:b:c (inclusive, step c) or as
comma-separated lists.
"""
from dataclasses import dataclass, field as dc_field, asdict
import configparser
import math

from .errors import ParseError, ValidationError

MODES = ("tf", "profile", "giant-vortex", "minimize2d", "vortices", "third-speed", "symmetry",
         "phase-diagram")

# section -> key -> (type, default)
SCHEMA = {
    "run": {"mode": ("str", None), "seed": ("int", 0), "out": ("str", "out"),
            "threads": ("int", 1)},
    "physics": {"epsilon": ("range", None), "omega": ("range", None), "omega0": ("range", None),
                "omega_c2_factor": ("range", None)},
    "grid": {"n_r": ("int", 2000), "n_r_2d": ("int", 128), "n_theta": ("int", 256)},
    "solver": {"tol": ("float", 1e-8), "tol_2d": ("float", 1e-6), "max_iter": ("int", 5000),
               "max_iter_2d": ("int", 2000)},
    "trial": {"kind": ("str", "auto"), "lattice": ("str", "triangular"), "offset": ("str", "origin"),
              "cutoff": ("float", None), "noise": ("float", 0.01), "field": ("str", None)},
    "analysis": {"amp_threshold": ("float", 0.3), "hole_margin": ("float", 0.05),
                 "reference_factor": ("float", 2.0), "cells": ("int", 4), "gamma": ("float", None),
                 "d": ("intlist", [2, 3, 4]), "level": ("str", "gp"), "bisect_tol": ("float", 1e-3)},
}
KEY_SECTION = {k: s for s, keys in SCHEMA.items() for k in keys}
TRIAL_KINDS = ("auto", "tf_seed", "giant_vortex", "vortex_lattice")


@dataclass
class ExperimentConfig:
    mode: str
    epsilon: list
    omega: list = None
    omega0: list = None
    omega_c2_factor: list = None
    seed: int = 0
    out: str = "out"
    threads: int = 1
    n_r: int = 2000
    n_r_2d: int = 128
    n_theta: int = 256
    tol: float = 1e-8
    tol_2d: float = 1e-6
    max_iter: int = 5000
    max_iter_2d: int = 2000
    kind: str = "auto"
    lattice: str = "triangular"
    offset: str = "origin"
    cutoff: float = None
    noise: float = 0.01
    field: str = None
    amp_threshold: float = 0.3
    hole_margin: float = 0.05
    reference_factor: float = 2.0
    cells: int = 4
    gamma: float = None
    d: list = dc_field(default_factory=lambda: [2, 3, 4])
    level: str = "gp"
    bisect_tol: float = 1e-3

    def to_dict(self):
        return asdict(self)

    def omega_values(self, epsilon):
        """Rotation values for one epsilon, from whichever of omega / omega0 / omega_c2_factor is set."""
        from .tf import critical_speeds
        if self.omega is not None:
            return list(self.omega)
        le = abs(math.log(epsilon))
        if self.omega0 is not None:
            return [o0 / (epsilon ** 2 * le) for o0 in self.omega0]
        return [k * critical_speeds(epsilon).omega_c2 for k in self.omega_c2_factor]

    def points(self):
        return [(e, o) for e in self.epsilon for o in self.omega_values(e)]


def parse_range(text, name):
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            a, b, c = parts
            if c <= 0 or b < a:
                raise ValidationError(name, f"range {text!r} must have a <= b and step > 0")
            k = int(math.floor((b - a) / c + 1e-9))
            vals = [a + i * c for i in range(k + 1)]
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(name, f"cannot read {text!r} as a number, list or a:b:c range")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ValidationError(name, "range must be nonempty and finite")
    return vals


def _convert(kind, text, name):
    try:
        if kind == "str":
            return text.strip()
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "intlist":
            return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(name, f"cannot read {text!r} as {kind}")
    return parse_range(text, name)


def parse_config(text):
    """Parse and validate a configuration document."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",), strict=True)
    cp.optionxform = str
    try:
        cp.read_string("[__top__]\n" + text)
    except configparser.ParsingError as err:
        line, _ = err.errors[0]
        raise ParseError(line - 1, "expected 'key = value' or '[section]'") from err
    except configparser.MissingSectionHeaderError as err:
        raise ParseError(err.lineno - 1, "missing section header") from err
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as err:
        raise ParseError(max(getattr(err, "lineno", 1) - 1, 0), str(err).split(": ", 1)[-1]) from err
    values = {}
    for section in cp.sections():
        if section != "__top__" and section not in SCHEMA:
            raise ParseError(_find_line(text, f"[{section}]"), f"unknown section [{section}]")
        for key, raw in cp.items(section):
            sec = KEY_SECTION.get(key)
            if sec is None or (section != "__top__" and sec != section):
                raise ParseError(_find_line(text, key), f"unknown key {key!r}" + ('' if section == '__top__' else f" in [{section}]"))
            if key in values:
                raise ParseError(_find_line(text, key), f"duplicate key {key!r}")
            values[key] = _convert(SCHEMA[sec][key][0], raw, key)
    return validate(values)


def _find_line(text, token):
    for i, line in enumerate(text.splitlines(), start=1):
        if line.strip().startswith(token):
            return i
    return 0


def validate(values):
    mode = values.get("mode")
    if mode not in MODES:
        raise ValidationError("mode", f"must be one of {', '.join(MODES)}")
    if "epsilon" not in values:
        raise ValidationError("epsilon", "required")
    for e in values["epsilon"]:
        if not 0.0 < e < 1.0:
            raise ValidationError("epsilon", "out of (0,1)")
    given = [k for k in ("omega", "omega0", "omega_c2_factor") if k in values]
    if len(given) > 1:
        raise ValidationError(given[1], f"conflicts with {given[0]}")
    if mode != "third-speed" and not given:
        raise ValidationError("omega", "required (or omega0 / omega_c2_factor)")
    for k in given:
        if any(v < 0 for v in values[k]):
            raise ValidationError(k, "must be >= 0")
    for k in ("tol", "tol_2d"):
        if k in values and not values[k] > 0:
            raise ValidationError(k, "must be positive")
    for k in ("n_r", "n_r_2d", "n_theta", "max_iter", "max_iter_2d", "threads", "cells"):
        if k in values and values[k] < 1:
            raise ValidationError(k, "must be positive")
    if values.get("kind", "auto") not in TRIAL_KINDS:
        raise ValidationError("kind", f"must be one of {', '.join(TRIAL_KINDS)}")
    if values.get("level", "gp") not in ("gp", "tf"):
        raise ValidationError("level", "must be gp or tf")
    if any(d < 2 for d in values.get("d", [2])):
        raise ValidationError("d", "angular orders must be >= 2")
    if mode == "third-speed" and any(b >= a for a, b in zip(values["epsilon"], values["epsilon"][1:])):
        raise ValidationError("epsilon", "third-speed needs decreasing epsilon values")
    return ExperimentConfig(**values)

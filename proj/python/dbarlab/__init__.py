"""Python front end for the dbarlab core."""

import json

from ._core import (
    ConfigError,
    Error,
    Grid,
    NumericalConsistencyError,
    PreconditionError,
    ShapeError,
    SolverError,
    Weight,
    cauchy_transform,
    dbar,
    moment_defect,
    preset_names,
    preset_text,
)
from . import _core

__all__ = [
    "ConfigError", "Error", "Grid", "NumericalConsistencyError", "PreconditionError", "ShapeError",
    "SolverError", "Weight", "cauchy_transform", "dbar", "execute", "load_preset", "moment_defect",
    "preset_names", "preset_text", "run", "solve",
]


def load_preset(name):
    """Preset config as a dict."""
    return json.loads(_core.parse_toml(preset_text(name)))


def solve(grid, degree, omega, weight, tolerance=1e-10, max_iterations=0):
    """Returns (u, report) for dbar u = omega; u has shape (components, points)."""
    u, report = _core.solve(grid, degree, omega, weight, tolerance, max_iterations)
    return u, json.loads(report)


def execute(config, threads=None):
    """Runs a config dict (or preset name) in memory; returns (exit_code, report, summary)."""
    if isinstance(config, str):
        config = load_preset(config)
    code, report, summary = _core.execute(json.dumps(config), threads)
    return code, json.loads(report), summary


def run(config, out_dir=None, threads=None, seed=None):
    """Like `dbarlab run`: writes report files and returns (exit_code, stdout, stderr)."""
    if isinstance(config, str):
        config = load_preset(config)
    return _core.run(json.dumps(config), out_dir, threads, seed)

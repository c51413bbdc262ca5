"""Experiment configuration: strict JSON schema and problem assembly.

A configuration file is a single JSON object; every key is checked
against the schema below and unknown keys are rejected, so typos fail
fast instead of silently running defaults.

Schema (defaults in parentheses):

    name      str                      label used in output files
    seed      int (1234)              seed for all randomized checks
    s         float in (1, 2)         operator order
    variant   "bounded" | "global"    problem variant ("bounded")
    grid      {n, N, L}               lattice: dimension, nodes, box side
    obstacle  {kind, height, curvature, radius, center, offset}
              kind in {paraboloid, bump, wedge, low}
    forcing   {kind, amplitude, radius, center}   kind in {zero, bump}
    omega     {radius, center}        ball domain (bounded variant)
    solver    {tol, max_iter}         (1e-10, 200000)
    extension {y_min, ratio, count}   geometric level set (0.00375, 1.2, 40)
    verify    {rho, vi_trials, contact_tol}   (1.2, 200, 1e-6)
"""

import json

from .grids import GridSpec
from . import solver as _solver
from .extension import geometric_levels

__all__ = ["ConfigError", "ExperimentConfig", "load_config"]


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration files."""


_SCHEMA = {
    "name": str,
    "seed": int,
    "s": (int, float),
    "variant": str,
    "grid": {"n": int, "N": int, "L": (int, float)},
    "obstacle": {
        "kind": str,
        "height": (int, float),
        "curvature": (int, float),
        "radius": (int, float),
        "center": list,
        "offset": (int, float),
    },
    "forcing": {
        "kind": str,
        "amplitude": (int, float),
        "radius": (int, float),
        "center": list,
    },
    "omega": {"radius": (int, float), "center": list},
    "solver": {"tol": (int, float), "max_iter": int},
    "extension": {"y_min": (int, float), "ratio": (int, float),
                  "count": int},
    "verify": {"rho": (int, float), "vi_trials": int,
               "contact_tol": (int, float)},
}

_DEFAULTS = {
    "name": "experiment",
    "seed": 1234,
    "variant": "bounded",
    "forcing": {"kind": "zero"},
    "solver": {},
    "extension": {},
    "verify": {},
}


def _check_section(data, schema, path):
    if not isinstance(data, dict):
        raise ConfigError("%s must be an object" % path)
    for key, val in data.items():
        if key not in schema:
            raise ConfigError("unknown key %r in %s" % (key, path))
        want = schema[key]
        if isinstance(want, dict):
            _check_section(val, want, path + "." + key)
        elif not isinstance(val, want) or isinstance(val, bool):
            raise ConfigError("%s.%s has wrong type" % (path, key))


class ExperimentConfig:
    """Validated configuration with assembly helpers."""

    REQUIRED = ("s", "grid", "obstacle")

    def __init__(self, data):
        _check_section(data, _SCHEMA, "config")
        merged = dict(_DEFAULTS)
        merged.update(data)
        for key in self.REQUIRED:
            if key not in merged:
                raise ConfigError("missing required key %r" % (key,))
        if merged["variant"] not in (_solver.BOUNDED, _solver.GLOBAL):
            raise ConfigError("unknown variant %r" % (merged["variant"],))
        if merged["variant"] == _solver.BOUNDED and "omega" not in merged:
            raise ConfigError("bounded variant needs an omega section")
        self.data = merged
        self.name = merged["name"]
        self.seed = merged["seed"]
        self.s = float(merged["s"])
        self.variant = merged["variant"]
        g = merged["grid"]
        for key in ("n", "N", "L"):
            if key not in g:
                raise ConfigError("grid needs n, N and L")
        try:
            self.grid = GridSpec(g["n"], g["N"], float(g["L"]))
        except ValueError as exc:
            raise ConfigError(str(exc))
        if not (1.0 < self.s < 2.0):
            raise ConfigError("order s must lie in (1, 2)")

    def _shape_args(self, section, allowed):
        spec = dict(self.data.get(section, {}))
        kind = spec.pop("kind", None)
        if kind is None:
            raise ConfigError("%s needs a kind" % section)
        bad = set(spec) - set(allowed)
        if bad:
            raise ConfigError("%s does not take %s" % (section, sorted(bad)))
        return kind, spec

    def obstacle(self, grid=None):
        kind, kw = self._shape_args(
            "obstacle", ("height", "curvature", "radius", "center", "offset"))
        return _solver.make_obstacle(kind, grid or self.grid, **kw)

    def forcing(self, grid=None):
        kind, kw = self._shape_args(
            "forcing", ("amplitude", "radius", "center"))
        return _solver.make_forcing(kind, grid or self.grid, **kw)

    def omega(self, grid=None):
        if self.variant == _solver.GLOBAL:
            return None
        spec = self.data["omega"]
        if "radius" not in spec:
            raise ConfigError("omega needs a radius")
        return _solver.omega_ball(grid or self.grid, spec["radius"],
                                  spec.get("center"))

    def problem(self, grid=None):
        grid = grid or self.grid
        return _solver.ObstacleProblem(
            self.s, grid, self.obstacle(grid), self.forcing(grid),
            self.omega(grid), self.variant)

    def solver_options(self):
        spec = self.data["solver"]
        return {"tol": float(spec.get("tol", 1e-10)),
                "max_iter": int(spec.get("max_iter", 200000))}

    def ylevels(self):
        spec = self.data["extension"]
        return geometric_levels(float(spec.get("y_min", 0.00375)),
                                float(spec.get("ratio", 1.2)),
                                int(spec.get("count", 40)))

    def verify_options(self):
        spec = self.data["verify"]
        return {"rho": float(spec.get("rho", 1.2)),
                "vi_trials": int(spec.get("vi_trials", 200)),
                "contact_tol": float(spec.get("contact_tol", 1e-6))}


def load_config(path):
    """Read and validate a JSON configuration file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config: %s" % exc)
    except json.JSONDecodeError as exc:
        raise ConfigError("config is not valid JSON: %s" % exc)
    return ExperimentConfig(data)

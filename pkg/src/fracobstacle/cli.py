"""Command line harness: solve, extend, verify and study experiments.

Each subcommand takes --config <path> (JSON, validated strictly) and an
optional --out <dir>.  Artifacts are binary fields with JSON sidecars, a
JSON report per step, and CSV tables whose bytes depend only on the
configuration (fixed seeds, fixed float formatting), plus a manifest with
SHA-256 checksums of everything written.

Exit codes: 0 success, 1 invalid configuration / missing artifacts /
held lock, 2 solver did not converge.
"""

import argparse
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .grids import Field, GridSpec, load_field, save_field
from . import extension as _ext
from . import probes as _probes
from . import representation as _rep
from . import solver as _solver

__all__ = ["main"]


def _fmt(x):
    """Deterministic shortest-roundtrip float formatting for CSV cells."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(c) for c in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _update_manifest(out, names):
    path = os.path.join(out, "manifest.json")
    manifest = {"version": __version__, "files": {}}
    if os.path.exists(path):
        with open(path) as fh:
            manifest = json.load(fh)
    for name in names:
        manifest["files"][name] = _sha256(os.path.join(out, name))
    manifest["version"] = __version__
    _write_json(path, manifest)


class _Lock:
    """Exclusive marker file in the output directory."""

    def __init__(self, out):
        self.path = os.path.join(out, ".lock")

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ConfigError(
                "output directory is locked (%s); remove the stale lock "
                "if no other run is active" % self.path)
        os.write(fd, ("%d\n" % os.getpid()).encode())
        os.close(fd)
        return self

    def __exit__(self, *exc):
        if os.path.exists(self.path):
            os.remove(self.path)
        return False


def _solution_paths(out):
    return (os.path.join(out, "solution.bin"),
            os.path.join(out, "measure.bin"))


def _load_solution(out, cfg):
    upath, mpath = _solution_paths(out)
    if not (os.path.exists(upath) and os.path.exists(upath + ".json")):
        raise ConfigError("missing solve artifacts in %s; run solve first"
                          % out)
    values, meta, grid = load_field(upath)
    if grid != cfg.grid:
        raise ConfigError("stored solution grid %r does not match config"
                          % (grid,))
    return Field(grid, values)


def _cmd_solve(cfg, out):
    p = cfg.problem()
    u, report = _solver.solve(p, **cfg.solver_options())
    upath, mpath = _solution_paths(out)
    save_field(upath, u)
    _write_json(os.path.join(out, "report.json"), report.to_dict())
    names = ["solution.bin", "solution.bin.json", "report.json"]
    if report.converged:
        mu = _solver.extract_measure(u, p)
        save_field(mpath, Field(p.grid, mu.weights))
        _write_csv(os.path.join(out, "solve.csv"),
                   ["name", "s", "n", "N", "L", "iterations", "energy",
                    "pg_residual", "comp_residual", "measure_mass"],
                   [[cfg.name, cfg.s, cfg.grid.n, cfg.grid.N, cfg.grid.L,
                     report.iterations, report.final_energy,
                     report.pg_residual, report.comp_residual, mu.mass]])
        names += ["measure.bin", "measure.bin.json", "solve.csv"]
    _update_manifest(out, names)
    if not report.converged:
        print("solve did not converge: residual %.3e after %d iterations"
              % (report.pg_residual, report.iterations), file=sys.stderr)
        return 2
    print("solved %s: %d iterations, energy %.6e"
          % (cfg.name, report.iterations, report.final_energy))
    return 0


def _cmd_extend(cfg, out):
    u = _load_solution(out, cfg)
    lev = cfg.ylevels()
    U = _ext.poisson_extend(u, cfg.s, lev)
    save_field(os.path.join(out, "extension.bin"), U, kind="halfspace",
               ylevels=lev)
    trace = _ext.dirichlet_to_neumann(U)
    save_field(os.path.join(out, "trace.bin"), trace)
    c1 = _ext.dtn_mode_constants(cfg.grid, cfg.s, lev, kmax=1)[0]
    xi1 = (2.0 * np.pi / cfg.grid.L) ** (2.0 * cfg.s)
    yl, res = _ext.bilap_b_residual(U)
    band = (yl >= 0.5) & (yl <= 2.0)
    band_max = float(np.max(np.abs(res[..., band]))) if band.any() else None
    info = {
        "levels": [float(y) for y in lev],
        "dtn_calibration": float(c1 / xi1),
        "neumann_trace_sup": _ext.neumann_trace_check(U),
        "bilap_residual_band_sup": band_max,
    }
    _write_json(os.path.join(out, "extend.json"), info)
    _update_manifest(out, ["extension.bin", "extension.bin.json",
                           "trace.bin", "trace.bin.json", "extend.json"])
    print("extended %s to %d levels; first-trace sup %.3e"
          % (cfg.name, lev.size, info["neumann_trace_sup"]))
    return 0


def _cmd_verify(cfg, out):
    u = _load_solution(out, cfg)
    p = cfg.problem()
    opts = cfg.verify_options()
    rng = np.random.default_rng(cfg.seed)
    vi = _solver.variational_inequality_check(u, p, opts["vi_trials"], rng)
    comp = _solver.complementarity_residual(u, p)
    mu = _solver.extract_measure(u, p)
    rho = opts["rho"]
    R, weak = _rep.local_remainder(u, p, rho, rng=np.random.default_rng(
        cfg.seed + 1))
    second = _rep.second_derivative_representation_check(u, p, rho)
    contact = _probes.contact_set(u, p, opts["contact_tol"])
    lap = _probes.laplacian_bounds_probe(
        u, p, rho, remainder_sup=0.0, tol=1e-3 * p.scale())
    info = {
        "complementarity_residual": comp,
        "vi_min": float(vi),
        "measure_mass": mu.mass,
        "weak_remainder_residual": float(weak),
        "second_derivative_gap": float(second),
        "contact_nodes": int(contact.sum()),
        "contact_upper_bound": lap.upper,
        "contact_upper_ok": bool(lap.upper_ok),
        "scale": p.scale(),
    }
    _write_json(os.path.join(out, "verify.json"), info)
    _write_csv(os.path.join(out, "verify.csv"),
               ["name", "comp_residual", "vi_min", "measure_mass",
                "weak_residual", "second_derivative_gap", "contact_nodes"],
               [[cfg.name, comp, float(vi), mu.mass, float(weak),
                 float(second), int(contact.sum())]])
    _update_manifest(out, ["verify.json", "verify.csv"])
    ok = (comp <= 1e-6 * p.scale() and vi >= -1e-8 * p.scale()
          and lap.upper_ok)
    print("verify %s: comp %.3e vi %.3e weak %.3e -> %s"
          % (cfg.name, comp, vi, weak, "ok" if ok else "FLAGGED"))
    return 0 if ok else 2


def _cmd_study(cfg, out):
    """Refinement study: solve at N and 2N, compare regularity probes."""
    opts = cfg.solver_options()
    rows = []
    fields = []
    for N in (cfg.grid.N, 2 * cfg.grid.N):
        grid = GridSpec(cfg.grid.n, N, cfg.grid.L)
        p = cfg.problem(grid)
        u, report = _solver.solve(p, **opts)
        if not report.converged:
            print("study solve at N=%d did not converge" % N,
                  file=sys.stderr)
            return 2
        mu = _solver.extract_measure(u, p)
        rho = cfg.verify_options()["rho"]
        window = _rep.Cutoff(grid, rho).values.values
        fields.append(Field(grid, u.values * window))
        rows.append([cfg.name, N, report.iterations, report.final_energy,
                     report.pg_residual, mu.mass,
                     _probes.c11_value(u, rho)])
    c11 = rows[1][6] / rows[0][6] if rows[0][6] > 0 else float("inf")
    h1s = _probes.h1plus_s_probe(fields[0], fields[1], cfg.s)
    control = h1s.control[1] / h1s.control[0]
    _write_csv(os.path.join(out, "study.csv"),
               ["name", "N", "iterations", "energy", "pg_residual",
                "measure_mass", "c11_sup"],
               rows)
    _write_csv(os.path.join(out, "study_ratios.csv"),
               ["name", "c11_ratio", "h1plus_s_ratio", "h2s_control_ratio"],
               [[cfg.name, c11, h1s.ratio, control]])
    _update_manifest(out, ["study.csv", "study_ratios.csv"])
    print("study %s: c11 ratio %.4f, order-%g ratio %.4f (control %.4f)"
          % (cfg.name, c11, 1 + cfg.s, h1s.ratio, control))
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "extend": _cmd_extend,
    "verify": _cmd_verify,
    "study": _cmd_study,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fracobstacle",
        description="obstacle-problem solver and verification harness for "
                    "fractional orders 1 < s < 2")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True,
                         help="path to a JSON experiment configuration")
        cmd.add_argument("--out", default=None,
                         help="output directory (default: <config>_out)")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = args.out
        if out is None:
            stem = os.path.splitext(os.path.basename(args.config))[0]
            out = stem + "_out"
        os.makedirs(out, exist_ok=True)
        with _Lock(out):
            return _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Shared presets and cached solves for the test suite."""

import numpy as np
import pytest

from fracobstacle import (
    GridSpec,
    ObstacleProblem,
    make_forcing,
    make_obstacle,
    omega_ball,
    solve,
)

S = 1.3
L = 8.0

_SOLVE_CACHE = {}


def preset_problem(name, grid, s=S):
    """The two shipped obstacle presets on the standard box."""
    if name == "paraboloid":
        psi = make_obstacle("paraboloid", grid, height=1.0, curvature=0.5)
        f = None
    elif name == "bump":
        psi = make_obstacle("bump", grid, height=1.0, radius=1.5)
        f = make_forcing("bump", grid, amplitude=0.3, radius=1.5)
    elif name == "forced":
        psi = make_obstacle("paraboloid", grid, height=1.0, curvature=0.5)
        f = make_forcing("bump", grid, amplitude=0.3, radius=1.5)
    elif name == "pinned":
        # bounded emulation of the global setting: the pin sits far out
        psi = make_obstacle("paraboloid", grid, height=1.0, curvature=0.5)
        f = None
        return ObstacleProblem(s, grid, psi, f,
                               omega_ball(grid, 0.45 * grid.L))
    else:
        raise ValueError(name)
    return ObstacleProblem(s, grid, psi, f, omega_ball(grid, 2.5))


def solved(name, N, L_=L, tol=1e-11):
    """Solve a preset once per session and reuse the solution."""
    key = (name, N, L_, tol)
    if key not in _SOLVE_CACHE:
        grid = GridSpec(1, N, L_)
        p = preset_problem(name, grid)
        u, report = solve(p, tol=tol)
        assert report.converged, "preset %s at N=%d did not converge" % (
            name, N)
        _SOLVE_CACHE[key] = (p, u)
    return _SOLVE_CACHE[key]

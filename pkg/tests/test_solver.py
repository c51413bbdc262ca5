import numpy as np
import pytest

from fracobstacle import (
    Field,
    GridSpec,
    ObstacleProblem,
    brute_force_qp,
    complementarity_residual,
    extract_measure,
    make_forcing,
    make_obstacle,
    omega_ball,
    solve,
    variational_inequality_check,
)
from fracobstacle.solver import project_admissible


def _small_problem(s=1.3, N=16):
    grid = GridSpec(1, N, 8.0)
    psi = make_obstacle("bump", grid, height=0.8, radius=2.0, offset=0.1)
    f = make_forcing("bump", grid, amplitude=0.2, radius=2.0)
    return ObstacleProblem(s, grid, psi, f, omega_ball(grid, 3.0))


def test_problem_validation():
    grid = GridSpec(1, 16, 8.0)
    psi = make_obstacle("low", grid)
    with pytest.raises(ValueError):
        ObstacleProblem(2.0, grid, psi)
    with pytest.raises(ValueError):
        ObstacleProblem(1.3, grid, psi, variant="other")
    with pytest.raises(ValueError):
        # bounded variant needs a nonempty complement
        ObstacleProblem(1.3, grid, psi, omega=np.ones(16, bool))
    with pytest.raises(ValueError):
        # obstacle must be nonpositive off omega
        ObstacleProblem(1.3, grid,
                        make_obstacle("paraboloid", grid, height=20.0),
                        omega=omega_ball(grid, 2.0))


def test_projection():
    p = _small_problem()
    v = Field(p.grid, np.full(16, -10.0))
    out = project_admissible(v, p)
    assert np.all(out.values >= p.psi.values - 1e-15)
    assert np.all(out.values[~p.omega] == 0.0)


def test_trivial_solution_is_zero():
    grid = GridSpec(1, 32, 8.0)
    p = ObstacleProblem(1.3, grid, make_obstacle("low", grid),
                        omega=omega_ball(grid, 2.5))
    u, report = solve(p, tol=1e-12)
    assert report.converged
    assert np.max(np.abs(u.values)) <= 1e-10


def test_solve_matches_qp():
    p = _small_problem()
    u, report = solve(p, tol=1e-13)
    assert report.converged
    uq = brute_force_qp(p)
    assert np.max(np.abs(u.values - uq.values)) <= 1e-8


def test_optimality_system():
    p = _small_problem()
    u, report = solve(p, tol=1e-12)
    assert complementarity_residual(u, p) <= 1e-9 * p.scale()
    vi = variational_inequality_check(u, p, trials=50,
                                      rng=np.random.default_rng(0))
    assert vi >= -1e-10 * p.scale()
    mu = extract_measure(u, p)
    assert np.all(mu.weights >= 0.0)
    # support sits inside the contact region
    contact = p.omega & (u.values - p.psi.values <= 1e-6 * p.scale())
    assert np.all(contact[mu.support_mask()])


def test_extract_measure_flags_bad_state():
    p = _small_problem()
    u = Field(p.grid, np.where(p.omega, np.maximum(p.psi.values, 0.0), 0.0)
              + 0.5 * p.omega)
    with pytest.raises(RuntimeError):
        extract_measure(u, p, neg_tol=1e-10)


def test_energy_monotone():
    p = _small_problem()
    u, report = solve(p, tol=1e-12)
    hist = np.array(report.energy_history)
    assert np.all(np.diff(hist) <= 1e-12)


def test_solver_report_nonconvergence():
    p = _small_problem(N=64)
    u, report = solve(p, tol=1e-13, max_iter=3)
    assert not report.converged


def test_obstacle_library():
    grid = GridSpec(1, 32, 8.0)
    par = make_obstacle("paraboloid", grid, height=1.0, curvature=0.5)
    assert np.isclose(par.values[16], 1.0)
    low = make_obstacle("low", grid)
    assert np.all(low.values == -1.0)
    bump = make_obstacle("bump", grid, height=1.0, radius=1.5, offset=0.05)
    assert np.isclose(np.max(bump.values), 1.0 - 0.05)
    wedge = make_obstacle("wedge", grid, height=0.5, radius=1.0)
    assert np.isclose(np.max(wedge.values), 0.5)
    with pytest.raises(ValueError):
        make_obstacle("unknown", grid)
    zero = make_forcing("zero", grid)
    assert np.all(zero.values == 0.0)
    with pytest.raises(ValueError):
        make_forcing("unknown", grid)
    ball = omega_ball(grid, 2.0)
    assert ball.sum() > 0 and not ball.all()

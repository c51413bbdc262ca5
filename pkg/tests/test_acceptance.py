"""Acceptance suite: the twelve deliverable properties at desk scale.

Each test freezes one property with explicit tolerances.  Solves are
cached in conftest and shared across tests; every randomized check uses
a fixed seed.
"""

import json
import os

import numpy as np
import pytest

from fracobstacle import (
    Cutoff,
    DiscreteMeasure,
    Field,
    GridSpec,
    KernelKind,
    ObstacleProblem,
    brute_force_qp,
    c11_probe,
    c11_value,
    complementarity_residual,
    contact_set,
    convolve_measure,
    dtn_mode_constants,
    extract_measure,
    frac_laplacian,
    geometric_levels,
    global_representation_check,
    h1plus_s_probe,
    h_sigma_norm,
    kernel_column,
    local_remainder,
    make_forcing,
    make_obstacle,
    omega_ball,
    poisson_extend,
    solve,
    variational_inequality_check,
    weighted_norms,
)
from fracobstacle.cli import main as cli_main
from fracobstacle.extension import bilap_b_residual, dirichlet_to_neumann
from fracobstacle.kernels import (
    eval_E_s,
    eval_phi_s,
    eval_phi_s_derivatives,
)
from fracobstacle.representation import (
    second_derivative_representation_check,
    riesz_energy_identity,
    _poly_basis,
)
from fracobstacle.solver import project_admissible, _random_band_limited
from conftest import S, preset_problem, solved


# 1. spectral exactness ------------------------------------------------------

def test_criterion_01_spectral_exactness():
    g = GridSpec(1, 64, 8.0)
    for k in range(1, 32):
        u = Field.from_function(
            g, lambda x: np.cos(2.0 * np.pi * k * x / g.L))
        lam = (2.0 * np.pi * k / g.L) ** (2.0 * S)
        out = frac_laplacian(u, S)
        assert np.max(np.abs(out.values - lam * u.values)) / lam <= 1e-12


# 2. oracle equivalence ------------------------------------------------------

def test_criterion_02_solver_matches_enumeration_oracle():
    g = GridSpec(1, 16, 8.0)
    rng = np.random.default_rng(42)
    for _ in range(3):
        amp = 0.5 + rng.uniform()
        rad = 2.0 + rng.uniform(0.0, 0.8)
        psi = make_obstacle("bump", g, height=amp, radius=rad, offset=0.2)
        f = make_forcing("bump", g, amplitude=rng.uniform(-0.5, 0.5),
                         radius=2.0)
        p = ObstacleProblem(S, g, psi, f, omega_ball(g, 3.0))
        u, report = solve(p, tol=1e-13)
        assert report.converged
        uq = brute_force_qp(p)
        assert np.max(np.abs(u.values - uq.values)) <= 1e-8


# 3. uniqueness --------------------------------------------------------------

def test_criterion_03_uniqueness_from_random_starts():
    g = GridSpec(1, 128, 8.0)
    p = preset_problem("paraboloid", g)
    rng = np.random.default_rng(11)
    sols = []
    for _ in range(2):
        w = 2.0 * _random_band_limited(g, 10, rng)
        start = project_admissible(Field(g, w), p)
        u, report = solve(p, tol=1e-11, start=start)
        assert report.converged
        sols.append(u.values)
    assert np.max(np.abs(sols[0] - sols[1])) <= 1e-7


# 4. complementarity and measure support -------------------------------------

@pytest.mark.parametrize("preset", ["paraboloid", "bump"])
def test_criterion_04_complementarity(preset):
    p, u = solved(preset, 128)
    assert complementarity_residual(u, p) <= 1e-6 * p.scale()
    mu = extract_measure(u, p)
    contact = contact_set(u, p, ctol=1e-6)
    assert mu.mass > 0
    assert np.all(contact[mu.support_mask()])


# 5. variational inequality --------------------------------------------------

@pytest.mark.parametrize("preset", ["paraboloid", "bump"])
def test_criterion_05_variational_inequality(preset):
    p, u = solved(preset, 128)
    vi = variational_inequality_check(u, p, trials=200,
                                      rng=np.random.default_rng(1234))
    assert vi >= -1e-8 * p.scale()


# 6. kernel suite ------------------------------------------------------------

def test_criterion_06_kernel_hand_values():
    assert np.isclose(eval_phi_s([1.0, 0.0], 2, 1.5), -1.0)
    assert np.isclose(eval_phi_s([1.0, 0.0, 0.0], 3, 1.5), 0.0)
    assert np.isclose(eval_phi_s([1.0], 1, 1.5), -1.0)
    assert np.isclose(eval_phi_s([2.0], 1, 1.3), 2.0 ** 1.6)
    rng = np.random.default_rng(9)
    for n in (1, 2, 3):
        for _ in range(50):
            x = rng.uniform(-2.0, 2.0, size=n)
            assert eval_E_s(x, 0.0, n, S) == eval_phi_s(x, n, S)


def test_criterion_06_hessian_laplacian_inequality():
    # |hess_ij phi_s| <= C (-lap phi_s) with one finite fitted C per
    # branch; requires -lap phi_s > 0, which holds exactly when n >= 2s
    rng = np.random.default_rng(6)
    for n, s in ((3, 1.2), (3, 1.4), (3, 1.5), (2, 1.5)):
        C = 0.0
        for _ in range(1000):
            x = rng.standard_normal(n)
            x *= rng.uniform(0.05, 2.0) / np.linalg.norm(x)
            lap, hess = eval_phi_s_derivatives(x, n, s)
            assert -lap >= 0.0
            C = max(C, float(np.max(np.abs(hess))) / (-lap))
        assert np.isfinite(C)


# 7. Poisson kernel ----------------------------------------------------------

def test_criterion_07_poisson_unit_mass_per_level():
    g = GridSpec(1, 128, 8.0)
    lev = geometric_levels(0.05, 1.3, 14)
    U = poisson_extend(Field(g, np.ones(128)), S, lev)
    for j in range(lev.size):
        assert abs(np.max(U.values[..., j]) - 1.0) <= 1e-10
        assert abs(np.min(U.values[..., j]) - 1.0) <= 1e-10


def test_criterion_07_bilaplacian_residual_refinement():
    g = GridSpec(1, 512, 8.0)
    u = Field.from_function(
        g, lambda x: np.cos(2.0 * np.pi * x / g.L))
    sups = []
    for ratio in (1.2, 1.1, 1.05):
        lev = 0.03 * ratio ** np.arange(200)
        lev = lev[lev <= 6.2]
        U = poisson_extend(u, S, lev)
        yl, res = bilap_b_residual(U)
        band = (yl >= 0.5) & (yl <= 2.0)
        sups.append(float(np.max(np.abs(res[..., band]))))
    assert sups[0] / sups[1] >= 3.0
    assert sups[1] / sups[2] >= 3.0


def test_criterion_07_p_to_e_identity():
    # extending the thin kernel column with the Poisson kernel reproduces
    # the half-space kernel column, with one height-independent constant
    g = GridSpec(1, 512, 8.0)
    col = kernel_column(KernelKind("phi_s", 1, S), g)
    lev = geometric_levels(0.267, 1.2, 5)
    U = poisson_extend(col, S, lev)
    mask = np.abs(g.axis_coords()) <= 1.0
    V = _poly_basis(g, mask, 2)
    consts = []
    for j in (1, 3):
        target = kernel_column(KernelKind("E_s", 1, S), g,
                               y=lev[j]).values[mask]
        got = U.values[mask, j]
        A = np.column_stack([target, V])
        coef, _, _, _ = np.linalg.lstsq(A, got, rcond=None)
        consts.append(coef[0])
    assert abs(consts[0] / consts[1] - 1.0) <= 1e-2


# 8. Dirichlet-to-Neumann ----------------------------------------------------

def test_criterion_08_mode_constants():
    g = GridSpec(1, 256, 8.0)
    lev = geometric_levels(0.03, 1.2, 30)
    consts = dtn_mode_constants(g, S, lev, kmax=5)
    xi = (2.0 * np.pi * np.arange(1, 6) / g.L) ** (2.0 * S)
    shape = (consts / consts[0]) / (xi / xi[0])
    assert np.max(np.abs(shape - 1.0)) <= 2e-2


def test_criterion_08_bump_trace_match_and_refinement():
    g = GridSpec(1, 256, 8.0)
    u = make_obstacle("bump", g, height=1.0, radius=1.5, offset=0.0)
    target = frac_laplacian(u, S).values
    mask = np.abs(g.axis_coords()) <= g.L / 4.0
    rels = []
    for y_min, count in ((0.00375, 40), (0.001875, 44)):
        lev = geometric_levels(y_min, 1.2, count)
        U = poisson_extend(u, S, lev)
        trace = dirichlet_to_neumann(U).values
        C1 = dtn_mode_constants(g, S, lev, kmax=1)[0] / (
            2.0 * np.pi / g.L) ** (2.0 * S)
        rels.append(np.linalg.norm((trace / C1 - target)[mask])
                    / np.linalg.norm(target[mask]))
    assert rels[0] <= 5e-2
    assert rels[0] / rels[1] >= 2.0


# 9. representations ---------------------------------------------------------

def test_criterion_09_global_representation_refinement():
    errs = []
    for N, L in ((128, 8.0), (256, 16.0)):
        p, u = solved("pinned", N, L_=L)
        mu = extract_measure(u, p)
        errs.append(global_representation_check(u, mu, S,
                                                window_radius=1.0))
    assert errs[0] / errs[1] >= 1.5


def test_criterion_09_local_remainder_weak_residual():
    weaks = []
    for N in (128, 256):
        p, u = solved("paraboloid", N)
        _, weak = local_remainder(u, p, rho=1.2,
                                  rng=np.random.default_rng(5))
        weaks.append(weak)
    assert weaks[0] <= 5e-3 * solved("paraboloid", 128)[0].scale()
    assert weaks[1] < weaks[0]


def test_criterion_09_second_derivative_gap_refinement():
    gaps = []
    for N in (128, 256):
        p, u = solved("forced", N)
        gaps.append(second_derivative_representation_check(u, p, rho=1.2))
    assert gaps[0] / gaps[1] >= 1.5


# 10. Riesz energy identity --------------------------------------------------

def test_criterion_10_riesz_energy_identity():
    g = GridSpec(2, 64, 8.0)
    beta = 0.6
    rng = np.random.default_rng(3)

    def random_measure():
        w = np.zeros(g.shape)
        for _ in range(3):
            c0 = rng.uniform(-1.0, 1.0, size=2)
            r = g.radius(center=c0)
            inside = r < 0.8
            w[inside] += rng.uniform(0.5, 1.5) * np.exp(
                1.0 - 1.0 / (1.0 - (r[inside] / 0.8) ** 2))
        return DiscreteMeasure(g, w)

    _, _, C_ref = riesz_energy_identity(random_measure(), beta)
    for _ in range(4):
        lhs, rhs, C = riesz_energy_identity(random_measure(), beta)
        assert abs(C / C_ref - 1.0) <= 3e-2


# 11. regularity probes ------------------------------------------------------

@pytest.mark.parametrize("preset", ["paraboloid", "bump"])
def test_criterion_11_c11_and_order_1_plus_s(preset):
    rho = 1.2
    raw = [solved(preset, N)[1] for N in (128, 256)]
    rep = c11_probe(raw[0], raw[1], rho)
    assert rep.ratio <= 1.25
    windowed = [Field(u.grid, u.values * Cutoff(u.grid, rho).values.values)
                for u in raw]
    h1s = h1plus_s_probe(windowed[0], windowed[1], S)
    assert h1s.ratio <= 1.25


def test_criterion_11_controls_diverge():
    # |x|^(3/2) cusp: second-difference sup grows like h^(-1/2)
    cusp = []
    for N in (128, 256):
        g = GridSpec(1, N, 8.0)
        cusp.append(Field(g, np.abs(g.axis_coords()) ** 1.5))
    rep = c11_probe(cusp[0], cusp[1], 1.2)
    assert rep.ratio >= 1.35
    # order-2s column on the raw solutions: 2s = 2.6 > 5/2, so the cusp
    # at the edge of omega makes the norm grow under refinement
    for preset in ("paraboloid", "bump"):
        raw = [solved(preset, N)[1] for N in (128, 256)]
        ratio = (h_sigma_norm(raw[1], 2.0 * S)
                 / h_sigma_norm(raw[0], 2.0 * S))
        assert ratio >= 1.5


@pytest.mark.parametrize("preset", ["paraboloid", "bump"])
def test_criterion_11_weighted_norms_stable(preset):
    lev = geometric_levels(0.03, 1.2, 30)
    triples = []
    for N in (128, 256):
        _, u = solved(preset, N)
        U = poisson_extend(u, S, lev)
        triples.append(weighted_norms(U, 2.0))
    for a, b in zip(*triples):
        assert b / a <= 1.25


# 12. determinism ------------------------------------------------------------

def test_criterion_12_study_byte_identical(tmp_path):
    cfg = {
        "name": "det",
        "s": S,
        "grid": {"n": 1, "N": 32, "L": 8.0},
        "obstacle": {"kind": "bump", "height": 0.8, "radius": 1.5},
        "forcing": {"kind": "bump", "amplitude": 0.2, "radius": 1.5},
        "omega": {"radius": 2.5},
        "solver": {"tol": 1e-11},
    }
    path = str(tmp_path / "det.json")
    with open(path, "w") as fh:
        json.dump(cfg, fh)
    blobs = []
    for tag in ("a", "b"):
        out = str(tmp_path / tag)
        assert cli_main(["study", "--config", path, "--out", out]) == 0
        chunk = b""
        for name in ("study.csv", "study_ratios.csv"):
            with open(os.path.join(out, name), "rb") as fh:
                chunk += fh.read()
        blobs.append(chunk)
    assert blobs[0] == blobs[1]

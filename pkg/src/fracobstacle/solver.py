"""Constrained minimization of the nonlocal energies and KKT diagnostics.

The quadratic objective 1/2 <Au, u> - <f, u> (A the spectral operator of
order s) is minimized over the admissible cone {u >= psi on Omega, u = 0
off Omega} by accelerated projected gradient with monotone safeguarding
and gradient-based adaptive restart.  Step size is 1/m_max with m_max the
largest multiplier value, the exact top curvature of the objective.

A dense active-set enumeration oracle certifies solutions at tiny scale.
"""

import time

import numpy as np

from .grids import Field
from .kernels import DiscreteMeasure
from .spectral import frac_laplacian, inner_l2, multiplier

__all__ = [
    "ObstacleProblem",
    "SolveReport",
    "project_admissible",
    "solve",
    "brute_force_qp",
    "variational_inequality_check",
    "extract_measure",
    "complementarity_residual",
    "make_obstacle",
    "make_forcing",
    "omega_ball",
]

GLOBAL = "global"
BOUNDED = "bounded"


class ObstacleProblem:
    """Order s, grid, obstacle psi, forcing f, domain mask and variant.

    For the global variant the mask covers the full grid and f vanishes;
    for the bounded variant the complement of omega must be nonempty and
    the obstacle nonpositive there (so u = 0 off omega stays admissible).
    """

    def __init__(self, s, grid, psi, f=None, omega=None, variant=BOUNDED):
        if not (1.0 < s < 2.0):
            raise ValueError("order s must lie in (1, 2), got %r" % (s,))
        if variant not in (GLOBAL, BOUNDED):
            raise ValueError("unknown problem variant %r" % (variant,))
        if psi.grid != grid:
            raise ValueError("obstacle grid mismatch")
        if f is None:
            f = Field.zeros(grid)
        if f.grid != grid:
            raise ValueError("forcing grid mismatch")
        if omega is None:
            omega = np.ones(grid.shape, dtype=bool)
        omega = np.asarray(omega, dtype=bool).reshape(grid.shape)
        if variant == BOUNDED:
            if omega.all():
                raise ValueError("bounded variant needs a nonempty complement")
            if np.max(psi.values[~omega]) > 0:
                raise ValueError("obstacle must be <= 0 off omega")
        self.s = float(s)
        self.grid = grid
        self.psi = psi
        self.f = f
        self.omega = omega
        self.variant = variant

    def scale(self):
        return max(1.0, float(np.max(np.abs(self.f.values))),
                   float(np.max(np.abs(self.psi.values))))

    def operator(self, u):
        return frac_laplacian(u, self.s)

    def objective(self, u):
        return 0.5 * inner_l2(self.operator(u), u) - inner_l2(self.f, u)

    def step_size(self):
        return 1.0 / float(np.max(multiplier(self.grid, self.s)))


class SolveReport:
    """Iteration record of one solve."""

    def __init__(self, iterations, converged, final_energy, energy_history,
                 pg_residual, comp_residual, wall_time):
        self.iterations = iterations
        self.converged = converged
        self.final_energy = final_energy
        self.energy_history = energy_history
        self.pg_residual = pg_residual
        self.comp_residual = comp_residual
        self.wall_time = wall_time

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "final_energy": self.final_energy,
            "pg_residual": self.pg_residual,
            "comp_residual": self.comp_residual,
            "wall_time": self.wall_time,
            "energy_history": [float(e) for e in self.energy_history],
        }


def project_admissible(v, p):
    """Pointwise max with the obstacle on omega, zero off omega."""
    if v.grid != p.grid:
        raise ValueError("grid mismatch in projection")
    out = np.maximum(v.values, p.psi.values)
    if p.variant == BOUNDED:
        out = np.where(p.omega, out, 0.0)
    return Field(p.grid, out)


def _pg_residual(u, g, p, t):
    """max |r| with r = g on free nodes, (u - psi)/t where the step hits
    the obstacle; formulated to avoid the u - (u - t g) cancellation."""
    hits = u.values - t * g.values < p.psi.values
    r = np.where(hits, (u.values - p.psi.values) / t, g.values)
    if p.variant == BOUNDED:
        r = np.where(p.omega, r, 0.0)
    return float(np.max(np.abs(r)))


def solve(p, tol=1e-10, max_iter=200000, start=None, check_every=20):
    """Minimize the constrained energy; returns (u, SolveReport).

    Accelerated projected gradient from `start` (default: the projection
    of zero).  The momentum restarts whenever it points against the
    gradient or the energy increases, which keeps the recorded energy
    history nonincreasing.  Non-convergence returns the best iterate with
    the converged flag unset.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t0 = time.perf_counter()
    t = p.step_size()
    x = project_admissible(start if start is not None else Field.zeros(p.grid), p)
    g = Field(p.grid, p.operator(x).values - p.f.values)
    res = _pg_residual(x, g, p, t)
    energies = [p.objective(x)]
    if res <= tol:
        rep = SolveReport(0, True, energies[-1], energies, res,
                          complementarity_residual(x, p),
                          time.perf_counter() - t0)
        return x, rep
    y = x.copy()
    x_prev = x.copy()
    theta = 1.0
    f_best = energies[0]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        gy = Field(p.grid, p.operator(y).values - p.f.values)
        x_new = project_admissible(Field(p.grid, y.values - t * gy.values), p)
        # gradient-based adaptive restart
        if np.sum(gy.values * (x_new.values - x_prev.values)) > 0.0:
            theta = 1.0
            y = x_new.copy()
        else:
            theta_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta**2))
            beta = (theta - 1.0) / theta_new
            y = Field(p.grid,
                      x_new.values + beta * (x_new.values - x_prev.values))
            theta = theta_new
        x_prev = x_new
        if it % check_every == 0 or it == max_iter:
            f_best = min(f_best, p.objective(x_new))
            energies.append(f_best)
            g = Field(p.grid, p.operator(x_new).values - p.f.values)
            res = _pg_residual(x_new, g, p, t)
            if res <= tol:
                converged = True
                break
    rep = SolveReport(it, converged, f_best, energies, res,
                      complementarity_residual(x_prev, p),
                      time.perf_counter() - t0)
    return x_prev, rep


# ---------------------------------------------------------------------------
# dense oracle


def dense_operator_matrix(p):
    """Dense matrix of the spectral operator on the full node lattice."""
    M = p.grid.size
    A = np.empty((M, M))
    basis = np.zeros(M)
    for j in range(M):
        basis[:] = 0.0
        basis[j] = 1.0
        A[:, j] = p.operator(Field(p.grid, basis.reshape(p.grid.shape))
                             ).values.ravel()
    return 0.5 * (A + A.T)


def brute_force_qp(p, tie_tol=1e-9):
    """Exhaustive active-set enumeration at tiny scale.

    Enumerates every active subset of the omega nodes, solves the dense
    KKT system per subset, and returns the unique consistent candidate
    (u >= psi with nonnegative multiplier on the active set).  Candidates
    that differ only by zero-multiplier degenerate nodes must agree in u.
    """
    idx = np.flatnonzero(p.omega.ravel())
    m = idx.size
    if m > 18:
        raise ValueError("active-set enumeration limited to 18 omega nodes")
    A = dense_operator_matrix(p)
    psi = p.psi.values.ravel()
    f = p.f.values.ravel()
    # eliminate off-omega nodes (u = 0 there): restrict rows/cols to omega
    A_oo = A[np.ix_(idx, idx)]
    f_o = f[idx]
    psi_o = psi[idx]
    scale = p.scale()
    candidates = []
    for mask_bits in range(2**m):
        active = np.array([(mask_bits >> k) & 1 for k in range(m)], dtype=bool)
        inactive = ~active
        u_o = np.empty(m)
        u_o[active] = psi_o[active]
        if inactive.any():
            Aii = A_oo[np.ix_(inactive, inactive)]
            rhs = f_o[inactive]
            if active.any():
                rhs = rhs - A_oo[np.ix_(inactive, active)] @ psi_o[active]
            try:
                sol = np.linalg.solve(Aii, rhs)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(sol)):
                continue
            if np.max(np.abs(Aii @ sol - rhs)) > 1e-8 * max(1.0, scale):
                continue
            u_o[inactive] = sol
        grad = A_oo @ u_o - f_o
        if np.min(u_o - psi_o) < -tie_tol * scale:
            continue
        if active.any() and np.min(grad[active]) < -tie_tol * scale:
            continue
        if inactive.any() and np.max(np.abs(grad[inactive])) > 1e-7 * scale:
            continue
        candidates.append(u_o)
    if not candidates:
        raise RuntimeError("no KKT-consistent active set; discretization bug")
    ref = candidates[0]
    for cand in candidates[1:]:
        if np.max(np.abs(cand - ref)) > 1e-7 * scale:
            raise RuntimeError("distinct KKT-consistent candidates found")
    full = np.zeros(p.grid.size)
    full[idx] = ref
    return Field(p.grid, full.reshape(p.grid.shape))


# ---------------------------------------------------------------------------
# KKT diagnostics


def variational_inequality_check(u, p, trials=200, rng=None):
    """min over random admissible v of <Au - f, v - u>; >= -tol when solved.

    Test directions are projections of random band-limited fields at the
    scale of the solution.
    """
    rng = np.random.default_rng(rng)
    g = Field(p.grid, p.operator(u).values - p.f.values)
    amp = max(1.0, float(np.max(np.abs(u.values))))
    worst = np.inf
    kmax = max(2, p.grid.N // 8)
    for _ in range(trials):
        w = _random_band_limited(p.grid, kmax, rng) * amp
        v = project_admissible(Field(p.grid, w), p)
        val = inner_l2(g, Field(p.grid, v.values - u.values))
        worst = min(worst, val)
    return worst


def _random_band_limited(grid, kmax, rng):
    spec = np.zeros(grid.shape, dtype=complex)
    k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
    if grid.n == 1:
        band = np.abs(k) <= kmax
    else:
        kx, ky = np.meshgrid(k, k, indexing="ij")
        band = np.sqrt(kx**2 + ky**2) <= kmax
    count = int(band.sum())
    spec[band] = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    w = np.fft.ifftn(spec).real
    peak = np.max(np.abs(w))
    return w / peak if peak > 0 else w


def extract_measure(u, p, neg_tol=1e-6):
    """Reaction measure: the positive part of Au - f on omega.

    The clamped-away negative part must stay below neg_tol * scale in max
    norm, else the solve is flagged as unconverged.  Positive parts below
    the same threshold are numerically indistinguishable from zero and
    are dropped, so the support of the measure is meaningful.
    """
    g = p.operator(u).values - p.f.values
    g = np.where(p.omega, g, 0.0)
    neg = float(np.max(np.clip(-g, 0.0, None)))
    if neg > neg_tol * p.scale():
        raise RuntimeError(
            "negative reaction part %.3e exceeds tolerance; unconverged solve"
            % neg)
    w = np.clip(g, 0.0, None)
    w[w <= neg_tol * p.scale()] = 0.0
    return DiscreteMeasure(p.grid, w)


def complementarity_residual(u, p):
    """max over omega of |min(u - psi, Au - f)|."""
    g = p.operator(u).values - p.f.values
    r = np.minimum(u.values - p.psi.values, g)
    r = np.where(p.omega, r, 0.0)
    return float(np.max(np.abs(r)))


# ---------------------------------------------------------------------------
# shipped obstacle / forcing / domain library


def make_obstacle(kind, grid, height=1.0, curvature=1.0, radius=1.0,
                  center=None, offset=0.05):
    """Built-in obstacle shapes, all negative outside a compact region.

    kinds: "paraboloid" height - curvature r^2; "bump" compact smooth cap
    minus a small offset; "wedge" a C^1 radial spline of two parabolas
    with a curvature jump (C^1,1 but not C^2); "low" the constant -1.
    """
    r = grid.radius(center)
    if kind == "paraboloid":
        vals = height - curvature * r**2
    elif kind == "bump":
        vals = np.zeros(grid.shape)
        inside = r < radius
        t = np.zeros(grid.shape)
        t[inside] = (r[inside] / radius) ** 2
        vals[inside] = height * np.exp(1.0 - 1.0 / (1.0 - t[inside]))
        vals = vals - offset
    elif kind == "wedge":
        r1 = radius
        inner = height - curvature * r**2
        c2 = 4.0 * curvature
        outer = (height - curvature * r1**2
                 - 2.0 * curvature * r1 * (r - r1) - c2 * (r - r1) ** 2)
        vals = np.where(r <= r1, inner, outer)
    elif kind == "low":
        vals = np.full(grid.shape, -1.0)
    else:
        raise ValueError("unknown obstacle kind %r" % (kind,))
    return Field(grid, vals)


def make_forcing(kind, grid, amplitude=0.0, radius=1.0, center=None):
    """Forcing fields: "zero" or a compact smooth "bump" of given sign."""
    if kind not in ("zero", "bump"):
        raise ValueError("unknown forcing kind %r" % (kind,))
    if kind == "zero" or amplitude == 0.0:
        return Field.zeros(grid)
    if kind == "bump":
        r = grid.radius(center)
        vals = np.zeros(grid.shape)
        inside = r < radius
        t = (r[inside] / radius) ** 2
        vals[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - t))
        return Field(grid, vals)
    raise ValueError("unknown forcing kind %r" % (kind,))


def omega_ball(grid, radius, center=None):
    """Boolean mask of the ball of given radius."""
    return grid.radius(center) <= radius

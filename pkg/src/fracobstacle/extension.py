"""Degenerate-weight extension to the upper half space.

A thin-space field u of order 1 < s < 2 extends to y > 0 through the
Poisson kernel; the extension solves the weighted biharmonic equation
Delta_b^2 U = 0 with b = 3 - 2s, where

    Delta_b U = Delta_x U + U_yy + (b / y) U_y.

The fractional operator is recovered from the second weighted conormal
trace y^b d/dy (Delta_b U) as y -> 0, up to a lattice constant that is
calibrated once on the first Fourier mode.  The first weighted trace
y^b U_y vanishes in this regime.

Horizontal derivatives are spectral; vertical derivatives use quadratic
(3-point) stencils on the nonuniform level set, with an even-reflection
ghost below the bottom level.  Traces at y = 0 are Richardson-extrapolated
from the three smallest levels, which must be geometrically graded.
"""

import numpy as np
from scipy.special import gamma, kv

from .grids import Field
from .spectral import apply_symbol

__all__ = [
    "HalfSpaceField",
    "geometric_levels",
    "poisson_extend",
    "delta_b_apply",
    "bilap_b_residual",
    "dirichlet_to_neumann",
    "dtn_mode_constants",
    "neumann_trace_check",
    "weighted_norms",
]


class HalfSpaceField:
    """Values on the thin node lattice times a set of heights y > 0.

    values has shape grid.shape + (len(ylevels),); levels are strictly
    increasing and positive.  b = 3 - 2s is the extension weight power.
    """

    def __init__(self, grid, ylevels, values, s):
        ylevels = np.asarray(ylevels, dtype=float)
        if ylevels.ndim != 1 or ylevels.size < 4:
            raise ValueError("need at least 4 extension levels")
        if ylevels[0] <= 0 or np.any(np.diff(ylevels) <= 0):
            raise ValueError("levels must be positive and increasing")
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape + (ylevels.size,):
            raise ValueError("values shape %r does not match grid x levels"
                             % (values.shape,))
        if not np.all(np.isfinite(values)):
            raise ValueError("half-space field has non-finite values")
        if not (1.0 < s < 2.0):
            raise ValueError("order s must lie in (1, 2), got %r" % (s,))
        self.grid = grid
        self.ylevels = ylevels
        self.values = values
        self.s = float(s)

    @property
    def b(self):
        return 3.0 - 2.0 * self.s

    def level(self, j):
        return Field(self.grid, self.values[..., j])


def geometric_levels(y_min, ratio, count):
    """Geometrically graded heights y_min * ratio^j, j = 0..count-1."""
    if y_min <= 0 or ratio <= 1.0 or count < 4:
        raise ValueError("need y_min > 0, ratio > 1 and at least 4 levels")
    return y_min * ratio ** np.arange(count, dtype=float)


def _periodic_kernel_spectrum(grid, y, s):
    """Fourier coefficients of the image-summed (periodized) Poisson
    kernel, normalized to unit lattice mass.

    Periodizing by summing over all box images is essential: truncating
    to the minimum image drops tails that decay like y^(2s) / |x|^(n+2s)
    and thereby injects a spurious y^(2s) component of relative size
    (2/L)^(2s), which is exactly the component the conormal trace reads.
    The image sum has the closed spectral form p(|xi| y) with
    p(t) = 2^(1-s) / Gamma(s) t^s K_s(t); p(0) = 1 keeps constants exact.
    """
    t = np.sqrt(grid.freq_norm2()) * y
    spec = np.ones_like(t)
    pos = t > 0
    spec[pos] = (2.0 ** (1.0 - s) / gamma(s)) * t[pos] ** s * kv(s, t[pos])
    return spec


def poisson_extend(u, s, ylevels):
    """Extend u to the given heights with the normalized Poisson kernel."""
    ylevels = np.asarray(ylevels, dtype=float)
    grid = u.grid
    vals = np.empty(grid.shape + (ylevels.size,))
    spec_u = np.fft.fftn(u.values)
    for j, y in enumerate(ylevels):
        if y <= 0:
            raise ValueError("extension heights must be positive")
        ker = _periodic_kernel_spectrum(grid, y, s)
        vals[..., j] = np.fft.ifftn(ker * spec_u).real
    return HalfSpaceField(grid, ylevels, vals, s)


def _quad_coeffs(ya, yb, yc, at):
    """First/second derivative weights of the quadratic through
    (ya, yb, yc), evaluated at `at`."""
    d1 = np.array([
        (2.0 * at - yb - yc) / ((ya - yb) * (ya - yc)),
        (2.0 * at - ya - yc) / ((yb - ya) * (yb - yc)),
        (2.0 * at - ya - yb) / ((yc - ya) * (yc - yb)),
    ])
    d2 = np.array([
        2.0 / ((ya - yb) * (ya - yc)),
        2.0 / ((yb - ya) * (yb - yc)),
        2.0 / ((yc - ya) * (yc - yb)),
    ])
    return d1, d2


def _y_derivatives(values, ylevels):
    """(dU/dy, d2U/dy2) over all levels; even-reflection ghost at -y_0,
    one-sided quadratic at the top level."""
    J = ylevels.size
    dy1 = np.empty_like(values)
    dy2 = np.empty_like(values)
    for j in range(J):
        if j == 0:
            ys = (-ylevels[0], ylevels[0], ylevels[1])
            tab = (values[..., 0], values[..., 0], values[..., 1])
        elif j == J - 1:
            ys = (ylevels[J - 3], ylevels[J - 2], ylevels[J - 1])
            tab = (values[..., J - 3], values[..., J - 2], values[..., J - 1])
        else:
            ys = (ylevels[j - 1], ylevels[j], ylevels[j + 1])
            tab = (values[..., j - 1], values[..., j], values[..., j + 1])
        c1, c2 = _quad_coeffs(ys[0], ys[1], ys[2], ylevels[j])
        dy1[..., j] = c1[0] * tab[0] + c1[1] * tab[1] + c1[2] * tab[2]
        dy2[..., j] = c2[0] * tab[0] + c2[1] * tab[1] + c2[2] * tab[2]
    return dy1, dy2


def _tangential_laplacian(grid, values):
    out = np.empty_like(values)
    sym = -grid.freq_norm2()
    for j in range(values.shape[-1]):
        out[..., j] = apply_symbol(Field(grid, values[..., j]), sym).values
    return out


def delta_b_apply(U):
    """Weighted laplacian Delta_b U = Delta_x U + U_yy + (b/y) U_y."""
    dy1, dy2 = _y_derivatives(U.values, U.ylevels)
    lap_x = _tangential_laplacian(U.grid, U.values)
    vals = lap_x + dy2 + (U.b / U.ylevels) * dy1
    return HalfSpaceField(U.grid, U.ylevels, vals, U.s)


def bilap_b_residual(U):
    """Delta_b applied twice, restricted to interior levels (two boundary
    layers dropped per side, where the stencils are one-sided or
    ghost-assisted)."""
    W = delta_b_apply(delta_b_apply(U))
    if U.ylevels.size < 8:
        raise ValueError("need at least 8 levels for an interior residual")
    return W.ylevels[2:-2], W.values[..., 2:-2]


def _check_geometric(ylevels, upto, tol=0.05):
    ratios = ylevels[1:upto + 1] / ylevels[:upto]
    if np.max(np.abs(ratios - ratios[0])) > tol * ratios[0]:
        raise ValueError(
            "trace extrapolation needs geometrically graded bottom levels")
    return ratios[0]


def _extrapolate_traces(q0, q1, q2):
    """Limit of the geometric sequence q_j = q* + c r^(jp) by Aitken's
    delta-squared, elementwise with a guarded denominator."""
    den = q0 + q2 - 2.0 * q1
    num = q0 * q2 - q1**2
    small = np.abs(den) <= 1e-14 * (np.abs(q0) + np.abs(q2) + 1e-300)
    return np.where(small, q2, num / np.where(small, 1.0, den))


def _dy_centered(values, ylevels, j):
    """d/dy at level j from the centered quadratic (no ghost)."""
    c1, _ = _quad_coeffs(ylevels[j - 1], ylevels[j], ylevels[j + 1],
                         ylevels[j])
    return (c1[0] * values[..., j - 1] + c1[1] * values[..., j]
            + c1[2] * values[..., j + 1])


def _weighted_trace(values, ylevels, b, js):
    """Extrapolate y^b * dvalues/dy to y = 0 from centered derivatives at
    the levels `js` (geometrically graded)."""
    _check_geometric(ylevels, js[-1] + 1)
    q = [ylevels[j] ** b * _dy_centered(values, ylevels, j) for j in js]
    return _extrapolate_traces(q[0], q[1], q[2])


def dirichlet_to_neumann(U):
    """Second conormal trace y^b d/dy (Delta_b U) at y = 0.

    This is the fractional operator of the boundary datum up to a lattice
    constant; calibrate with dtn_mode_constants.  The trace is built from
    ghost-free centered stencils (levels 1 and up for Delta_b, levels
    2..4 for the weighted derivative) and Richardson-extrapolated, so at
    least 7 geometrically graded levels are required: the bottom-level
    ghost stencil is O(1) inconsistent on the singular y^(2s-2) component
    and must stay out of the trace.
    """
    if U.ylevels.size < 7:
        raise ValueError("trace extraction needs at least 7 levels")
    W = delta_b_apply(U)
    return Field(U.grid,
                 _weighted_trace(W.values, U.ylevels, U.b, (2, 3, 4)))


def dtn_mode_constants(grid, s, ylevels, kmax=5):
    """Trace amplitude per Fourier mode k = 1..kmax divided by the mode
    amplitude, for the Poisson extension of a unit cosine.  The ratio of
    entry k to entry 1 times |k|^(2s) tests the symbol shape; entry 1 is
    the calibration constant."""
    consts = []
    x = grid.axis_coords()
    for k in range(1, kmax + 1):
        if grid.n == 1:
            vals = np.cos(2.0 * np.pi * k * x / grid.L)
        else:
            vals = np.cos(2.0 * np.pi * k * x / grid.L)[:, None] * np.ones(
                (1, grid.N))
        U = poisson_extend(Field(grid, vals), s, ylevels)
        trace = dirichlet_to_neumann(U).values
        amp = float(np.sum(trace * vals) / np.sum(vals * vals))
        consts.append(amp)
    return np.array(consts)


def neumann_trace_check(U):
    """Max norm of the extrapolated first trace y^b U_y at y = 0 (vanishes
    for the extension in this order range)."""
    if U.ylevels.size < 5:
        raise ValueError("trace extraction needs at least 5 levels")
    return float(np.max(np.abs(
        _weighted_trace(U.values, U.ylevels, U.b, (1, 2, 3)))))


def _level_weights(ylevels):
    """Trapezoid-type quadrature weights on the level set, extended to 0
    at the bottom."""
    edges = np.concatenate(([0.0], 0.5 * (ylevels[:-1] + ylevels[1:]),
                            [ylevels[-1] + 0.5 * (ylevels[-1] - ylevels[-2])]))
    return np.diff(edges)


def _gradient_sq(U):
    """|grad U|^2 with spectral tangential and stencil vertical parts."""
    dy1, _ = _y_derivatives(U.values, U.ylevels)
    out = dy1**2
    grid = U.grid
    for ax in range(grid.n):
        kk = grid.axis_freqs()
        kk[grid.N // 2] = 0.0  # unpaired Nyquist mode breaks odd symmetry
        shape = [1] * grid.n
        shape[ax] = grid.N
        sym = 1j * kk.reshape(shape) * np.ones(grid.shape)
        for j in range(U.ylevels.size):
            d = apply_symbol(Field(grid, U.values[..., j]), sym).values
            out[..., j] += d**2
    return out


def weighted_norms(U, ball_radius):
    """Weighted quadratures over the half ball |(x, y)| <= ball_radius:

    returns (h2_norm, h1_seminorm_of_delta_b, third_difference_seminorm)

    h2_norm collects y^b times (Delta_b U)^2 + |grad U|^2 + U^2; the
    h1 seminorm uses y^b |grad(Delta_b U)|^2; the third-difference
    seminorm uses y^b |grad(Delta U)|^2 with the plain laplacian, an
    equivalent surrogate for the squared third derivatives.
    """
    grid = U.grid
    wy = _level_weights(U.ylevels)
    r2 = grid.radius()[..., None] ** 2 + U.ylevels**2
    mask = r2 <= ball_radius**2
    cell = grid.cell_volume * wy * mask
    weight = U.ylevels ** U.b
    W = delta_b_apply(U)
    h2 = np.sum(weight * cell * (W.values**2 + _gradient_sq(U)
                                 + U.values**2))
    h1_delta = np.sum(weight * cell * _gradient_sq(W))
    dy1, dy2 = _y_derivatives(U.values, U.ylevels)
    plain = HalfSpaceField(
        grid, U.ylevels, _tangential_laplacian(grid, U.values) + dy2, U.s)
    third = np.sum(weight * cell * _gradient_sq(plain))
    return (float(np.sqrt(h2)), float(np.sqrt(h1_delta)),
            float(np.sqrt(third)))

"""Closed-form kernels and their convolution against discrete measures.

Branches: the free-space kernel inverting (-Delta)^s is |x|^(2s-n) except
at s = 3/2 where logarithmic corrections appear for n in {1, 2, 3}.  Its
half-space counterpart depends on r^2 = |x|^2 + y^2 only, and traces back
to the thin kernel at y = 0.  The half-space Poisson kernel is
y^(2s) / r^(n+2s) up to normalization.

Convolutions are evaluated by zero-padded linear convolution on the node
lattice (identical to direct summation over the support of the measure;
no periodic wrap).  The self cell uses an analytic cell average: exact in
1D, equal-area-disk closed form for radial power kernels in 2D.
"""

import numpy as np

from .grids import Field

__all__ = [
    "KernelKind",
    "DiscreteMeasure",
    "eval_phi_s",
    "eval_E_s",
    "eval_poisson",
    "eval_riesz_Q",
    "eval_phi_s_derivatives",
    "convolve_measure",
    "kernel_column",
]

LOG_S = 1.5


class KernelSingularity(ValueError):
    """Raised when a kernel is evaluated at its singular point."""


def _check_order(n, s):
    if n not in (1, 2, 3):
        raise ValueError("kernel dimension must be 1, 2 or 3, got %r" % (n,))
    if not (1.0 < s < 2.0):
        raise ValueError("order s must lie in (1, 2), got %r" % (s,))


def _is_log_branch(n, s):
    return s == LOG_S and n in (1, 2, 3)


def _phi_radial(r, n, s):
    """Branch-matched kernel value as a function of the radius r > 0."""
    r = np.asarray(r, dtype=float)
    if _is_log_branch(n, s):
        if n == 3:
            return -np.log(r)
        if n == 2:
            return -r
        c = (3.0 + n) / (2.0 * n + 2.0)
        return r**2 * (np.log(r) - c)
    return r ** (2.0 * s - n)


def eval_phi_s(x, n, s):
    """Thin-space kernel of (-Delta)^s at the point x != 0."""
    _check_order(n, s)
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))
    if r == 0.0:
        raise KernelSingularity("kernel singularity at x = 0")
    return float(_phi_radial(r, n, s))


def eval_E_s(x, y, n, s):
    """Half-space kernel at (x, y) != (0, 0); traces to eval_phi_s at y=0."""
    _check_order(n, s)
    if float(y) == 0.0:
        return eval_phi_s(x, n, s)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(np.sqrt(np.sum(x**2) + float(y) ** 2))
    if r == 0.0:
        raise KernelSingularity("kernel singularity at the origin")
    return float(_phi_radial(r, n, s))


def _poisson_radial(r, y, n, s):
    return y ** (2.0 * s) / r ** (n + 2.0 * s)


def poisson_lattice_constant(grid, y, s):
    """1 / (lattice mass of the raw kernel), so the scaled kernel sums to 1."""
    r = np.sqrt(grid.radius() ** 2 + y**2)
    raw = _poisson_radial(r, y, grid.n, s)
    return 1.0 / float(np.sum(raw) * grid.cell_volume)


def eval_poisson(x, y, n, s, normalized=False, grid=None):
    """Half-space Poisson kernel at (x, y), y > 0.

    Raw form: y^(2s) / (|x|^2+y^2)^((n+2s)/2) with unit constant.  When
    `normalized`, the value is scaled so the lattice quadrature of the
    kernel over `grid` equals 1 at this height (grid required).
    """
    _check_order(n, s)
    if y <= 0:
        raise ValueError("Poisson kernel needs y > 0, got %r" % (y,))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(np.sqrt(np.sum(x**2) + y**2))
    val = _poisson_radial(r, y, n, s)
    if normalized:
        if grid is None:
            raise ValueError("normalized evaluation needs the lattice grid")
        val *= poisson_lattice_constant(grid, y, s)
    return float(val)


def eval_riesz_Q(x, beta, n=None):
    """Riesz kernel |x|^(beta - n) for 0 < beta < n, x != 0."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if n is None:
        n = x.size
    if not (0.0 < beta < n):
        raise ValueError("Riesz order must satisfy 0 < beta < n")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise KernelSingularity("kernel singularity at x = 0")
    return float(r ** (beta - n))


def eval_phi_s_derivatives(x, n, s):
    """Analytic (laplacian, hessian) of the thin kernel at x != 0.

    Generic branch r^a, a = 2s - n:
        hess_ij = a r^(a-2) delta_ij + a (a-2) r^(a-4) x_i x_j,
        lap     = a (a + n - 2) r^(a-2).
    Log branches are differentiated separately.  Note the sign of the
    laplacian flips with (n - 2s): the kernel is superharmonic away from
    the origin only when n >= 2s.
    """
    _check_order(n, s)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != n:
        raise ValueError("point has %d coordinates, expected %d" % (x.size, n))
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise KernelSingularity("kernel singularity at x = 0")
    eye = np.eye(n)
    xx = np.outer(x, x)
    if _is_log_branch(n, s):
        if n == 3:
            hess = -eye / r**2 + 2.0 * xx / r**4
            lap = -1.0 / r**2
        elif n == 2:
            hess = -eye / r + xx / r**3
            lap = -1.0 / r
        else:
            c = (3.0 + n) / (2.0 * n + 2.0)
            lap = 2.0 * np.log(r) + 3.0 - 2.0 * c
            hess = np.array([[lap]])
        return float(lap), hess
    a = 2.0 * s - n
    hess = a * r ** (a - 2.0) * eye + a * (a - 2.0) * r ** (a - 4.0) * xx
    lap = a * (a + n - 2.0) * r ** (a - 2.0)
    return float(lap), hess


class KernelKind:
    """Tagged kernel selector for convolve_measure.

    tag in {"phi_s", "E_s", "poisson", "riesz_q", "lap_phi_s", "hess_phi_s"}.
    riesz_q carries beta; hess_phi_s carries the index pair (i, j).
    """

    TAGS = ("phi_s", "E_s", "poisson", "riesz_q", "lap_phi_s", "hess_phi_s")

    def __init__(self, tag, n, s=None, beta=None, ij=None):
        if tag not in self.TAGS:
            raise ValueError("unknown kernel tag %r" % (tag,))
        if tag == "riesz_q":
            if beta is None or not (0.0 < beta < n):
                raise ValueError("riesz_q needs 0 < beta < n")
        else:
            _check_order(n, s)
        if tag == "hess_phi_s" and ij is None:
            raise ValueError("hess_phi_s needs an index pair")
        self.tag = tag
        self.n = n
        self.s = s
        self.beta = beta
        self.ij = ij

    def needs_height(self):
        return self.tag in ("E_s", "poisson")

    def __repr__(self):
        return "KernelKind(%r, n=%d, s=%r, beta=%r, ij=%r)" % (
            self.tag, self.n, self.s, self.beta, self.ij,
        )


class DiscreteMeasure:
    """Nonnegative node weights; the mass of a node is weight * h^n."""

    def __init__(self, grid, weights, allow_signed=False):
        weights = np.asarray(weights, dtype=float)
        if weights.size != grid.size:
            raise ValueError("weight length does not match grid size")
        if not np.all(np.isfinite(weights)):
            raise ValueError("measure has non-finite weights")
        if not allow_signed and np.min(weights) < 0:
            raise ValueError("measure weights must be nonnegative")
        self.grid = grid
        self.weights = weights.reshape(grid.shape)

    @property
    def mass(self):
        return float(np.sum(self.weights) * self.grid.cell_volume)

    def support_mask(self):
        return self.weights != 0.0

    def scaled(self, factor):
        return DiscreteMeasure(self.grid, self.weights * factor,
                               allow_signed=True)


# ---------------------------------------------------------------------------
# kernel tables and self-cell averages


def _power_cell_average(a, grid):
    """Cell average of |x|^a over the centered grid cell, a > -n.

    1D: exact.  2D: closed form over the equal-area disk (radius h/sqrt(pi)),
    the quadrature convention for radial power kernels.
    """
    h = grid.h
    if grid.n == 1:
        t = h / 2.0
        return t**a / (a + 1.0)
    re = h / np.sqrt(np.pi)
    return 2.0 * np.pi * re ** (a + 2.0) / ((a + 2.0) * h**2)


def _log1d_cell_average(grid, c):
    """Exact cell average of x^2 (log|x| - c) on [-h/2, h/2]."""
    t = grid.h / 2.0
    integral = 2.0 * (t**3 * np.log(t) / 3.0 - t**3 / 9.0 - c * t**3 / 3.0)
    return integral / grid.h


def _radial_kernel_fn(kind):
    """Radial profile g(r) such that the kernel value at x is g(|x|)."""
    n, s = kind.n, kind.s
    if kind.tag in ("phi_s", "E_s"):
        return lambda r: _phi_radial(r, n, s)
    if kind.tag == "riesz_q":
        b = kind.beta
        return lambda r: r ** (b - n)
    if kind.tag == "lap_phi_s":
        if _is_log_branch(n, s):
            if n == 3:
                return lambda r: -1.0 / r**2
            if n == 2:
                return lambda r: -1.0 / r
            c = (3.0 + n) / (2.0 * n + 2.0)
            return lambda r: 2.0 * np.log(r) + 3.0 - 2.0 * c
        a = 2.0 * s - n
        return lambda r: a * (a + n - 2.0) * r ** (a - 2.0)
    raise ValueError("kernel %r has no radial profile" % (kind.tag,))


def _self_cell_average(kind, grid):
    """Analytic average of the kernel over the centered self cell."""
    n, s = kind.n, kind.s
    if kind.tag in ("phi_s", "E_s"):
        if _is_log_branch(n, s):
            if n == 1:
                return _log1d_cell_average(grid, (3.0 + n) / (2.0 * n + 2.0))
            if n == 2:
                return -_power_cell_average(1.0, grid)
            raise ValueError("no convolution support in n = 3")
        return _power_cell_average(2.0 * s - n, grid)
    if kind.tag == "riesz_q":
        return _power_cell_average(kind.beta - n, grid)
    if kind.tag == "lap_phi_s":
        if _is_log_branch(n, s):
            if n == 2:
                # -1/r
                return -_power_cell_average(-1.0, grid)
            if n == 1:
                # 2 log r + 3 - 2c; exact on [-h/2, h/2]
                t = grid.h / 2.0
                c = (3.0 + n) / (2.0 * n + 2.0)
                return 2.0 * (np.log(t) - 1.0) + 3.0 - 2.0 * c
            raise ValueError("no convolution support in n = 3")
        a = 2.0 * s - n
        return a * (a + n - 2.0) * _power_cell_average(a - 2.0, grid)
    if kind.tag == "hess_phi_s":
        i, j = kind.ij
        if i != j:
            # odd in x_i and x_j: averages to zero on the symmetric cell
            return 0.0
        if _is_log_branch(n, s):
            if n == 1:
                kind_l = KernelKind("lap_phi_s", n, s)
                return _self_cell_average(kind_l, grid)
            if n == 2:
                # diagonal of hess(-r): -1/r + x_i^2/r^3, angular mean -1/(2r)
                return -0.5 * _power_cell_average(-1.0, grid)
            raise ValueError("no convolution support in n = 3")
        a = 2.0 * s - n
        if n == 1:
            return a * (a - 1.0) * _power_cell_average(a - 2.0, grid)
        # angular mean of x_i^2 / r^2 is 1/n
        coef = a + a * (a - 2.0) / n
        return coef * _power_cell_average(a - 2.0, grid)
    raise ValueError("no self-cell rule for %r" % (kind.tag,))


def _displacement_table(kind, grid, y):
    """Kernel values on the displacement lattice (2N-1 per axis)."""
    N, h, n = grid.N, grid.h, grid.n
    ax = np.arange(-(N - 1), N) * h
    if n == 1:
        coords = (ax,)
        r2 = ax**2
    else:
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        coords = (gx, gy)
        r2 = gx**2 + gy**2
    center = tuple(N - 1 for _ in range(n))
    if kind.tag == "poisson":
        r = np.sqrt(r2 + y**2)
        return _poisson_radial(r, y, kind.n, kind.s)
    if kind.tag == "E_s" and y is not None and y > 0:
        r = np.sqrt(r2 + y**2)
        return _phi_radial(r, kind.n, kind.s)
    if kind.tag == "hess_phi_s":
        i, j = kind.ij
        r2s = r2.copy()
        r2s[center] = 1.0  # placeholder, replaced by the cell average
        r = np.sqrt(r2s)
        if _is_log_branch(kind.n, kind.s):
            if kind.n == 1:
                c = (3.0 + kind.n) / (2.0 * kind.n + 2.0)
                table = 2.0 * np.log(r) + 3.0 - 2.0 * c
            elif kind.n == 2:
                table = -((i == j) * 1.0) / r + coords[i] * coords[j] / r**3
            else:
                raise ValueError("no convolution support in n = 3")
        else:
            a = 2.0 * kind.s - kind.n
            table = a * r ** (a - 2.0) * (1.0 if i == j else 0.0)
            table = table + a * (a - 2.0) * r ** (a - 4.0) * coords[i] * coords[j]
        table[center] = _self_cell_average(kind, grid)
        return table
    # radial kernels on the thin lattice
    fn = _radial_kernel_fn(kind)
    r2s = r2.copy()
    r2s[center] = 1.0
    table = fn(np.sqrt(r2s))
    table[center] = _self_cell_average(kind, grid)
    return table


def _linear_convolve(table, weights):
    """Zero-padded convolution: out[i] = sum_j table[i - j + N - 1] w[j]."""
    n = weights.ndim
    N = weights.shape[0]
    full = tuple(3 * N - 2 for _ in range(n))
    axes = tuple(range(n))
    T = np.fft.rfftn(table, full, axes=axes)
    W = np.fft.rfftn(weights, full, axes=axes)
    conv = np.fft.irfftn(T * W, full, axes=axes)
    sl = tuple(slice(N - 1, 2 * N - 1) for _ in range(n))
    return conv[sl]


def convolve_measure(kind, mu, out_grid=None, y=None):
    """Kernel potential sum_xi K(x - xi, [y]) mu(xi) h^n on the node lattice.

    Direct (zero-padded) summation with plain displacements; the self cell
    at y = 0 uses the analytic cell average.  `y` is required exactly for
    the half-space kernels.
    """
    grid = mu.grid
    if out_grid is not None and out_grid != grid:
        raise ValueError("output grid must coincide with the measure grid")
    if kind.needs_height() and (y is None or y <= 0):
        if not (kind.tag == "E_s" and y == 0.0):
            raise ValueError("kernel %r needs a positive height y" % (kind.tag,))
    if not kind.needs_height():
        y = None
    if kind.tag == "E_s" and y == 0.0:
        kind = KernelKind("phi_s", kind.n, kind.s)
        y = None
    table = _displacement_table(kind, grid, y)
    out = _linear_convolve(table, mu.weights) * grid.cell_volume
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("kernel potential overflowed")
    return Field(grid, out)


def kernel_column(kind, grid, y=None):
    """Kernel sampled against a unit point mass at the origin node."""
    w = np.zeros(grid.shape)
    w[tuple(grid.N // 2 for _ in range(grid.n))] = 1.0 / grid.cell_volume
    return convolve_measure(kind, DiscreteMeasure(grid, w), y=y)

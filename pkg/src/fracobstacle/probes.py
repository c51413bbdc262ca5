"""Refinement probes for the regularity of constrained minimizers.

The theory caps solutions at C^(1,1) smoothness in space: second
differences stay bounded under refinement while genuinely third-order
quantities diverge at a known rate.  Each probe compares a scale-invariant
functional across a refinement pair and reports the growth ratio; a
divergent control (the |x|^(3/2) cusp, or a norm of order 2s > 5/2)
keeps the probes honest about their sensitivity.
"""

import numpy as np

from .grids import Field
from .representation import _second_difference
from .spectral import h_sigma_norm

__all__ = [
    "ProbeReport",
    "c11_value",
    "c11_probe",
    "h1plus_s_probe",
    "contact_set",
    "mollify",
    "laplacian_bounds_probe",
]


class ProbeReport:
    """Outcome of one refinement probe."""

    def __init__(self, name, coarse, fine, ratio, threshold, passed,
                 vacuous=False):
        self.name = name
        self.coarse = coarse
        self.fine = fine
        self.ratio = ratio
        self.threshold = threshold
        self.passed = passed
        self.vacuous = vacuous

    def to_dict(self):
        return {
            "name": self.name,
            "coarse": self.coarse,
            "fine": self.fine,
            "ratio": self.ratio,
            "threshold": self.threshold,
            "passed": bool(self.passed),
            "vacuous": bool(self.vacuous),
        }

    def __repr__(self):
        return ("ProbeReport(%s: %.4g -> %.4g, ratio %.3f <= %.3f: %s)"
                % (self.name, self.coarse, self.fine, self.ratio,
                   self.threshold, "pass" if self.passed else "FAIL"))


def c11_value(u, radius):
    """Largest centered second difference quotient over the ball.

    Bounded under refinement exactly for C^(1,1) fields; grows like
    h^(-1/2) on the |x|^(3/2) cusp.
    """
    grid = u.grid
    mask = grid.radius() <= radius
    out = 0.0
    for i in range(grid.n):
        for j in range(i, grid.n):
            d2 = _second_difference(u.values, grid.h, i, j)
            out = max(out, float(np.max(np.abs(d2[mask]))))
    return out


def c11_probe(u_coarse, u_fine, radius, threshold=1.25):
    """Ratio of the second-difference sup across a refinement pair."""
    if u_fine.grid.h >= u_coarse.grid.h:
        raise ValueError("second field must be the finer one")
    a = c11_value(u_coarse, radius)
    b = c11_value(u_fine, radius)
    ratio = b / a if a > 0 else np.inf
    return ProbeReport("c11", a, b, ratio, threshold, ratio <= threshold)


def h1plus_s_probe(u_coarse, u_fine, s, threshold=1.25):
    """Sobolev norm of order 1 + s across a refinement pair.

    Stays bounded for minimizers (which sit below C^(1,1), hence in every
    order below 5/2); the companion order-2s column grows once 2s > 5/2
    and is reported as the sensitivity control.
    """
    if u_fine.grid.h >= u_coarse.grid.h:
        raise ValueError("second field must be the finer one")
    a = h_sigma_norm(u_coarse, 1.0 + s)
    b = h_sigma_norm(u_fine, 1.0 + s)
    ratio = b / a if a > 0 else np.inf
    rep = ProbeReport("h1plus_s", a, b, ratio, threshold, ratio <= threshold)
    rep.control = (h_sigma_norm(u_coarse, 2.0 * s),
                   h_sigma_norm(u_fine, 2.0 * s))
    return rep


def contact_set(u, p, ctol=1e-6):
    """Nodes of omega where the solution touches the obstacle."""
    return p.omega & (u.values - p.psi.values <= ctol * p.scale())


def mollify(u, eps):
    """Convolution with the compact lattice-normalized bump of radius eps.

    eps must resolve at least two cells.
    """
    grid = u.grid
    if eps < 2.0 * grid.h:
        raise ValueError("mollification radius below lattice resolution")
    if eps >= grid.L / 2.0:
        raise ValueError("mollification radius must fit the box")
    r = grid.radius()
    w = np.zeros(grid.shape)
    inside = r < eps
    w[inside] = np.exp(1.0 - 1.0 / (1.0 - (r[inside] / eps) ** 2))
    w /= np.sum(w)
    # compact support < L/2: periodic convolution equals direct summation
    w = np.roll(w, tuple(-(grid.N // 2) for _ in range(grid.n)),
                axis=tuple(range(grid.n)))
    out = np.fft.irfftn(np.fft.rfftn(w) * np.fft.rfftn(u.values), grid.shape,
                        axes=tuple(range(grid.n)))
    return Field(grid, out)


def _lattice_laplacian(values, h, n):
    return sum(_second_difference(values, h, i, i) for i in range(n))


def laplacian_bounds_probe(u, p, rho, remainder_sup=0.0, tol=1e-6):
    """Two one-sided laplacian bounds on the ball of radius rho.

    lower: min of -lap(u) + remainder_sup over the ball (>= -tol when the
    potential part of u is superharmonic there); upper: max over the
    contact set of (-lap(u)) - (-lap(psi)) (<= tol: on contact the
    solution can only be less superharmonic than the obstacle).  An empty
    contact set makes the upper bound vacuous (reported as passed).
    """
    grid = p.grid
    mask = grid.radius() <= rho
    lap_u = _lattice_laplacian(u.values, grid.h, grid.n)
    lower = float(np.min(-lap_u[mask]) + remainder_sup)
    lower_ok = lower >= -tol
    contact = contact_set(u, p) & mask
    vacuous = not bool(contact.any())
    if vacuous:
        upper = -np.inf
        upper_ok = True
    else:
        lap_psi = _lattice_laplacian(p.psi.values, grid.h, grid.n)
        upper = float(np.max((-lap_u + lap_psi)[contact]))
        upper_ok = upper <= tol
    rep = ProbeReport("laplacian_bounds", lower, upper, np.nan, tol,
                      lower_ok and upper_ok, vacuous)
    rep.lower = lower
    rep.upper = upper
    rep.lower_ok = lower_ok
    rep.upper_ok = upper_ok
    return rep

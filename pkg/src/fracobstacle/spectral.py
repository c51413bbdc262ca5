"""Fourier-multiplier operators, energies and Sobolev norms on the torus.

The operator (-Delta)^sigma acts through the symbol |xi|^(2*sigma) on the
discrete wavenumber lattice; the zero mode is annihilated.  Parseval sums
use the continuum convention: with hat(u) approximated by h^n * FFT(u), the
frequency cell weight is 1/L^n, so single-mode norms match hand values.

The pairing constant of the nonlocal seminorm is normalized to 1
throughout; energies and norms are stated in that convention.
"""

import numpy as np

from .grids import Field

__all__ = [
    "multiplier",
    "frac_laplacian",
    "hs_seminorm",
    "inner_l2",
    "energy_I0",
    "energy_I",
    "h_sigma_norm",
]

_IMAG_TOL = 1e-10


def multiplier(grid, sigma):
    """Symbol |xi|^(2*sigma) on the frequency lattice, zero mode set to 0.

    Even in xi by construction (|.| of a negation-closed lattice).
    """
    if not (0.0 < sigma <= 2.0):
        raise ValueError("sigma must lie in (0, 2], got %r" % (sigma,))
    xi2 = grid.freq_norm2()
    m = np.zeros_like(xi2)
    nz = xi2 > 0
    m[nz] = xi2[nz] ** sigma
    return m


def _fftn(values):
    return np.fft.fftn(values)


def _ifftn_real(spec):
    out = np.fft.ifftn(spec)
    scale = np.max(np.abs(out))
    # roundoff imag is bounded by eps * mean |spec|, which can exceed the
    # output scale when the inverse transform cancels strongly
    ref = max(scale, float(np.mean(np.abs(spec))), 1.0)
    if scale > 0 and np.max(np.abs(out.imag)) > _IMAG_TOL * ref:
        raise FloatingPointError("spectral operation lost realness")
    return out.real


def apply_symbol(field, symbol):
    """Apply a real even symbol on the frequency lattice to a field."""
    return Field(field.grid, _ifftn_real(symbol * _fftn(field.values)))


def frac_laplacian(u, sigma):
    """(-Delta)^sigma u via the multiplier |xi|^(2*sigma); zero mode -> 0."""
    return apply_symbol(u, multiplier(u.grid, sigma))


def inner_l2(u, v):
    """Discrete L2 pairing sum(u*v) * h^n."""
    if u.grid != v.grid:
        raise ValueError("grid mismatch in inner product")
    return float(np.sum(u.values * v.values) * u.grid.cell_volume)


def _spectral_sum(u, weight):
    grid = u.grid
    uhat2 = np.abs(_fftn(u.values)) ** 2
    # h^(2n) from hat(u) ~ h^n FFT, times 1/L^n frequency cell weight
    cellweight = grid.cell_volume**2 / grid.L**grid.n
    return float(np.sum(weight * uhat2) * cellweight)


def hs_seminorm(u, sigma):
    """Homogeneous seminorm (sum |xi|^(2 sigma) |hat u|^2 cellweight)^(1/2)."""
    return np.sqrt(_spectral_sum(u, multiplier(u.grid, sigma)))


def energy_I0(u, s):
    """Constraint-free part of the global obstacle energy: seminorm squared."""
    if not (1.0 < s < 2.0):
        raise ValueError("order s must lie in (1, 2), got %r" % (s,))
    return hs_seminorm(u, s) ** 2


def energy_I(u, f, s):
    """Bounded-domain energy 1/2 [u]^2 - <f, u>."""
    if not (1.0 < s < 2.0):
        raise ValueError("order s must lie in (1, 2), got %r" % (s,))
    if u.grid != f.grid:
        raise ValueError("grid mismatch between state and forcing")
    return 0.5 * hs_seminorm(u, s) ** 2 - inner_l2(f, u)


def h_sigma_norm(u, order):
    """Inhomogeneous Bessel-weight norm (sum (1+|xi|^2)^order |hat u|^2)^(1/2)."""
    if order < 0:
        raise ValueError("order must be nonnegative, got %r" % (order,))
    weight = (1.0 + u.grid.freq_norm2()) ** order
    return np.sqrt(_spectral_sum(u, weight))

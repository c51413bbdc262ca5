"""Degenerate-weight extension of a boundary field and its traces.

A thin-space field u extends into the half space y > 0 through the
order-s Poisson kernel.  The extension is annihilated by the weighted
bilaplacian Delta_b^2 with b = 3 - 2s, its first conormal trace
y^b U_y vanishes at y = 0, and the second conormal trace y^b d/dy
(Delta_b U) recovers the fractional operator of u up to one lattice
constant.  All traces are extrapolated from ghost-free interior stencils
on a geometrically graded level set.

Run:  python demos/extension_traces.py [--N 256]
"""

import argparse

import numpy as np

from fracobstacle import (
    Field,
    GridSpec,
    dirichlet_to_neumann,
    dtn_mode_constants,
    frac_laplacian,
    geometric_levels,
    make_obstacle,
    neumann_trace_check,
    poisson_extend,
    weighted_norms,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=256)
    ap.add_argument("--s", type=float, default=1.3)
    args = ap.parse_args()
    s = args.s

    grid = GridSpec(1, args.N, 8.0)
    levels = geometric_levels(0.00375, 1.2, 40)
    print("levels: %d, from %.4g to %.4g"
          % (levels.size, levels[0], levels[-1]))

    consts = dtn_mode_constants(grid, s, geometric_levels(0.03, 1.2, 30))
    xi = (2.0 * np.pi * np.arange(1, 6) / grid.L) ** (2.0 * s)
    shape = consts / (consts[0] / xi[0]) / xi
    print("mode-wise trace / (C |xi_k|^2s), k = 1..5:")
    print("  " + "  ".join("%.4f" % v for v in shape))

    bump = make_obstacle("bump", grid, height=1.0, radius=1.5, offset=0.0)
    U = poisson_extend(bump, s, levels)
    print("\nfirst conormal trace sup (should vanish): %.3e"
          % neumann_trace_check(U))

    trace = dirichlet_to_neumann(U).values
    target = frac_laplacian(bump, s).values
    C1 = consts[0] / xi[0]
    mask = np.abs(grid.axis_coords()) <= grid.L / 4.0
    rel = (np.linalg.norm((trace / C1 - target)[mask])
           / np.linalg.norm(target[mask]))
    print("second conormal trace vs (-Delta)^s u, rel L2 central quarter: "
          "%.3e" % rel)

    h2, h1d, third = weighted_norms(U, 2.0)
    print("\nweighted norms on the half ball of radius 2:")
    print("  H2-type %.4f, H1 seminorm of Delta_b U %.4f, "
          "third-order surrogate %.4f" % (h2, h1d, third))


if __name__ == "__main__":
    main()

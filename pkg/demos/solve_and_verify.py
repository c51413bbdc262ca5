"""Solve the bounded obstacle problem for a fractional order 1 < s < 2
and verify the optimality system.

The minimizer of 1/2 [u]_s^2 - <f, u> over {u >= psi on Omega, u = 0 off
Omega} satisfies a complementarity system: u >= psi, Au >= f on Omega,
and (u - psi)(Au - f) = 0.  The positive part of Au - f on Omega is the
reaction measure mu, supported on the contact set {u = psi}.

Run:  python demos/solve_and_verify.py [--N 128] [--s 1.3]
"""

import argparse

import numpy as np

from fracobstacle import (
    GridSpec,
    ObstacleProblem,
    complementarity_residual,
    contact_set,
    extract_measure,
    make_forcing,
    make_obstacle,
    omega_ball,
    solve,
    variational_inequality_check,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=128)
    ap.add_argument("--s", type=float, default=1.3)
    args = ap.parse_args()

    grid = GridSpec(1, args.N, 8.0)
    psi = make_obstacle("paraboloid", grid, height=1.0, curvature=0.5)
    f = make_forcing("bump", grid, amplitude=0.3, radius=1.5)
    p = ObstacleProblem(args.s, grid, psi, f, omega_ball(grid, 2.5))

    u, report = solve(p, tol=1e-11)
    print("converged: %s after %d iterations, energy %.8e"
          % (report.converged, report.iterations, report.final_energy))
    print("projected-gradient residual %.3e" % report.pg_residual)

    comp = complementarity_residual(u, p)
    print("complementarity residual %.3e (scale %.3g)" % (comp, p.scale()))

    vi = variational_inequality_check(u, p, trials=200,
                                      rng=np.random.default_rng(0))
    print("variational inequality min over 200 trials: %.3e" % vi)

    mu = extract_measure(u, p)
    contact = contact_set(u, p)
    on_contact = np.all(contact[mu.support_mask()])
    print("reaction measure mass %.6f, %d support nodes, "
          "support inside contact set: %s"
          % (mu.mass, int(mu.support_mask().sum()), on_contact))


if __name__ == "__main__":
    main()

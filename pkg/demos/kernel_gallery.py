"""Tour of the fundamental kernels used by the representation machinery.

phi_s is the thin-space fundamental solution of the order-s operator: the
generic branch is |x|^(2s-n), with logarithmic branches at s = 3/2.  E_s
extends it to the half space and traces back to phi_s at y = 0.  The
analytic Hessian and Laplacian of phi_s feed the second-derivative
representation; away from the origin the kernel is superharmonic exactly
when n >= 2s, and on those branches the Hessian is dominated by the
Laplacian with a single finite constant.

Run:  python demos/kernel_gallery.py
"""

import numpy as np

from fracobstacle.kernels import (
    eval_E_s,
    eval_phi_s,
    eval_phi_s_derivatives,
    eval_poisson,
    eval_riesz_Q,
)


def key_inequality_constant(n, s, samples, rng, rmax=1.0):
    """Fit the smallest C with |hess_ij phi_s| <= C * (-lap phi_s)."""
    C = 0.0
    for _ in range(samples):
        x = rng.standard_normal(n)
        x *= rng.uniform(0.05, rmax) / np.linalg.norm(x)
        lap, hess = eval_phi_s_derivatives(x, n, s)
        if -lap <= 0:
            return np.inf
        C = max(C, float(np.max(np.abs(hess))) / (-lap))
    return C


def main():
    print("hand values of phi_{3/2}(|x| = 1):")
    for n in (1, 2, 3):
        print("  n=%d: %+.6f" % (n, eval_phi_s([1.0] + [0.0] * (n - 1),
                                               n, 1.5)))

    print("\ntrace E_s(x, 0) = phi_s(x) on random points (n=2, s=1.3):")
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        x = rng.uniform(-2, 2, size=2)
        worst = max(worst, abs(eval_E_s(x, 0.0, 2, 1.3)
                               - eval_phi_s(x, 2, 1.3)))
    print("  max |E_s(x,0) - phi_s(x)| = %.3e" % worst)

    print("\nsuperharmonicity -lap phi_s > 0 holds iff n >= 2s:")
    for n, s in ((3, 1.3), (3, 1.5), (2, 1.5), (1, 1.3)):
        lap, _ = eval_phi_s_derivatives([0.3] + [0.0] * (n - 1), n, s)
        print("  n=%d s=%.2f: -lap = %+.4f  (%s)"
              % (n, s, -lap, "ok" if -lap >= 0 else "sign flips, 2s > n"))

    print("\nHessian-vs-Laplacian constant over 1000 samples:")
    for n, s in ((3, 1.3), (3, 1.5), (2, 1.5)):
        C = key_inequality_constant(n, s, 1000, np.random.default_rng(1))
        print("  n=%d s=%.2f: C = %.4f" % (n, s, C))

    print("\nPoisson kernel at y = 0.5 (n=1, s=1.3), raw values:")
    for x in (0.0, 0.5, 1.0, 2.0):
        print("  P(%.1f) = %.6f" % (x, eval_poisson([x], 0.5, 1, 1.3)))

    print("\nRiesz kernel Q_beta = |x|^(beta-n), n=2, beta=0.6:")
    for r in (0.5, 1.0, 2.0):
        print("  Q(%g) = %.6f" % (r, eval_riesz_Q([r, 0.0], 0.6)))


if __name__ == "__main__":
    main()

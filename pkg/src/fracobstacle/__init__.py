"""Spectral solver and verification harness for the obstacle problem of
the fractional Laplacian with order 1 < s < 2."""

from .grids import Field, GridSpec, load_field, save_field  # noqa: F401
from .spectral import (  # noqa: F401
    frac_laplacian,
    hs_seminorm,
    energy_I,
    energy_I0,
    h_sigma_norm,
)
from .kernels import (  # noqa: F401
    DiscreteMeasure,
    KernelKind,
    convolve_measure,
    kernel_column,
)
from .solver import (  # noqa: F401
    ObstacleProblem,
    solve,
    brute_force_qp,
    extract_measure,
    complementarity_residual,
    variational_inequality_check,
    make_obstacle,
    make_forcing,
    omega_ball,
)
from .representation import (  # noqa: F401
    Cutoff,
    localize_measure,
    kernel_inversion_constant,
    global_representation_check,
    local_remainder,
    second_derivative_representation_check,
    riesz_energy_identity,
    measure_density_probe,
)
from .extension import (  # noqa: F401
    HalfSpaceField,
    geometric_levels,
    poisson_extend,
    delta_b_apply,
    bilap_b_residual,
    dirichlet_to_neumann,
    dtn_mode_constants,
    neumann_trace_check,
    weighted_norms,
)
from .probes import (  # noqa: F401
    c11_probe,
    c11_value,
    h1plus_s_probe,
    contact_set,
    mollify,
    laplacian_bounds_probe,
)
from .config import ConfigError, ExperimentConfig, load_config  # noqa: F401

__version__ = "0.1.0"

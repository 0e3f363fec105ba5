"""Characterization-based tests of symmetry about zero.

If X and Y are i.i.d. and (X - Y)^2 is distributed like (X + Y)^2, the common
law is symmetric about zero.  This package implements the two tests built on
that fact (an integral-type U-statistic J_n and a Kolmogorov-type statistic
K_n), the spectral analysis of their degenerate limit laws, approximate-slope
efficiency indices against seven departure families, and seeded Monte Carlo
power studies, all behind a FastAPI service with a thin CLI client.
"""

from .distributions import (
    AlternativeFamily,
    NullDistribution,
    alternative_family,
    null_distribution,
    sample_alternative,
    sample_null,
    score_h,
)
from .efficiency import (
    QuadratureError,
    SlopeResult,
    b_j_coefficient,
    b_k_profile,
    index_table,
    slope_jn,
    slope_kn,
)
from .simulation import (
    PowerReport,
    PowerStudyConfig,
    classical_power,
    run_study_suite,
    warp_speed_power,
)
from .spectral import (
    DiscreteOperator,
    EigenCurve,
    KernelPhi,
    KernelXi,
    PoleProximityError,
    SpectralDomainError,
    build_discrete_operator,
    fundamental_equation_residual,
    kappa0_uniform_closed_form,
    largest_abs_eigenvalue,
    nu1_curve,
    psi1,
    psi2,
    sample_limit_null_jn,
    solve_uniform_eigenvalues,
    uniform_eigen_equation,
)
from .statistics import (
    TestReport,
    bootstrap_p_value,
    compute_jn,
    compute_kn,
    compute_ks_symmetry,
    compute_sign_statistic,
)

__version__ = "0.1.0"

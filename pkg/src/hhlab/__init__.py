"""Numerical laboratory for the Hardy-Henon parabolic equation.

Mild solutions of du/dt - Lap(u) = a |x|^gamma |u|^(alpha-1) u are built
by Picard iteration of the Duhamel map on radially symmetric fields, with
well-posedness bookkeeping, weighted Lorentz norms, self-similar profile
extraction, and large-time decay-rate verification.
"""

from .exponents import (
    AdmissibilityReport,
    CriticalityReport,
    ModelParams,
    SpaceIndex,
    ThetaInterval,
    admissible_wellposed_pair,
    beta_function,
    classify_pair,
    critical_q,
    fujita_exponent,
    theta_interval_complex,
    theta_interval_linear,
)
from .fields import ExactPower, PowerTail, RadialField
from .fitting import DecayFit, decay_slope_fit
from .grid import RadialGrid
from .lorentz import (
    DivergentNormError,
    Rearrangement,
    decreasing_rearrangement,
    distribution_function,
    embedding_check,
    holder_product_check,
    lorentz_quasi_norm,
    weighted_lebesgue_norm,
)
from .semigroup import (
    PropagatorCache,
    apply_semigroup,
    gaussian_kernel_value,
    radial_kernel_value,
    smoothing_estimate_probe,
)
from .solver import (
    SolverConfig,
    Trajectory,
    blowup_monitor,
    duhamel_integral,
    kato_norm,
    nonlinearity,
    picard_iterate,
    regularity_upgrade_probe,
    solve_system,
)
from .selfsimilar import (
    ProfileSnapshot,
    SingularSteadyState,
    construct_self_similar,
    homogeneous_data,
    invariance_deviation,
    profile_extract,
    singular_steady_state,
    steady_state_residual,
)
from .asymptotics import (
    ComparisonReport,
    complex_combined_check,
    linear_behavior_check,
    nonexistence_certificate,
    nonlinear_behavior_check,
    stability_check,
)

__version__ = "0.1.0"

"""Equilibria and optimal prize design for rank-order contests.

Agents draw a (quality, cost) type and choose only whether to participate;
prizes go to the highest-quality participants. The package computes the
threshold equilibrium and the optimal prize split for homogeneous costs,
breakpoint comparative statics and the Poisson large-population limit, and
equilibrium brackets plus Monte Carlo objective experiments for jointly
distributed types.
"""

from .compstat import (
    BreakpointTable,
    ConvergenceTable,
    PoissonLimit,
    asymptotic_scan,
    bound_audit,
    breakpoints,
    classify_by_breakpoints,
    finite_to_limit_convergence,
    poisson_limit,
    poisson_value,
    q_polynomial,
    wta_optimal,
)
from .contest import (
    PrizeVector,
    SimpleLottery,
    WTransform,
    contest_from_dict,
    contest_to_dict,
    expected_prize,
    expected_prize_curve,
    lottery_decomposition,
    make_simple_contest,
    validate_contest,
    w_inverse,
    w_transform,
)
from .distributions import (
    EmpiricalTypes,
    PiecewiseLinearCDF,
    RectComponent,
    RectMixture,
    Uniform,
    cdf,
    discretize,
    distribution_from_dict,
    distribution_to_dict,
    low_cost_max_cdf,
    median_max_quality,
    quantile,
    sample_joint,
)
from .errors import (
    ContestForgeError,
    NumericalError,
    ValidationError,
)
from .heterogeneous import (
    EquilibriumBracket,
    ObjectiveEstimate,
    ParticipationProfile,
    beat_probability,
    best_response,
    equilibrium,
    example_obj,
    expected_payoff,
    fosd_check,
    highcost_subequilibrium,
    is_sub_equilibrium,
    mc_objective,
    median_subequilibrium,
    output_cdf,
    rule_from_profile,
    wta_approx_experiment,
)
from .homogeneous import (
    DesignResult,
    ThresholdEquilibrium,
    brute_force_design_check,
    c_star,
    equilibrium_threshold,
    feasible,
    optimal_contest,
    optimal_prize_count,
    participation_rate,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ContestForgeError",
    "ValidationError",
    "NumericalError",
    "PrizeVector",
    "WTransform",
    "SimpleLottery",
    "validate_contest",
    "make_simple_contest",
    "expected_prize",
    "expected_prize_curve",
    "w_transform",
    "w_inverse",
    "lottery_decomposition",
    "contest_to_dict",
    "contest_from_dict",
    "Uniform",
    "PiecewiseLinearCDF",
    "RectComponent",
    "RectMixture",
    "EmpiricalTypes",
    "cdf",
    "quantile",
    "sample_joint",
    "low_cost_max_cdf",
    "median_max_quality",
    "discretize",
    "distribution_to_dict",
    "distribution_from_dict",
    "ThresholdEquilibrium",
    "DesignResult",
    "participation_rate",
    "equilibrium_threshold",
    "optimal_prize_count",
    "c_star",
    "feasible",
    "optimal_contest",
    "brute_force_design_check",
    "BreakpointTable",
    "PoissonLimit",
    "ConvergenceTable",
    "q_polynomial",
    "breakpoints",
    "classify_by_breakpoints",
    "wta_optimal",
    "poisson_value",
    "poisson_limit",
    "finite_to_limit_convergence",
    "asymptotic_scan",
    "bound_audit",
    "ParticipationProfile",
    "EquilibriumBracket",
    "ObjectiveEstimate",
    "beat_probability",
    "expected_payoff",
    "best_response",
    "equilibrium",
    "is_sub_equilibrium",
    "output_cdf",
    "fosd_check",
    "rule_from_profile",
    "mc_objective",
    "median_subequilibrium",
    "highcost_subequilibrium",
    "wta_approx_experiment",
    "example_obj",
]

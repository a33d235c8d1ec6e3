"""Entropic value-at-risk for discrete laws: primal and dual solvers, the
Lambda distortion, comonotone bounds and CVaR-mixture representations."""

__version__ = "0.1.0"

from .dist import (
    DiscreteDistribution,
    DistributionError,
    InputError,
    RiskLevel,
    ess_inf,
    from_samples,
    from_weighted,
    independent_sum,
    mean,
    min_mass,
    parse_rows,
    quantile,
    quantile_integral,
    read_distribution,
)
from .distortion import (
    DistortionFunction,
    SandwichReport,
    WitnessReport,
    choquet_utility,
    cvar,
    in_scenario_set,
    noncomonotone_witness,
    quantile_utility,
    sandwich,
    u_lambda,
)
from .entropy_dual import (
    DualSolution,
    ScenarioDensity,
    entropy_profile,
    evar_dual,
    gibbs_tilt,
    relative_entropy,
)
from .errors import InconsistencyError, SolverError
from .indicator import (
    F,
    F_partials,
    IndicatorPoint,
    LambdaCurve,
    lambda_derivative,
    lambda_of,
    lambda_second_derivative,
    lambda_values,
)
from .kusuoka import (
    DecreasingDensity,
    KusuokaMeasure,
    KusuokaReport,
    cvar_mixture,
    decreasing_rearrangement,
    density_entropy,
    density_expectation,
    density_to_measure,
    kusuoka_from_dual,
    measure_to_density,
)
from .primal import PrimalSolution, evar_primal, primal_objective

"""Analytics module: search propagators and the market-particle density solver"""

from .density import (
    SURFACE_GRIDS,
    Coefficient,
    DensityField,
    DiracMass,
    GaussianBump,
    GaussianSource,
    InflowRegime,
    InflowSource,
    InterauctionParams,
    InterauctionRegime,
    PointSource,
    ScenarioClock,
    ScenarioParams,
    SingularKernelError,
    evaluate_field,
    heat_kernel,
    high_reaction_density,
    impact_source,
    interauction_density,
    interauction_density_unsimplified,
    large_demand_density,
    master_density,
    multiplying_factor_surface,
    resource_gradient,
    resource_gradient_polynomial,
    steady_state_density,
    surface_to_frame,
    sustained_inflow_density,
)
from .finite_difference import FiniteDifferenceResult, solve_finite_difference
from .search import (
    ScalingEstimate,
    SearchModel,
    asymptotic_propagator,
    ballistic_scaling_function,
    cauchy_propagator,
    flight_time_laplace,
    make_grid,
    propagator_fl,
    propagator_grid,
    scaling_generating_function,
    survival_laplace,
    trade_density_fl,
    velocity_characteristic,
)

__all__ = [
    "Coefficient",
    "DensityField",
    "DiracMass",
    "FiniteDifferenceResult",
    "GaussianBump",
    "GaussianSource",
    "InflowRegime",
    "InflowSource",
    "InterauctionParams",
    "InterauctionRegime",
    "PointSource",
    "SURFACE_GRIDS",
    "ScalingEstimate",
    "ScenarioClock",
    "ScenarioParams",
    "SearchModel",
    "SingularKernelError",
    "asymptotic_propagator",
    "ballistic_scaling_function",
    "cauchy_propagator",
    "evaluate_field",
    "flight_time_laplace",
    "heat_kernel",
    "high_reaction_density",
    "impact_source",
    "interauction_density",
    "interauction_density_unsimplified",
    "large_demand_density",
    "make_grid",
    "master_density",
    "multiplying_factor_surface",
    "propagator_fl",
    "propagator_grid",
    "resource_gradient",
    "resource_gradient_polynomial",
    "scaling_generating_function",
    "solve_finite_difference",
    "steady_state_density",
    "surface_to_frame",
    "survival_laplace",
    "sustained_inflow_density",
    "trade_density_fl",
    "velocity_characteristic",
]

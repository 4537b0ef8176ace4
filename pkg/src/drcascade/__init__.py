"""Distributionally robust cascading-failure risk for consensus networks.

The package computes, for a noisy time-delayed linear consensus network,
the worst-case conditional risk that one agent's failure propagates to
another, where the worst case ranges over all stationary laws consistent
with bounded uncertainty in the diffusion coefficient, the time delay,
or the edge weights. Closed forms, analytic bounds, and two independent
verification oracles (a delayed-SDE simulator and adaptive quadrature)
are included.
"""

from .ambiguity import (
    FAMILIES,
    AmbiguitySpec,
    CriticalLambda,
    ambiguity_delay,
    ambiguity_diffusion,
    ambiguity_weights_uniform_delay,
    ambiguity_weights_zero_delay,
    critical_lambda,
    mode_response,
)
from .bounds import (
    BoundReport,
    EigenEnvelope,
    eigen_envelope,
    fundamental_limit,
    kappa,
    lower_bound,
    profile_bounds,
    single_agent_bounds,
    single_agent_limit,
    upper_bound,
)
from .covariance import (
    NetworkParams,
    PairMarginal,
    SteadyCovariance,
    check_stability,
    export_covariance_csv,
    modal_variance,
    pair_marginal,
    steady_covariance,
)
from .errors import (
    ConditioningWarning,
    ConfigError,
    DegenerateMarginal,
    DisconnectedGraph,
    DrCascadeError,
    DuplicateEdge,
    EigenFailure,
    InvalidRadius,
    KernelMismatch,
    NonpositiveWeight,
    NumericalUnderflow,
    OutOfRange,
    PerturbationTooLarge,
    QuadratureNonconvergence,
    RegimeStraddle,
    SelfLoop,
    TooFewSamples,
    UnstableDelay,
)
from .graphs import (
    IncidenceFactors,
    Spectrum,
    WeightedGraph,
    build_graph,
    generate_topology,
    incidence_factorization,
    laplacian,
    load_graph,
    save_graph,
    spectral_decompose,
    spectrum_of,
)
from .oracles import (
    McEstimate,
    QuadratureConfig,
    brute_force_dr_risk,
    conditional_expectation_mc,
    conditional_expectation_quadrature,
    folded_normal_mean,
)
from .risk import (
    AgentRisk,
    DrRiskResult,
    FailureEvent,
    RiskProfile,
    approx_expectation,
    approx_h_terms,
    conditional_expectation_approx,
    conditional_expectation_exact,
    dr_risk_pair,
    risk_profile,
    single_agent_dr_risk,
)
from .sde import (
    EmpiricalStats,
    SimConfig,
    default_sim_config,
    empirical_covariance,
    simulate,
    worker_count,
)

__version__ = "0.1.0"

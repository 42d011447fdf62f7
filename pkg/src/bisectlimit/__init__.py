"""Exact and sampled tools for hybrid max-bisection values of configuration-model multigraphs."""
from .config_model import (
    EdgeTypeCounts,
    HalfEdge,
    Matching,
    MultiGraph,
    classify_matching,
    enumerate_class,
    feasible_triples,
    graph_of_matching,
    is_feasible,
    sample_complete_matching,
    sample_in_class,
)
from .cuts import (
    Bisection,
    CutResult,
    LocalSearchParams,
    SignedGraph,
    alpha_cut,
    constrained_max_bisection,
    local_search_bisection,
    max_bisection,
    max_cut,
    min_bisection,
    signed_max_bisection,
)
from .degrees import (
    DegreeDistribution,
    DegreeSequence,
    empirical_distribution,
    sample_iid_degrees,
    truncated_poisson,
    wasserstein,
)
from .errors import (
    BisectLimitError,
    ConfigError,
    FeasibilityError,
    InvalidInputError,
    ParityError,
    PreconditionError,
    ResourceGuardError,
)
from .experiments import ExperimentConfig, ResultRecord, emit_outputs, run_experiment
from .hybrid import (
    ConstrainedHybridParam,
    HybridEstimate,
    HybridParam,
    constrained_hybrid_exact,
    constrained_hybrid_mc,
    hybrid_exact,
    hybrid_mc,
)
from .interpolation import (
    CheckReport,
    F_value,
    check_desired_inequality,
    check_interpolation_inequality,
    check_lipschitz_F,
    check_local_superadd,
    check_subadditivity,
    half_edge_classes,
    increment_bruteforce,
    increment_formula,
    psi,
)

__version__ = "0.1.0"

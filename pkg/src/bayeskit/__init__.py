"""Bayesian inference toolkit.

Four cooperating layers:

* :mod:`bayeskit.odds`: posterior probabilities over a complete class of
  discrete causes, Bayes factors, and odds updating in log space.
* :mod:`bayeskit.partition`: the same updating done in exact rational
  arithmetic on counts of equiprobable cases, including the ratio
  identity that ties posterior, likelihood and prior ratios together.
* :mod:`bayeskit.measurement` and :mod:`bayeskit.expressions`: Gaussian
  measurement errors and the small formula language used to predict
  observed values from parameters and covariates.
* :mod:`bayeskit.grid`: flat-prior posterior densities tabulated over
  rectangular parameter grids, with normalization, marginals, moments
  and the chi-squared view of the same surface.

The ``bayeskit`` command line exposes the same functionality as JSON
reports; see :mod:`bayeskit.cli`.
"""

from .exceptions import (
    BayeskitError,
    DegeneratePosteriorError,
    DomainError,
    EvaluationError,
    ExpressionError,
    ImpossibleEventError,
    InconsistentEvidenceError,
    IndeterminateOddsError,
    InvalidPredictionError,
    InvertedIntervalError,
    ParseError,
    UnboundNameError,
    UndefinedFactorError,
    UnknownEventError,
    UnknownFunctionError,
    ValidationError,
)
from .expressions import (
    FUNCTIONS,
    Binary,
    Call,
    GridAxis,
    ModelExpression,
    Name,
    Negate,
    Node,
    Number,
    ParameterSpace,
    evaluate,
    load_model,
    parse,
    predictions,
    to_source,
)
from .grid import (
    MapOnBoundaryWarning,
    MarginalDensity,
    PosteriorGrid,
    PosteriorSummary,
    WeightedMeanResult,
    axis_nodes,
    chi_squared,
    chi_squared_grid,
    evaluate_posterior,
    map_estimate,
    marginal,
    moments,
    normalization_lambda,
    weighted_mean,
    write_grid_csv,
)
from .measurement import (
    GaussianError,
    ObservationRecord,
    ObservationSet,
    interval_probability,
    log_omega,
    log_phi_density,
    phi_density,
)
from .odds import (
    CausalSystem,
    EvidenceItem,
    OddsState,
    bayes_factor,
    odds_from_posteriors,
    posterior_over_causes,
    sequential_update,
    update_odds,
)
from .partition import HYPOTHESIS, OTHER, RIVAL, CasePartition, TheoremReport

__version__ = "0.1.0"

__all__ = [
    "BayeskitError",
    "Binary",
    "Call",
    "CasePartition",
    "CausalSystem",
    "DegeneratePosteriorError",
    "DomainError",
    "EvaluationError",
    "EvidenceItem",
    "ExpressionError",
    "FUNCTIONS",
    "GaussianError",
    "GridAxis",
    "HYPOTHESIS",
    "ImpossibleEventError",
    "InconsistentEvidenceError",
    "IndeterminateOddsError",
    "InvalidPredictionError",
    "InvertedIntervalError",
    "MapOnBoundaryWarning",
    "MarginalDensity",
    "ModelExpression",
    "Name",
    "Negate",
    "Node",
    "Number",
    "OTHER",
    "ObservationRecord",
    "ObservationSet",
    "OddsState",
    "ParameterSpace",
    "RIVAL",
    "ParseError",
    "PosteriorGrid",
    "PosteriorSummary",
    "TheoremReport",
    "UnboundNameError",
    "UndefinedFactorError",
    "UnknownEventError",
    "UnknownFunctionError",
    "ValidationError",
    "WeightedMeanResult",
    "axis_nodes",
    "bayes_factor",
    "chi_squared",
    "chi_squared_grid",
    "evaluate",
    "evaluate_posterior",
    "interval_probability",
    "load_model",
    "log_omega",
    "log_phi_density",
    "map_estimate",
    "marginal",
    "moments",
    "normalization_lambda",
    "odds_from_posteriors",
    "parse",
    "phi_density",
    "posterior_over_causes",
    "predictions",
    "sequential_update",
    "to_source",
    "update_odds",
    "weighted_mean",
    "write_grid_csv",
]

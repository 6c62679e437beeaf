"""Bayesian inference for population Markov jump processes.

Thin wrapper over the compiled `_pmjp` extension: exact-in-expectation
likelihood estimates via random truncations, pseudo-marginal and Gibbs
samplers, the Gillespie simulator and convergence diagnostics.
"""

from ._pmjp import (
    Model,
    ParseError,
    ResourceError,
    Trajectory,
    ValidationError,
    builtin_model,
    cv_diagnostic,
    decay_for_expected_terms,
    ess,
    expected_terms,
    f_levels,
    f_n,
    log_likelihood_estimate,
    observe,
    parse_model,
    psrf,
    relative_error,
    run_chain,
    serialize_model,
    simulate,
)

__all__ = [
    "Model",
    "ParseError",
    "ResourceError",
    "Trajectory",
    "ValidationError",
    "builtin_model",
    "cv_diagnostic",
    "decay_for_expected_terms",
    "ess",
    "expected_terms",
    "f_levels",
    "f_n",
    "log_likelihood_estimate",
    "observe",
    "parse_model",
    "psrf",
    "relative_error",
    "run_chain",
    "serialize_model",
    "simulate",
]

"""Poisson GLM variants, a from-scratch GBM, and seeded scenario generators.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from treeglm._core import (
    GbmModel,
    MixtureModel,
    MultirespModel,
    SubmodelParams,
    expand_interactions,
    fit_gbm,
    fit_glm,
    fit_interaction_glm,
    fit_mixture,
    fit_multiresp,
    generate,
    hypercube_equivalence_check,
    k_values_mixture,
    k_values_multiresp,
    load_gbm,
    mae,
    max_useful_submodels_mixture,
    max_useful_submodels_multiresp,
    rmse,
    run_experiment,
)

__all__ = [
    "GbmModel",
    "MixtureModel",
    "MultirespModel",
    "SubmodelParams",
    "expand_interactions",
    "fit_gbm",
    "fit_glm",
    "fit_interaction_glm",
    "fit_mixture",
    "fit_multiresp",
    "generate",
    "hypercube_equivalence_check",
    "k_values_mixture",
    "k_values_multiresp",
    "load_gbm",
    "mae",
    "max_useful_submodels_mixture",
    "max_useful_submodels_multiresp",
    "rmse",
    "run_experiment",
]

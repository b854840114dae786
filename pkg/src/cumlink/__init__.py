"""Cumulative link models for ordinal responses.

Fits proportional-odds style regressions (flat and random-intercept),
runs the matching inference toolkit (Wald, likelihood ratio, equal-slopes
diagnostics, contrasts, bootstrap intervals), carries a registry of the
classical tests these models replace, and simulates ordinal data from
explicit latent forward models.
"""

from .archive import (
    FORMAT_VERSION,
    archive_dict,
    load_archive,
    parse_archive,
    save_archive,
    to_json,
)
from .baselines import (
    REGISTRY,
    RegistryEntry,
    TestResult,
    friedman,
    kruskal_wallis,
    oneway_anova,
    registry_entry,
    wilcoxon_rank_sum,
    wilcoxon_signed_rank,
)
from .clm import (
    ClmSpec,
    Convergence,
    FitError,
    FittedClm,
    NonConvergenceError,
    SeparationError,
    fit_clm,
    modal_category,
)
from .clmm import FittedClmm, VarianceComponent, fit_clmm
from .data import (
    DataWarning,
    Dataset,
    Factor,
    FrequencyTable,
    OrdinalScale,
    drop_unobserved_boundary_categories,
    expand_frequency_table,
    load_csv,
    relevel,
)
from .formula import FormulaError, FormulaSpec, parse_formula
from .inference import (
    BootstrapCI,
    BrantPredictor,
    BrantResult,
    ContrastResult,
    LrtResult,
    WaldRow,
    bootstrap_response_scale_ci,
    brant_test,
    interpret_coefficient,
    interpret_values,
    likelihood_ratio_test,
    pairwise_contrasts,
    wald_table,
)
from .links import LINKS, Link, cloglog, get_link, logit, probit
from .simulate import (
    ForwardModel,
    cutpoints_from_proportions,
    forward_probabilities,
    sample_ordinal,
    simulate_dataset,
    simulate_hierarchical,
)
from .summary import summarize

__version__ = "1.0.0"

__all__ = [
    "FORMAT_VERSION",
    "LINKS",
    "REGISTRY",
    "BootstrapCI",
    "BrantPredictor",
    "BrantResult",
    "ClmSpec",
    "ContrastResult",
    "Convergence",
    "DataWarning",
    "Dataset",
    "Factor",
    "FitError",
    "FittedClm",
    "FittedClmm",
    "FormulaError",
    "FormulaSpec",
    "ForwardModel",
    "FrequencyTable",
    "Link",
    "LrtResult",
    "NonConvergenceError",
    "OrdinalScale",
    "RegistryEntry",
    "SeparationError",
    "TestResult",
    "VarianceComponent",
    "WaldRow",
    "archive_dict",
    "bootstrap_response_scale_ci",
    "brant_test",
    "cloglog",
    "cutpoints_from_proportions",
    "drop_unobserved_boundary_categories",
    "expand_frequency_table",
    "fit_clm",
    "fit_clmm",
    "forward_probabilities",
    "friedman",
    "get_link",
    "interpret_coefficient",
    "interpret_values",
    "kruskal_wallis",
    "likelihood_ratio_test",
    "load_archive",
    "load_csv",
    "logit",
    "modal_category",
    "oneway_anova",
    "pairwise_contrasts",
    "parse_archive",
    "parse_formula",
    "probit",
    "registry_entry",
    "relevel",
    "sample_ordinal",
    "save_archive",
    "simulate_dataset",
    "simulate_hierarchical",
    "summarize",
    "to_json",
    "wald_table",
    "wilcoxon_rank_sum",
    "wilcoxon_signed_rank",
    "__version__",
]

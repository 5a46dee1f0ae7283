"""Monte Carlo inference for binary outcomes with nonignorable missingness.

Partially identified treatment effects under combinable, interpretable
restrictions (instrument-style odds-ratio constraints, missing-data bias
direction), acceptance-rate Bayes factors quantifying the evidence for those
restrictions, and a Bayesian selection-model benchmark.
"""

__version__ = "0.1.0"

from .cells import (
    CELL_ORDER,
    CellCounts,
    CellIndex,
    CellParams,
    CountsTable,
    DEFAULT_HYPER,
    DirichletHyper,
    IntervalSummary,
    MissingCellParam,
    ObservedCellParams,
    PosteriorDraws,
    ZMarginParam,
)
from .evidence import AcceptanceReport, bayes_factor, falsifiability_check, prior_acceptance_rate
from .heckman import (
    GibbsConfig,
    HeckmanChain,
    HeckmanData,
    HeckmanParams,
    HeckmanState,
    bivariate_normal_cdf,
    gibbs_step,
    heckman_cell_probs,
    heckman_fit,
    truncated_normal,
)
from .restrictions import (
    INFEASIBLE,
    AssumptionKind,
    AssumptionSpec,
    AttemptBudget,
    BudgetExhausted,
    OmegaInterval,
    exact_iv_omega_intervals,
    exact_iv_posbias_intervals,
    imperfect_iv_omega_bounds,
    posbias_omega_floor,
    sample_exact_iv,
    sample_exact_iv_posbias,
    sample_lognormal_betabias,
    sample_lognormal_iv,
    sample_restricted,
    sample_threshold_iv,
)
from .saturated import (
    conjugate_update,
    credible_interval,
    fit_saturated,
    mar_estimate,
    risk_difference,
    risk_difference_bounds,
    risk_difference_draws,
    sample_saturated_posterior,
)
from .simulate import (
    Dataset,
    DgpSpec,
    ModelSpec,
    StudyResult,
    default_models,
    gen_heckman_data,
    gen_saturated_data,
    prior_ar_sweep,
    run_study,
)

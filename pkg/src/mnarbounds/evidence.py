"""Acceptance-rate evidence: prior rates, Bayes factors, falsifiability.

Because every restricted posterior is sampled by rejection from the
unrestricted one, the Bayes factor comparing the unrestricted model to a
restricted model is simply the ratio of the sampler's acceptance rate under
the prior (zero counts) to its acceptance rate under the data.  A value
below 1 favours the restricted model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .cells import CountsTable, ObservedCellParams, PosteriorDraws
from .restrictions import (
    AssumptionKind,
    AssumptionSpec,
    AttemptBudget,
    BudgetExhausted,
    INFEASIBLE,
    Infeasible,
    exact_iv_omega_intervals,
    exact_iv_posbias_intervals,
    imperfect_iv_omega_bounds,
    run_prior_attempts,
    sample_restricted,
)
from .rng import derive_seed

__all__ = [
    "AcceptanceReport",
    "prior_acceptance_rate",
    "bayes_factor",
    "falsifiability_check",
    "clear_prior_cache",
]

#: Write-once cache of prior acceptance rates, keyed by the full spec plus
#: the Monte Carlo settings (recomputation is idempotent).
_PRIOR_CACHE: dict[tuple, tuple[float, float]] = {}


def clear_prior_cache() -> None:
    _PRIOR_CACHE.clear()


def _product_rate(stats: Sequence[tuple[int, int]]) -> tuple[float, float]:
    """Joint rate and delta-method SE from per-arm (accepted, attempted)."""
    rate = 1.0
    rel_var = 0.0
    for acc, att in stats:
        if att == 0:
            return 0.0, 0.0
        r = acc / att
        rate *= r
        if acc > 0:
            rel_var += (1.0 - r) / (r * att)  # (se_r / r)^2 for binomial r
    if rate == 0.0:
        return 0.0, 0.0
    return rate, rate * math.sqrt(rel_var)


def prior_acceptance_rate(spec: AssumptionSpec, attempts: int, seed: int) -> tuple[float, float]:
    """Acceptance rate of ``spec``'s sampler against zero counts, with SE.

    Runs ``attempts`` proposals per treatment arm; the returned rate is the
    product of the per-arm rates.  Results are cached on (spec, attempts,
    seed).  The unrestricted kind accepts everything.
    """
    if attempts < 10_000:
        raise ValueError("prior acceptance rates need at least 1e4 attempts")
    if spec.kind == AssumptionKind.NONE:
        return 1.0, 0.0
    key = (spec, attempts, seed)
    if key not in _PRIOR_CACHE:
        stats = run_prior_attempts(spec, attempts, seed)
        _PRIOR_CACHE[key] = _product_rate(stats)
    return _PRIOR_CACHE[key]


@dataclass(frozen=True)
class AcceptanceReport:
    """Evidence summary for one restriction on one dataset."""

    spec: AssumptionSpec
    prior_ar: float
    prior_ar_se: float
    posterior_ar: float
    posterior_ar_se: float
    bayes_factor: float
    bayes_factor_se: float
    computed: bool

    def to_json_dict(self) -> dict:
        return {
            "kind": self.spec.kind.value,
            "prior_ar": self.prior_ar,
            "prior_ar_se": self.prior_ar_se,
            "posterior_ar": self.posterior_ar,
            "posterior_ar_se": self.posterior_ar_se,
            "bf": self.bayes_factor,
            "computed": self.computed,
        }


def _smoothed_upper_rate(stats) -> float:
    """Upper-leaning joint rate with add-one smoothing, for lower-bound BFs."""
    rate = 1.0
    for acc, att in stats:
        if att == 0:
            return 1.0
        rate *= min(1.0, (acc + 1.0) / att)
    return rate


def bayes_factor(
    spec: AssumptionSpec,
    counts: CountsTable,
    draws_target: int,
    seed: int,
    *,
    prior_attempts: int = 200_000,
    prior_seed: int | None = None,
    bf_fail_threshold: float = 10.0,
    qz_fixed: float | None = None,
) -> tuple[AcceptanceReport, PosteriorDraws | None]:
    """Run the restricted sampler on ``counts`` and report the Bayes factor.

    BF = prior acceptance rate / posterior acceptance rate; values above 1
    favour the unrestricted model.  A budget exhaustion is folded into the
    report (``computed=False``) with the BF given as a smoothed lower bound,
    and the accepted draws, when complete, come back alongside the report.

    ``prior_seed`` defaults to ``seed``; studies pass a shared value so the
    cached prior rate is reused across replicates.
    """
    if spec.kind == AssumptionKind.NONE:
        draws = sample_restricted(spec, counts, AttemptBudget(required=draws_target), seed, qz_fixed=qz_fixed)
        report = AcceptanceReport(spec, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, True)
        return report, draws

    if prior_seed is None:
        prior_seed = seed
    prior, prior_se = prior_acceptance_rate(spec, prior_attempts, derive_seed(prior_seed, "prior-ar"))
    budget = AttemptBudget.from_prior_rate(draws_target, prior, bf_fail_threshold)
    try:
        draws = sample_restricted(spec, counts, budget, seed, qz_fixed=qz_fixed)
        stats = tuple(zip(draws.stratum_accepted, draws.stratum_attempted))
        post, post_se = _product_rate(stats)
        bf = prior / post
        rel = (prior_se / prior) ** 2 if prior > 0 else 0.0
        rel += (post_se / post) ** 2 if post > 0 else 0.0
        report = AcceptanceReport(spec, prior, prior_se, post, post_se, bf, bf * math.sqrt(rel), True)
        return report, draws
    except BudgetExhausted as failure:
        stats = tuple(zip(failure.stratum_accepted, failure.stratum_attempted))
        post, post_se = _product_rate(stats)
        bf_lower = prior / _smoothed_upper_rate(stats)
        report = AcceptanceReport(spec, prior, prior_se, post, post_se, bf_lower, float("nan"), False)
        return report, None


def falsifiability_check(
    q: Sequence[ObservedCellParams],
    t_l: float = 2.0 / 3.0,
    t_h: float = 1.5,
) -> dict[AssumptionKind, bool]:
    """Which restrictions remain possible at the given observed-data values.

    The exact-instrument kinds are refuted when either arm's observed Y=1
    masses differ by more than the available missing mass; the threshold kind
    when the clipped odds-ratio windows are empty.  The smooth kinds place
    positive density everywhere and can never be refuted outright.
    """
    flags: dict[AssumptionKind, bool] = {AssumptionKind.NONE: True}

    exact_feasible = True
    for x in (0, 1):
        qz0, qz1 = q[2 * x], q[2 * x + 1]
        if qz1.q11 - qz0.q11 > qz0.q0dot or qz0.q11 - qz1.q11 > qz1.q0dot:
            exact_feasible = False
    flags[AssumptionKind.EXACT_IV] = exact_feasible

    flags[AssumptionKind.EXACT_IV_POSBIAS] = all(
        not isinstance(s.omega_z1, Infeasible) for s in exact_iv_posbias_intervals(q)
    )

    threshold_feasible = True
    for x in (0, 1):
        iv_z0, iv_z1 = imperfect_iv_omega_bounds(q[2 * x], q[2 * x + 1], t_l, t_h)
        if iv_z0 is INFEASIBLE or iv_z1 is INFEASIBLE:
            threshold_feasible = False
    flags[AssumptionKind.THRESHOLD_IV] = threshold_feasible

    flags[AssumptionKind.LOGNORMAL_IV] = True
    flags[AssumptionKind.LOGNORMAL_BETABIAS] = True
    return flags

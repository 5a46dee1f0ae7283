"""Restricted priors over the missing-data splits, and their rejection samplers.

Every restriction lives on top of the saturated model and constrains, per
treatment arm x, how the two cells' missing-data splits ``omega_{x,0}`` and
``omega_{x,1}`` may relate to the observed-data parameters:

* ``EXACT_IV`` pins the (Y, Z) odds ratio within each arm to exactly 1.  The
  constraint is a measure-zero set, so the sampler draws ``omega_{x,1}``
  freely and solves for ``omega_{x,0}``; a proposal is accepted when the
  solved value is a probability.
* ``THRESHOLD_IV`` keeps the within-arm odds ratio inside ``(t_l, t_h)``.
* ``LOGNORMAL_IV`` weights draws by a normal density on the log odds ratio.
* ``EXACT_IV_POSBIAS`` adds to ``EXACT_IV`` the requirement that missing rows
  are more often Y=1 than observed rows in every cell.
* ``LOGNORMAL_BETABIAS`` replaces both hard constraints with smooth densities:
  the lognormal odds-ratio weight plus a Beta weight on the (rescaled) gap
  between each cell's missing-row and observed-row Y=1 rates.

Arms are sampled and retried independently; the joint acceptance rate is the
product of the per-arm rates, and accepted draws are emitted in attempt order
so output is reproducible for a fixed seed.

Proposal measures.  All samplers propose each cell's observed simplex from a
Dirichlet whose third pseudo-count is reduced by one, which absorbs the
``1/q0dot`` reparameterization factor per cell appearing in the restricted
joint densities; the positive-bias sampler is the one exception and proposes
from the unreduced conjugate posterior.  Prior acceptance rates quoted in
tests and demos are calibrated to exactly these proposal measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .cells import (
    CELL_ORDER,
    CountsTable,
    DEFAULT_HYPER,
    DirichletHyper,
    ObservedCellParams,
    PosteriorDraws,
)
from .rng import stream
from .saturated import _draw_qz

__all__ = [
    "AssumptionKind",
    "AssumptionSpec",
    "OmegaInterval",
    "INFEASIBLE",
    "Infeasible",
    "StratumExactIv",
    "AttemptBudget",
    "BudgetExhausted",
    "posbias_omega_floor",
    "exact_iv_omega_intervals",
    "exact_iv_posbias_intervals",
    "imperfect_iv_omega_bounds",
    "sample_restricted",
    "sample_exact_iv",
    "sample_threshold_iv",
    "sample_lognormal_iv",
    "sample_exact_iv_posbias",
    "sample_lognormal_betabias",
]


class AssumptionKind(str, Enum):
    NONE = "none"
    EXACT_IV = "exact_iv"
    THRESHOLD_IV = "threshold_iv"
    LOGNORMAL_IV = "lognormal_iv"
    EXACT_IV_POSBIAS = "exact_iv_posbias"
    LOGNORMAL_BETABIAS = "lognormal_betabias"


@dataclass(frozen=True)
class AssumptionSpec:
    """Which restriction is active, plus its hyperparameters."""

    kind: AssumptionKind
    t_l: float | None = None
    t_h: float | None = None
    sigma: float | None = None
    a: float | None = None
    b: float | None = None
    hyper: DirichletHyper = DEFAULT_HYPER

    def __post_init__(self):
        k = self.kind
        if k == AssumptionKind.THRESHOLD_IV:
            if self.t_l is None or self.t_h is None or not (0 < self.t_l < 1 < self.t_h):
                raise ValueError("threshold restriction needs t_l < 1 < t_h, both positive")
        if k in (AssumptionKind.LOGNORMAL_IV, AssumptionKind.LOGNORMAL_BETABIAS):
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("lognormal restriction needs sigma > 0")
        if k == AssumptionKind.LOGNORMAL_BETABIAS:
            # a, b > 1 so the Beta weight has an interior mode to normalize by.
            if self.a is None or self.b is None or not (self.a > 1 and self.b > 1):
                raise ValueError("beta-bias restriction needs a > 1 and b > 1")

    # -- constructors -------------------------------------------------------
    @classmethod
    def none(cls, hyper: DirichletHyper = DEFAULT_HYPER):
        return cls(AssumptionKind.NONE, hyper=hyper)

    @classmethod
    def exact_iv(cls, hyper: DirichletHyper = DEFAULT_HYPER):
        return cls(AssumptionKind.EXACT_IV, hyper=hyper)

    @classmethod
    def threshold_iv(cls, t_l: float, t_h: float, hyper: DirichletHyper = DEFAULT_HYPER):
        return cls(AssumptionKind.THRESHOLD_IV, t_l=t_l, t_h=t_h, hyper=hyper)

    @classmethod
    def lognormal_iv(cls, sigma: float, hyper: DirichletHyper = DEFAULT_HYPER):
        return cls(AssumptionKind.LOGNORMAL_IV, sigma=sigma, hyper=hyper)

    @classmethod
    def exact_iv_posbias(cls, hyper: DirichletHyper = DEFAULT_HYPER):
        return cls(AssumptionKind.EXACT_IV_POSBIAS, hyper=hyper)

    @classmethod
    def lognormal_betabias(cls, sigma: float, a: float, b: float, hyper: DirichletHyper = DEFAULT_HYPER):
        return cls(AssumptionKind.LOGNORMAL_BETABIAS, sigma=sigma, a=a, b=b, hyper=hyper)

    def with_hyper(self, hyper: DirichletHyper) -> "AssumptionSpec":
        return replace(self, hyper=hyper)

    def config_items(self) -> dict:
        """Flat key-value form consumed and produced by config files."""
        out = {"kind": self.kind.value}
        for key in ("t_l", "t_h", "sigma", "a", "b"):
            v = getattr(self, key)
            if v is not None:
                out[key] = repr(float(v))
        out["alpha1"] = repr(float(self.hyper.a1))
        out["alpha2"] = repr(float(self.hyper.a2))
        out["alpha3"] = repr(float(self.hyper.a3))
        return out


class Infeasible:
    """Marker: the data leave no room for the restriction (empty interval)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFEASIBLE"


INFEASIBLE = Infeasible()


@dataclass(frozen=True)
class OmegaInterval:
    """Feasible range for one cell's missing-data split."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("use INFEASIBLE for an empty interval")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float, atol: float = 0.0) -> bool:
        return self.lo - atol <= value <= self.hi + atol


def _clipped_interval(lo: float, hi: float):
    lo, hi = max(0.0, lo), min(1.0, hi)
    if not lo <= hi:
        return INFEASIBLE
    return OmegaInterval(lo, hi)


def posbias_omega_floor(q: ObservedCellParams) -> float:
    """Smallest omega consistent with missing rows being Y=1 more often.

    Positive bias means P(Y=1 | R=0) > P(Y=1 | R=1) = q11 / (1 - q0dot); a
    fully missing cell has no observed rows to compare against, so its floor
    is 0.
    """
    if q.q0dot >= 1.0:
        return 0.0
    return q.q11 / (1.0 - q.q0dot)


@dataclass(frozen=True)
class StratumExactIv:
    """Exact-instrument geometry of one treatment arm.

    ``omega_z1`` is the feasible range for the z=1 cell's split; the z=0
    cell's split is then pinned at ``dirac_offset + dirac_slope * omega_z1``.
    """

    omega_z1: "OmegaInterval | Infeasible"
    dirac_offset: float
    dirac_slope: float

    def map_z0(self, omega_z1: float) -> float:
        return self.dirac_offset + self.dirac_slope * omega_z1

    @property
    def omega_z0(self):
        """Image of ``omega_z1`` under the solved map (the z=0 cell's range)."""
        if isinstance(self.omega_z1, Infeasible):
            return INFEASIBLE
        lo = self.map_z0(self.omega_z1.lo)
        hi = self.map_z0(self.omega_z1.hi)
        return OmegaInterval(min(lo, hi), max(lo, hi))


def _stratum_pair(q: Sequence[ObservedCellParams], x: int):
    """(z=0 cell, z=1 cell) of arm x from a four-cell canonical sequence."""
    return q[2 * x], q[2 * x + 1]


def _exact_iv_stratum(qz0: ObservedCellParams, qz1: ObservedCellParams, floors=None) -> StratumExactIv:
    b0, m0 = qz0.q11, qz0.q0dot
    b1, m1 = qz1.q11, qz1.q0dot
    floor_z0, floor_z1 = floors if floors is not None else (0.0, 0.0)
    if m1 <= 0 or m0 <= 0:
        # A cell with no missing mass fixes its P(Y=1) outright; the other
        # cell's split must hit that rate exactly.  Splits of fully observed
        # cells carry no probability mass, so their bias floors do not bind.
        if m1 <= 0 and m0 <= 0:
            if abs(b1 - b0) <= 1e-12:
                return StratumExactIv(OmegaInterval(0.0, 1.0), 0.0, 0.0)
            return StratumExactIv(INFEASIBLE, 0.0, 0.0)
        if m1 <= 0:  # solve the z=0 split against the fixed z=1 rate
            w0 = (b1 - b0) / m0
            feasible = 0.0 <= w0 <= 1.0 and (floors is None or w0 > floor_z0)
            if feasible:
                return StratumExactIv(OmegaInterval(0.0, 1.0), w0, 0.0)
            return StratumExactIv(INFEASIBLE, w0, 0.0)
        # m0 <= 0: the z=1 split must hit the fixed z=0 rate exactly
        w1 = (b0 - b1) / m1
        feasible = 0.0 <= w1 <= 1.0 and (floors is None or w1 > floor_z1)
        if feasible:
            return StratumExactIv(OmegaInterval(w1, w1), 0.0, 0.0)
        return StratumExactIv(INFEASIBLE, 0.0, 0.0)
    lo = max(0.0, (b0 - b1) / m1)
    hi = min(1.0, (b0 - b1 + m0) / m1)
    if floors is not None:
        # Tightest of: equality geometry, the cell's own bias floor, and the
        # floor propagated through the solved z=0 split.
        propagated = (b0 * m0 / (1.0 - m0) + b0 - b1) / m1 if m0 < 1.0 else lo
        lo = max(lo, floor_z1, propagated)
    offset = (b1 - b0) / m0
    slope = m1 / m0
    if lo > hi:
        return StratumExactIv(INFEASIBLE, offset, slope)
    return StratumExactIv(OmegaInterval(lo, hi), offset, slope)


def exact_iv_omega_intervals(q: Sequence[ObservedCellParams]) -> tuple[StratumExactIv, StratumExactIv]:
    """Per-arm feasible ranges and solved maps under an exact instrument.

    ``q`` holds the four observed-cell simplexes in canonical cell order.
    An arm comes back INFEASIBLE when the observed Y=1 masses are too far
    apart for any missing-data split to equalize the two cells' rates.
    """
    out = []
    for x in (0, 1):
        qz0, qz1 = _stratum_pair(q, x)
        out.append(_exact_iv_stratum(qz0, qz1))
    return tuple(out)


def exact_iv_posbias_intervals(q: Sequence[ObservedCellParams]) -> tuple[StratumExactIv, StratumExactIv]:
    """Exact-instrument ranges tightened by the positive-bias floors."""
    out = []
    for x in (0, 1):
        qz0, qz1 = _stratum_pair(q, x)
        floors = (posbias_omega_floor(qz0), posbias_omega_floor(qz1))
        out.append(_exact_iv_stratum(qz0, qz1, floors=floors))
    return tuple(out)


def _odds(p: float) -> float:
    return p / (1.0 - p)


def _or_range(b0, m0, b1, m1):
    """Attainable odds-ratio range over all splits; None when degenerate."""
    p1_lo, p1_hi = b1, b1 + m1
    p0_lo, p0_hi = b0, b0 + m0
    if p1_hi <= 0 or p1_lo >= 1 or p0_hi <= 0 or p0_lo >= 1:
        return None
    or_min = 0.0 if p1_lo <= 0 or p0_hi >= 1 else _odds(p1_lo) / _odds(p0_hi)
    or_max = math.inf if p1_hi >= 1 or p0_lo <= 0 else _odds(p1_hi) / _odds(p0_lo)
    return or_min, or_max


def imperfect_iv_omega_bounds(
    qz0: ObservedCellParams,
    qz1: ObservedCellParams,
    t_l: float,
    t_h: float,
):
    """Feasible ranges for one arm's two splits when the odds ratio may drift.

    With the within-arm (Y, Z) odds ratio restricted to ``(t_l, t_h)``, each
    cell's split is free exactly while some value of the other cell's split
    keeps the odds ratio inside the window.  The odds ratio increases in the
    z=1 split and decreases in the z=0 split, so each endpoint solves the
    boundary equation with the other split pushed to its own extreme.
    Returns ``(range for the z=0 cell, range for the z=1 cell)``; an empty
    range comes back INFEASIBLE.  Both arms use the same formulas.
    """
    if not 0 < t_l < t_h:
        raise ValueError("need 0 < t_l < t_h")
    b0, m0 = qz0.q11, qz0.q0dot
    b1, m1 = qz1.q11, qz1.q0dot
    rng = _or_range(b0, m0, b1, m1)
    if rng is None:
        return INFEASIBLE, INFEASIBLE
    or_min, or_max = rng
    if not (or_max > t_l and or_min < t_h):
        return INFEASIBLE, INFEASIBLE
    # z=1 split: lower endpoint solves OR(w1, w0=0) = t_l, upper endpoint
    # solves OR(w1, w0=1) = t_h.
    if m1 > 0:
        w1_lo = (b0 * t_l - b1 * b0 * t_l - b1 + b0 * b1) / (m1 * (1.0 - b0 + b0 * t_l))
        w1_hi = (
            b0 * t_h - b0 * b1 * t_h + m0 * t_h - m0 * b1 * t_h - b1 + b0 * b1 + m0 * b1
        ) / (m1 * (1.0 - b0 - m0 + b0 * t_h + m0 * t_h))
        iv_z1 = _clipped_interval(w1_lo, w1_hi)
    else:
        iv_z1 = OmegaInterval(0.0, 1.0)
    # z=0 split: lower endpoint solves OR(w1=0, w0) = t_h, upper endpoint
    # solves OR(w1=1, w0) = t_l.
    if m0 > 0:
        w0_lo = (b0 * t_h - b0 * b1 * t_h - b1 + b0 * b1) / (m0 * (b1 * t_h - b1 - t_h))
        w0_hi = (
            b0 * t_l - b0 * b1 * t_l - m1 * b0 * t_l - b1 + b0 * b1 - m1 + b0 * m1
        ) / (m0 * (m1 * t_l + b1 * t_l - t_l - m1 - b1))
        iv_z0 = _clipped_interval(w0_lo, w0_hi)
    else:
        iv_z0 = OmegaInterval(0.0, 1.0)
    return iv_z0, iv_z1


# ---------------------------------------------------------------------------
# Rejection sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AttemptBudget:
    """Stopping rule for the rejection samplers.

    ``max_attempts`` caps each arm's proposal count.  A run counts as failed
    when an arm exhausts the cap short of ``required`` accepted draws, or when
    the implied joint attempt count ``required / joint_rate`` exceeds
    ``max_attempts`` even though both arms finished; with ``max_attempts``
    derived from a prior acceptance rate, failure is exactly a Bayes factor
    above ``bf_fail_threshold`` in favour of the unrestricted model.
    """

    required: int = 1000
    max_attempts: int = 1_000_000
    bf_fail_threshold: float = 10.0

    def __post_init__(self):
        if self.required < 1 or self.max_attempts < 1:
            raise ValueError("required and max_attempts must be positive")

    @classmethod
    def from_prior_rate(cls, required: int, prior_rate: float, bf_fail_threshold: float = 10.0):
        if not prior_rate > 0:
            raise ValueError("prior acceptance rate must be positive")
        cap = math.ceil(required / prior_rate * bf_fail_threshold)
        return cls(required=required, max_attempts=cap, bf_fail_threshold=bf_fail_threshold)


class BudgetExhausted(RuntimeError):
    """Rejection sampling could not deliver the target draw count.

    This is a result, not a malfunction: it signals strong evidence against
    the restriction.  Per-arm statistics are attached so callers can report a
    lower bound on the Bayes factor.
    """

    def __init__(self, spec, stratum_accepted, stratum_attempted, budget):
        self.spec = spec
        self.stratum_accepted = tuple(stratum_accepted)
        self.stratum_attempted = tuple(stratum_attempted)
        self.budget = budget
        rates = [a / t if t else 0.0 for a, t in zip(stratum_accepted, stratum_attempted)]
        joint = rates[0] * rates[1]
        super().__init__(
            f"{spec.kind.value}: accepted {stratum_accepted} of {stratum_attempted} "
            f"per arm (joint rate {joint:.3e}); budget required {budget.required} "
            f"within {budget.max_attempts} attempts"
        )


_BATCH = 8192


def _proposal_alphas(spec: AssumptionSpec, counts: CountsTable) -> np.ndarray:
    """Per-cell Dirichlet proposal parameters, shape (4, 3)."""
    reduce_third = spec.kind != AssumptionKind.EXACT_IV_POSBIAS
    out = np.empty((4, 3))
    for c, idx in enumerate(CELL_ORDER):
        h = spec.hyper.updated(counts.cell(idx))
        out[c] = (h.a1, h.a2, h.a3 - 1.0 if reduce_third else h.a3)
        if out[c, 2] <= 0:
            raise ValueError(
                "proposal needs hyper.a3 + n_r0 > 1; "
                f"got a3={spec.hyper.a3} with n_r0={counts.cell(idx).n0dot}"
            )
    return out


def _beta_logpdf_ratio(h, a, b):
    """log f_Beta(h; a, b) - log f_Beta(mode; a, b), for h inside (0, 1)."""
    mode = (a - 1.0) / (a + b - 2.0)
    return (a - 1.0) * (np.log(h) - np.log(mode)) + (b - 1.0) * (np.log1p(-h) - np.log1p(-mode))


def _stratum_batch(spec: AssumptionSpec, alpha_z0, alpha_z1, rng, n):
    """Propose and test ``n`` draws for one arm.

    Returns (mask, q_z0, q_z1, w_z0, w_z1) with the exact-instrument kinds'
    w_z0 already holding the solved value.
    """
    g0 = rng.gamma(alpha_z0, size=(n, 3))
    q0 = g0 / g0.sum(axis=1, keepdims=True)
    g1 = rng.gamma(alpha_z1, size=(n, 3))
    q1 = g1 / g1.sum(axis=1, keepdims=True)
    b0, m0 = q0[:, 1], q0[:, 2]
    b1, m1 = q1[:, 1], q1[:, 2]
    kind = spec.kind

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if kind in (AssumptionKind.EXACT_IV, AssumptionKind.EXACT_IV_POSBIAS):
            w1 = rng.uniform(size=n)
            lo = np.maximum(0.0, (b0 - b1) / m1)
            hi = np.minimum(1.0, (b0 - b1 + m0) / m1)
            w0 = (b1 - b0 + m1 * w1) / m0
            if kind == AssumptionKind.EXACT_IV:
                mask = (w1 >= lo) & (w1 <= hi) & (w0 >= 0.0) & (w0 <= 1.0)
            else:
                floor0 = np.where(m0 < 1.0, b0 / (1.0 - m0), 0.0)
                floor1 = np.where(m1 < 1.0, b1 / (1.0 - m1), 0.0)
                propagated = (floor0 * m0 + b0 - b1) / m1
                lo = np.maximum(lo, np.maximum(floor1, propagated))
                mask = (w1 > lo) & (w1 <= hi) & (w0 > floor0) & (w0 <= 1.0)
            return mask, q0, q1, w0, w1

        w0 = rng.uniform(size=n)
        w1 = rng.uniform(size=n)
        p0 = b0 + m0 * w0
        p1 = b1 + m1 * w1
        valid = (p0 > 0.0) & (p0 < 1.0) & (p1 > 0.0) & (p1 < 1.0)
        log_or = np.where(valid, np.log(p1) - np.log1p(-p1) - np.log(p0) + np.log1p(-p0), np.nan)
        if kind == AssumptionKind.THRESHOLD_IV:
            mask = valid & (log_or > math.log(spec.t_l)) & (log_or < math.log(spec.t_h))
            return mask, q0, q1, w0, w1
        # Smooth kinds: accept with the density-ratio probability.  The
        # lognormal weight simplifies to exp(-log_or^2 / (2 sigma^2)).
        log_accept = -0.5 * (log_or / spec.sigma) ** 2
        if kind == AssumptionKind.LOGNORMAL_BETABIAS:
            floor0 = np.where(m0 < 1.0, b0 / (1.0 - m0), 0.0)
            floor1 = np.where(m1 < 1.0, b1 / (1.0 - m1), 0.0)
            h0 = (w0 - floor0 + 1.0) / 2.0
            h1 = (w1 - floor1 + 1.0) / 2.0
            inside = (h0 > 0.0) & (h0 < 1.0) & (h1 > 0.0) & (h1 < 1.0)
            valid = valid & inside
            hc0 = np.clip(h0, 1e-300, 1 - 1e-16)
            hc1 = np.clip(h1, 1e-300, 1 - 1e-16)
            log_accept = log_accept + _beta_logpdf_ratio(hc0, spec.a, spec.b)
            log_accept = log_accept + _beta_logpdf_ratio(hc1, spec.a, spec.b)
        u = rng.uniform(size=n)
        mask = valid & (np.log(u) < log_accept)
        return mask, q0, q1, w0, w1


def _run_stratum(spec, alphas, x, seed, required, max_attempts, collect=True):
    """Rejection loop for one arm; stops at ``required`` accepted or the cap.

    Batches have a fixed size and each consumes its own derived stream, so the
    accepted prefix does not depend on how many draws were requested.  When
    the target is reached mid-batch, only the proposals up to and including
    the final needed acceptance count as attempts, keeping the acceptance-rate
    estimate honest.
    """
    alpha_z0, alpha_z1 = alphas[2 * x], alphas[2 * x + 1]
    acc_q0, acc_q1, acc_w0, acc_w1 = [], [], [], []
    accepted = 0
    attempted = 0
    batch_idx = 0
    while (required is None or accepted < required) and attempted < max_attempts:
        n = min(_BATCH, max_attempts - attempted)
        rng = stream(seed, "restricted", x, batch_idx)
        mask, q0, q1, w0, w1 = _stratum_batch(spec, alpha_z0, alpha_z1, rng, n)
        batch_idx += 1
        take = mask.nonzero()[0]
        if required is not None and accepted + take.size >= required:
            need = required - accepted
            take = take[:need]
            attempted += int(take[-1]) + 1  # proposals up to the final success
        else:
            attempted += n
        accepted += take.size
        if collect and take.size:
            acc_q0.append(q0[take])
            acc_q1.append(q1[take])
            acc_w0.append(w0[take])
            acc_w1.append(w1[take])

    def cat(parts, ncol):
        if parts:
            return np.concatenate(parts)
        return np.empty((0, ncol)) if ncol else np.empty(0)

    return {
        "accepted": accepted,
        "attempted": attempted,
        "q_z0": cat(acc_q0, 3),
        "q_z1": cat(acc_q1, 3),
        "w_z0": cat(acc_w0, 0),
        "w_z1": cat(acc_w1, 0),
    }


def run_prior_attempts(spec: AssumptionSpec, attempts: int, seed: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Run a fixed number of proposals per arm against zero counts.

    Returns per-arm (accepted, attempted); used for prior acceptance rates.
    """
    counts = CountsTable.zeros()
    alphas = _proposal_alphas(spec, counts)
    out = []
    for x in (0, 1):
        res = _run_stratum(spec, alphas, x, seed, required=None, max_attempts=attempts, collect=False)
        out.append((res["accepted"], res["attempted"]))
    return tuple(out)


def sample_restricted(
    spec: AssumptionSpec,
    counts: CountsTable,
    budget: AttemptBudget,
    seed: int,
    *,
    qz_fixed: float | None = None,
) -> PosteriorDraws:
    """Draw from the restricted posterior by per-arm rejection sampling.

    Raises
    ------
    BudgetExhausted
        When an arm runs out of attempts, or the implied joint attempt count
        exceeds the budget; this is the evidence-against-the-restriction
        signal, not an error in the usual sense.
    """
    if spec.kind == AssumptionKind.NONE:
        from .saturated import fit_saturated

        draws = fit_saturated(counts, budget.required, seed, prior=spec.hyper, qz_fixed=qz_fixed)
        n = budget.required
        return replace(draws, stratum_accepted=(n, n), stratum_attempted=(n, n))

    alphas = _proposal_alphas(spec, counts)
    results = [
        _run_stratum(spec, alphas, x, seed, budget.required, budget.max_attempts)
        for x in (0, 1)
    ]
    accepted = tuple(r["accepted"] for r in results)
    attempted = tuple(r["attempted"] for r in results)
    short = any(a < budget.required for a in accepted)
    if not short:
        # Both arms delivered; fail anyway if the joint rate implies more
        # attempts than the budget allows (the Bayes-factor failure line).
        implied = attempted[0] * attempted[1] / budget.required
        if implied > budget.max_attempts:
            raise BudgetExhausted(spec, accepted, attempted, budget)
    else:
        raise BudgetExhausted(spec, accepted, attempted, budget)

    n = budget.required
    q = np.empty((n, 4, 3))
    omega = np.empty((n, 4))
    for x, res in enumerate(results):
        q[:, 2 * x, :] = res["q_z0"][:n]
        q[:, 2 * x + 1, :] = res["q_z1"][:n]
        omega[:, 2 * x] = res["w_z0"][:n]
        omega[:, 2 * x + 1] = res["w_z1"][:n]
    qz = _draw_qz(stream(seed, "restricted-qz"), n, counts.zcounts, qz_fixed)
    return PosteriorDraws(
        q=q,
        omega=omega,
        qz=qz,
        accepted=n,
        attempted=attempted[0] + attempted[1],
        seed=seed,
        stratum_accepted=accepted,
        stratum_attempted=attempted,
    )


# Spec-facing wrappers, one per restriction kind.

def sample_exact_iv(hyper, counts, budget, seed, **kw) -> PosteriorDraws:
    return sample_restricted(AssumptionSpec.exact_iv(hyper), counts, budget, seed, **kw)


def sample_threshold_iv(hyper, counts, t_l, t_h, budget, seed, **kw) -> PosteriorDraws:
    return sample_restricted(AssumptionSpec.threshold_iv(t_l, t_h, hyper), counts, budget, seed, **kw)


def sample_lognormal_iv(hyper, counts, sigma, budget, seed, **kw) -> PosteriorDraws:
    return sample_restricted(AssumptionSpec.lognormal_iv(sigma, hyper), counts, budget, seed, **kw)


def sample_exact_iv_posbias(hyper, counts, budget, seed, **kw) -> PosteriorDraws:
    return sample_restricted(AssumptionSpec.exact_iv_posbias(hyper), counts, budget, seed, **kw)


def sample_lognormal_betabias(hyper, counts, sigma, a, b, budget, seed, **kw) -> PosteriorDraws:
    return sample_restricted(
        AssumptionSpec.lognormal_betabias(sigma, a, b, hyper), counts, budget, seed, **kw
    )

"""Data-generating processes and the replicated-study harness.

Two generators produce row-level datasets with known truth: a selection-model
generator (latent bivariate normal) and a saturated generator that draws cell
parameters directly, optionally forcing or breaking the exact-instrument and
bias-direction assumptions.  ``run_study`` replays a roster of models over
replicated datasets and aggregates acceptance rates, Bayes factors, computed
fractions, coverage and interval widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .cells import (
    CELL_ORDER,
    CellCounts,
    CountsTable,
    DEFAULT_HYPER,
    DirichletHyper,
    ObservedCellParams,
)
from .evidence import bayes_factor, prior_acceptance_rate
from .heckman import GibbsConfig, HeckmanData, _cell_probs_from_indices, heckman_fit
from .restrictions import AssumptionKind, AssumptionSpec
from .rng import derive_seed, stream
from .saturated import credible_interval, fit_saturated, mar_estimate, risk_difference_draws

__all__ = [
    "DgpSpec",
    "Dataset",
    "gen_heckman_data",
    "gen_saturated_data",
    "generate",
    "ModelSpec",
    "default_models",
    "ReplicationRecord",
    "ModelSummary",
    "StudyResult",
    "run_study",
    "prior_ar_sweep",
]


@dataclass(frozen=True)
class DgpSpec:
    """What to simulate and which assumptions hold in truth.

    The selection-model generator violates the instrument assumption through
    an extra outcome term ``beta2 * z - beta2 * x * z`` and flips the bias
    direction through the sign of ``rho``.  The saturated generator enforces
    the flags directly on the drawn cell parameters, with per-cell missing
    mass pinned at ``target_missing``.
    """

    kind: Literal["heckman", "saturated"]
    n: int = 1000
    target_missing: float = 0.2
    iv_holds: bool = True
    bias_direction: Literal["positive", "negative"] = "positive"
    beta0: float = -0.5
    beta1: float = 0.75
    beta2: float | None = None
    rho: float | None = None
    gamma1: float = 0.3
    gamma2: float = 0.7
    hyper: DirichletHyper = DEFAULT_HYPER
    or_margin: float = 0.2  # minimum |log OR| per arm when the instrument fails

    def __post_init__(self):
        if self.kind not in ("heckman", "saturated"):
            raise ValueError("kind must be 'heckman' or 'saturated'")
        if not 0.0 < self.target_missing < 1.0:
            raise ValueError("target_missing must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.bias_direction not in ("positive", "negative"):
            raise ValueError("bias_direction must be 'positive' or 'negative'")

    @property
    def effective_beta2(self) -> float:
        if self.beta2 is not None:
            return self.beta2
        return 0.0 if self.iv_holds else 1.5

    @property
    def effective_rho(self) -> float:
        if self.rho is not None:
            return self.rho
        return -0.5 if self.bias_direction == "positive" else 0.5


@dataclass(frozen=True)
class Dataset:
    """Row-level data plus the quantities the generator knows exactly."""

    x: np.ndarray
    z: np.ndarray
    r: np.ndarray
    y: np.ndarray  # NaN where missing
    y_complete: np.ndarray  # pre-missingness outcome, always known here
    psi_true: float
    true_cells: tuple | None = None  # (q_truth, omega_truth) per cell when known

    @property
    def n(self) -> int:
        return self.x.size

    def counts(self) -> CountsTable:
        cells = []
        for idx in CELL_ORDER:
            m = (self.x == idx.x) & (self.z == idx.z)
            n10 = int(((self.y_complete == 0) & (self.r == 1) & m).sum())
            n11 = int(((self.y_complete == 1) & (self.r == 1) & m).sum())
            n0 = int(((self.r == 0) & m).sum())
            cells.append(CellCounts(n10, n11, n0))
        return CountsTable(tuple(cells))

    def complete_counts(self) -> CountsTable:
        """Counts as if nothing were missing (the oracle's view)."""
        cells = []
        for idx in CELL_ORDER:
            m = (self.x == idx.x) & (self.z == idx.z)
            n10 = int(((self.y_complete == 0) & m).sum())
            n11 = int(((self.y_complete == 1) & m).sum())
            cells.append(CellCounts(n10, n11, 0))
        return CountsTable(tuple(cells))

    def heckman_data(self) -> HeckmanData:
        return HeckmanData(self.x, self.z, self.r, self.y)


def _solve_gamma0(spec: DgpSpec) -> float:
    """Intercept making the marginal missingness hit the target exactly.

    P(R=0) = mean over the four (x, z) cells of Phi(-(g0 + g1 x + g2 z)),
    which is continuous and decreasing in g0; bisection to 1e-6.
    """

    def marginal_missing(g0):
        total = 0.0
        for idx in CELL_ORDER:
            total += ndtr(-(g0 + spec.gamma1 * idx.x + spec.gamma2 * idx.z))
        return total / 4.0 - spec.target_missing

    return float(brentq(marginal_missing, -20.0, 20.0, xtol=1e-6))


def _heckman_outcome_index(spec: DgpSpec, x, z):
    b2 = spec.effective_beta2
    return spec.beta0 + spec.beta1 * x + b2 * z - b2 * x * z


def gen_heckman_data(spec: DgpSpec, seed: int) -> Dataset:
    """Simulate from the latent bivariate-normal selection model."""
    if spec.kind != "heckman":
        raise ValueError("spec.kind must be 'heckman'")
    rho = spec.effective_rho
    g0 = _solve_gamma0(spec)
    rng = stream(seed, "dgp-heckman")
    x = rng.integers(0, 2, size=spec.n)
    z = rng.integers(0, 2, size=spec.n)
    eps = rng.standard_normal(spec.n)
    nu = rho * eps + math.sqrt(1.0 - rho * rho) * rng.standard_normal(spec.n)
    y_complete = (_heckman_outcome_index(spec, x, z) + eps > 0).astype(int)
    r = (g0 + spec.gamma1 * x + spec.gamma2 * z + nu > 0).astype(int)
    y = np.where(r == 1, y_complete.astype(float), np.nan)
    # Marginal risk difference with uniform instrument weights.
    arm = lambda xx: 0.5 * sum(ndtr(_heckman_outcome_index(spec, xx, zz)) for zz in (0, 1))
    psi_true = float(arm(1) - arm(0))
    truth = tuple(
        _cell_probs_from_indices(
            _heckman_outcome_index(spec, idx.x, idx.z),
            g0 + spec.gamma1 * idx.x + spec.gamma2 * idx.z,
            rho,
        )
        for idx in CELL_ORDER
    )
    return Dataset(x, z, r, y, y_complete, psi_true, true_cells=truth)


_MAX_REDRAWS = 100_000
_GEN_BATCH = 512


def _saturated_cell_draw(spec: DgpSpec, rng, nbatch):
    """Candidate (q11, omega) per cell with missing mass pinned at the target.

    The observed-cell Y=1 share conditional on the fixed missing mass keeps
    its Dirichlet-implied Beta law; the splits start Uniform(0, 1).
    """
    m = spec.target_missing
    v = rng.beta(spec.hyper.a2, spec.hyper.a1, size=(nbatch, 4))
    q11 = v * (1.0 - m)
    omega = rng.uniform(size=(nbatch, 4))
    return q11, omega


def gen_saturated_data(spec: DgpSpec, seed: int) -> Dataset:
    """Simulate from directly drawn cell parameters.

    With the instrument holding, each arm's z=0 split is solved so the two
    cells share P(Y=1) exactly; candidates are redrawn until the solved value
    is a probability and the requested bias direction holds in all four
    cells.  With the instrument failing, all splits stay free and candidates
    are redrawn until the bias direction holds and both arms' log odds ratios
    clear ``or_margin`` in magnitude.
    """
    if spec.kind != "saturated":
        raise ValueError("spec.kind must be 'saturated'")
    m = spec.target_missing
    rng = stream(seed, "dgp-saturated-params")
    chosen = None
    tried = 0
    while chosen is None and tried < _MAX_REDRAWS:
        q11, omega = _saturated_cell_draw(spec, rng, _GEN_BATCH)
        tried += _GEN_BATCH
        if spec.iv_holds:
            # omega for cells (0,0) and (1,0) solves the equal-rates equation.
            omega = omega.copy()
            omega[:, 0] = (q11[:, 1] + m * omega[:, 1] - q11[:, 0]) / m
            omega[:, 2] = (q11[:, 3] + m * omega[:, 3] - q11[:, 2]) / m
            ok = ((omega >= 0.0) & (omega <= 1.0)).all(axis=1)
        else:
            py1 = q11 + m * omega
            with np.errstate(divide="ignore"):
                log_or0 = np.log(py1[:, 1] / (1 - py1[:, 1])) - np.log(py1[:, 0] / (1 - py1[:, 0]))
                log_or1 = np.log(py1[:, 3] / (1 - py1[:, 3])) - np.log(py1[:, 2] / (1 - py1[:, 2]))
            ok = (np.abs(log_or0) > spec.or_margin) & (np.abs(log_or1) > spec.or_margin)
        floor = q11 / (1.0 - m)
        if spec.bias_direction == "positive":
            ok &= (omega > floor).all(axis=1)
        else:
            ok &= (omega < floor).all(axis=1)
        hits = np.nonzero(ok)[0]
        if hits.size:
            i = int(hits[0])
            chosen = (q11[i], omega[i])
    if chosen is None:
        raise RuntimeError(
            f"could not satisfy the requested assumption flags in {_MAX_REDRAWS} candidate draws"
        )
    q11_t, omega_t = chosen
    q_truth = tuple(
        ObservedCellParams(float(1.0 - m - q11_t[c]), float(q11_t[c]), float(m)) for c in range(4)
    )

    # Multinomial rows over (r=1&y=0, r=1&y=1, r=0&y=0, r=0&y=1) per cell.
    rows_rng = stream(seed, "dgp-saturated-rows")
    x = rows_rng.integers(0, 2, size=spec.n)
    z = rows_rng.integers(0, 2, size=spec.n)
    y_complete = np.empty(spec.n, dtype=int)
    r = np.empty(spec.n, dtype=int)
    u = rows_rng.uniform(size=spec.n)
    for c, idx in enumerate(CELL_ORDER):
        mask = (x == idx.x) & (z == idx.z)
        p = np.array(
            [
                q_truth[c].q10,
                q_truth[c].q11,
                m * (1.0 - omega_t[c]),
                m * omega_t[c],
            ]
        )
        edges = np.cumsum(p)
        cat = np.searchsorted(edges, u[mask], side="right")
        cat = np.minimum(cat, 3)
        y_complete[mask] = (cat == 1) | (cat == 3)
        r[mask] = cat <= 1
    y = np.where(r == 1, y_complete.astype(float), np.nan)
    py1 = q11_t + m * omega_t
    psi_true = float(0.5 * (py1[2] + py1[3]) - 0.5 * (py1[0] + py1[1]))
    return Dataset(
        x, z, r, y, y_complete, psi_true,
        true_cells=(q_truth, tuple(float(w) for w in omega_t)),
    )


def generate(spec: DgpSpec, seed: int) -> Dataset:
    return gen_heckman_data(spec, seed) if spec.kind == "heckman" else gen_saturated_data(spec, seed)


# ---------------------------------------------------------------------------
# Study harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelSpec:
    """One column of a study: a restriction, or one of the reference fits."""

    name: str
    family: Literal["assumption", "heckman", "mar", "oracle"]
    assumption: AssumptionSpec | None = None
    gibbs: GibbsConfig | None = None

    def __post_init__(self):
        if self.family == "assumption" and self.assumption is None:
            raise ValueError("assumption-family models need an AssumptionSpec")


def default_models(
    hyper: DirichletHyper = DEFAULT_HYPER,
    *,
    t_l: float = 2.0 / 3.0,
    t_h: float = 1.5,
    sigma: float = 0.4,
    a: float = 4.0,
    b: float = 2.0,
    include_heckman: bool = True,
    gibbs: GibbsConfig | None = None,
) -> list[ModelSpec]:
    """The table roster: saturated family, selection model, oracle."""
    models = [
        ModelSpec("Sat", "assumption", AssumptionSpec.none(hyper)),
        ModelSpec("OR1", "assumption", AssumptionSpec.exact_iv(hyper)),
        ModelSpec("Threshold", "assumption", AssumptionSpec.threshold_iv(t_l, t_h, hyper)),
        ModelSpec("Lognormal", "assumption", AssumptionSpec.lognormal_iv(sigma, hyper)),
        ModelSpec("PosBias", "assumption", AssumptionSpec.exact_iv_posbias(hyper)),
        ModelSpec("BetaBias", "assumption", AssumptionSpec.lognormal_betabias(sigma, a, b, hyper)),
    ]
    if include_heckman:
        models.append(ModelSpec("Heckman", "heckman", gibbs=gibbs or GibbsConfig(iterations=3000, burn_in=500)))
    models.append(ModelSpec("Oracle", "oracle"))
    return models


@dataclass(frozen=True)
class ReplicationRecord:
    model: str
    replicate: int
    computed: bool
    covered: bool | None
    width: float | None
    acceptance_rate: float | None
    bf: float | None
    psi_mean: float | None


@dataclass(frozen=True)
class ModelSummary:
    """One table row; coverage and width are over the computed subset."""

    model: str
    mean_ar: float | None
    bf_geomean: float | None
    bf_geomean_computed: float | None
    computed_frac: float
    coverage: float | None
    mean_width: float | None


@dataclass(frozen=True)
class StudyResult:
    dgp: DgpSpec
    replicates: int
    seed: int
    level: float
    records: list[ReplicationRecord]
    summaries: list[ModelSummary]
    psi_true: list[float]


def _geomean(values) -> float | None:
    vals = [v for v in values if v is not None and v > 0 and math.isfinite(v)]
    if not vals:
        return None
    return float(math.exp(sum(math.log(v) for v in vals) / len(vals)))


def _fit_model(model: ModelSpec, data: Dataset, draws, level, seed, prior_seed,
               prior_attempts, bf_fail_threshold, qz_fixed):
    """Return one ReplicationRecord for one model on one dataset."""
    psi = None
    ar = None
    bf = None
    computed = True
    if model.family == "assumption":
        spec = model.assumption
        if spec.kind == AssumptionKind.NONE:
            post = fit_saturated(data.counts(), draws, seed, prior=spec.hyper, qz_fixed=qz_fixed)
            psi = risk_difference_draws(post)
        else:
            report, post = bayes_factor(
                spec, data.counts(), draws, seed,
                prior_attempts=prior_attempts, prior_seed=prior_seed,
                bf_fail_threshold=bf_fail_threshold, qz_fixed=qz_fixed,
            )
            ar = report.posterior_ar
            bf = report.bayes_factor
            computed = report.computed
            if computed:
                psi = risk_difference_draws(post)
    elif model.family == "mar":
        post = mar_estimate(data.counts(), draws, seed, qz_fixed=qz_fixed)
        psi = risk_difference_draws(post)
    elif model.family == "oracle":
        post = fit_saturated(data.complete_counts(), draws, seed, qz_fixed=qz_fixed)
        psi = risk_difference_draws(post)
    elif model.family == "heckman":
        chain = heckman_fit(data.heckman_data(), model.gibbs or GibbsConfig(), seed)
        psi = chain.psi
    else:
        raise ValueError(f"unknown model family {model.family!r}")

    covered = width = psi_mean = None
    if psi is not None:
        interval = credible_interval(psi, level)
        covered = interval.contains(data.psi_true)
        width = interval.width
        psi_mean = interval.mean
    return computed, covered, width, ar, bf, psi_mean


def run_study(
    dgp: DgpSpec,
    models: Sequence[ModelSpec],
    replicates: int,
    seed: int,
    *,
    draws: int = 1000,
    level: float = 0.90,
    prior_attempts: int = 200_000,
    bf_fail_threshold: float = 10.0,
    qz_fixed: float | None = 0.5,
) -> StudyResult:
    """Replicated frequentist evaluation of a model roster on one DGP.

    Simulations know P(Z=1) = 0.5, so the z-weight is pinned by default.
    All randomness derives from ``seed``; records are bit-identical across
    runs for a fixed configuration.
    """
    if replicates < 1:
        raise ValueError("replicates must be positive")
    records: list[ReplicationRecord] = []
    psi_true: list[float] = []
    for rep in range(replicates):
        data = generate(dgp, derive_seed(seed, "study-data", rep))
        psi_true.append(data.psi_true)
        for m, model in enumerate(models):
            fit_seed = derive_seed(seed, "study-fit", rep, m)
            computed, covered, width, ar, bf, psi_mean = _fit_model(
                model, data, draws, level, fit_seed, seed,
                prior_attempts, bf_fail_threshold, qz_fixed,
            )
            records.append(
                ReplicationRecord(model.name, rep, computed, covered, width, ar, bf, psi_mean)
            )

    summaries = []
    for model in models:
        rows = [r for r in records if r.model == model.name]
        ars = [r.acceptance_rate for r in rows if r.acceptance_rate is not None]
        done = [r for r in rows if r.computed]
        cov = [r.covered for r in done if r.covered is not None]
        wid = [r.width for r in done if r.width is not None]
        summaries.append(
            ModelSummary(
                model=model.name,
                mean_ar=float(np.mean(ars)) if ars else None,
                bf_geomean=_geomean([r.bf for r in rows]),
                bf_geomean_computed=_geomean([r.bf for r in done]),
                computed_frac=len(done) / len(rows) if rows else 0.0,
                coverage=float(np.mean(cov)) if cov else None,
                mean_width=float(np.mean(wid)) if wid else None,
            )
        )
    return StudyResult(dgp, replicates, seed, level, records, summaries, psi_true)


def prior_ar_sweep(
    alpha3_grid: Sequence[float],
    specs: Sequence[AssumptionSpec],
    attempts: int,
    seed: int,
) -> list[dict]:
    """Prior acceptance rates across missing-mass pseudo-count settings.

    Grid values count pseudo-observations of the missing category in the
    proposal measure; the stored hyperparameter adds the one unit that pairs
    with the uniform prior on the missing-data split, so grid value 1
    corresponds to the default ``(1, 1, 2)`` hyper.
    """
    rows = []
    for g in alpha3_grid:
        if g < 1:
            raise ValueError("grid values must be at least 1")
        hyper = DirichletHyper(1.0, 1.0, float(g) + 1.0)
        for spec in specs:
            swept = spec.with_hyper(hyper)
            rate, se = prior_acceptance_rate(swept, attempts, derive_seed(seed, "sweep", int(g)))
            rows.append({"kind": spec.kind.value, "alpha3": float(g), "ar": rate, "se": se})
    return rows

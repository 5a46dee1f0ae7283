"""Saturated model: conjugate posterior, risk difference, bounds, MAR baseline.

The saturated model places independent Dirichlet priors on each cell's
observed-data simplex and a Uniform(0, 1) prior on each cell's missing-data
split.  With multinomial counts the Dirichlets update in closed form and the
posterior factorizes, so sampling is a matter of independent Dirichlet,
Uniform and Beta draws.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .cells import (
    CELL_ORDER,
    CellParams,
    CountsTable,
    DirichletHyper,
    IntervalSummary,
    ObservedCellParams,
    PosteriorDraws,
    ZMarginParam,
)
from .rng import stream

__all__ = [
    "conjugate_update",
    "sample_saturated_posterior",
    "fit_saturated",
    "risk_difference",
    "risk_difference_array",
    "risk_difference_draws",
    "risk_difference_bounds",
    "credible_interval",
    "mar_estimate",
]


def conjugate_update(prior: DirichletHyper, counts: CountsTable) -> tuple[DirichletHyper, ...]:
    """Per-cell posterior pseudo-counts: prior plus observed multinomial counts."""
    return tuple(prior.updated(counts.cell(idx)) for idx in CELL_ORDER)


def _dirichlet(rng: np.random.Generator, alpha: np.ndarray, n: int) -> np.ndarray:
    # Independent Gamma draws then normalization: exact and dimension-agnostic.
    g = rng.gamma(alpha, size=(n, alpha.size))
    return g / g.sum(axis=1, keepdims=True)


def _draw_qz(rng, n, zcounts, qz_fixed):
    if qz_fixed is not None:
        return np.full(n, float(qz_fixed))
    z0, z1 = zcounts
    # Beta(1, 1) prior on P(Z=1) updated by the Z margin counts.
    return rng.beta(1.0 + z1, 1.0 + z0, size=n)


def sample_saturated_posterior(
    hyper,
    ndraws: int,
    seed: int,
    *,
    zcounts: tuple[int, int] = (0, 0),
    qz_fixed: float | None = None,
) -> PosteriorDraws:
    """Independent Monte Carlo draws from the saturated posterior.

    Parameters
    ----------
    hyper : DirichletHyper or sequence of four DirichletHyper
        Posterior pseudo-counts, one per cell (a single value is shared).
    ndraws : int
        Number of draws; every proposal is accepted.
    seed : int
        Master seed; each cell consumes its own derived stream.
    zcounts : (int, int)
        Counts of Z=0 and Z=1 rows for the Beta posterior on P(Z=1).
    qz_fixed : float, optional
        Pin P(Z=1) instead of drawing it (simulations use the known value).
    """
    if ndraws < 1:
        raise ValueError("ndraws must be at least 1")
    if isinstance(hyper, DirichletHyper):
        hypers = [hyper] * 4
    else:
        hypers = list(hyper)
        if len(hypers) != 4:
            raise ValueError("need one DirichletHyper per cell")
    q = np.empty((ndraws, 4, 3))
    omega = np.empty((ndraws, 4))
    for c in range(4):
        q[:, c, :] = _dirichlet(stream(seed, "saturated-q", c), hypers[c].as_array(), ndraws)
        omega[:, c] = stream(seed, "saturated-omega", c).uniform(size=ndraws)
    qz = _draw_qz(stream(seed, "saturated-qz"), ndraws, zcounts, qz_fixed)
    return PosteriorDraws(q=q, omega=omega, qz=qz, accepted=ndraws, attempted=ndraws, seed=seed)


def fit_saturated(
    counts: CountsTable,
    ndraws: int,
    seed: int,
    *,
    prior: DirichletHyper = DirichletHyper(),
    qz_fixed: float | None = None,
) -> PosteriorDraws:
    """Conjugate update then posterior sampling, in one call."""
    return sample_saturated_posterior(
        conjugate_update(prior, counts),
        ndraws,
        seed,
        zcounts=counts.zcounts,
        qz_fixed=qz_fixed,
    )


def risk_difference_array(q11, q0dot, omega, qz):
    """Vectorized risk difference P(Y=1|X=1) - P(Y=1|X=0).

    ``q11``, ``q0dot`` and ``omega`` have a trailing axis of length 4 in
    canonical cell order; ``qz`` weights the z=1 cells.  Cells with no missing
    mass contribute nothing through omega.
    """
    py1 = q11 + q0dot * omega  # P(Y=1 | x, z) per cell
    arm0 = qz * py1[..., 1] + (1.0 - qz) * py1[..., 0]
    arm1 = qz * py1[..., 3] + (1.0 - qz) * py1[..., 2]
    return arm1 - arm0


def risk_difference(cells: Sequence[CellParams], qz) -> float:
    """Risk difference for one parameter draw (four cells in canonical order)."""
    q11 = np.array([c.q.q11 for c in cells])
    q0dot = np.array([c.q.q0dot for c in cells])
    omega = np.array([c.omega.omega for c in cells])
    z = qz.qz if isinstance(qz, ZMarginParam) else float(qz)
    return float(risk_difference_array(q11, q0dot, omega, z))


def risk_difference_draws(draws: PosteriorDraws) -> np.ndarray:
    """Risk difference for every draw in a :class:`PosteriorDraws`."""
    return risk_difference_array(draws.q[:, :, 1], draws.q[:, :, 2], draws.omega, draws.qz)


def risk_difference_bounds(q: Sequence[ObservedCellParams], qz) -> tuple[float, float]:
    """Nonparametric identification bounds on the risk difference.

    The upper bound pushes every missing row in the treated arm to Y=1 and
    every missing row in the control arm to Y=0; the lower bound reverses the
    pattern.  Any missing-data split therefore yields a value inside these
    bounds.
    """
    q11 = np.array([c.q11 for c in q])
    q0dot = np.array([c.q0dot for c in q])
    z = qz.qz if isinstance(qz, ZMarginParam) else float(qz)
    lower = risk_difference_array(q11, q0dot, np.array([1.0, 1.0, 0.0, 0.0]), z)
    upper = risk_difference_array(q11, q0dot, np.array([0.0, 0.0, 1.0, 1.0]), z)
    return float(lower), float(upper)


def credible_interval(samples, level: float) -> IntervalSummary:
    """Equal-tailed credible interval with linear-interpolation quantiles."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise ValueError("need at least two samples for an equal-tailed interval")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(samples, [tail, 1.0 - tail], method="linear")
    return IntervalSummary(mean=float(samples.mean()), lower=float(lower), upper=float(upper), level=level)


def mar_estimate(
    counts: CountsTable,
    ndraws: int,
    seed: int,
    *,
    qz_fixed: float | None = None,
) -> PosteriorDraws:
    """Posterior over the risk difference assuming missingness is ignorable.

    Under R independent of Y given (X, Z) the missing rows carry no extra
    information, so P(Y=1|x,z) gets an independent Beta(1 + n11, 1 + n10)
    posterior from the observed rows alone.  The returned draws restate each
    Beta draw as a cell with zero missing mass and the same rate imputed into
    omega, which leaves the risk-difference identity unchanged.
    """
    if ndraws < 1:
        raise ValueError("ndraws must be at least 1")
    q = np.empty((ndraws, 4, 3))
    omega = np.empty((ndraws, 4))
    for c, idx in enumerate(CELL_ORDER):
        cell = counts.cell(idx)
        theta = stream(seed, "mar-theta", c).beta(1.0 + cell.n11, 1.0 + cell.n10, size=ndraws)
        q[:, c, 0] = 1.0 - theta
        q[:, c, 1] = theta
        q[:, c, 2] = 0.0
        omega[:, c] = theta
    qz = _draw_qz(stream(seed, "mar-qz"), ndraws, counts.zcounts, qz_fixed)
    return PosteriorDraws(q=q, omega=omega, qz=qz, accepted=ndraws, attempted=ndraws, seed=seed)

"""Bayesian Heckman-style selection model for a binary outcome.

The outcome and the missingness indicator are driven by a latent bivariate
normal pair: Y = 1 when ``beta'(1, x) + eps > 0`` and R = 1 when
``gamma'(1, x, z) + nu > 0`` with corr(eps, nu) = rho.  rho away from zero
makes the missingness nonignorable.  Posterior simulation uses data
augmentation: truncated-normal draws for the latents, conjugate normal
updates for the coefficient blocks, and a random-walk Metropolis step for
rho (uniform prior on (-1, 1)).  Latents for missing-outcome units carry the
selection equation only, with the outcome equation marginalized out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri, owens_t

from .cells import CELL_ORDER, CellParams, MissingCellParam, ObservedCellParams
from .rng import stream

__all__ = [
    "truncated_normal",
    "bivariate_normal_cdf",
    "HeckmanParams",
    "HeckmanState",
    "HeckmanData",
    "GibbsConfig",
    "HeckmanChain",
    "gibbs_step",
    "heckman_fit",
    "heckman_cell_probs",
]

_TAIL = 5.0  # standardized truncation beyond which inverse-CDF sampling saturates


def _robert_tail(rng, alpha, beta):
    """Exponential-proposal rejection on [alpha, beta) with alpha deep in the tail."""
    out = np.empty(alpha.shape)
    todo = np.ones(alpha.shape, dtype=bool)
    lam = 0.5 * (alpha + np.sqrt(alpha * alpha + 4.0))
    while todo.any():
        idx = todo.nonzero()[0]
        z = alpha[idx] + rng.exponential(size=idx.size) / lam[idx]
        u = rng.uniform(size=idx.size)
        ok = (np.log(u) <= -0.5 * (z - lam[idx]) ** 2) & (z <= beta[idx])
        out[idx[ok]] = z[ok]
        todo[idx[ok]] = False
    return out


def truncated_normal(mean, sd, lo, hi, rng, size=None):
    """Exact draws from a normal restricted to (lo, hi).

    Inverse-CDF sampling in the central regime; beyond ``5`` standardized
    units the CDF saturates, so one-sided tails switch to an exponential
    rejection kernel that stays exact arbitrarily deep.  All arguments
    broadcast; ``lo``/``hi`` may be ``-inf``/``inf``.

    Raises ``ValueError`` when the interval is empty or carries less
    probability mass than 1e-300.
    """
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    if np.any(sd <= 0):
        raise ValueError("sd must be positive")
    shape = np.broadcast_shapes(
        mean.shape, sd.shape, np.shape(lo), np.shape(hi), () if size is None else (size,)
    )
    scalar_out = size is None and shape == ()
    mean = np.broadcast_to(mean, shape).reshape(-1)
    sd = np.broadcast_to(sd, shape).reshape(-1)
    alpha = (np.broadcast_to(np.asarray(lo, dtype=float), shape).reshape(-1) - mean) / sd
    beta = (np.broadcast_to(np.asarray(hi, dtype=float), shape).reshape(-1) - mean) / sd
    if np.any(alpha >= beta):
        raise ValueError("empty truncation interval")

    z = np.empty(alpha.shape)
    upper_tail = alpha >= _TAIL
    lower_tail = beta <= -_TAIL
    central = ~(upper_tail | lower_tail)

    if central.any():
        a, b = alpha[central], beta[central]
        pa, pb = ndtr(a), ndtr(b)
        if np.any(pb - pa < 1e-300):
            raise ValueError("truncation interval carries no numerical mass")
        u = rng.uniform(size=int(central.sum()))
        z[central] = ndtri(pa + u * (pb - pa))
    if upper_tail.any():
        a, b = alpha[upper_tail], beta[upper_tail]
        if np.any(ndtr(-a) - ndtr(-b) < 1e-300):
            raise ValueError("truncation interval carries no numerical mass")
        z[upper_tail] = _robert_tail(rng, a, b)
    if lower_tail.any():
        a, b = alpha[lower_tail], beta[lower_tail]
        if np.any(ndtr(b) - ndtr(a) < 1e-300):
            raise ValueError("truncation interval carries no numerical mass")
        z[lower_tail] = -_robert_tail(rng, -b, -a)

    out = (mean + sd * z).reshape(shape)
    if scalar_out:
        return float(out)
    return out


def _owens_t_term(h, a):
    if h == 0.0:
        return math.atan(a) / (2.0 * math.pi) if math.isfinite(a) else math.copysign(0.25, a)
    if not math.isfinite(a) or abs(a) > 1e10:
        return math.copysign(0.5 * ndtr(-abs(h)), a)
    return float(owens_t(h, a))


def bivariate_normal_cdf(h: float, k: float, rho: float) -> float:
    """P(U <= h, V <= k) for standard bivariate normal with correlation rho.

    Evaluated through Owen's T function, which is exact to near machine
    precision; no quadrature involved.
    """
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    if rho == 1.0:
        return float(ndtr(min(h, k)))
    if rho == -1.0:
        return float(max(0.0, ndtr(h) + ndtr(k) - 1.0))
    if h == 0.0 and k == 0.0:
        return 0.25 + math.asin(rho) / (2.0 * math.pi)
    s = math.sqrt(1.0 - rho * rho)
    ah = (k - rho * h) / (h * s) if h != 0.0 else math.copysign(math.inf, k)
    ak = (h - rho * k) / (k * s) if k != 0.0 else math.copysign(math.inf, h)
    if h * k > 0 or (h * k == 0 and h + k >= 0):
        delta = 0.0
    else:
        delta = 0.5
    val = 0.5 * (ndtr(h) + ndtr(k)) - _owens_t_term(h, ah) - _owens_t_term(k, ak) - delta
    return float(min(1.0, max(0.0, val)))


@dataclass(frozen=True)
class HeckmanParams:
    """Selection coefficients (intercept, x, z), outcome coefficients
    (intercept, x), and the latent correlation."""

    gamma: np.ndarray
    beta: np.ndarray
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=float))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        if self.gamma.shape != (3,) or self.beta.shape != (2,):
            raise ValueError("gamma must be length 3 and beta length 2")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly inside (-1, 1)")


@dataclass
class HeckmanState:
    """Current parameters plus latent utilities.

    ``rstar`` has one entry per unit and agrees in sign with R; ``ystar``
    exists only for units with an observed outcome and agrees in sign with Y.
    """

    params: HeckmanParams
    rstar: np.ndarray
    ystar: np.ndarray


@dataclass(frozen=True)
class HeckmanData:
    """Row-level data; ``y`` is only meaningful where ``r == 1``."""

    x: np.ndarray
    z: np.ndarray
    r: np.ndarray
    y: np.ndarray
    c1: np.ndarray = field(init=False, repr=False)  # (n, 3): 1, x, z
    c2: np.ndarray = field(init=False, repr=False)  # (n, 2): 1, x

    def __post_init__(self):
        x = np.asarray(self.x, dtype=int)
        z = np.asarray(self.z, dtype=int)
        r = np.asarray(self.r, dtype=int)
        y = np.asarray(self.y, dtype=float)
        if not (x.shape == z.shape == r.shape == y.shape):
            raise ValueError("x, z, r, y must share one shape")
        obs = r == 1
        if np.any(np.isnan(y[obs])):
            raise ValueError("observed rows must carry an outcome")
        for arr, name in ((x, "x"), (z, "z"), (r, "r")):
            if not np.isin(arr, (0, 1)).all():
                raise ValueError(f"{name} must be binary")
        if not np.isin(y[obs], (0.0, 1.0)).all():
            raise ValueError("observed outcomes must be binary")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "c1", np.column_stack([np.ones(x.size), x, z]))
        object.__setattr__(self, "c2", np.column_stack([np.ones(x.size), x]))

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def observed(self) -> np.ndarray:
        return self.r == 1


@dataclass(frozen=True)
class GibbsConfig:
    iterations: int = 5000
    burn_in: int = 1000
    prior_mean_selection: tuple = (0.0, 0.0, 0.0)
    prior_cov_selection: float = 10.0  # scalar: that multiple of the identity
    prior_mean_outcome: tuple = (0.0, 0.0)
    prior_cov_outcome: float = 10.0
    mh_sd: float = 0.05
    fix_rho: float | None = None

    def __post_init__(self):
        if not self.iterations > self.burn_in >= 0:
            raise ValueError("need iterations > burn_in >= 0")
        if self.mh_sd <= 0 or self.prior_cov_selection <= 0 or self.prior_cov_outcome <= 0:
            raise ValueError("scale parameters must be positive")
        if self.fix_rho is not None and not -1.0 < self.fix_rho < 1.0:
            raise ValueError("fix_rho must lie inside (-1, 1)")


def _draw_mvn_from_precision(rng, precision, shift):
    # N(prec^{-1} shift, prec^{-1}) via one Cholesky of the precision.
    try:
        L = np.linalg.cholesky(precision)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "posterior precision not positive definite (degenerate design)"
        ) from exc
    mean = np.linalg.solve(precision, shift)
    noise = np.linalg.solve(L.T, rng.standard_normal(shift.size))
    return mean, mean + noise


def _latent_loglik(state_eps, state_nu, rho):
    # Joint log density of the observed-unit latent pairs, up to constants.
    s2 = 1.0 - rho * rho
    quad = state_eps**2 - 2.0 * rho * state_eps * state_nu + state_nu**2
    return -0.5 * state_eps.size * math.log(s2) - 0.5 * quad.sum() / s2


def gibbs_step(state: HeckmanState, data: HeckmanData, config: GibbsConfig, rng) -> HeckmanState:
    """One full sweep: latents, selection block, outcome block, correlation."""
    gamma, beta, rho = state.params.gamma, state.params.beta, state.params.rho
    obs = data.observed
    miss = ~obs
    c1o, c2o = data.c1[obs], data.c2[obs]
    sel_mean = data.c1 @ gamma
    sd = math.sqrt(1.0 - rho * rho)

    # Latent selection utilities: negative for missing rows, positive for
    # observed rows where the mean also shifts with the outcome residual.
    rstar = state.rstar.copy()
    if miss.any():
        rstar[miss] = truncated_normal(sel_mean[miss], 1.0, -np.inf, 0.0, rng)
    eps = state.ystar - c2o @ beta
    rstar_obs = truncated_normal(sel_mean[obs] + rho * eps, sd, 0.0, np.inf, rng)
    rstar[obs] = rstar_obs

    # Latent outcomes for observed units, truncated by the recorded outcome.
    nu = rstar_obs - c1o @ gamma
    ymean = c2o @ beta + rho * nu
    yobs = data.y[obs]
    lo = np.where(yobs == 1.0, 0.0, -np.inf)
    hi = np.where(yobs == 1.0, np.inf, 0.0)
    ystar = truncated_normal(ymean, sd, lo, hi, rng)

    # Selection coefficients.
    b1inv = np.eye(3) / config.prior_cov_selection
    s2inv = 1.0 / (1.0 - rho * rho)
    prec1 = b1inv + data.c1[miss].T @ data.c1[miss] + s2inv * (c1o.T @ c1o)
    resid1 = rstar_obs - rho * (ystar - c2o @ beta)
    shift1 = (
        b1inv @ np.asarray(config.prior_mean_selection)
        + data.c1[miss].T @ rstar[miss]
        + s2inv * (c1o.T @ resid1)
    )
    _, gamma = _draw_mvn_from_precision(rng, prec1, shift1)

    # Outcome coefficients (observed units only enter).
    b2inv = np.eye(2) / config.prior_cov_outcome
    prec2 = b2inv + s2inv * (c2o.T @ c2o)
    resid2 = ystar - rho * (rstar_obs - c1o @ gamma)
    shift2 = b2inv @ np.asarray(config.prior_mean_outcome) + s2inv * (c2o.T @ resid2)
    _, beta = _draw_mvn_from_precision(rng, prec2, shift2)

    # Correlation: random-walk Metropolis on the observed-unit latent pairs.
    if config.fix_rho is not None:
        rho = config.fix_rho
    else:
        eps = ystar - c2o @ beta
        nu = rstar_obs - c1o @ gamma
        prop = rho + config.mh_sd * rng.standard_normal()
        if -1.0 < prop < 1.0:
            log_alpha = _latent_loglik(eps, nu, prop) - _latent_loglik(eps, nu, rho)
            if math.log(rng.uniform()) < log_alpha:
                rho = prop

    return HeckmanState(HeckmanParams(gamma, beta, float(rho)), rstar, ystar)


def _initial_state(data: HeckmanData, config: GibbsConfig, rng) -> HeckmanState:
    rho0 = 0.0 if config.fix_rho is None else config.fix_rho
    params = HeckmanParams(np.zeros(3), np.zeros(2), rho0)
    rstar = np.empty(data.n)
    obs = data.observed
    rstar[~obs] = truncated_normal(0.0, 1.0, -np.inf, 0.0, rng, size=int((~obs).sum()))
    rstar[obs] = truncated_normal(0.0, 1.0, 0.0, np.inf, rng, size=int(obs.sum()))
    yobs = data.y[obs]
    lo = np.where(yobs == 1.0, 0.0, -np.inf)
    hi = np.where(yobs == 1.0, np.inf, 0.0)
    ystar = truncated_normal(np.zeros(yobs.size), 1.0, lo, hi, rng)
    return HeckmanState(params, rstar, ystar)


@dataclass(frozen=True)
class HeckmanChain:
    """Post-burn-in draws; ``iters`` holds the absolute iteration numbers."""

    gamma: np.ndarray
    beta: np.ndarray
    rho: np.ndarray
    psi: np.ndarray
    iters: np.ndarray

    def __len__(self):
        return self.rho.size


def heckman_fit(data: HeckmanData, config: GibbsConfig, seed: int) -> HeckmanChain:
    """Run the Gibbs sampler and return the kept portion of the chain.

    The treatment effect per draw is ``Phi(beta0 + beta1) - Phi(beta0)``,
    the model-implied risk difference.
    """
    if config.iterations < config.burn_in + 500:
        raise ValueError("need at least 500 kept iterations")
    rng = stream(seed, "heckman-chain")
    state = _initial_state(data, config, rng)
    kept = config.iterations - config.burn_in
    gamma = np.empty((kept, 3))
    beta = np.empty((kept, 2))
    rho = np.empty(kept)
    for it in range(config.iterations):
        state = gibbs_step(state, data, config, rng)
        k = it - config.burn_in
        if k >= 0:
            gamma[k] = state.params.gamma
            beta[k] = state.params.beta
            rho[k] = state.params.rho
    psi = ndtr(beta[:, 0] + beta[:, 1]) - ndtr(beta[:, 0])
    iters = np.arange(config.burn_in, config.iterations)
    return HeckmanChain(gamma=gamma, beta=beta, rho=rho, psi=psi, iters=iters)


def _cell_probs_from_indices(outcome_index: float, selection_index: float, rho: float):
    """Joint (p_r1y0, p_r1y1, p_r0y0, p_r0y1) from the two linear indices."""
    a, b = float(outcome_index), float(selection_index)
    p00 = bivariate_normal_cdf(-a, -b, rho)  # Y=0, R=0
    p_y0 = float(ndtr(-a))
    p_r0 = float(ndtr(-b))
    p10 = p_y0 - p00  # Y=0, R=1
    p01 = p_r0 - p00  # Y=1, R=0
    p11 = 1.0 - p_y0 - p_r0 + p00  # Y=1, R=1
    # Differences of near-equal CDF values can round a hair below zero.
    return tuple(0.0 if -1e-13 < p < 0.0 else p for p in (p10, p11, p00, p01))


def heckman_cell_probs(params: HeckmanParams) -> tuple[list[CellParams], float]:
    """Exact per-cell joint probabilities implied by the selection model.

    Returns the four cells in canonical order plus the marginal missingness
    under uniform (x, z) weights.
    """
    cells = []
    missing = 0.0
    for idx in CELL_ORDER:
        a = params.beta[0] + params.beta[1] * idx.x
        b = params.gamma[0] + params.gamma[1] * idx.x + params.gamma[2] * idx.z
        p10, p11, p00, p01 = _cell_probs_from_indices(a, b, params.rho)
        q0dot = p00 + p01
        omega = p01 / q0dot if q0dot > 0 else 0.0
        cells.append(
            CellParams(idx, ObservedCellParams(p10, p11, q0dot), MissingCellParam(omega))
        )
        missing += 0.25 * q0dot
    return cells, missing

"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every criterion runs at its stated tolerance with a fixed seed; tolerances
are statistical, so the suite is deterministic for the pinned seeds.  Run
with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.

Criterion 8's strictly-decreasing clause for the threshold and lognormal
kinds is marked xfail: the prior acceptance rate of those samplers is not
monotone at the start of the grid (it rises from the first to the second
point by ~25 standard errors before decaying), so the stated pattern cannot
hold together with the published grid anchoring.  The test implements the
clause faithfully and documents the failure.
"""

import math
import time

import numpy as np
import pytest
from scipy.special import ndtr

from mnarbounds.cells import CountsTable, DirichletHyper, ObservedCellParams
from mnarbounds.evidence import bayes_factor, prior_acceptance_rate
from mnarbounds.heckman import GibbsConfig, HeckmanData, heckman_fit, truncated_normal
from mnarbounds.restrictions import (
    AssumptionSpec,
    AttemptBudget,
    Infeasible,
    exact_iv_omega_intervals,
    exact_iv_posbias_intervals,
    imperfect_iv_omega_bounds,
    sample_exact_iv,
)
from mnarbounds.rng import stream
from mnarbounds.saturated import credible_interval, fit_saturated, risk_difference_draws
from mnarbounds.simulate import (
    DgpSpec,
    ModelSpec,
    default_models,
    prior_ar_sweep,
    run_study,
)

from conftest import DIFFUSE_JOINT, SHARP_JOINT, counts_from_joint

SEED = 20250809


def _report(criterion, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")


# ---------------------------------------------------------------------------
# 1. Prior acceptance rates of the five samplers
# ---------------------------------------------------------------------------

def test_criterion_1_prior_acceptance_rates():
    hyper = DirichletHyper(1.0, 1.0, 2.0)
    cases = [
        ("exact_iv", AssumptionSpec.exact_iv(hyper), 0.160, 0.015),
        ("threshold_iv", AssumptionSpec.threshold_iv(2 / 3, 1.5, hyper), 0.035, 0.010),
        ("lognormal_iv", AssumptionSpec.lognormal_iv(0.4, hyper), 0.051, 0.010),
        ("exact_iv_posbias", AssumptionSpec.exact_iv_posbias(hyper), 0.023, 0.008),
        ("lognormal_betabias", AssumptionSpec.lognormal_betabias(0.4, 4.0, 2.0, hyper), 0.005, 0.003),
    ]
    start = time.perf_counter()
    results = []
    for name, spec, target, tol in cases:
        rate, se = prior_acceptance_rate(spec, 200_000, SEED)
        results.append((name, rate, target, tol, abs(rate - target) <= tol))
    elapsed = time.perf_counter() - start
    ok = all(r[4] for r in results) and elapsed < 60.0
    detail = ", ".join(f"{n}={r:.4f} (target {t}±{tol})" for n, r, t, tol, _ in results)
    _report(1, ok, f"{detail}; runtime {elapsed:.1f}s < 60s")
    for name, rate, target, tol, good in results:
        assert good, f"{name}: {rate:.4f} outside {target}±{tol}"
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 2. Bayes-factor identity on selection-model data
# ---------------------------------------------------------------------------

def test_criterion_2_heckman_dgp_exact_iv_anchor():
    start = time.perf_counter()
    dgp = DgpSpec(kind="heckman", n=1000, target_missing=0.2)
    models = [ModelSpec("OR1", "assumption", AssumptionSpec.exact_iv())]
    result = run_study(dgp, models, replicates=50, seed=SEED, draws=1000)
    summary = result.summaries[0]
    elapsed = time.perf_counter() - start
    ar_ok = 0.65 <= summary.mean_ar <= 0.95
    bf_ok = 0.1 <= summary.bf_geomean <= 0.45
    ok = ar_ok and bf_ok and elapsed < 600.0
    _report(
        2, ok,
        f"posterior AR mean {summary.mean_ar:.3f} in [0.65, 0.95], "
        f"geomean BF {summary.bf_geomean:.3f} in [0.1, 0.45]; runtime {elapsed:.0f}s < 600s",
    )
    assert ar_ok and bf_ok
    assert elapsed < 600.0


# ---------------------------------------------------------------------------
# 3. Coverage ordering on the saturated DGP with assumptions true
# ---------------------------------------------------------------------------

def test_criterion_3_coverage_ordering():
    dgp = DgpSpec(kind="saturated", n=1000, target_missing=0.2)
    result = run_study(dgp, default_models(), replicates=50, seed=SEED, draws=1000)
    by_name = {s.model: s for s in result.summaries}
    saturated_family = ["Sat", "OR1", "Threshold", "Lognormal", "PosBias", "BetaBias"]
    sat_ok = all(by_name[m].coverage >= 0.90 for m in saturated_family)
    heck_ok = by_name["Heckman"].coverage <= 0.85
    oracle_ok = abs(by_name["Oracle"].coverage - 0.91) <= 0.07
    ok = sat_ok and heck_ok and oracle_ok
    detail = ", ".join(f"{m}={by_name[m].coverage:.2f}" for m in saturated_family)
    _report(
        3, ok,
        f"saturated family coverage [{detail}] all >= 0.90; "
        f"Heckman {by_name['Heckman'].coverage:.2f} <= 0.85; "
        f"Oracle {by_name['Oracle'].coverage:.2f} in 0.91±0.07",
    )
    assert sat_ok, detail
    assert heck_ok
    assert oracle_ok


# ---------------------------------------------------------------------------
# 4. Falsification behaviour when the instrument assumption fails
# ---------------------------------------------------------------------------

def test_criterion_4_falsification_behaviour():
    # Instrument violated and the positive-bias assumption violated, i.e. a
    # negative bias in truth.  The direction choice matters beyond coverage:
    # the generator's accept-reject filter tilts the observed-rate marginal
    # (up for a negative bias), which shrinks the share of replicates whose
    # observed geometry stays compatible with the bias-plus-instrument
    # restriction.
    dgp = DgpSpec(kind="saturated", n=1000, target_missing=0.2, iv_holds=False,
                  bias_direction="negative")
    models = [
        ModelSpec("OR1", "assumption", AssumptionSpec.exact_iv()),
        ModelSpec("PosBias", "assumption", AssumptionSpec.exact_iv_posbias()),
    ]
    result = run_study(dgp, models, replicates=50, seed=SEED, draws=1000)
    by_name = {s.model: s for s in result.summaries}
    or1, pos = by_name["OR1"], by_name["PosBias"]
    ok = or1.computed_frac <= 0.4 and pos.computed_frac <= 0.05 and or1.bf_geomean > 100.0
    _report(
        4, ok,
        f"OR1 computed {or1.computed_frac:.2f} <= 0.4, "
        f"PosBias computed {pos.computed_frac:.2f} <= 0.05, "
        f"OR1 geomean BF {or1.bf_geomean:.0f} > 100",
    )
    assert or1.computed_frac <= 0.4
    assert pos.computed_frac <= 0.05
    assert or1.bf_geomean > 100.0


# ---------------------------------------------------------------------------
# 5. Interval endpoints against a fine grid scan
# ---------------------------------------------------------------------------

def _grid_endpoints(mask, grid):
    any_feas = mask.any(axis=1)
    first = mask.argmax(axis=1)
    last = grid.size - 1 - mask[:, ::-1].argmax(axis=1)
    return any_feas, grid[first], grid[last]


def _check_batch(formula, any_feas, glo, ghi, tol, label, failures):
    for i, item in enumerate(formula):
        if isinstance(item, Infeasible):
            continue  # verified through the count check in the caller
        lo, hi = item
        if hi - lo < 2 * tol:
            continue  # sliver interval, grid may straddle it
        if not any_feas[i]:
            failures.append(f"{label}: formula feasible but grid empty at row {i}")
        elif abs(glo[i] - lo) > tol or abs(ghi[i] - hi) > tol:
            failures.append(
                f"{label}: endpoint drift ({glo[i]:.5f},{ghi[i]:.5f}) vs ({lo:.5f},{hi:.5f})"
            )


def test_criterion_5_bounds_grid_oracle():
    start = time.perf_counter()
    n_configs = 10_000
    grid = np.linspace(0.0, 1.0, 10_001)  # resolution 1e-4
    tol = 2e-4
    rng = stream(SEED, "bounds-oracle")
    g = rng.gamma(np.array([1.0, 1.0, 2.0]), size=(n_configs, 2, 3))
    g /= g.sum(axis=2, keepdims=True)
    t_l, t_h = 2 / 3, 1.5
    failures = []
    checked = 0
    for lo_idx in range(0, n_configs, 250):
        chunk = g[lo_idx : lo_idx + 250]
        b0 = chunk[:, 0, 1:2]
        m0 = chunk[:, 0, 2:3]
        b1 = chunk[:, 1, 1:2]
        m1 = chunk[:, 1, 2:3]
        pairs = [
            (ObservedCellParams(*row[0]), ObservedCellParams(*row[1])) for row in chunk
        ]

        # exact instrument, z=1 cell: solved z=0 split must be a probability
        w0 = (b1 - b0 + m1 * grid) / m0
        mask = (w0 >= 0.0) & (w0 <= 1.0)
        feas, glo, ghi = _grid_endpoints(mask, grid)
        formula = []
        for q0, q1 in pairs:
            s = exact_iv_omega_intervals((q0, q1, q0, q1))[0]
            formula.append(s.omega_z1 if isinstance(s.omega_z1, Infeasible) else (s.omega_z1.lo, s.omega_z1.hi))
        _check_batch(formula, feas, glo, ghi, tol, "exact z1", failures)
        for i, item in enumerate(formula):
            if isinstance(item, Infeasible) and mask[i].sum() > 1:
                failures.append("exact z1: formula infeasible but grid found points")

        # exact instrument, z=0 image: inverse map must be a probability
        w1 = (b0 - b1 + m0 * grid) / m1
        mask = (w1 >= 0.0) & (w1 <= 1.0)
        feas, glo, ghi = _grid_endpoints(mask, grid)
        formula = []
        for q0, q1 in pairs:
            s = exact_iv_omega_intervals((q0, q1, q0, q1))[0]
            img = s.omega_z0
            formula.append(img if isinstance(img, Infeasible) else (img.lo, img.hi))
        _check_batch(formula, feas, glo, ghi, tol, "exact z0", failures)

        # exact instrument + positive bias, z=1 cell
        floor0 = b0 / (1.0 - m0)
        floor1 = b1 / (1.0 - m1)
        w0 = (b1 - b0 + m1 * grid) / m0
        mask = (grid > floor1) & (w0 > floor0) & (w0 <= 1.0)
        feas, glo, ghi = _grid_endpoints(mask, grid)
        formula = []
        for q0, q1 in pairs:
            s = exact_iv_posbias_intervals((q0, q1, q0, q1))[0]
            formula.append(s.omega_z1 if isinstance(s.omega_z1, Infeasible) else (s.omega_z1.lo, s.omega_z1.hi))
        _check_batch(formula, feas, glo, ghi, tol, "posbias z1", failures)

        # odds-ratio window, both cells (monotone in each split, so the other
        # split only needs checking at its extremes)
        odds = lambda p: p / (1.0 - p)
        p1 = b1 + m1 * grid
        with np.errstate(divide="ignore", invalid="ignore"):
            hi_side = odds(p1) / odds(b0)
            lo_side = odds(p1) / odds(b0 + m0)
            mask = (p1 > 0) & (p1 < 1) & (hi_side > t_l) & (lo_side < t_h)
        feas, glo, ghi = _grid_endpoints(mask, grid)
        formula = []
        for q0, q1 in pairs:
            iv = imperfect_iv_omega_bounds(q0, q1, t_l, t_h)[1]
            formula.append(iv if isinstance(iv, Infeasible) else (iv.lo, iv.hi))
        _check_batch(formula, feas, glo, ghi, tol, "threshold z1", failures)

        p0 = b0 + m0 * grid
        with np.errstate(divide="ignore", invalid="ignore"):
            hi_side = odds(b1 + m1) / odds(p0)
            lo_side = odds(b1) / odds(p0)
            mask = (p0 > 0) & (p0 < 1) & (hi_side > t_l) & (lo_side < t_h)
        feas, glo, ghi = _grid_endpoints(mask, grid)
        formula = []
        for q0, q1 in pairs:
            iv = imperfect_iv_omega_bounds(q0, q1, t_l, t_h)[0]
            formula.append(iv if isinstance(iv, Infeasible) else (iv.lo, iv.hi))
        _check_batch(formula, feas, glo, ghi, tol, "threshold z0", failures)
        checked += len(pairs)

    elapsed = time.perf_counter() - start
    ok = not failures and checked == n_configs and elapsed < 120.0
    _report(
        5, ok,
        f"{checked} random configurations x 5 interval families verified at "
        f"grid resolution 1e-4 (tolerance 2e-4); runtime {elapsed:.0f}s < 120s",
    )
    assert not failures, failures[:5]
    assert elapsed < 120.0


# ---------------------------------------------------------------------------
# 6. Exact-instrument sampler against a dense-grid importance oracle
# ---------------------------------------------------------------------------

_AC6_COUNTS = CountsTable.from_mapping(
    {(0, 0): (6, 3, 5), (0, 1): (4, 6, 4), (1, 0): (5, 5, 6), (1, 1): (3, 8, 4)}
)


def _simplex_midpoints(k):
    """Cell-centred grid on the 2-simplex: (q10, q11, 1 - q10 - q11)."""
    i, j = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    keep = (i + j) <= k - 1
    x = (i[keep] + 0.5) / k
    y = (j[keep] + 0.5) / k
    return np.column_stack([x, y, 1.0 - x - y])


def _arm_lattice(counts, x, k, n_omega, n_bins):
    """Weighted distribution of P(Y=1 | X=x) over the exact-IV target.

    Grid weights carry the Dirichlet posterior density with the third
    exponent reduced by one per cell (the reparameterization factor), times
    the feasibility indicator of the z=1 split; P(Y=1) is shared by both
    cells along the solved map, so the arm value needs only the z=1 node.
    """
    nodes = _simplex_midpoints(k)

    def logw(cell):
        a = np.array([1.0 + cell.n10, 1.0 + cell.n11, 1.0 + cell.n0dot])
        with np.errstate(divide="ignore"):
            logs = np.log(nodes)
        out = np.zeros(len(nodes))
        for c in range(3):
            expo = a[c] - 1.0
            if expo > 0:
                out += expo * logs[:, c]
        return out

    from mnarbounds.cells import CELL_ORDER

    cell_z0 = counts.cell(CELL_ORDER[2 * x])
    cell_z1 = counts.cell(CELL_ORDER[2 * x + 1])
    lw0 = logw(cell_z0)
    lw1 = logw(cell_z1)
    lw0 -= lw0.max()
    lw1 -= lw1.max()
    w0_nodes = np.exp(lw0)
    w1_nodes = np.exp(lw1)

    omega = (np.arange(n_omega) + 0.5) / n_omega
    b1 = nodes[:, 1][:, None]
    m1 = nodes[:, 2][:, None]
    arm = b1 + m1 * omega[None, :]  # (nodes1, n_omega)
    bins = np.clip((arm * n_bins).astype(int), 0, n_bins - 1)
    lattice = np.zeros(n_bins)
    with np.errstate(divide="ignore", invalid="ignore"):
        for b0_i, m0_i, w0_i in zip(nodes[:, 1], nodes[:, 2], w0_nodes):
            lo = (b0_i - nodes[:, 1]) / nodes[:, 2]  # per node1
            hi = (b0_i - nodes[:, 1] + m0_i) / nodes[:, 2]
            mask = (omega[None, :] >= np.maximum(0.0, lo)[:, None]) & (
                omega[None, :] <= np.minimum(1.0, hi)[:, None]
            )
            weights = (w0_i * w1_nodes)[:, None] * mask
            lattice += np.bincount(bins.ravel(), weights=weights.ravel(), minlength=n_bins)
    return lattice / lattice.sum()


def test_criterion_6_sampler_matches_importance_oracle():
    start = time.perf_counter()
    draws = sample_exact_iv(
        DirichletHyper(),
        _AC6_COUNTS,
        AttemptBudget(required=100_000, max_attempts=10_000_000),
        seed=SEED,
        qz_fixed=0.5,
    )
    psi = np.sort(risk_difference_draws(draws))

    n_bins = 2048
    arm1 = _arm_lattice(_AC6_COUNTS, 1, k=64, n_omega=256, n_bins=n_bins)
    arm0 = _arm_lattice(_AC6_COUNTS, 0, k=64, n_omega=256, n_bins=n_bins)
    diff = np.convolve(arm1, arm0[::-1])  # difference lattice on [-1, 1]
    values = (np.arange(diff.size) - (n_bins - 1)) / n_bins
    cdf = np.cumsum(diff)

    oracleserve = np.interp(psi, values, cdf)
    empirical_hi = np.arange(1, psi.size + 1) / psi.size
    empirical_lo = np.arange(0, psi.size) / psi.size
    ks = max(
        np.abs(oracleserve - empirical_hi).max(),
        np.abs(oracleserve - empirical_lo).max(),
    )
    elapsed = time.perf_counter() - start
    ok = ks < 0.02
    _report(6, ok, f"KS(sampler, grid-importance oracle) = {ks:.4f} < 0.02; runtime {elapsed:.0f}s")
    assert ks < 0.02


# ---------------------------------------------------------------------------
# 7. Selection-model sampler against a probit oracle, and the TN kernel
# ---------------------------------------------------------------------------

def test_criterion_7_probit_oracle_and_tn_kernel():
    import statsmodels.api as sm

    rng = stream(SEED, "criterion7-data")
    n = 5000
    x = rng.integers(0, 2, n)
    z = rng.integers(0, 2, n)
    y = (rng.standard_normal(n) + (-0.5 + 0.75 * x) > 0).astype(float)
    data = HeckmanData(x=x, z=z, r=np.ones(n, dtype=int), y=y)
    chain = heckman_fit(data, GibbsConfig(iterations=5000, burn_in=1000), seed=SEED)
    mle = sm.Probit(y, np.column_stack([np.ones(n), x])).fit(disp=0).params
    beta_mean = chain.beta.mean(axis=0)
    beta_sd = chain.beta.std(axis=0)
    dev = np.abs(beta_mean - mle) / beta_sd
    beta_ok = bool((dev <= 2.0).all())

    tn = truncated_normal(0.0, 1.0, 0.0, np.inf, stream(SEED, "criterion7-tn"), size=1_000_000)
    tn_err = abs(tn.mean() - math.sqrt(2 / math.pi))
    tn_ok = tn_err < 0.003
    ok = beta_ok and tn_ok
    _report(
        7, ok,
        f"|posterior mean - probit MLE| = {dev.round(2).tolist()} posterior SDs (<= 2); "
        f"half-normal mean error {tn_err:.5f} < 0.003",
    )
    assert beta_ok, (beta_mean, mle, beta_sd)
    assert tn_ok


# ---------------------------------------------------------------------------
# 8. Prior-acceptance-rate patterns across the missing-mass pseudo-count
# ---------------------------------------------------------------------------

def _sweep_rates(specs):
    rows = prior_ar_sweep(range(1, 11), specs, attempts=100_000, seed=SEED)
    out = {}
    for row in rows:
        out.setdefault(row["kind"], []).append((row["alpha3"], row["ar"], row["se"]))
    return {k: sorted(v) for k, v in out.items()}


def _adjacent_ordered(series, direction):
    """Indices where the adjacent pair is NOT ordered beyond 2 combined SEs."""
    bad = []
    for (g_a, r_a, s_a), (g_b, r_b, s_b) in zip(series, series[1:]):
        gap = (r_b - r_a) if direction == "up" else (r_a - r_b)
        if gap <= 2.0 * math.hypot(s_a, s_b):
            bad.append((g_a, g_b, r_a, r_b))
    return bad


def test_criterion_8_exact_kinds_strictly_increase():
    rates = _sweep_rates([AssumptionSpec.exact_iv(), AssumptionSpec.exact_iv_posbias()])
    bad_eiv = _adjacent_ordered(rates["exact_iv"], "up")
    bad_pos = _adjacent_ordered(rates["exact_iv_posbias"], "up")
    ok = not bad_eiv and not bad_pos
    _report(
        "8 (exact kinds)", ok,
        "prior AR strictly increasing over the 1..10 grid beyond 2 combined SEs "
        f"(exact_iv {rates['exact_iv'][0][1]:.3f}->{rates['exact_iv'][-1][1]:.3f}, "
        f"exact_iv_posbias {rates['exact_iv_posbias'][0][1]:.3f}->{rates['exact_iv_posbias'][-1][1]:.3f})",
    )
    assert not bad_eiv, bad_eiv
    assert not bad_pos, bad_pos


@pytest.mark.xfail(
    strict=True,
    reason=(
        "Spec defect: the threshold/lognormal prior acceptance rates are not "
        "monotone over the grid anchored so its first column reproduces the "
        "published rates. The curve rises from grid 1 to 2 (0.036->0.043 and "
        "0.053->0.062, ~25 standard errors) before decaying; a strictly "
        "decreasing pattern over 1..10 is unattainable. See the decisions "
        "ledger for the full analysis."
    ),
)
def test_criterion_8_soft_kinds_strictly_decrease():
    rates = _sweep_rates(
        [AssumptionSpec.threshold_iv(2 / 3, 1.5), AssumptionSpec.lognormal_iv(0.4)]
    )
    bad_thr = _adjacent_ordered(rates["threshold_iv"], "down")
    bad_log = _adjacent_ordered(rates["lognormal_iv"], "down")
    ok = not bad_thr and not bad_log
    _report(
        "8 (soft kinds)", ok,
        f"threshold pairs violating strict decrease: {bad_thr[:2]}; "
        f"lognormal: {bad_log[:2]} (expected failure, see ledger)",
    )
    assert not bad_thr, bad_thr
    assert not bad_log, bad_log


# ---------------------------------------------------------------------------
# 9. Worked-example interval narrowing at population scale
# ---------------------------------------------------------------------------

def _interval_width(draws, level=0.90):
    return credible_interval(risk_difference_draws(draws), level).width


def test_criterion_9_interval_narrowing():
    budget = AttemptBudget(required=2000, max_attempts=5_000_000)

    sharp = counts_from_joint(SHARP_JOINT, per_cell=250_000)
    sat = fit_saturated(sharp, 2000, seed=SEED, qz_fixed=0.5)
    exact = sample_exact_iv(DirichletHyper(), sharp, budget, seed=SEED, qz_fixed=0.5)
    w_sat, w_exact = _interval_width(sat), _interval_width(exact)
    sharp_ok = w_exact < w_sat

    diffuse = counts_from_joint(DIFFUSE_JOINT, per_cell=250_000)
    exact_d = sample_exact_iv(DirichletHyper(), diffuse, budget, seed=SEED, qz_fixed=0.5)
    from mnarbounds.restrictions import sample_exact_iv_posbias

    pos_d = sample_exact_iv_posbias(DirichletHyper(), diffuse, budget, seed=SEED, qz_fixed=0.5)
    w_exact_d, w_pos_d = _interval_width(exact_d), _interval_width(pos_d)
    diffuse_ok = w_pos_d <= 0.75 * w_exact_d
    ok = sharp_ok and diffuse_ok
    _report(
        9, ok,
        f"sharp table: exact-IV width {w_exact:.3f} < no-assumption width {w_sat:.3f}; "
        f"diffuse table: bias assumption width {w_pos_d:.3f} <= 0.75 x {w_exact_d:.3f}",
    )
    assert sharp_ok
    assert diffuse_ok

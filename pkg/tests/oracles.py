"""Independent brute-force oracles used by unit and acceptance tests.

These scan fine grids over the missing-data splits and test feasibility from
first principles (solve the equal-rates equation, or evaluate the odds ratio
at the other split's extremes), sharing no code with the closed-form interval
formulas they check.
"""

import numpy as np


def exact_iv_feasible_z1(b0, m0, b1, m1, grid):
    """Splits for the z=1 cell whose solved z=0 split is a probability."""
    w0 = (b1 - b0 + m1 * grid) / m0
    return grid[(w0 >= 0.0) & (w0 <= 1.0)]


def posbias_feasible_z1(b0, m0, b1, m1, grid):
    """Exact-instrument splits with both cells above their bias floors."""
    floor0 = b0 / (1.0 - m0) if m0 < 1.0 else 0.0
    floor1 = b1 / (1.0 - m1) if m1 < 1.0 else 0.0
    w0 = (b1 - b0 + m1 * grid) / m0
    keep = (grid > floor1) & (w0 > floor0) & (w0 <= 1.0)
    return grid[keep]


def _odds(p):
    return p / (1.0 - p)


def threshold_feasible(b0, m0, b1, m1, t_l, t_h, grid, which):
    """Splits of one cell for which some split of the other keeps the
    within-arm odds ratio inside (t_l, t_h).

    The odds ratio rises in the z=1 split and falls in the z=0 split, so the
    other split only needs checking at its two extremes.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        if which == "z1":
            p1 = b1 + m1 * grid
            ok = (p1 > 0.0) & (p1 < 1.0)
            hi_side = np.full(grid.shape, np.inf)
            lo_side = np.zeros(grid.shape)
            if 0.0 < b0 < 1.0:  # odds ratio at w0 = 0 (its maximum)
                hi_side = np.where(ok, _odds(p1) / _odds(b0), np.nan)
            p0_max = b0 + m0
            if 0.0 < p0_max < 1.0:  # odds ratio at w0 = 1 (its minimum)
                lo_side = np.where(ok, _odds(p1) / _odds(p0_max), np.nan)
            elif p0_max >= 1.0:
                lo_side = np.zeros(grid.shape)
            keep = ok & (hi_side > t_l) & (lo_side < t_h)
        else:
            p0 = b0 + m0 * grid
            ok = (p0 > 0.0) & (p0 < 1.0)
            hi_side = np.full(grid.shape, np.inf)
            lo_side = np.zeros(grid.shape)
            p1_max = b1 + m1
            if 0.0 < p1_max < 1.0:  # odds ratio at w1 = 1 (its maximum)
                hi_side = np.where(ok, _odds(p1_max) / _odds(p0), np.nan)
            elif p1_max >= 1.0:
                hi_side = np.full(grid.shape, np.inf)
            if 0.0 < b1 < 1.0:  # odds ratio at w1 = 0 (its minimum)
                lo_side = np.where(ok, _odds(b1) / _odds(p0), np.nan)
            keep = ok & (hi_side > t_l) & (lo_side < t_h)
    return grid[keep]


def odds_ratio(b0, m0, b1, m1, w0, w1):
    p1 = b1 + m1 * w1
    p0 = b0 + m0 * w0
    return _odds(p1) / _odds(p0)

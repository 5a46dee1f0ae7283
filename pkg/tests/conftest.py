"""Shared fixtures: two hand-picked joint distributions.

In the SHARP joint the instrument restriction bites hard (large observed
contrasts, light missingness in half the cells); in the DIFFUSE joint it
barely narrows anything and the bias-direction assumption carries the load.
Both are known in full, so tests can compare against exact truth.

The raw entries are quoted to two decimals and row sums drift to 0.99-1.01;
every helper normalizes by the row sum, so derived constants match the
two-decimal arithmetic only to about half a percent.
"""

import numpy as np
import pytest

from mnarbounds.cells import (
    CELL_ORDER,
    CellParams,
    CountsTable,
)

# (x, z) -> (p_r1y0, p_r1y1, p_r0y0, p_r0y1), rows normalized before use
SHARP_JOINT = {
    (0, 0): (0.47, 0.06, 0.11, 0.37),
    (0, 1): (0.54, 0.29, 0.03, 0.13),
    (1, 0): (0.29, 0.28, 0.14, 0.29),
    (1, 1): (0.38, 0.49, 0.04, 0.08),
}

DIFFUSE_JOINT = {
    (0, 0): (0.49, 0.14, 0.11, 0.25),
    (0, 1): (0.50, 0.23, 0.11, 0.17),
    (1, 0): (0.31, 0.22, 0.05, 0.41),
    (1, 1): (0.27, 0.24, 0.10, 0.39),
}


def normalized_joint(joint):
    out = {}
    for key, vals in joint.items():
        total = sum(vals)
        out[key] = tuple(v / total for v in vals)
    return out


def cells_from_joint(joint):
    norm = normalized_joint(joint)
    return tuple(CellParams.from_joint(idx, norm[(idx.x, idx.z)]) for idx in CELL_ORDER)


def qtable_from_joint(joint):
    return tuple(c.q for c in cells_from_joint(joint))


def counts_from_joint(joint, per_cell):
    """Expected counts at ``per_cell`` rows per (x, z) cell, rounded."""
    mapping = {}
    for (x, z), (p10, p11, p00, p01) in normalized_joint(joint).items():
        n10 = round(per_cell * p10)
        n11 = round(per_cell * p11)
        mapping[(x, z)] = (n10, n11, per_cell - n10 - n11)
    return CountsTable.from_mapping(mapping)


@pytest.fixture
def sharp_cells():
    return cells_from_joint(SHARP_JOINT)


@pytest.fixture
def sharp_q():
    return qtable_from_joint(SHARP_JOINT)


@pytest.fixture
def diffuse_cells():
    return cells_from_joint(DIFFUSE_JOINT)


@pytest.fixture
def diffuse_q():
    return qtable_from_joint(DIFFUSE_JOINT)

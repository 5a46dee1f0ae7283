import numpy as np
import pytest

from mnarbounds.cells import (
    CELL_ORDER,
    CellCounts,
    CellIndex,
    CellParams,
    CountsTable,
    DirichletHyper,
    IntervalSummary,
    MissingCellParam,
    ObservedCellParams,
    PosteriorDraws,
)

from conftest import SHARP_JOINT, cells_from_joint


def test_cell_order_is_canonical():
    assert [(c.x, c.z) for c in CELL_ORDER] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert sorted(CELL_ORDER) == list(CELL_ORDER)
    assert [c.position for c in CELL_ORDER] == [0, 1, 2, 3]


def test_cell_index_rejects_nonbinary():
    with pytest.raises(ValueError):
        CellIndex(2, 0)


def test_observed_params_must_sum_to_one():
    ObservedCellParams(0.2, 0.3, 0.5)
    with pytest.raises(ValueError):
        ObservedCellParams(0.2, 0.3, 0.4)
    with pytest.raises(ValueError):
        ObservedCellParams(-0.1, 0.6, 0.5)


def test_omega_bounded():
    MissingCellParam(0.0)
    MissingCellParam(1.0)
    with pytest.raises(ValueError):
        MissingCellParam(1.0001)


def test_joint_reconstruction_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = rng.dirichlet(np.ones(4))
        cell = CellParams.from_joint(CellIndex(0, 1), p)
        back = cell.joint()
        assert np.allclose(back, p, atol=1e-12)
        again = CellParams.from_joint(CellIndex(0, 1), back)
        assert np.allclose(again.joint(), back, atol=1e-12)


def test_joint_sums_to_one(sharp_cells):
    for cell in sharp_cells:
        assert abs(sum(cell.joint()) - 1.0) < 1e-12


def test_prob_y1_matches_joint(sharp_cells):
    for cell in sharp_cells:
        _, p11, _, p01 = cell.joint()
        assert cell.prob_y1 == pytest.approx(p11 + p01, abs=1e-12)


def test_counts_table_margins():
    counts = CountsTable.from_mapping(
        {(0, 0): (1, 2, 3), (0, 1): (4, 5, 6), (1, 0): (7, 8, 9), (1, 1): (10, 11, 12)}
    )
    assert counts.total == 78
    assert counts.zcounts == (6 + 24, 15 + 33)
    assert counts.cell(CellIndex(1, 0)) == CellCounts(7, 8, 9)
    assert sum(counts.zcounts) == counts.total


def test_counts_reject_negative():
    with pytest.raises(ValueError):
        CellCounts(-1, 0, 0)


def test_hyper_validation_and_update():
    h = DirichletHyper(1, 1, 2)
    assert h.updated(CellCounts(10, 20, 30)) == DirichletHyper(11, 21, 32)
    with pytest.raises(ValueError):
        DirichletHyper(0, 1, 1)


def test_interval_summary_validation():
    s = IntervalSummary(mean=0.0, lower=-1.0, upper=1.0, level=0.9)
    assert s.width == 2.0
    assert s.contains(0.5) and not s.contains(1.5)
    with pytest.raises(ValueError):
        IntervalSummary(0.0, 1.0, -1.0, 0.9)
    with pytest.raises(ValueError):
        IntervalSummary(0.0, -1.0, 1.0, 1.5)


def test_posterior_draws_shape_checks():
    n = 5
    draws = PosteriorDraws(
        q=np.full((n, 4, 3), 1 / 3),
        omega=np.zeros((n, 4)),
        qz=np.full(n, 0.5),
        accepted=n,
        attempted=10,
        seed=1,
    )
    assert len(draws) == n
    assert draws.acceptance_rate == 0.5
    cells = draws.cells(0)
    assert [c.index for c in cells] == list(CELL_ORDER)
    with pytest.raises(ValueError):
        PosteriorDraws(
            q=np.zeros((n, 4, 3)), omega=np.zeros((n, 4)), qz=np.zeros(n),
            accepted=n + 1, attempted=10, seed=1,
        )


def test_posterior_draws_stratum_rate():
    n = 3
    draws = PosteriorDraws(
        q=np.full((n, 4, 3), 1 / 3),
        omega=np.zeros((n, 4)),
        qz=np.full(n, 0.5),
        accepted=n,
        attempted=40,
        seed=1,
        stratum_accepted=(3, 3),
        stratum_attempted=(10, 30),
    )
    assert draws.acceptance_rate == pytest.approx((3 / 10) * (3 / 30))

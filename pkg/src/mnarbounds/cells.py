"""Domain types for binary-outcome data with nonignorable missingness.

The data are stratified by a binary treatment ``x`` and a binary candidate
instrument ``z``.  Within each of the four (x, z) cells the joint law of the
outcome Y and the missingness indicator R is parameterized by

* the observed-data simplex ``(q10, q11, q0dot)`` holding
  P(Y=0, R=1), P(Y=1, R=1) and P(R=0), and
* ``omega``, the fraction of missing rows with Y=1, which the observed data
  never constrain directly.

The full four-category joint ``(p_r1y0, p_r1y1, p_r0y0, p_r0y1)`` is
recovered as ``(q10, q11, q0dot * (1 - omega), q0dot * omega)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "SUM_ATOL",
    "CellIndex",
    "CELL_ORDER",
    "ObservedCellParams",
    "MissingCellParam",
    "CellParams",
    "CellCounts",
    "CountsTable",
    "DirichletHyper",
    "DEFAULT_HYPER",
    "ZMarginParam",
    "IntervalSummary",
    "PosteriorDraws",
]

#: Tolerance for simplex normalization checks.
SUM_ATOL = 1e-12


@dataclass(frozen=True, order=True)
class CellIndex:
    """One (treatment, instrument) stratum; exactly four values exist."""

    x: int
    z: int

    def __post_init__(self):
        if self.x not in (0, 1) or self.z not in (0, 1):
            raise ValueError(f"cell labels must be 0/1, got ({self.x}, {self.z})")

    @property
    def position(self) -> int:
        """Index of this cell in the canonical (x asc, z asc) order."""
        return 2 * self.x + self.z


#: Canonical serialization order: (0,0), (0,1), (1,0), (1,1).
CELL_ORDER: tuple[CellIndex, ...] = (
    CellIndex(0, 0),
    CellIndex(0, 1),
    CellIndex(1, 0),
    CellIndex(1, 1),
)


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class ObservedCellParams:
    """Observed-data simplex of one cell: P(Y=0,R=1), P(Y=1,R=1), P(R=0)."""

    q10: float
    q11: float
    q0dot: float

    def __post_init__(self):
        for name in ("q10", "q11", "q0dot"):
            _check_prob(name, getattr(self, name))
        total = self.q10 + self.q11 + self.q0dot
        if abs(total - 1.0) > SUM_ATOL:
            raise ValueError(f"observed-cell simplex sums to {total!r}, not 1")

    @property
    def observed_rate(self) -> float:
        """P(Y=1 | R=1) for this cell; 0 when nothing is observed."""
        denom = self.q10 + self.q11
        return self.q11 / denom if denom > 0 else 0.0


@dataclass(frozen=True)
class MissingCellParam:
    """Fraction of missing rows with Y=1 in one cell (never identified)."""

    omega: float

    def __post_init__(self):
        _check_prob("omega", self.omega)


@dataclass(frozen=True)
class CellParams:
    """Full per-cell parameterization: observed simplex plus missing split."""

    index: CellIndex
    q: ObservedCellParams
    omega: MissingCellParam

    def joint(self) -> tuple[float, float, float, float]:
        """Four-category joint (p_r1y0, p_r1y1, p_r0y0, p_r0y1)."""
        q, w = self.q, self.omega.omega
        return (q.q10, q.q11, q.q0dot * (1.0 - w), q.q0dot * w)

    @classmethod
    def from_joint(cls, index: CellIndex, p: Sequence[float]) -> "CellParams":
        """Invert :meth:`joint`; a cell with no missing mass gets omega 0."""
        p10, p11, p00, p01 = (float(v) for v in p)
        q0dot = p00 + p01
        omega = p01 / q0dot if q0dot > 0 else 0.0
        return cls(index, ObservedCellParams(p10, p11, q0dot), MissingCellParam(omega))

    @property
    def prob_y1(self) -> float:
        """P(Y=1) in this cell, missing rows included."""
        return self.q.q11 + self.q.q0dot * self.omega.omega


@dataclass(frozen=True)
class CellCounts:
    """Observed multinomial counts of one cell: (Y=0,R=1), (Y=1,R=1), R=0."""

    n10: int
    n11: int
    n0dot: int

    def __post_init__(self):
        for name in ("n10", "n11", "n0dot"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.n10 + self.n11 + self.n0dot


@dataclass(frozen=True)
class CountsTable:
    """Counts for all four cells, stored in :data:`CELL_ORDER`."""

    cells: tuple[CellCounts, CellCounts, CellCounts, CellCounts]

    def __post_init__(self):
        if len(self.cells) != 4:
            raise ValueError("a counts table has exactly four cells")

    @classmethod
    def from_mapping(cls, mapping: Mapping[tuple[int, int], Iterable[int]]) -> "CountsTable":
        cells = []
        for idx in CELL_ORDER:
            n10, n11, n0dot = mapping[(idx.x, idx.z)]
            cells.append(CellCounts(int(n10), int(n11), int(n0dot)))
        return cls(tuple(cells))

    @classmethod
    def zeros(cls) -> "CountsTable":
        """All-zero counts; samplers fed this draw from the prior."""
        return cls(tuple(CellCounts(0, 0, 0) for _ in range(4)))

    def cell(self, index: CellIndex) -> CellCounts:
        return self.cells[index.position]

    @property
    def zcounts(self) -> tuple[int, int]:
        """Row totals by instrument value: (count of Z=0, count of Z=1)."""
        z0 = self.cells[0].total + self.cells[2].total
        z1 = self.cells[1].total + self.cells[3].total
        return (z0, z1)

    @property
    def total(self) -> int:
        return sum(c.total for c in self.cells)


@dataclass(frozen=True)
class DirichletHyper:
    """Dirichlet pseudo-counts for the observed-cell simplex (q10, q11, q0dot).

    The default ``(1, 1, 2)`` is the three-category collapse of a flat
    four-category prior: one pseudo-count per observed category, two for the
    missing category, whose internal Y-split then has a Uniform(0, 1) prior.
    """

    a1: float = 1.0
    a2: float = 1.0
    a3: float = 2.0

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    def updated(self, counts: CellCounts) -> "DirichletHyper":
        return DirichletHyper(self.a1 + counts.n10, self.a2 + counts.n11, self.a3 + counts.n0dot)

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3], dtype=float)


DEFAULT_HYPER = DirichletHyper()


@dataclass(frozen=True)
class ZMarginParam:
    """P(Z=1); enters the treatment-effect contrast as the z-weight."""

    qz: float

    def __post_init__(self):
        _check_prob("qz", self.qz)


@dataclass(frozen=True)
class IntervalSummary:
    """Equal-tailed posterior summary at one credible level."""

    mean: float
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie strictly inside (0, 1)")
        if self.lower > self.upper:
            raise ValueError("interval endpoints out of order")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class PosteriorDraws:
    """Accepted joint draws of all cell parameters plus the Z margin.

    Stored as arrays for throughput: ``q`` has shape (n, 4, 3) in
    :data:`CELL_ORDER` with components (q10, q11, q0dot), ``omega`` has shape
    (n, 4) and ``qz`` shape (n,).  ``stratum_accepted``/``stratum_attempted``
    carry per-treatment-arm rejection statistics when the draws came from a
    rejection sampler; the overall acceptance rate is then the product of the
    per-arm rates because arms are sampled independently.
    """

    q: np.ndarray
    omega: np.ndarray
    qz: np.ndarray
    accepted: int
    attempted: int
    seed: int
    stratum_accepted: tuple[int, int] | None = None
    stratum_attempted: tuple[int, int] | None = None

    def __post_init__(self):
        n = self.accepted
        if self.q.shape != (n, 4, 3) or self.omega.shape != (n, 4) or self.qz.shape != (n,):
            raise ValueError("draw array shapes inconsistent with `accepted`")
        if self.accepted > self.attempted:
            raise ValueError("accepted cannot exceed attempted")

    def __len__(self) -> int:
        return self.accepted

    @property
    def acceptance_rate(self) -> float:
        """Joint acceptance rate of the sampler that produced these draws."""
        if self.stratum_accepted is not None:
            rate = 1.0
            for acc, att in zip(self.stratum_accepted, self.stratum_attempted):
                rate *= acc / att if att > 0 else 0.0
            return rate
        return self.accepted / self.attempted if self.attempted else 0.0

    def cells(self, i: int) -> tuple[CellParams, CellParams, CellParams, CellParams]:
        """Materialize draw ``i`` as four :class:`CellParams`."""
        out = []
        for c, idx in enumerate(CELL_ORDER):
            q = ObservedCellParams(*(float(v) for v in self.q[i, c]))
            out.append(CellParams(idx, q, MissingCellParam(float(self.omega[i, c]))))
        return tuple(out)

    def zmargin(self, i: int) -> ZMarginParam:
        return ZMarginParam(float(self.qz[i]))

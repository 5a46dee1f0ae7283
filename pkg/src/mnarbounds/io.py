"""File formats: counts/rows/q-table CSVs, draw exports, INI-style configs.

All floating-point output uses the shortest round-trip decimal (Python's
``repr``), so identical runs produce byte-identical files.
"""

from __future__ import annotations

import configparser
import csv

import numpy as np

from .cells import (
    CELL_ORDER,
    CellCounts,
    CountsTable,
    DirichletHyper,
    ObservedCellParams,
    PosteriorDraws,
)
from .heckman import GibbsConfig, HeckmanChain, HeckmanData
from .restrictions import AssumptionKind, AssumptionSpec
from .simulate import DgpSpec, ModelSpec

__all__ = [
    "fmt",
    "COUNTS_HEADER",
    "ROWS_HEADER",
    "QTABLE_HEADER",
    "read_counts_csv",
    "write_counts_csv",
    "read_rows_csv",
    "write_rows_csv",
    "read_qtable_csv",
    "sniff_input_kind",
    "write_draws_csv",
    "write_chain_csv",
    "parse_model_section",
    "parse_analysis_config",
    "parse_study_config",
]

COUNTS_HEADER = ["x", "z", "n_y0_r1", "n_y1_r1", "n_r0"]
ROWS_HEADER = ["x", "z", "r", "y"]
QTABLE_HEADER = ["x", "z", "q_y0_r1", "q_y1_r1", "q_r0"]


def fmt(value) -> str:
    """Shortest round-trip decimal for floats; plain digits for ints."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


class InputFormatError(ValueError):
    """Malformed input file; carries the offending row number when known."""


def _read_table(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputFormatError(f"{path}: empty file") from None
        rows = [row for row in reader if row and any(field.strip() for field in row)]
    return [h.strip() for h in header], rows


def sniff_input_kind(path) -> str:
    """'counts', 'rows' or 'qtable', decided by the header line."""
    header, _ = _read_table(path)
    for kind, expect in (("counts", COUNTS_HEADER), ("rows", ROWS_HEADER), ("qtable", QTABLE_HEADER)):
        if header == expect:
            return kind
    raise InputFormatError(f"{path}: unrecognized header {header!r}")


def _expect_cells(path, rows):
    if len(rows) != 4:
        raise InputFormatError(f"{path}: expected exactly 4 data rows, found {len(rows)}")
    for lineno, (row, idx) in enumerate(zip(rows, CELL_ORDER), start=2):
        if int(row[0]) != idx.x or int(row[1]) != idx.z:
            raise InputFormatError(
                f"{path}:{lineno}: cells must appear in (x, z) order "
                f"(0,0),(0,1),(1,0),(1,1); found ({row[0]}, {row[1]})"
            )


def read_counts_csv(path) -> CountsTable:
    header, rows = _read_table(path)
    if header != COUNTS_HEADER:
        raise InputFormatError(f"{path}: expected header {','.join(COUNTS_HEADER)}")
    _expect_cells(path, rows)
    cells = []
    for lineno, row in enumerate(rows, start=2):
        try:
            cells.append(CellCounts(int(row[2]), int(row[3]), int(row[4])))
        except (IndexError, ValueError) as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from None
    return CountsTable(tuple(cells))


def write_counts_csv(counts: CountsTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COUNTS_HEADER)
        for idx in CELL_ORDER:
            c = counts.cell(idx)
            writer.writerow([idx.x, idx.z, c.n10, c.n11, c.n0dot])


def read_rows_csv(path) -> HeckmanData:
    header, rows = _read_table(path)
    if header != ROWS_HEADER:
        raise InputFormatError(f"{path}: expected header {','.join(ROWS_HEADER)}")
    x, z, r, y = [], [], [], []
    for lineno, row in enumerate(rows, start=2):
        try:
            x.append(int(row[0]))
            z.append(int(row[1]))
            r.append(int(row[2]))
            raw_y = row[3].strip() if len(row) > 3 else ""
            y.append(float(raw_y) if raw_y else float("nan"))
        except (IndexError, ValueError) as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from None
    try:
        return HeckmanData(np.array(x), np.array(z), np.array(r), np.array(y))
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def write_rows_csv(data: HeckmanData, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ROWS_HEADER)
        for i in range(data.n):
            y = "" if data.r[i] == 0 else str(int(data.y[i]))
            writer.writerow([int(data.x[i]), int(data.z[i]), int(data.r[i]), y])


def read_qtable_csv(path) -> tuple[ObservedCellParams, ...]:
    header, rows = _read_table(path)
    if header != QTABLE_HEADER:
        raise InputFormatError(f"{path}: expected header {','.join(QTABLE_HEADER)}")
    _expect_cells(path, rows)
    cells = []
    for lineno, row in enumerate(rows, start=2):
        try:
            cells.append(ObservedCellParams(float(row[2]), float(row[3]), float(row[4])))
        except (IndexError, ValueError) as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from None
    return tuple(cells)


def counts_from_heckman_data(data: HeckmanData) -> CountsTable:
    cells = []
    for idx in CELL_ORDER:
        m = (data.x == idx.x) & (data.z == idx.z)
        n10 = int(((data.y == 0.0) & (data.r == 1) & m).sum())
        n11 = int(((data.y == 1.0) & (data.r == 1) & m).sum())
        n0 = int(((data.r == 0) & m).sum())
        cells.append(CellCounts(n10, n11, n0))
    return CountsTable(tuple(cells))


def write_draws_csv(draws: PosteriorDraws, psi: np.ndarray, path) -> None:
    """Joint-draw export: risk difference plus every cell parameter per draw."""
    header = ["draw", "psi"]
    for idx in CELL_ORDER:
        tag = f"q{idx.x}{idx.z}"
        header += [f"{tag}_10", f"{tag}_11", f"{tag}_0dot"]
    header += [f"omega_{idx.x}{idx.z}" for idx in CELL_ORDER] + ["qz"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(len(draws)):
            row = [i, fmt(psi[i])]
            for c in range(4):
                row += [fmt(draws.q[i, c, 0]), fmt(draws.q[i, c, 1]), fmt(draws.q[i, c, 2])]
            row += [fmt(draws.omega[i, c]) for c in range(4)]
            row.append(fmt(draws.qz[i]))
            writer.writerow(row)


def write_chain_csv(chain: HeckmanChain, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "gamma0", "gamma1", "gamma2", "beta0", "beta1", "rho", "psi"])
        for i in range(len(chain)):
            writer.writerow(
                [int(chain.iters[i])]
                + [fmt(v) for v in chain.gamma[i]]
                + [fmt(v) for v in chain.beta[i]]
                + [fmt(chain.rho[i]), fmt(chain.psi[i])]
            )


# ---------------------------------------------------------------------------
# Config parsing (INI-style, flat key-value sections)
# ---------------------------------------------------------------------------

_SPEC_KINDS = {k.value: k for k in AssumptionKind}


def _hyper_from_section(section) -> DirichletHyper:
    return DirichletHyper(
        float(section.get("alpha1", 1.0)),
        float(section.get("alpha2", 1.0)),
        float(section.get("alpha3", 2.0)),
    )


def parse_spec_section(section) -> AssumptionSpec:
    """AssumptionSpec from a flat key-value block (kind, t_l, t_h, sigma, a, b, alpha1..3)."""
    kind = _SPEC_KINDS[section["kind"].strip()]
    get = lambda key: float(section[key]) if key in section else None
    return AssumptionSpec(
        kind,
        t_l=get("t_l"),
        t_h=get("t_h"),
        sigma=get("sigma"),
        a=get("a"),
        b=get("b"),
        hyper=_hyper_from_section(section),
    )


def _gibbs_from_section(section) -> GibbsConfig:
    return GibbsConfig(
        iterations=int(section.get("iterations", 5000)),
        burn_in=int(section.get("burn_in", 1000)),
        mh_sd=float(section.get("mh_sd", 0.05)),
        fix_rho=float(section["fix_rho"]) if "fix_rho" in section else None,
    )


def parse_model_section(name: str, section) -> ModelSpec:
    kind = section["kind"].strip()
    if kind == "heckman":
        return ModelSpec(name, "heckman", gibbs=_gibbs_from_section(section))
    if kind == "mar":
        return ModelSpec(name, "mar")
    if kind == "oracle":
        return ModelSpec(name, "oracle")
    if kind in _SPEC_KINDS:
        return ModelSpec(name, "assumption", assumption=parse_spec_section(section))
    raise InputFormatError(f"model section [{name}]: unknown kind {kind!r}")


def _read_config(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise InputFormatError(f"{path}: cannot read config file")
    return parser


def _model_sections(parser) -> list[tuple[str, configparser.SectionProxy]]:
    out = []
    for section in parser.sections():
        if section.startswith("model "):
            out.append((section[len("model "):].strip(), parser[section]))
    return out


def parse_analysis_config(path) -> dict:
    """Settings for the `analyze` command.

    Returns a dict with keys: models (list[ModelSpec]), draws, seed, levels,
    qz_fixed (or None).
    """
    parser = _read_config(path)
    main = parser["analysis"] if parser.has_section("analysis") else {}
    models = [parse_model_section(name, sec) for name, sec in _model_sections(parser)]
    levels = [float(v) for v in str(main.get("levels", "0.80,0.95")).split(",") if v.strip()]
    return {
        "models": models,
        "draws": int(main.get("draws", 4000)),
        "seed": int(main.get("seed", 20240801)),
        "levels": levels,
        "qz_fixed": float(main["qz_fixed"]) if "qz_fixed" in main else None,
    }


def parse_study_config(path) -> dict:
    """Settings for the `simulate` command: DGP block, study block, models."""
    parser = _read_config(path)
    if not parser.has_section("dgp"):
        raise InputFormatError(f"{path}: study config needs a [dgp] section")
    d = parser["dgp"]
    dgp = DgpSpec(
        kind=d.get("kind", "saturated").strip(),
        n=int(d.get("n", 1000)),
        target_missing=float(d.get("target_missing", 0.2)),
        iv_holds=d.getboolean("iv_holds", True),
        bias_direction=d.get("bias_direction", "positive").strip(),
        beta0=float(d.get("beta0", -0.5)),
        beta1=float(d.get("beta1", 0.75)),
        beta2=float(d["beta2"]) if "beta2" in d else None,
        rho=float(d["rho"]) if "rho" in d else None,
        hyper=_hyper_from_section(d),
    )
    s = parser["study"] if parser.has_section("study") else {}
    models = [parse_model_section(name, sec) for name, sec in _model_sections(parser)]
    return {
        "dgp": dgp,
        "models": models,
        "replicates": int(s.get("replicates", 50)),
        "draws": int(s.get("draws", 1000)),
        "seed": int(s.get("seed", 20240801)),
        "level": float(s.get("level", 0.90)),
        "qz_fixed": float(s["qz_fixed"]) if "qz_fixed" in s else 0.5,
    }

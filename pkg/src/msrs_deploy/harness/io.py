"""Front CSV files and JSON documents. See docs/FORMATS.md for the exact layout."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from ..scenario import ConfigError, DeploymentVector, ObjectiveVector, Scenario, to_db

__all__ = [
    "FrontRow",
    "front_header",
    "format_float",
    "write_front",
    "write_snapshots",
    "read_front",
    "write_json",
    "read_json",
]


def format_float(v: float) -> str:
    return f"{v:.12g}"


def front_header(num_nodes: int, snapshot: bool = False) -> list[str]:
    cols = ["run_id", "algorithm", "mode", "J", "solution_id", "cr", "lr_db"]
    if snapshot:
        cols.insert(0, "iteration")
    cols += [f"x_{j}" for j in range(1, num_nodes + 1)]
    cols += [f"y_{j}" for j in range(1, num_nodes + 1)]
    cols += [f"rho_{j}" for j in range(1, num_nodes + 1)]
    return cols


@dataclass(frozen=True)
class FrontRow:
    run_id: int
    algorithm: str
    mode: str
    num_nodes: int
    solution_id: int
    coverage_ratio: float
    lowest_rtsn_db: float
    position: np.ndarray
    iteration: int | None = None

    @property
    def point(self) -> tuple[float, float]:
        return (self.coverage_ratio, self.lowest_rtsn_db)

    @property
    def dv(self) -> DeploymentVector:
        return DeploymentVector.from_flat(self.position)


def _rows(
    solutions: Iterable[tuple[Sequence[float], ObjectiveVector]],
    run_id: int,
    algorithm: str,
    mode: str,
    num_nodes: int,
    iteration: int | None = None,
) -> Iterable[list[str]]:
    for i, (pos, obj) in enumerate(solutions):
        row = [str(run_id), algorithm, mode, str(num_nodes), str(i), format_float(obj[0]), format_float(to_db(obj[1]))]
        if iteration is not None:
            row.insert(0, str(iteration))
        row += [format_float(float(v)) for v in pos]
        yield row


def render_csv(header: list[str], rows: Iterable[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_front(
    path: Path,
    solutions: Iterable[tuple[Sequence[float], ObjectiveVector]],
    run_id: int,
    algorithm: str,
    mode: str,
    num_nodes: int,
) -> None:
    text = render_csv(front_header(num_nodes), _rows(solutions, run_id, algorithm, mode, num_nodes))
    path.write_text(text)


def write_snapshots(path: Path, snapshots, run_id: int, algorithm: str, mode: str, num_nodes: int) -> None:
    rows = []
    for snap in snapshots:
        rows.extend(_rows(snap.entries, run_id, algorithm, mode, num_nodes, iteration=snap.iteration))
    path.write_text(render_csv(front_header(num_nodes, snapshot=True), rows))


def read_front(path: Path, scenario: Scenario | None = None) -> list[FrontRow]:
    """Parse a front CSV and re-validate every row.

    With a scenario, each deployment is checked against the placement
    region and the power constraint, and ``cr * U`` must be an integer.
    """
    text = Path(path).read_text()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise ConfigError(f"{path}: empty front file")
    snapshot = header[0] == "iteration"
    body = header[1:] if snapshot else header
    j = sum(1 for c in body if c.startswith("x_"))
    if header != front_header(j, snapshot):
        raise ConfigError(f"{path}: unexpected header")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ConfigError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            fr = _parse_row(row, snapshot)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        _validate_row(fr, scenario, f"{path}:{lineno}")
        out.append(fr)
    return out


def _parse_row(row: list[str], snapshot: bool) -> FrontRow:
    it = None
    if snapshot:
        it = int(row[0])
        row = row[1:]
    return FrontRow(
        run_id=int(row[0]),
        algorithm=row[1],
        mode=row[2],
        num_nodes=int(row[3]),
        solution_id=int(row[4]),
        coverage_ratio=float(row[5]),
        lowest_rtsn_db=float(row[6]),
        position=np.array([float(v) for v in row[7:]]),
        iteration=it,
    )


def _validate_row(row: FrontRow, scenario: Scenario | None, where: str) -> None:
    if not 0.0 <= row.coverage_ratio <= 1.0:
        raise ConfigError(f"{where}: coverage ratio {row.coverage_ratio} outside [0, 1]")
    if not math.isfinite(row.lowest_rtsn_db):
        raise ConfigError(f"{where}: lowest RTSN is not finite")
    if scenario is None:
        return
    u = scenario.num_cells
    if abs(row.coverage_ratio * u - round(row.coverage_ratio * u)) > 1e-6:
        raise ConfigError(f"{where}: coverage ratio {row.coverage_ratio} is not a multiple of 1/{u}")
    try:
        row.dv.validate(scenario)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def dumps_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: Path, doc: Any) -> None:
    path.write_text(dumps_json(doc))


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text())

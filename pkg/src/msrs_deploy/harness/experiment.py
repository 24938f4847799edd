"""Seeded experiment orchestration and result comparison."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from ..metrics import (
    DEFAULT_REFERENCE,
    ReferencePoint,
    average_improvement,
    dominated_fraction,
    dominated_space,
)
from ..optimizer import RunOutput, run
from ..scenario import ConfigError
from .config import SCHEMA_VERSION, ExperimentConfig, load_config
from .io import FrontRow, format_float, read_front, read_json, write_front, write_json, write_snapshots

__all__ = ["RunResult", "ExperimentResult", "run_experiment", "load_result", "compare"]

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"
METRICS = "metrics.json"


@dataclass
class RunResult:
    run_id: int
    seed: int
    output: RunOutput
    front_path: Path | None
    snapshot_path: Path | None
    wall_time: float

    @property
    def points(self) -> list[tuple[float, float]]:
        """Objective points exactly as stored in the front file (12 significant digits)."""
        return [
            (float(format_float(obj.coverage_ratio)), float(format_float(obj.lowest_rtsn_db)))
            for _, obj in self.output.solutions
        ]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list[RunResult] = field(default_factory=list)
    output_dir: Path | None = None


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run ``repetitions`` seeded runs (seed, seed + 1, ...) and write their files.

    Outputs are a pure function of the config: rerunning the same config,
    or the manifest it produced, reproduces every file byte for byte.
    """
    config.validate()
    scenario = config.build_scenario()
    detector = config.build_detector()
    opt = config.build_optimizer()
    out_dir = Path(config.run.output_dir)
    if write:
        try:
            (out_dir / "fronts").mkdir(parents=True, exist_ok=True)
            if config.run.snapshot_every > 0:
                (out_dir / "snapshots").mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    mode = scenario.mode.value
    j = scenario.num_nodes
    result = ExperimentResult(config, output_dir=out_dir if write else None)
    for r in range(config.run.repetitions):
        seed = config.run.seed + r
        t0 = time.perf_counter()
        output = run(opt, scenario, detector, seed, snapshot_every=config.run.snapshot_every)
        wall = time.perf_counter() - t0
        log.info("run %d (seed %d, %s): %d solutions in %.1fs", r, seed, opt.algorithm, len(output.solutions), wall)
        front_path = snap_path = None
        if write:
            front_path = out_dir / "fronts" / f"run_{r:03d}.csv"
            write_front(front_path, output.solutions, r, opt.algorithm, mode, j)
            if config.run.snapshot_every > 0:
                snap_path = out_dir / "snapshots" / f"run_{r:03d}.csv"
                write_snapshots(snap_path, output.snapshots, r, opt.algorithm, mode, j)
        result.runs.append(RunResult(r, seed, output, front_path, snap_path, wall))
    if write:
        write_json(out_dir / MANIFEST, _manifest(config, result))
        write_json(out_dir / METRICS, _metrics(config, result))
    return result


def _rel(path: Path | None, root: Path) -> str | None:
    return None if path is None else path.relative_to(root).as_posix()


def _manifest(config: ExperimentConfig, result: ExperimentResult) -> dict[str, Any]:
    root = Path(config.run.output_dir)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "manifest",
        "config": config.to_dict(),
        "scenario_fingerprint": config.scenario_fingerprint(),
        "runs": [
            {
                "run_id": r.run_id,
                "seed": r.seed,
                "front": _rel(r.front_path, root),
                "snapshots": _rel(r.snapshot_path, root),
            }
            for r in result.runs
        ],
    }


def _metrics(config: ExperimentConfig, result: ExperimentResult, ref: ReferencePoint = DEFAULT_REFERENCE) -> dict[str, Any]:
    runs = []
    for r in result.runs:
        pts = r.points
        runs.append(
            {
                "run_id": r.run_id,
                "seed": r.seed,
                "solutions": len(pts),
                "evaluations": r.output.evaluations,
                "dominated_space": dominated_space(pts, ref),
                "max_cr": max(p[0] for p in pts),
                "max_lr_db": max(p[1] for p in pts),
            }
        )
    ds = [r["dominated_space"] for r in runs]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "metrics",
        "algorithm": config.build_optimizer().algorithm,
        "mode": config.scenario.mode,
        "num_nodes": config.scenario.num_nodes,
        "scenario_fingerprint": config.scenario_fingerprint(),
        "reference": {"cr": ref.coverage_ratio, "lr_db": ref.lowest_rtsn_db},
        "runs": runs,
        "mean_dominated_space": sum(ds) / len(ds),
    }


@dataclass
class LoadedResult:
    path: Path
    config: ExperimentConfig
    fingerprint: str
    fronts: list[list[FrontRow]]

    @property
    def algorithm(self) -> str:
        return self.config.build_optimizer().algorithm

    def points(self) -> list[tuple[float, float]]:
        return [row.point for front in self.fronts for row in front]


def load_result(path: str | Path) -> LoadedResult:
    """Load an experiment output directory, re-validating every front row."""
    root = Path(path)
    manifest_path = root / MANIFEST
    if not manifest_path.is_file():
        raise OSError(f"no {MANIFEST} in {root}")
    manifest = read_json(manifest_path)
    config = load_config(manifest_path)
    scenario = config.build_scenario()
    fronts = [read_front(root / run["front"], scenario) for run in manifest["runs"]]
    return LoadedResult(root, config, manifest["scenario_fingerprint"], fronts)


def _paired_improvement(a: LoadedResult, b: LoadedResult, k: int) -> dict[str, Any]:
    """Average improvement of run r of B over run r of A, averaged over runs where it is defined."""
    per_run = []
    for fa, fb in zip(a.fronts, b.fronts):
        ai = average_improvement([row.point for row in fb], [row.point for row in fa], k)
        per_run.append({"value": ai.value, "used": ai.used, "skipped": ai.skipped})
    values = [r["value"] for r in per_run if r["value"] is not None]
    return {
        "value": sum(values) / len(values) if values else None,
        "defined": bool(values),
        "used": sum(r["used"] for r in per_run),
        "skipped": sum(r["skipped"] for r in per_run),
        "runs": per_run,
    }


def compare(
    result_a: str | Path,
    result_b: str | Path,
    ref: Sequence[float] = DEFAULT_REFERENCE,
) -> dict[str, Any]:
    """Metrics report for result B measured against result A.

    Runs are paired by index (run r of B against run r of A) for the average
    improvements; unpaired trailing runs are left out of them. Dominated
    space is reported per run and averaged over runs. The dominated fraction
    pools all runs of each result.
    """
    a = load_result(result_a)
    b = load_result(result_b)
    if a.fingerprint != b.fingerprint:
        raise ConfigError(
            f"scenario fingerprints differ: {a.path} has {a.fingerprint[:12]}, {b.path} has {b.fingerprint[:12]}"
        )
    ref = ReferencePoint(float(ref[0]), float(ref[1]))
    pa, pb = a.points(), b.points()

    def side(res: LoadedResult) -> dict[str, Any]:
        per_run = [dominated_space([row.point for row in f], ref) for f in res.fronts]
        return {
            "path": str(res.path),
            "algorithm": res.algorithm,
            "runs": len(res.fronts),
            "points": sum(len(f) for f in res.fronts),
            "dominated_space": per_run,
            "mean_dominated_space": sum(per_run) / len(per_run),
        }

    doc_a, doc_b = side(a), side(b)
    mean_a = doc_a["mean_dominated_space"]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "compare",
        "scenario_fingerprint": a.fingerprint,
        "reference": {"cr": ref.coverage_ratio, "lr_db": ref.lowest_rtsn_db},
        "a": doc_a,
        "b": doc_b,
        "average_improvement": {
            "cr": _paired_improvement(a, b, 0),
            "lr_db": _paired_improvement(a, b, 1),
            "paired_runs": min(len(a.fronts), len(b.fronts)),
        },
        "dominated_fraction_a_by_b": dominated_fraction(pa, pb),
        "dominated_space_ratio": doc_b["mean_dominated_space"] / mean_a if mean_a > 0 else None,
    }

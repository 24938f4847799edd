import csv
import hashlib
import json

import pytest

from msrs_deploy.harness import ConfigFieldError, ExperimentConfig, compare, load_config, read_front, run_experiment
from msrs_deploy.harness.cli import main
from msrs_deploy.scenario import ConfigError


def _small(tmp_path, name="out", **opt):
    data = {
        "scenario": {"width_km": 10, "height_km": 10, "cell_area_km2": 1.0, "num_nodes": 3},
        "optimizer": {"swarm_size": 12, "main_size": 6, "sub_size": 3, "t_max": 5, "random_count": 10, **opt},
        "run": {"repetitions": 2, "output_dir": str(tmp_path / name)},
    }
    return ExperimentConfig.from_dict(data)


def _digests(root):
    return {p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(root.rglob("*")) if p.is_file()}


def test_defaults_follow_parameter_table():
    cfg = ExperimentConfig()
    sc = cfg.build_scenario()
    opt = cfg.build_optimizer()
    assert (sc.p_dt, sc.p_fa, sc.r_max, sc.cell_area) == (0.8, 1e-6, 6.0, 2.5)
    assert cfg.scenario.d0_db == 12.5
    assert (sc.surveillance.width, sc.surveillance.height) == (50.0, 50.0)
    assert (opt.t_max, opt.y_u, opt.c1, opt.c2, opt.v_max) == (2000, 3, 2.0, 2.0, 4.0)
    assert (opt.swarm_size, opt.main_size, opt.sub_size) == (200, 100, 50)
    assert sc.num_cells == 1000


@pytest.mark.parametrize(
    "data,path",
    [
        ({"scenario": {"num_nodes": 0}}, "scenario.num_nodes"),
        ({"scenario": {"p_fa": 2}}, "scenario.p_fa"),
        ({"scenario": {"mode": "sideways"}}, "scenario.mode"),
        ({"scenario": {"bogus": 1}}, "scenario.bogus"),
        ({"scenario": {"num_nodes": "five"}}, "scenario.num_nodes"),
        ({"detector": {"pfa_convention": "x"}}, "detector.pfa_convention"),
        ({"run": {"repetitions": 0}}, "run.repetitions"),
        ({"extra": {}}, "extra"),
    ],
)
def test_config_errors_carry_field_paths(data, path):
    with pytest.raises(ConfigFieldError) as err:
        ExperimentConfig.from_dict(data)
    assert err.value.path.startswith(path)


def test_config_round_trip():
    cfg = ExperimentConfig.from_dict({"scenario": {"mode": "noncoop", "placement_width_km": 20}, "optimizer": {"algorithm": "cd"}})
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.scenario.mode == "non_cooperative" and again.optimizer.algorithm == "mopso_cd"
    assert cfg.build_scenario().placement.width == 20


def test_random_experiment_writes_fifty_rows(tmp_path):
    data = {"optimizer": {"algorithm": "random"}, "scenario": {"width_km": 10, "height_km": 10, "cell_area_km2": 1.0},
            "run": {"output_dir": str(tmp_path / "r")}}
    run_experiment(ExperimentConfig.from_dict(data))
    rows = list(csv.reader((tmp_path / "r" / "fronts" / "run_000.csv").open()))
    assert len(rows) == 51
    assert rows[0][:7] == ["run_id", "algorithm", "mode", "J", "solution_id", "cr", "lr_db"]


@pytest.mark.parametrize("algo", ["cd", "nrcd", "random"])
def test_experiment_is_byte_identical_and_reloadable(tmp_path, algo):
    cfg = _small(tmp_path, "a", algorithm=algo)
    cfg.run.snapshot_every = 2
    run_experiment(cfg)
    first = _digests(tmp_path / "a")
    run_experiment(cfg)
    assert _digests(tmp_path / "a") == first
    assert {"manifest.json", "metrics.json", "fronts/run_000.csv", "fronts/run_001.csv", "snapshots/run_000.csv"} <= set(first)
    # rerun from the echoed manifest into the same directory
    echoed = load_config(tmp_path / "a" / "manifest.json")
    run_experiment(echoed)
    assert _digests(tmp_path / "a") == first
    scenario = cfg.build_scenario()
    for name in ("run_000.csv", "run_001.csv"):
        for row in read_front(tmp_path / "a" / "fronts" / name, scenario):
            assert row.dv.num_nodes == 3
    metrics = json.loads((tmp_path / "a" / "metrics.json").read_text())
    assert [r["seed"] for r in metrics["runs"]] == [0, 1]


def test_zero_iterations_via_cli(tmp_path):
    cfg = _small(tmp_path, "z", t_max=0)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert main(["optimize", "--config", str(path), "--algorithm", "nrcd"]) == 0
    assert (tmp_path / "z" / "fronts" / "run_000.csv").exists()


def test_read_front_rejects_bad_rows(tmp_path):
    cfg = _small(tmp_path)
    run_experiment(cfg)
    path = tmp_path / "out" / "fronts" / "run_000.csv"
    lines = path.read_text().splitlines()
    cells = lines[1].split(",")
    cells[5] = "0.123456789"  # not a multiple of 1/U
    path.write_text("\n".join([lines[0], ",".join(cells)]) + "\n")
    with pytest.raises(ConfigError):
        read_front(path, cfg.build_scenario())
    cells[5] = "0.5"
    cells[-1] = "7"  # breaks the power constraint
    path.write_text("\n".join([lines[0], ",".join(cells)]) + "\n")
    with pytest.raises(ConfigError):
        read_front(path, cfg.build_scenario())
    path.write_text("a,b\n")
    with pytest.raises(ConfigError):
        read_front(path)


def test_compare_against_itself(tmp_path):
    run_experiment(_small(tmp_path, "a", algorithm="nrcd"))
    report = compare(tmp_path / "a", tmp_path / "a")
    assert report["average_improvement"]["cr"]["value"] is None
    assert report["average_improvement"]["lr_db"]["defined"] is False
    assert report["average_improvement"]["paired_runs"] == 2
    assert report["dominated_space_ratio"] == 1.0
    assert len(report["a"]["dominated_space"]) == 2


def test_compare_random_against_nrcd(tmp_path):
    run_experiment(_small(tmp_path, "a", algorithm="random"))
    run_experiment(_small(tmp_path, "b", algorithm="nrcd", t_max=20))
    report = compare(tmp_path / "a", tmp_path / "b")
    assert 0.0 <= report["dominated_fraction_a_by_b"] <= 1.0
    assert report["b"]["algorithm"] == "mopso_nrcd"
    assert report["a"]["points"] == 20


def test_compare_dominating_fixture(tmp_path):
    # hand-written result B whose single point beats every point of A
    a = _small(tmp_path, "a", algorithm="random")
    run_experiment(a)
    b_dir = tmp_path / "b"
    (b_dir / "fronts").mkdir(parents=True)
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    manifest["runs"] = manifest["runs"][:1]
    (b_dir / "manifest.json").write_text(json.dumps(manifest))
    header = (tmp_path / "a" / "fronts" / "run_000.csv").read_text().splitlines()[0]
    row = "0,random,cooperative,3,0,1,60,1,5,9,1,5,9,1,1,1"
    (b_dir / "fronts" / "run_000.csv").write_text(header + "\n" + row + "\n")
    report = compare(tmp_path / "a", b_dir)
    assert report["dominated_fraction_a_by_b"] == 1.0
    assert report["average_improvement"]["cr"]["skipped"] == 0


def test_compare_refuses_different_scenarios(tmp_path):
    run_experiment(_small(tmp_path, "a", algorithm="random"))
    other = _small(tmp_path, "b", algorithm="random")
    other.scenario.num_nodes = 2
    run_experiment(other)
    with pytest.raises(ConfigError, match="fingerprint"):
        compare(tmp_path / "a", tmp_path / "b")
    assert main(["compare", str(tmp_path / "a"), str(tmp_path / "b")]) == 2


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"scenario": {"num_nodes": -1}}))
    assert main(["optimize", "--config", str(bad)]) == 2
    assert "scenario.num_nodes" in capsys.readouterr().err
    assert main(["optimize", "--config", str(tmp_path / "missing.json")]) == 3
    bad.write_text("{not json")
    assert main(["optimize", "--config", str(bad)]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = _small(tmp_path)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(cfg.to_dict()))
    assert main(["optimize", "--config", str(good), "--out", str(blocker / "sub")]) == 3


def test_cli_evaluate(tmp_path, capsys):
    cfg = _small(tmp_path)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert main(["evaluate", "--config", str(path), "--dv", "1,5,9,1,5,9,1,1,1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["cells"] == 100 and 0 <= out["cr"] <= 1
    assert main(["evaluate", "--config", str(path), "--mode", "noncoop", "--dv", "1 5 9 1 5 9 1 1 1"]) == 0
    assert json.loads(capsys.readouterr().out)["mode"] == "non_cooperative"
    assert main(["evaluate", "--config", str(path), "--dv", "1,5,9,1,5,9,1,1,2"]) == 2
    assert main(["evaluate", "--config", str(path), "--dv", "1,5,x"]) == 2


def test_cli_compare_writes_report(tmp_path, capsys):
    run_experiment(_small(tmp_path, "a", algorithm="random"))
    out = tmp_path / "report.json"
    assert main(["compare", str(tmp_path / "a"), str(tmp_path / "a"), "--ref-cr", "0.1", "--ref-lr-db", "-20", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["reference"] == {"cr": 0.1, "lr_db": -20.0}


def test_metrics_file_agrees_with_compare(tmp_path):
    run_experiment(_small(tmp_path, "a", algorithm="cd"))
    metrics = json.loads((tmp_path / "a" / "metrics.json").read_text())
    report = compare(tmp_path / "a", tmp_path / "a")
    assert [r["dominated_space"] for r in metrics["runs"]] == report["a"]["dominated_space"]
    assert metrics["mean_dominated_space"] == report["a"]["mean_dominated_space"]

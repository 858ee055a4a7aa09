import json

import numpy as np
import pytest

from heterosync.cli import main

from conftest import config_dict


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_analyze_reports_design(tmp_path, capsys):
    path = write_config(tmp_path, config_dict())
    assert main(["analyze", "--config", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["design"]["p_source"] == "supplied"
    assert report["design"]["stable_case"] is False
    assert report["assumptions"]["stabilizable"] is True
    assert len(report["eigenvalues"]) == 4
    assert report["design"]["interval"][0] < report["design"]["coupling"]


def test_analyze_reports_solved_p_source(tmp_path, capsys):
    cfg = config_dict()
    del cfg["p"]
    del cfg["eta"]
    path = write_config(tmp_path, cfg)
    assert main(["analyze", "--config", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["design"]["p_source"] == "solved"
    assert report["design"]["riccati_p"] is not None


def test_simulate_writes_artifacts(tmp_path, capsys):
    path = write_config(tmp_path, config_dict())
    out = tmp_path / "out"
    assert main(["simulate", "--config", path, "--out", str(out)]) == 0
    capsys.readouterr()

    traj = (out / "ex_trajectory.csv").read_text().splitlines()
    assert traj[0] == "t,sync_error,dyn_dev,dev_agent_1,dev_agent_2,dev_agent_3,dev_agent_4"
    assert len(traj) == 62  # header + horizon 60 + 1 rows

    comp = (out / "ex_components.csv").read_text().splitlines()
    assert comp[0].startswith("t,dev_a1_c1,dev_a1_c2")
    assert len(comp[0].split(",")) == 13

    for r in ("0.9", "0.7"):
        lines = (out / f"ex_ratio_{r}.csv").read_text().splitlines()
        assert lines[0] == f"t,value,ratio_r{r}"
        assert len(lines) == 62

    report = json.loads((out / "ex_report.json").read_text())
    assert report["simulation"]["horizon"] == 60
    assert report["simulation"]["seed"] == 0
    assert report["simulation"]["averaging_certificate"]["passed"] is True
    assert report["simulation"]["final_sync_error"] < 1e-3


def test_simulate_respects_flag_overrides(tmp_path, capsys):
    path = write_config(tmp_path, config_dict())
    out = tmp_path / "o"
    assert main(["simulate", "--config", path, "--out", str(out),
                 "--horizon", "30", "--rates", "0.8", "--seed", "5"]) == 0
    capsys.readouterr()
    assert len((out / "ex_trajectory.csv").read_text().splitlines()) == 32
    assert (out / "ex_ratio_0.8.csv").exists()
    assert not (out / "ex_ratio_0.9.csv").exists()
    report = json.loads((out / "ex_report.json").read_text())
    assert report["simulation"]["seed"] == 5


def test_simulate_deterministic_bytes(tmp_path, capsys):
    path = write_config(tmp_path, config_dict())
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["simulate", "--config", path, "--out", str(out)]) == 0
        outs.append(out)
    capsys.readouterr()
    for name in ("ex_trajectory.csv", "ex_components.csv",
                 "ex_ratio_0.9.csv", "ex_ratio_0.7.csv", "ex_report.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_missing_config_is_usage_error(tmp_path, capsys):
    assert main(["analyze", "--config", str(tmp_path / "nope.json")]) == 4
    assert "config error" in capsys.readouterr().err


def test_malformed_json_is_usage_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["analyze", "--config", str(path)]) == 4
    capsys.readouterr()


def test_missing_field_is_usage_error(tmp_path, capsys):
    cfg = config_dict()
    del cfg["b"]
    assert main(["analyze", "--config", write_config(tmp_path, cfg)]) == 4
    capsys.readouterr()


def test_assumption_failure_exit_code(tmp_path, capsys):
    s3 = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 2.0]]
    cfg = config_dict(s_init=[s3] * 4)
    del cfg["eta"]
    del cfg["p"]
    assert main(["analyze", "--config", write_config(tmp_path, cfg)]) == 2
    assert "assumption failure" in capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path, capsys):
    # the unstable ensemble average overflows doubles around step 850
    path = write_config(tmp_path, config_dict())
    assert main(["simulate", "--config", path, "--horizon", "900"]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_coupling_override_outside_interval(tmp_path, capsys):
    cfg = config_dict(c=0.5)
    assert main(["analyze", "--config", write_config(tmp_path, cfg)]) == 4
    capsys.readouterr()


def test_decouple_suite_csv(tmp_path, capsys):
    out = tmp_path / "suite"
    assert main(["decouple-suite", "--trials", "3", "--seed", "5",
                 "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "3/3" in stdout
    lines = (out / "decouple_suite_5.csv").read_text().splitlines()
    assert lines[0] == "seed,rho_As,rho_Astar,kappa,r_tested,sup_ratio,passed"
    assert len(lines) == 5  # header + 3 trials + negative control
    assert lines[-1].startswith("-1,")
    assert lines[-1].endswith("false")


def test_decouple_suite_zero_trials_is_usage_error(capsys):
    assert main(["decouple-suite", "--trials", "0"]) == 4
    capsys.readouterr()


def test_edge_list_config(tmp_path, capsys):
    cfg = config_dict()
    del cfg["adjacency"]
    cfg["n_agents"] = 4
    cfg["edges"] = [[0, 1, 1.0], [0, 2, 2.0], [0, 3, 4.0],
                    [1, 2, 2.0], [2, 3, 3.0]]
    assert main(["analyze", "--config", write_config(tmp_path, cfg)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert np.allclose(report["eigenvalues"],
                       [0.0, 3.57136051, 9.07837775, 11.3502617], atol=1e-6)


def test_explicit_initial_states(tmp_path, capsys):
    xi = [[0.1, 0.2, 0.3], [0.0, -0.5, 0.25], [1.0, 0.0, -1.0], [0.5, 0.5, 0.5]]
    cfg = config_dict(xi_init=xi, horizon=20)
    out = tmp_path / "out"
    assert main(["simulate", "--config", write_config(tmp_path, cfg),
                 "--out", str(out)]) == 0
    capsys.readouterr()
    first = (out / "ex_components.csv").read_text().splitlines()[1].split(",")
    dev = np.array(xi) - np.mean(xi, axis=0)
    assert np.allclose([float(x) for x in first[1:]], dev.ravel(), atol=1e-15)

"""End-to-end CLI: pipelines, exit codes, file outputs."""
import json

import pytest

from coreclust.cli import main


def test_generate_cluster_audit_pipeline(tmp_path):
    inst_path = str(tmp_path / "k4.json")
    y_path = str(tmp_path / "y.json")
    audit_path = str(tmp_path / "audit.json")
    assert main(["generate", "--name", "k4", "--out", inst_path]) == 0
    assert main(["cluster", "--instance", inst_path, "--alg", "greedy",
                 "--out", y_path]) == 0
    assert main(["audit", "--instance", inst_path, "--clustering", y_path,
                 "--alpha", "1", "--out", audit_path]) == 0
    result = json.loads(open(audit_path).read())
    assert result["beta_min"] == pytest.approx(2.0)
    assert result["in_core"] is False


def test_generate_with_params(tmp_path):
    out = str(tmp_path / "lb.json")
    assert main(["generate", "--name", "line-beta", "--params", "k=3",
                 "--out", out]) == 0
    obj = json.loads(open(out).read())
    assert len(obj["agents"]) == 12


def test_cluster_trace_flag(tmp_path):
    inst_path = str(tmp_path / "k4.json")
    y_path = str(tmp_path / "y.json")
    main(["generate", "--name", "k4", "--out", inst_path])
    assert main(["cluster", "--instance", inst_path, "--alg", "greedy",
                 "--trace", "--out", y_path]) == 0
    trace = json.loads(open(y_path + ".trace.json").read())
    assert trace and trace[0]["kind"] in ("absorb", "open")


def test_audit_mismatched_k_exit_2(tmp_path):
    inst_path = str(tmp_path / "k4.json")
    y_path = str(tmp_path / "y.json")
    main(["generate", "--name", "k4", "--out", inst_path])
    with open(y_path, "w") as fh:
        json.dump({"centers": [0, 1, 2]}, fh)
    code = main(["audit", "--instance", inst_path, "--clustering", y_path,
                 "--out", str(tmp_path / "a.json")])
    assert code == 2


def test_unknown_flag_exit_1():
    assert main(["cluster", "--bogus"]) == 1


def test_missing_subcommand_exit_1():
    assert main([]) == 1


def test_verify_suite_exit_0():
    assert main(["verify", "--suite", "k4-empty"]) == 0


def test_verify_small_trials_exit_0():
    assert main(["verify", "--suite", "greedy-beta-bound", "--trials", "5"]) == 0


def test_verify_unknown_suite_exit_2():
    assert main(["verify", "--suite", "nope"]) == 2


def test_bench_command(tmp_path):
    config = {"datasets": [{"name": "gaussian", "params": {"n": 40, "seed": 1}}],
              "algorithms": ["greedy"], "k_range": [3, 3], "seed": 0}
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps(config))
    out = str(tmp_path / "out")
    assert main(["bench", "--config", str(cfg), "--out", out]) == 0
    rows = json.loads(open(out + "/rows.json").read())
    assert len(rows) == 1 and rows[0]["error"] is None


def test_cluster_kmeans_on_gaussian(tmp_path):
    inst_path = str(tmp_path / "g.json")
    y_path = str(tmp_path / "y.json")
    assert main(["generate", "--name", "gaussian",
                 "--params", "n=50,seed=3,k=4", "--out", inst_path]) == 0
    assert main(["cluster", "--instance", inst_path, "--alg", "kmeans",
                 "--seed", "5", "--out", y_path]) == 0
    centers = json.loads(open(y_path).read())["centers"]
    assert len(centers) == 4

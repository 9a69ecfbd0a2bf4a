import io
import os

import pandas as pd
import pytest

from failcluster.cli import build_parser, load_mountain_params, main
from failcluster.errors import ConfigurationError

from conftest import MOTIVATING_COVERAGE, T3, T5


@pytest.fixture
def coverage_path(tmp_path):
    path = tmp_path / "coverage.txt"
    path.write_text(MOTIVATING_COVERAGE)
    return str(path)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for key in list(os.environ):
        if key.startswith("FAILCLUSTER_"):
            monkeypatch.delenv(key)


def test_cluster_writes_assignment(coverage_path, tmp_path):
    out = tmp_path / "clusters.csv"
    assert main(["cluster", "--coverage", coverage_path, "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["failed_test_id", "cluster_id", "is_medoid"]
    clusters = frame.groupby("cluster_id")["failed_test_id"].apply(tuple).to_dict()
    assert sorted(clusters.values()) == [(2, 3, 6, 9), (T5, 7)]
    assert set(frame.loc[frame["is_medoid"] == 1, "failed_test_id"]) == {T3, T5}


def test_suspiciousness_to_stdout(coverage_path, capsys):
    assert main(["suspiciousness", "--coverage", coverage_path, "--ref", "Ochiai"]) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(frame.columns) == ["statement", "Ochiai", "Ochiai_rank"]
    assert frame.loc[0, "Ochiai"] == pytest.approx(0.774597, abs=1e-6)
    assert frame.loc[8, "Ochiai_rank"] == 1


def test_estimate_and_distance(coverage_path, tmp_path, capsys):
    assert main(["estimate", "--coverage", coverage_path]) == 0
    captured = capsys.readouterr()
    assert "k=2" in captured.err
    assert list(pd.read_csv(io.StringIO(captured.out))["failed_test_id"]) == [T3, T5]

    out = tmp_path / "distances.csv"
    assert main(["distance", "--coverage", coverage_path, "--nsp1f", "50", "--seed", "2",
                 "--out", str(out)]) == 0
    assert pd.read_csv(out, index_col=0).shape == (6, 6)


def test_evaluate_against_oracle(coverage_path, tmp_path):
    oracle = tmp_path / "oracle.txt"
    oracle.write_text("2 1\n3 1\n4 0\n6 1\n7 0\n9 1\n")
    out = tmp_path / "report.csv"
    assert main(["evaluate", "--coverage", coverage_path, "--oracle", str(oracle),
                 "--out", str(out)]) == 0
    row = pd.read_csv(out).iloc[0]
    assert row["category"] == "Equal"
    assert row["JC"] == 1.0
    assert row["votes"] == 4
    assert main(["evaluate", "--coverage", coverage_path]) == 1


def test_errors_exit_with_status_one(tmp_path, coverage_path):
    broken = tmp_path / "broken.txt"
    broken.write_text("statements=2 tests=1\n10 X\n")
    assert main(["cluster", "--coverage", str(broken)]) == 1
    undecodable = tmp_path / "undecodable.txt"
    undecodable.write_bytes(b"statements=1 tests=1\n1 F\n# \xff\xfe\n")
    assert main(["suspiciousness", "--coverage", str(undecodable)]) == 1
    assert main(["represent", "--coverage", coverage_path, "--ref", "Group13"]) == 1
    assert main(["represent", "--coverage", coverage_path, "--nsp1f", "abc"]) == 1
    assert main(["rq1", "--out", str(tmp_path)]) == 1


def test_generate_and_run_rq4(tmp_path):
    corpus = tmp_path / "corpus"
    assert main(["generate", "--seed", "3", "--out", str(corpus)]) == 0
    assert len(os.listdir(corpus)) == 20

    config = tmp_path / "rq4.env"
    config.write_text(f"seed=3\ncorpus_dir={corpus}\nnofs=2,3\n")
    reports = tmp_path / "reports"
    assert main(["rq4", "--config", str(config), "--ref", "GP19", "--nsp1f", "100,20",
                 "--out", str(reports)]) == 0
    assert os.path.exists(reports / "rq4_levels.csv")
    assert os.path.exists(reports / "manifest.json")


def test_mountain_params_file(tmp_path):
    path = tmp_path / "params.env"
    path.write_text("stop_ratio=0.3\nBANDWIDTH_SCALE=2\n")
    params = load_mountain_params(str(path))
    assert params.stop_ratio == 0.3
    assert params.bandwidth_scale == 2.0
    path.write_text("stop_ratio=1.5\n")
    with pytest.raises(ConfigurationError) as info:
        load_mountain_params(str(path))
    assert info.value.field == "stop_ratio"


def test_parser_requires_coverage():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["cluster"])

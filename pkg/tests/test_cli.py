import json

import pytest
from click.testing import CliRunner

from infowalk import create_cli

SMALL_RUN = [
    "--machines", "2", "--threads", "1", "--dim", "8", "--window", "3", "--fixed-length", "10",
    "--walks-per-node", "2", "--epochs", "1", "--sync-every", "2", "--holdout-fraction", "0.3", "--seed", "7",
]


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(create_cli(), [str(a) for a in args], catch_exceptions=False)


def read_bytes(path) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def test_pipeline_writes_every_artifact(runner, tmp_path, toy_graph_path):
    out = tmp_path / "run"
    result = invoke(runner, "pipeline", "--graph", toy_graph_path, "--out", out, *SMALL_RUN)
    assert result.exit_code == 0, result.output
    assert "AUC" in result.output
    for name in ("partition.txt", "partition_sizes.csv", "corpus.txt", "comm_report.csv", "embeddings.txt",
                 "training_log.csv", "eval.csv", "walk_lengths.png", "training_loss.png", "run_report.json"):
        assert (out / name).exists(), name

    report = json.loads((out / "run_report.json").read_text())
    for section in ("config", "timings", "partition", "walk", "train", "eval", "charts"):
        assert section in report
    assert report["config"]["machines"] == 2
    assert set(report["timings"]) == {"partition", "walk", "train", "eval"}
    assert sum(report["partition"]["sizes"]) == 20
    assert report["walk"]["walks"] == 2 * 20
    assert 0.0 <= report["eval"]["auc"] <= 1.0
    assert report["eval"]["test_pairs"] == round(0.3 * 92)

    header = (out / "embeddings.txt").read_text().splitlines()[0]
    assert header == "20 8"


def test_staged_commands_match_the_pipeline(runner, tmp_path, toy_graph_path):
    staged, chained = tmp_path / "staged", tmp_path / "chained"
    for command in ("partition", "walk", "train", "eval"):
        result = invoke(runner, command, "--graph", toy_graph_path, "--out", staged, *SMALL_RUN)
        assert result.exit_code == 0, result.output
    assert invoke(runner, "pipeline", "--graph", toy_graph_path, "--out", chained, *SMALL_RUN).exit_code == 0

    for name in ("partition.txt", "corpus.txt"):
        assert read_bytes(staged / name) == read_bytes(chained / name)


def test_stage_without_its_input_fails(runner, tmp_path, toy_graph_path):
    result = invoke(runner, "walk", "--graph", toy_graph_path, "--out", tmp_path / "empty", *SMALL_RUN)
    assert result.exit_code != 0
    assert "partition.txt" in result.output


def test_invalid_parameter_fails_cleanly(runner, tmp_path, toy_graph_path):
    result = invoke(runner, "partition", "--graph", toy_graph_path, "--out", tmp_path, "--mu", "1.5")
    assert result.exit_code != 0
    assert "mu" in result.output
    assert not (tmp_path / "partition.txt").exists()


def test_missing_graph_fails(runner, tmp_path):
    result = invoke(runner, "partition", "--graph", tmp_path / "nope.txt", "--out", tmp_path)
    assert result.exit_code != 0
    assert "not found" in result.output


def test_config_file_feeds_the_run(runner, tmp_path, toy_graph_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('partitioner = "hash"\nmachines = 3\n')
    result = invoke(runner, "partition", "--graph", toy_graph_path, "--out", tmp_path / "out", "--config", cfg,
                    "--threads", "1")
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "run_report.json").read_text())
    assert report["partition"]["method"] == "hash"
    assert len(report["partition"]["sizes"]) == 3


def test_generate_writes_an_edge_list(runner, tmp_path):
    target = tmp_path / "graphs" / "cliques.txt"
    result = invoke(runner, "generate", "--kind", "two-cliques", "--nodes", "4", "--out", target)
    assert result.exit_code == 0, result.output
    lines = target.read_text().splitlines()
    # two 4-cliques plus the bridge
    assert len(lines) == 2 * 6 + 1
    assert lines[0] == "0 1"


def test_version_flag(runner):
    result = invoke(runner, "--version")
    assert result.exit_code == 0
    assert "infowalk" in result.output


def test_walk_rejects_a_partition_for_other_machines(runner, tmp_path, toy_graph_path):
    out = tmp_path / "run"
    assert invoke(runner, "partition", "--graph", toy_graph_path, "--out", out, *SMALL_RUN).exit_code == 0
    result = invoke(runner, "walk", "--graph", toy_graph_path, "--out", out, *SMALL_RUN, "--machines", "3")
    assert result.exit_code != 0
    assert "written for 2 machines" in result.output


def test_holdout_fraction_flag_matches_its_config_key(runner, tmp_path, toy_graph_path):
    out = tmp_path / "run"
    result = invoke(runner, "partition", "--graph", toy_graph_path, "--out", out, *SMALL_RUN)
    assert result.exit_code == 0, result.output
    report = json.loads((out / "run_report.json").read_text())
    assert report["config"]["holdout_fraction"] == 0.3

    result = invoke(runner, "partition", "--graph", toy_graph_path, "--out", out, "--holdout", "0.3")
    assert result.exit_code == 2
    assert "No such option" in result.output

"""CLI tests run the installed console script in a subprocess, checking the
documented exit codes (0 ok, 1 usage, 2 data, 3 internal) and option
precedence (flag > environment > config file)."""

import filecmp
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "floodlens.cli"]


def run_cli(args, cwd, env_extra=None):
    env = dict(os.environ)
    env.pop("FLOODLENS_URL", None)
    env.pop("FLOODLENS_CONFIG", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CLI + args, cwd=cwd, env=env, capture_output=True, text=True, timeout=600
    )


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    result = run_cli(
        [
            "synth",
            "--out-dir", "bundle",
            "--seed", "17",
            "--n-articles", "700",
            "--n-annotated", "240",
            "--n-annotated-flood", "70",
        ],
        cwd=root,
    )
    assert result.returncode == 0, result.stderr
    return root


class TestExitCodes:
    def test_unknown_command_is_usage(self, workdir):
        result = run_cli(["frobnicate"], cwd=workdir)
        assert result.returncode == 1

    def test_missing_required_option_is_usage(self, workdir):
        result = run_cli(["ingest"], cwd=workdir)
        assert result.returncode == 1

    def test_missing_file_is_data_error(self, workdir):
        result = run_cli(["ingest", "--corpus", "absent.jsonl"], cwd=workdir)
        assert result.returncode == 2
        assert "absent.jsonl" in result.stderr

    def test_happy_path_is_zero(self, workdir):
        result = run_cli(
            ["ingest", "--corpus", "bundle/corpus.jsonl", "--annotations", "bundle/annotations.csv"],
            cwd=workdir,
        )
        assert result.returncode == 0
        assert "n_articles: 700" in result.stdout

    def test_help_is_zero(self, workdir):
        result = run_cli(["--help"], cwd=workdir)
        assert result.returncode == 0
        for sub in ("ingest", "train", "eval", "predict", "extract", "series",
                    "correlate", "synth", "report", "serve"):
            assert sub in result.stdout


class TestOptionPrecedence:
    def test_config_file_supplies_options(self, workdir):
        (workdir / "run.cfg").write_text(
            "corpus=bundle/corpus.jsonl\nannotations=bundle/annotations.csv\n",
            encoding="utf-8",
        )
        result = run_cli(["--config", "run.cfg", "ingest"], cwd=workdir)
        assert result.returncode == 0
        assert "n_annotated: 240" in result.stdout

    def test_env_overrides_config(self, workdir):
        (workdir / "run.cfg").write_text("corpus=absent.jsonl\n", encoding="utf-8")
        result = run_cli(
            ["--config", "run.cfg", "ingest"],
            cwd=workdir,
            env_extra={"FLOODLENS_CORPUS": "bundle/corpus.jsonl"},
        )
        assert result.returncode == 0

    def test_flag_overrides_env(self, workdir):
        result = run_cli(
            ["ingest", "--corpus", "bundle/corpus.jsonl"],
            cwd=workdir,
            env_extra={"FLOODLENS_CORPUS": "absent.jsonl"},
        )
        assert result.returncode == 0

    def test_missing_config_file_is_usage(self, workdir):
        result = run_cli(["--config", "ghost.cfg", "ingest"], cwd=workdir)
        assert result.returncode == 1


class TestChainAndDeterminism:
    def run_chain(self, workdir, out_name):
        out = workdir / out_name
        out.mkdir(exist_ok=True)
        steps = [
            ["train", "--corpus", "bundle/corpus.jsonl", "--annotations", "bundle/annotations.csv",
             "--classifier", "logistic", "--model-out", f"{out_name}/model.json", "--use", "all"],
            ["predict", "--model", f"{out_name}/model.json", "--corpus", "bundle/corpus.jsonl",
             "--out-csv", f"{out_name}/predictions.csv"],
            ["extract", "--corpus", "bundle/corpus.jsonl", "--predictions", f"{out_name}/predictions.csv",
             "--out-csv", f"{out_name}/events.csv"],
            ["series", "--corpus", "bundle/corpus.jsonl", "--events", f"{out_name}/events.csv",
             "--out-series-csv", f"{out_name}/news_series.csv",
             "--out-counts-csv", f"{out_name}/flood_counts.csv"],
            ["correlate", "--news-series", f"{out_name}/news_series.csv",
             "--satellite", "bundle/satellite.csv", "--emdat", "bundle/emdat.csv",
             "--out-csv", f"{out_name}/correlations.csv", "--out-txt", f"{out_name}/correlations.txt"],
            ["report", "--news-series", f"{out_name}/news_series.csv",
             "--correlations-csv", f"{out_name}/correlations.csv",
             "--satellite", "bundle/satellite.csv", "--emdat", "bundle/emdat.csv",
             "--out-dir", f"{out_name}/report"],
        ]
        for step in steps:
            result = run_cli(step, cwd=workdir)
            assert result.returncode == 0, f"{step[0]} failed: {result.stderr}"
        return out

    def test_full_chain_and_byte_identical_rerun(self, workdir):
        out1 = self.run_chain(workdir, "out1")
        out2 = self.run_chain(workdir, "out2")
        artifacts = [
            "model.json",
            "predictions.csv",
            "events.csv",
            "news_series.csv",
            "flood_counts.csv",
            "correlations.csv",
            "correlations.txt",
            "report/report.txt",
        ]
        for name in artifacts:
            assert filecmp.cmp(out1 / name, out2 / name, shallow=False), f"{name} differs"
        svgs = sorted(p.name for p in (out1 / "report" / "charts").glob("*.svg"))
        assert svgs
        for svg in svgs:
            assert filecmp.cmp(
                out1 / "report" / "charts" / svg, out2 / "report" / "charts" / svg, shallow=False
            )

    def test_predictions_header(self, workdir):
        header = (workdir / "out1" / "predictions.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "article_id,prediction,score"

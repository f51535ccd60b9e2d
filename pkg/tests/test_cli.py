import json

import pytest

import ragcov.embed as embed_mod
from oracles import reference_lof
from ragcov.cli import main
from ragcov.config import RunConfig, load_config_file, merge_config
from ragcov.errors import ConfigError
from ragcov.synth import QuestionGroup, SyntheticSpec, TopicSpec, generate_corpus, write_corpus


def make_corpus(tmp_path, questions, seed=0, tight=False):
    v, l = (30, 60) if tight else (60, 24)
    spec = SyntheticSpec(
        topics=[TopicSpec("finance", 25, v, l), TopicSpec("hardware", 25, v, l)],
        questions=questions,
        seed=seed,
    )
    corpus = generate_corpus(spec)
    docs_dir, questions_path = write_corpus(corpus, tmp_path)
    return corpus, docs_dir, questions_path


def base_args(tmp_path, docs_dir, questions_path, *extra):
    return [
        "analyze",
        "--docs", str(docs_dir),
        "--questions", str(questions_path),
        "--embed-dim", "256",
        "--clusters", "2",
        "--lof-neighbors", "10",
        "--out", str(tmp_path / "report.json"),
        "--cache-dir", str(tmp_path / ".cache"),
        *extra,
    ]


class TestAnalyze:
    def test_happy_path_exit_zero(self, tmp_path, capsys):
        _, docs_dir, questions_path = make_corpus(
            tmp_path, [QuestionGroup(0, 8), QuestionGroup(1, 8)]
        )
        code = main(base_args(tmp_path, docs_dir, questions_path))
        assert code == 0
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["status"] == "ok"
        cov = data["coverage"]
        assert all(isinstance(cov[k], float) for k in ("basic", "weighted", "multi_threshold"))
        assert "basic coverage" in capsys.readouterr().out

    def test_all_noise_questions_exit_four(self, tmp_path):
        corpus, docs_dir, questions_path = make_corpus(
            tmp_path, [QuestionGroup(None, 4, 20)], tight=True
        )
        # the instance is constructed so the reference LOF flags every question
        from ragcov.embed import offline_embed
        import numpy as np

        e_d = [offline_embed(d.text, 256).tolist() for d in corpus.documents]
        e_q = [offline_embed(q.text, 256).tolist() for q in corpus.questions]
        assert all(s - 1.0 > 0.5 for s in reference_lof(e_q, e_d, 10))

        code = main(base_args(tmp_path, docs_dir, questions_path))
        assert code == 4
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["status"] == "no_inlier_questions"
        assert data["coverage"] is None
        assert any("outlier" in w for w in data["warnings"])

    def test_missing_api_key_exit_two_before_network(self, tmp_path, monkeypatch):
        _, docs_dir, questions_path = make_corpus(tmp_path, [QuestionGroup(0, 4)])
        monkeypatch.delenv("OPENAI_API_KEY", raising=False)

        def no_network(*args, **kwargs):
            raise AssertionError("network reached without credentials")

        monkeypatch.setattr(embed_mod, "_http_post_json", no_network)
        code = main(
            base_args(tmp_path, docs_dir, questions_path, "--provider", "openai")
        )
        assert code == 2

    def test_markdown_and_plot_artifacts(self, tmp_path):
        _, docs_dir, questions_path = make_corpus(
            tmp_path, [QuestionGroup(0, 8), QuestionGroup(1, 8)]
        )
        md = tmp_path / "report.md"
        code = main(
            base_args(tmp_path, docs_dir, questions_path, "--markdown-out", str(md), "--plot")
        )
        assert code == 0
        assert md.exists()
        assert (tmp_path / "report.svg").exists()

    def test_missing_docs_path_exit_two(self, tmp_path):
        code = main(
            [
                "analyze",
                "--docs", str(tmp_path / "nope"),
                "--questions", str(tmp_path / "also-nope.txt"),
                "--out", str(tmp_path / "r.json"),
            ]
        )
        assert code == 2


class TestValidate:
    def test_valid_config_dumped(self, tmp_path, capsys):
        _, docs_dir, questions_path = make_corpus(tmp_path, [QuestionGroup(0, 2)])
        code = main(
            [
                "validate",
                "--docs", str(docs_dir),
                "--questions", str(questions_path),
                "--chunk-size", "300",
            ]
        )
        assert code == 0
        dump = json.loads(capsys.readouterr().out)
        assert dump["chunk_size"] == 300
        assert dump["provider"] == "offline"

    def test_overlap_violation_named(self, tmp_path, capsys):
        _, docs_dir, questions_path = make_corpus(tmp_path, [QuestionGroup(0, 2)])
        code = main(
            [
                "validate",
                "--docs", str(docs_dir),
                "--questions", str(questions_path),
                "--chunk-size", "100",
                "--chunk-overlap", "100",
            ]
        )
        assert code == 2
        assert "chunk_overlap" in capsys.readouterr().err

    def test_cluster_count_advisory_warning(self, tmp_path, capsys):
        _, docs_dir, questions_path = make_corpus(tmp_path, [QuestionGroup(0, 2)])
        code = main(
            [
                "validate",
                "--docs", str(docs_dir),
                "--questions", str(questions_path),
                "--clusters", "5000",
            ]
        )
        assert code == 0
        assert "cannot be checked" in capsys.readouterr().err


class TestConfigLayering:
    def test_flags_beat_file_beat_defaults(self, tmp_path):
        cfg_file = tmp_path / "run.toml"
        cfg_file.write_text('chunk-size = 123\nseed = 9\nprovider = "offline"\n')
        file_values = load_config_file(cfg_file)
        cfg = merge_config(file_values, {"seed": 42, "docs": "d", "questions": "q"})
        assert cfg.chunk_size == 123   # from file
        assert cfg.seed == 42          # flag wins
        assert cfg.gap_threshold == 0.7  # default

    def test_unknown_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "run.toml"
        cfg_file.write_text("no_such_option = 1\n")
        with pytest.raises(ConfigError, match="no_such_option"):
            load_config_file(cfg_file)

    def test_clusters_string_auto_ok(self):
        cfg = merge_config({"clusters": "auto"}, None)
        assert cfg.clusters == "auto"
        assert merge_config({"clusters": 4}, None).clusters == 4

    def test_validate_lists_all_problems(self):
        cfg = RunConfig(docs="", questions="", chunk_size=0, gap_threshold=3.0)
        problems = cfg.validate(check_paths=False)
        assert len(problems) >= 3


class TestSynthCommand:
    def test_writes_corpus(self, tmp_path, capsys):
        code = main(
            [
                "synth",
                "--out-dir", str(tmp_path / "demo"),
                "--topics", "2",
                "--chunks-per-topic", "5",
                "--questions-per-topic", "2",
                "--seed", "3",
            ]
        )
        assert code == 0
        docs = list((tmp_path / "demo" / "docs").glob("*.txt"))
        assert len(docs) == 10
        lines = (tmp_path / "demo" / "questions.txt").read_text().splitlines()
        assert len(lines) == 4


def test_end_to_end_determinism_quick(tmp_path):
    _, docs_dir, questions_path = make_corpus(tmp_path, [QuestionGroup(0, 6), QuestionGroup(1, 6)])
    outs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        code = main(
            [
                "analyze",
                "--docs", str(docs_dir),
                "--questions", str(questions_path),
                "--embed-dim", "128",
                "--clusters", "2",
                "--lof-neighbors", "8",
                "--seed", "5",
                "--out", str(out),
                "--cache-dir", str(tmp_path / ".cache"),
            ]
        )
        assert code == 0
        data = json.loads(out.read_text())
        data["run"]["timestamp"] = "MASKED"
        data["run"]["config"]["out"] = "MASKED"
        outs.append(json.dumps(data, sort_keys=True))
    assert outs[0] == outs[1]

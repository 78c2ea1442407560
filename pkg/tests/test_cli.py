"""CLI subcommands exercised through click's runner."""
import json

import pytest
from click.testing import CliRunner

from toxishield.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")


class TestAnalyze:
    def test_clean_text(self, runner):
        result = runner.invoke(main, ["analyze", "looks good to me"])
        assert result.exit_code == 0, result.output
        assert "non_toxic" in result.output

    def test_toxic_text_json(self, runner):
        result = runner.invoke(main, ["--json", "analyze", "this is damn slow"])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["label"] == "toxic"
        assert body["score"] == pytest.approx(0.9)
        # no LLM endpoint configured: downstream stages degrade, never abort
        assert body["degraded"]["coach"] is True

    def test_file_input(self, runner, tmp_path):
        path = tmp_path / "comment.txt"
        path.write_text("thanks, merging", encoding="utf-8")
        result = runner.invoke(main, ["analyze", "--file", str(path)])
        assert result.exit_code == 0
        assert "non_toxic" in result.output

    def test_text_and_file_conflict(self, runner, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("x")
        result = runner.invoke(main, ["analyze", "text", "--file", str(path)])
        assert result.exit_code != 0

    def test_empty_input_fails_cleanly(self, runner):
        result = runner.invoke(main, ["analyze", "   "])
        assert result.exit_code != 0
        assert "empty" in result.output.lower()


class TestClassifyDetoxify:
    def test_classify_without_endpoint_errors(self, runner):
        result = runner.invoke(main, ["classify", "some text"])
        assert result.exit_code != 0
        assert "client" in result.output.lower() or "chat" in result.output.lower()

    def test_detoxify_without_endpoint_errors(self, runner):
        result = runner.invoke(main, ["detoxify", "some text"])
        assert result.exit_code != 0


class TestEvaluate:
    def test_tst_table(self, runner, tmp_path):
        path = tmp_path / "scores.jsonl"
        write_jsonl(path, [
            {"id": "1", "orig_text": "a", "detox_text": "b",
             "orig_p": 0.8, "detox_p": 0.2, "fluent": 1, "sim": 0.9},
            {"id": "2", "orig_text": "c", "detox_text": "d",
             "orig_p": 0.8, "detox_p": 0.2, "fluent": 1, "sim": 0.7},
        ])
        result = runner.invoke(main, ["evaluate", "tst", str(path), "--name", "demo"])
        assert result.exit_code == 0, result.output
        assert "DETOX" in result.output and "J-Score" in result.output
        assert "75.00" in result.output  # net reduction 0.8 -> 0.2

    def test_tst_json(self, runner, tmp_path):
        path = tmp_path / "scores.jsonl"
        write_jsonl(path, [
            {"id": "1", "orig_text": "a", "detox_text": "b",
             "orig_p": 1.0, "detox_p": 0.0, "fluent": 1, "sim": 1.0},
        ])
        result = runner.invoke(main, ["--json", "evaluate", "tst", str(path)])
        body = json.loads(result.output)
        assert body["detox"] == 100.0
        assert body["j_score"] == 100.0

    def test_tst_style_accuracy_mode(self, runner, tmp_path):
        path = tmp_path / "scores.jsonl"
        write_jsonl(path, [
            {"id": "1", "orig_text": "a", "detox_text": "b",
             "orig_p": 1.0, "detox_p": 0.6, "fluent": 1, "sim": 1.0},
            {"id": "2", "orig_text": "c", "detox_text": "d",
             "orig_p": 1.0, "detox_p": 0.3, "fluent": 1, "sim": 1.0},
        ])
        result = runner.invoke(main, [
            "--json", "evaluate", "tst", str(path), "--mode", "style_accuracy",
        ])
        assert json.loads(result.output)["detox"] == 50.0

    def test_cls_report(self, runner, tmp_path):
        path = tmp_path / "preds.jsonl"
        write_jsonl(path, [
            {"id": "1", "pred": ["Profanity"], "gold": ["Profanity", "Insult"]},
            {"id": "2", "pred": ["Non-Toxic"], "gold": ["Non-Toxic"]},
        ])
        result = runner.invoke(main, ["evaluate", "cls", str(path)])
        assert result.exit_code == 0, result.output
        assert "EM" in result.output
        assert "0.50" in result.output

    def test_missing_score_fields_fail(self, runner, tmp_path):
        path = tmp_path / "scores.jsonl"
        write_jsonl(path, [{"id": "1"}])
        result = runner.invoke(main, ["evaluate", "tst", str(path)])
        assert result.exit_code != 0


class TestCurate:
    def test_bin_writes_queue(self, runner, tmp_path):
        data = tmp_path / "scored.jsonl"
        write_jsonl(data, [
            {"id": str(i), "body": f"text {i}", "p": 0.15 + 0.0001 * i}
            for i in range(30)
        ])
        out = tmp_path / "queue.jsonl"
        result = runner.invoke(main, [
            "--seed", "3", "curate", "bin", str(data), "-o", str(out), "--quota", "10",
        ])
        assert result.exit_code == 0, result.output
        rows = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(rows) == 10
        assert all(r["bin"] == 1 for r in rows)

    def test_filter_partitions(self, runner, tmp_path):
        data = tmp_path / "pool.jsonl"
        write_jsonl(data, [
            {"id": "1", "body": "damn this build"},
            {"id": "2", "body": "all good"},
        ])
        kept, removed = tmp_path / "kept.jsonl", tmp_path / "removed.jsonl"
        result = runner.invoke(main, [
            "curate", "filter", str(data), "-o", str(kept), "--removed", str(removed),
        ])
        assert result.exit_code == 0, result.output
        assert "kept 1, removed 1" in result.output
        assert json.loads(removed.read_text())["id"] == "1"

    def test_pair_requires_endpoint(self, runner, tmp_path):
        data = tmp_path / "toxic.jsonl"
        write_jsonl(data, [{"id": "1", "body": "damn"}])
        result = runner.invoke(main, [
            "curate", "pair", str(data), "-o", str(tmp_path / "pairs.jsonl"),
        ])
        assert result.exit_code != 0
        assert "endpoint" in result.output.lower()

    def test_split_writes_partitions(self, runner, tmp_path):
        data = tmp_path / "all.jsonl"
        write_jsonl(data, [
            {"id": str(i), "body": "x", "label": "toxic" if i % 2 else "non_toxic"}
            for i in range(20)
        ])
        prefix = str(tmp_path / "out")
        result = runner.invoke(main, [
            "--seed", "5", "curate", "split", str(data),
            "--ratios", "80/20", "--stratify", "-o", prefix,
        ])
        assert result.exit_code == 0, result.output
        train = [json.loads(l) for l in open(f"{prefix}.train.jsonl")]
        test = [json.loads(l) for l in open(f"{prefix}.test.jsonl")]
        assert len(train) == 16 and len(test) == 4

    def test_split_bad_ratios(self, runner, tmp_path):
        data = tmp_path / "all.jsonl"
        write_jsonl(data, [{"id": "1", "body": "x"}])
        result = runner.invoke(main, [
            "curate", "split", str(data), "--ratios", "80/30", "-o", str(tmp_path / "o"),
        ])
        assert result.exit_code != 0


class TestTokenizeCommand:
    def test_bundled_vocab(self, runner):
        result = runner.invoke(main, ["tokenize", "please fix the loop"])
        assert result.exit_code == 0, result.output
        assert "[CLS]" in result.output and "[SEP]" in result.output

    def test_json_output_shape(self, runner):
        result = runner.invoke(main, ["--json", "tokenize", "please fix"])
        body = json.loads(result.output)
        assert len(body["ids"]) == 128
        assert sum(body["attention_mask"]) == body["length"]

    def test_custom_vocab_and_max_len(self, runner, tmp_path):
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("[PAD]\n[UNK]\n[CLS]\n[SEP]\nhi\n", encoding="utf-8")
        result = runner.invoke(main, [
            "--json", "tokenize", "hi", "--vocab", str(vocab), "--max-len", "8",
        ])
        body = json.loads(result.output)
        assert len(body["ids"]) == 8

    def test_empty_text_fails(self, runner):
        result = runner.invoke(main, ["tokenize", "  "])
        assert result.exit_code != 0

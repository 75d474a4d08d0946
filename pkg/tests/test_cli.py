import json

import pytest

from opmkit.cli import main
from opmkit.records import (
    data_path,
    read_predictions_jsonl,
    write_predictions_jsonl,
)
from opmkit.records import PredictionRecord

OPL = str(data_path("heuristic_evolution.opl"))
QUESTIONS = str(data_path("questions.jsonl"))
COUNTS = "objects: 3, processes: 9, states: 7, links: 12"


def test_check_prints_counts(capsys):
    assert main(["check", OPL]) == 0
    out = capsys.readouterr()
    assert out.out == COUNTS + "\n"
    assert "error" not in out.err


def test_check_strict_fails_on_garbage(tmp_path, capsys):
    bad = tmp_path / "bad.opl"
    bad.write_text("Heuristic is an object.\nThis is not a sentence template.\n",
                   encoding="utf-8")
    assert main(["check", "--strict", str(bad)]) == 1
    assert "UnrecognizedSentence" in capsys.readouterr().err


def test_check_lenient_reports_but_passes(tmp_path, capsys):
    bad = tmp_path / "bad.opl"
    bad.write_text("This is not a sentence template.\n", encoding="utf-8")
    assert main(["check", str(bad)]) == 0
    captured = capsys.readouterr()
    assert "UnrecognizedSentence" in captured.err
    assert "objects: 0" in captured.out


def test_missing_file_is_usage_error(capsys):
    assert main(["check", "/nonexistent/model.opl"]) == 2
    assert "file not found" in capsys.readouterr().err


def test_query_lists_processes(capsys):
    assert main(["query", OPL, "Heuristic", "rule of thumb",
                 "pattern recognized"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["Documenting & Sharing", "Testing & Refining",
                     "Pattern Emerging & Recognizing"]


def test_query_identity_prints_nothing(capsys):
    assert main(["query", OPL, "Heuristic", "principle", "principle"]) == 0
    assert capsys.readouterr().out == ""


def test_query_unknown_state(capsys):
    assert main(["query", OPL, "Heuristic", "rule of thumb", "nirvana"]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_answer_writes_predictions(tmp_path, capsys):
    out = tmp_path / "preds.jsonl"
    assert main(["answer", OPL, QUESTIONS, str(out)]) == 0
    assert capsys.readouterr().out == \
        f"wrote 10 predictions to {out} (2 failed)\n"
    records = read_predictions_jsonl(out)
    assert len(records) == 10
    assert sum(1 for r in records if r.error) == 2


def test_answer_rejects_malformed_questions(tmp_path, capsys):
    broken = tmp_path / "broken.jsonl"
    broken.write_text('{"id": 1}\n', encoding="utf-8")
    assert main(["answer", OPL, str(broken), str(tmp_path / "o.jsonl")]) == 2
    assert "cannot read" in capsys.readouterr().err


@pytest.fixture()
def identity_predictions(tmp_path, questions):
    path = tmp_path / "identity.jsonl"
    write_predictions_jsonl(
        [PredictionRecord(q.id, q.answer) for q in questions], path)
    return str(path)


def test_eval_prints_config_and_table(identity_predictions, capsys):
    assert main(["eval", QUESTIONS, identity_predictions, OPL]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == \
        ("metric config: k=1.5, accuracy lemmatizer=plural, "
         "rouge lemmatizer=porter (fmeasure), stopwords=153")
    loose_row = next(line for line in out.splitlines()
                     if line.startswith("loose"))
    assert "1.000" in loose_row and "0.000" in loose_row


def test_eval_writes_report_and_figures(identity_predictions, tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["eval", QUESTIONS, identity_predictions, OPL,
                 "--out", str(report)]) == 0
    out = capsys.readouterr().out
    assert f"report written to {report}" in out
    data = json.loads(report.read_text(encoding="utf-8"))
    assert len(data["items"]) == 10
    assert (tmp_path / "report_per_item.png").is_file()
    assert (tmp_path / "report_aggregate.png").is_file()


def test_eval_no_figures(identity_predictions, tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["eval", QUESTIONS, identity_predictions, OPL,
                 "--out", str(report), "--no-figures"]) == 0
    assert not list(tmp_path.glob("*.png"))
    assert "figure written" not in capsys.readouterr().out


def test_eval_csv_format(identity_predictions, tmp_path):
    report = tmp_path / "report.csv"
    assert main(["eval", QUESTIONS, identity_predictions, OPL,
                 "--out", str(report), "--format", "csv",
                 "--no-figures"]) == 0
    lines = report.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("id,loose,strict,")
    assert lines[-2].startswith("mean,")


def test_eval_rejects_unmatched_ids(tmp_path, capsys):
    stray = tmp_path / "stray.jsonl"
    write_predictions_jsonl([PredictionRecord(99, "answer")], stray)
    assert main(["eval", QUESTIONS, str(stray), OPL]) == 1
    assert "predictions without references" in capsys.readouterr().err


def test_eval_rejects_malformed_predictions(tmp_path, capsys):
    broken = tmp_path / "broken.jsonl"
    broken.write_text('{"id": 1}\n', encoding="utf-8")
    assert main(["eval", QUESTIONS, str(broken), OPL]) == 2
    assert "unreadable input" in capsys.readouterr().err


def test_eval_against_second_run(identity_predictions, capsys):
    nl = str(data_path("predictions_nl_qa.jsonl"))
    assert main(["eval", QUESTIONS, identity_predictions, OPL,
                 "--against", nl]) == 0
    assert f"welch p-values vs {nl}:" in capsys.readouterr().out


def test_eval_custom_config(identity_predictions, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"stopwords": [], "lemmatizer": "none"}', encoding="utf-8")
    assert main(["eval", QUESTIONS, identity_predictions, OPL,
                 "--config", str(cfg)]) == 0
    head = capsys.readouterr().out.splitlines()[0]
    assert "accuracy lemmatizer=none" in head and "stopwords=0" in head


def test_eval_external_scores(identity_predictions, tmp_path, capsys):
    ext = tmp_path / "ext.jsonl"
    ext.write_text("\n".join(json.dumps({"id": i, "bt": 0.9, "gpt": 0.8})
                             for i in range(1, 11)) + "\n", encoding="utf-8")
    assert main(["eval", QUESTIONS, identity_predictions, OPL,
                 "--external-scores", str(ext)]) == 0
    out = capsys.readouterr().out
    assert any(line.startswith("bt") and "0.900" in line
               for line in out.splitlines())


def test_export_dot(tmp_path, capsys):
    out = tmp_path / "model.dot"
    assert main(["export-dot", OPL, str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert text.startswith("digraph model {")
    assert text.endswith("}\n")


def test_run_llm_mock(tmp_path):
    out = tmp_path / "mock.jsonl"
    assert main(["run-llm", OPL, QUESTIONS, str(out), "--backend", "mock"]) == 0
    records = read_predictions_jsonl(out)
    assert len(records) == 10
    assert all(r.error is None for r in records)


def test_run_llm_mock_canned(tmp_path):
    canned = tmp_path / "canned.txt"
    canned.write_text("the only answer\n", encoding="utf-8")
    out = tmp_path / "mock.jsonl"
    assert main(["run-llm", OPL, QUESTIONS, str(out), "--backend", "mock",
                 "--canned", str(canned)]) == 0
    assert all(r.prediction == "the only answer"
               for r in read_predictions_jsonl(out))


def test_run_llm_oracle_matches_answer_command(tmp_path):
    direct = tmp_path / "direct.jsonl"
    oracle = tmp_path / "oracle.jsonl"
    assert main(["answer", OPL, QUESTIONS, str(direct)]) == 0
    assert main(["run-llm", OPL, QUESTIONS, str(oracle),
                 "--backend", "mock-oracle"]) == 0
    assert oracle.read_bytes() == direct.read_bytes()


def test_run_llm_http_needs_key(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("NCAI_LLM_API_KEY", raising=False)
    assert main(["run-llm", OPL, QUESTIONS, str(tmp_path / "o.jsonl"),
                 "--backend", "http"]) == 2
    assert "NCAI_LLM_API_KEY" in capsys.readouterr().err


def test_roundtrip_command(capsys):
    assert main(["roundtrip", OPL]) == 0
    assert capsys.readouterr().out == f"roundtrip OK: {COUNTS}\n"

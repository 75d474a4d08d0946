"""JSON Lines records for QA datasets and prediction runs."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    """Path of a packaged data file (corpora, question sets, example pairs)."""
    return Path(str(resources.files("opmkit").joinpath("data", name)))


@dataclass
class QaRecord:
    id: int
    question: str
    answer: str


@dataclass
class PredictionRecord:
    id: int
    prediction: str
    error: str | None = None


def format_error(exc: BaseException) -> str:
    """Stable one-line marker for a failed item, e.g. 'UnknownName: ...'."""
    return f"{type(exc).__name__}: {exc}"


def read_qa_jsonl(path: str | Path) -> list[QaRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            try:
                records.append(QaRecord(int(obj["id"]), obj["question"], obj["answer"]))
            except KeyError as exc:
                raise ValueError(f"line {line_no}: missing field {exc}") from None
    return records


def read_predictions_jsonl(path: str | Path) -> list[PredictionRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            try:
                records.append(PredictionRecord(int(obj["id"]), obj["prediction"],
                                                obj.get("error")))
            except KeyError as exc:
                raise ValueError(f"line {line_no}: missing field {exc}") from None
    return records


def write_predictions_jsonl(records: list[PredictionRecord], path: str | Path) -> None:
    # key order and encoding are fixed so identical runs give identical bytes
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj: dict = {"id": rec.id, "prediction": rec.prediction}
            if rec.error is not None:
                obj["error"] = rec.error
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_example_pairs(path: str | Path) -> list[tuple[str, str]]:
    """Few-shot (question, answer) pairs, one JSON object per line."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            pairs.append((obj["question"], obj["answer"]))
    return pairs

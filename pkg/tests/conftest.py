import pytest

from opmkit import parse_document
from opmkit.records import data_path, read_predictions_jsonl, read_qa_jsonl


def _load(name):
    model, diags = parse_document(data_path(name).read_text(encoding="utf-8"))
    errors = [d for d in diags if d.severity == "error"]
    assert not errors, errors
    return model


@pytest.fixture(scope="session")
def model():
    """Merged expert-built corpus: 3 objects, 9 processes, 7 states, 12 links."""
    return _load("heuristic_evolution.opl")


@pytest.fixture(scope="session")
def llm_model():
    """Generated-variant corpus: 7 objects, 10 processes, 9 states, 16 links."""
    return _load("heuristic_evolution_llm.opl")


@pytest.fixture(scope="session")
def questions():
    return read_qa_jsonl(data_path("questions.jsonl"))


@pytest.fixture(scope="session")
def opl_qa_predictions():
    return read_predictions_jsonl(data_path("predictions_opl_qa.jsonl"))


@pytest.fixture(scope="session")
def nl_qa_predictions():
    return read_predictions_jsonl(data_path("predictions_nl_qa.jsonl"))

"""Prompt assembly and pluggable completion backends for QA runs.

Backends: 'mock' picks a canned answer by question hash, 'mock-oracle'
delegates to the symbolic answerer over a supplied model, 'http' posts to a
JSON completion endpoint. Sampling is pinned (temperature 0, top_p 1) so
runs are as repeatable as the backend allows.
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import requests

from .records import PredictionRecord, QaRecord, data_path, format_error, read_example_pairs

PREAMBLE = (
    "You are a knowledgeable assistant. Your task is to answer questions based on "
    "the provided domain knowledge. Your answers should align closely with the domain "
    "knowledge, use precise terminology, and remain concise and accurate. Focus on "
    "identifying and describing key processes, objects, and states explicitly, and "
    "clarify their relationships where relevant."
)

BACKEND_KINDS = ("mock", "mock-oracle", "http")


class GatewayError(Exception):
    pass


class MissingCredentials(GatewayError):
    pass


class BackendError(GatewayError):
    pass


class TimeoutExceeded(GatewayError):
    pass


@dataclass
class PromptBundle:
    knowledge: str
    examples: list[tuple[str, str]]
    question: str
    rendered: str


@dataclass
class BackendConfig:
    kind: str = "mock"
    endpoint: str | None = None
    model_id: str | None = None
    temperature: float = 0.0
    top_p: float = 1.0
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 1.0
    canned: list[str] | None = None
    oracle_model: object = None

    def __post_init__(self) -> None:
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind: {self.kind!r}")


def assemble_qa_prompt(knowledge: str, examples: list[tuple[str, str]],
                       question: str) -> PromptBundle:
    """Fixed prompt skeleton: preamble, knowledge, example pairs, new question."""
    if not question.strip():
        raise ValueError("question must be non-empty")
    lines = [PREAMBLE, "", "Domain Knowledge:", knowledge, "",
             "Examples of Question-Answer Pairs:"]
    for q, a in examples:
        lines.append(f"Q: {q}")
        lines.append(f"A: {a}")
    lines += ["", "New Question:", f"Q: {question}", "A (concise and precise):"]
    return PromptBundle(knowledge, list(examples), question, "\n".join(lines))


def assemble_conversion_prompt(instructions: str, nl_text: str) -> PromptBundle:
    """Conversion prompt: modeling instructions followed by the source text."""
    if not instructions.strip() or not nl_text.strip():
        raise ValueError("instructions and text must be non-empty")
    rendered = instructions + "\n\n" + nl_text
    return PromptBundle(knowledge=nl_text, examples=[], question="", rendered=rendered)


def _default_canned() -> list[str]:
    return [a for _, a in read_example_pairs(data_path("example_pairs.jsonl"))]


def _complete_mock(bundle: PromptBundle, config: BackendConfig) -> str:
    canned = config.canned if config.canned else _default_canned()
    digest = hashlib.sha256(bundle.question.encode("utf-8")).hexdigest()
    return canned[int(digest, 16) % len(canned)]


def _complete_oracle(bundle: PromptBundle, config: BackendConfig) -> str:
    from .answerer import answer_question

    if config.oracle_model is None:
        raise ValueError("mock-oracle backend needs oracle_model")
    return answer_question(config.oracle_model, bundle.question).text


def _extract_completion(data) -> str:
    if isinstance(data, dict):
        for key in ("text", "completion", "output"):
            if isinstance(data.get(key), str):
                return data[key]
        choices = data.get("choices")
        if isinstance(choices, list) and choices:
            first = choices[0]
            if isinstance(first.get("text"), str):
                return first["text"]
            message = first.get("message")
            if isinstance(message, dict) and isinstance(message.get("content"), str):
                return message["content"]
    raise BackendError(f"unrecognized response shape: {str(data)[:200]}")


def _complete_http(bundle: PromptBundle, config: BackendConfig) -> str:
    api_key = os.environ.get("NCAI_LLM_API_KEY")
    if not api_key:
        raise MissingCredentials("NCAI_LLM_API_KEY is not set")
    endpoint = config.endpoint or os.environ.get("NCAI_LLM_BASE_URL")
    if not endpoint:
        raise MissingCredentials("no endpoint: set NCAI_LLM_BASE_URL or pass endpoint")
    payload = {
        "model": config.model_id or os.environ.get("NCAI_LLM_MODEL", "default"),
        "prompt": bundle.rendered,
        "temperature": config.temperature,
        "top_p": config.top_p,
    }
    headers = {"Authorization": f"Bearer {api_key}"}

    last_timeout = False
    for attempt in range(config.max_retries + 1):
        if attempt:
            time.sleep(config.backoff * 2 ** (attempt - 1))
        try:
            resp = requests.post(endpoint, json=payload, headers=headers,
                                 timeout=config.timeout)
        except requests.Timeout:
            last_timeout = True
            continue
        except requests.RequestException:
            last_timeout = False
            continue
        if resp.status_code == 429 or resp.status_code >= 500:
            continue  # transient; retry with backoff
        if resp.status_code >= 400:
            raise BackendError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        return _extract_completion(resp.json())
    if last_timeout:
        raise TimeoutExceeded(f"no response after {config.max_retries + 1} attempts")
    raise BackendError(f"endpoint unreachable after {config.max_retries + 1} attempts")


def complete(bundle: PromptBundle, config: BackendConfig) -> str:
    if config.kind == "mock":
        return _complete_mock(bundle, config)
    if config.kind == "mock-oracle":
        return _complete_oracle(bundle, config)
    return _complete_http(bundle, config)


def run_qa_batch(knowledge: str, examples: list[tuple[str, str]],
                 questions: list[QaRecord], config: BackendConfig,
                 parallel: int = 1) -> list[PredictionRecord]:
    """Complete every question, preserving order; failures become error markers."""
    if not questions:
        raise ValueError("no questions to run")

    def run_one(q: QaRecord) -> PredictionRecord:
        try:
            bundle = assemble_qa_prompt(knowledge, examples, q.question)
            return PredictionRecord(q.id, complete(bundle, config))
        except Exception as exc:
            return PredictionRecord(q.id, "", error=format_error(exc))

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(run_one, questions))
    return [run_one(q) for q in questions]

"""Command line interface.

Exit codes: 0 success, 1 validation or scoring failure, 2 usage problems
such as missing files or malformed inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .answerer import answer_records
from .dot import model_to_dot
from .gateway import BackendConfig, run_qa_batch
from .metrics import (
    METRIC_COLUMNS,
    compare_runs,
    evaluate_run,
)
from .model import OpmModel
from .opl import parse_document, serialize_model
from .model import models_isomorphic
from .reasoner import ReasonerError, processes_between
from .records import (
    data_path,
    read_example_pairs,
    read_predictions_jsonl,
    read_qa_jsonl,
    write_predictions_jsonl,
)
from .textnorm import DEFAULT_CONFIG, NormalizationConfig


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _print_diagnostics(diagnostics) -> None:
    for diag in diagnostics:
        print(diag, file=sys.stderr)


def _has_errors(diagnostics) -> bool:
    return any(d.severity == "error" for d in diagnostics)


def _counts_line(model: OpmModel) -> str:
    states = sum(len(obj.states) for obj in model.objects)
    return (f"objects: {len(model.objects)}, processes: {len(model.processes)}, "
            f"states: {states}, links: {len(model.links)}")


def cmd_check(args) -> int:
    model, diags = parse_document(_read_text(args.opl), strict=args.strict)
    _print_diagnostics(diags)
    print(_counts_line(model))
    if args.strict and _has_errors(diags):
        return 1
    return 0


def cmd_query(args) -> int:
    model, diags = parse_document(_read_text(args.opl))
    if _has_errors(diags):
        _print_diagnostics(diags)
        return 1
    try:
        for process in processes_between(model, args.object, args.from_state, args.to_state):
            print(process)
    except ReasonerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_answer(args) -> int:
    model, diags = parse_document(_read_text(args.opl))
    if _has_errors(diags):
        _print_diagnostics(diags)
        return 1
    try:
        questions = read_qa_jsonl(args.questions)
    except (json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: cannot read {args.questions}: {exc}", file=sys.stderr)
        return 2
    records = answer_records(model, questions)
    write_predictions_jsonl(records, args.out)
    failed = sum(1 for r in records if r.error is not None)
    print(f"wrote {len(records)} predictions to {args.out} ({failed} failed)")
    return 0


def _load_norm_config(path: str | None) -> NormalizationConfig:
    if path is None:
        return DEFAULT_CONFIG
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    kwargs = {}
    if "stopwords" in raw:
        kwargs["stopword_list"] = frozenset(raw["stopwords"])
    if "lemmatizer" in raw:
        kwargs["lemmatizer"] = raw["lemmatizer"]
    return NormalizationConfig(**kwargs)


def _load_external_scores(path: str | None) -> dict[int, dict[str, float]] | None:
    if path is None:
        return None
    out: dict[int, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            entry = {}
            for key in ("bt", "gpt"):
                if key in obj:
                    entry[key] = float(obj[key])
            out[int(obj["id"])] = entry
    return out


def _print_report(report, against: str | None) -> None:
    cfg = report.config
    print(f"metric config: k={cfg['k']}, "
          f"accuracy lemmatizer={cfg['accuracy_normalization']['lemmatizer']}, "
          f"rouge lemmatizer={cfg['rouge_normalization']['lemmatizer']} "
          f"({cfg['rouge_mode']}), "
          f"stopwords={len(cfg['accuracy_normalization']['stopword_list'])}")
    print(f"{'metric':<14}{'mean':>8}{'std':>8}")
    for name in METRIC_COLUMNS + ("bt", "gpt"):
        if name in report.aggregate:
            mean, std = report.aggregate[name]
            print(f"{name:<14}{mean:>8.3f}{std:>8.3f}")
    if report.comparison is not None:
        pairs = ", ".join(f"{k}={v:.4g}" for k, v in report.comparison.items())
        print(f"welch p-values vs {against}: {pairs}")


def cmd_eval(args) -> int:
    model, diags = parse_document(_read_text(args.opl))
    if _has_errors(diags):
        _print_diagnostics(diags)
        return 1
    try:
        refs = read_qa_jsonl(args.references)
        preds = read_predictions_jsonl(args.predictions)
        config = _load_norm_config(args.config)
        external = _load_external_scores(args.external_scores)
    except (json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: unreadable input: {exc}", file=sys.stderr)
        return 2
    try:
        report = evaluate_run(refs, preds, model, config, k=args.k,
                              external_scores=external)
        if args.against:
            preds_b = read_predictions_jsonl(args.against)
            report_b = evaluate_run(refs, preds_b, model, config, k=args.k)
            report.comparison = compare_runs(report, report_b)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print_report(report, args.against)
    if args.out:
        out = Path(args.out)
        out.write_text(report.to_csv() if args.format == "csv" else report.to_json(),
                       encoding="utf-8")
        print(f"report written to {out}")
        if not args.no_figures:
            from .figures import render_report_figures

            for fig_path in render_report_figures(report, out.parent, stem=out.stem):
                print(f"figure written to {fig_path}")
    return 0


def cmd_export_dot(args) -> int:
    model, diags = parse_document(_read_text(args.opl))
    if _has_errors(diags):
        _print_diagnostics(diags)
        return 1
    Path(args.out).write_text(model_to_dot(model), encoding="utf-8")
    print(f"dot written to {args.out}")
    return 0


def cmd_run_llm(args) -> int:
    knowledge = _read_text(args.knowledge)
    try:
        questions = read_qa_jsonl(args.questions)
    except (json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: cannot read {args.questions}: {exc}", file=sys.stderr)
        return 2
    examples = read_example_pairs(args.examples if args.examples
                                  else data_path("example_pairs.jsonl"))
    canned = None
    if args.canned:
        canned = [line for line in _read_text(args.canned).splitlines() if line.strip()]
    oracle_model = None
    if args.backend == "mock-oracle":
        oracle_model, diags = parse_document(knowledge)
        if _has_errors(diags):
            _print_diagnostics(diags)
            return 1
    if args.backend == "http" and not os.environ.get("NCAI_LLM_API_KEY"):
        print("error: NCAI_LLM_API_KEY is not set", file=sys.stderr)
        return 2
    config = BackendConfig(kind=args.backend, endpoint=args.endpoint,
                           model_id=args.model_id, timeout=args.timeout,
                           max_retries=args.retries, canned=canned,
                           oracle_model=oracle_model)
    records = run_qa_batch(knowledge, examples, questions, config,
                           parallel=args.parallel)
    write_predictions_jsonl(records, args.out)
    failed = sum(1 for r in records if r.error is not None)
    print(f"wrote {len(records)} predictions to {args.out} ({failed} failed)")
    return 0


def cmd_roundtrip(args) -> int:
    model, diags = parse_document(_read_text(args.opl))
    if _has_errors(diags):
        _print_diagnostics(diags)
        return 1
    reparsed, rediags = parse_document(serialize_model(model))
    if _has_errors(rediags):
        _print_diagnostics(rediags)
        print("roundtrip FAILED: serialized text does not parse cleanly", file=sys.stderr)
        return 1
    if not models_isomorphic(model, reparsed):
        print("roundtrip FAILED: reparsed model differs", file=sys.stderr)
        return 1
    print(f"roundtrip OK: {_counts_line(model)}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opmkit",
        description="Parse conceptual models, answer state-transition questions, "
                    "and score prediction runs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a model file and print element counts")
    p.add_argument("opl")
    p.add_argument("--strict", action="store_true",
                   help="fail on the first unrecognized sentence")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("query", help="list processes along the shortest state path")
    p.add_argument("opl")
    p.add_argument("object")
    p.add_argument("from_state")
    p.add_argument("to_state")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("answer", help="answer questions symbolically from a model")
    p.add_argument("opl")
    p.add_argument("questions")
    p.add_argument("out")
    p.set_defaults(func=cmd_answer)

    p = sub.add_parser("eval", help="score predictions against references")
    p.add_argument("references")
    p.add_argument("predictions")
    p.add_argument("opl", help="model file used for element-level transparency")
    p.add_argument("--out", help="write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--k", type=float, default=1.5,
                   help="strict accuracy exponent (default 1.5)")
    p.add_argument("--config", help="JSON file with stopwords / lemmatizer overrides")
    p.add_argument("--against", help="second predictions file for Welch p-values")
    p.add_argument("--external-scores",
                   help="JSONL with per-id bt/gpt scores to merge into the report")
    p.add_argument("--no-figures", action="store_true",
                   help="skip rendering figures next to the report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-dot", help="write a Graphviz rendering of the model")
    p.add_argument("opl")
    p.add_argument("out")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("run-llm", help="answer questions through a completion backend")
    p.add_argument("knowledge", help="domain knowledge text (for mock-oracle: a model file)")
    p.add_argument("questions")
    p.add_argument("out")
    p.add_argument("--backend", choices=("mock", "mock-oracle", "http"), default="mock")
    p.add_argument("--examples", help="JSONL of few-shot question/answer pairs")
    p.add_argument("--canned", help="text file of canned answers for the mock backend")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--endpoint")
    p.add_argument("--model-id")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--retries", type=int, default=3)
    p.set_defaults(func=cmd_run_llm)

    p = sub.add_parser("roundtrip", help="parse, serialize, reparse, compare")
    p.add_argument("opl")
    p.set_defaults(func=cmd_roundtrip)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

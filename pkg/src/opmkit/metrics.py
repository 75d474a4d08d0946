"""Scoring for QA runs: token accuracy, ROUGE, and element-level transparency."""

from __future__ import annotations

import csv
import io
import json
import math
import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from statistics import fmean, stdev, variance

from scipy import stats as _scipy_stats

from .model import ElementRef, OpmModel, canonical_name
from .records import PredictionRecord, QaRecord
from .textnorm import (
    DEFAULT_CONFIG,
    MINIMAL_CONFIG,
    NormalizationConfig,
    normalize_tokens,
)

_VAR_FLOOR = 1e-12


def loose_accuracy(reference: str, prediction: str,
                   config: NormalizationConfig = DEFAULT_CONFIG) -> float:
    """Fraction of the reference's unique normalized tokens found in the prediction."""
    ref = set(normalize_tokens(reference, config))
    if not ref:
        return 1.0  # vacuous: nothing required
    pred = set(normalize_tokens(prediction, config))
    return len(ref & pred) / len(ref)


def strict_accuracy(loose: float, k: float = 1.5) -> float:
    """Power penalty on loose accuracy; equal to loose only at 0 and 1."""
    if not 0.0 <= loose <= 1.0:
        raise ValueError(f"loose accuracy out of range: {loose}")
    if k < 1.0:
        raise ValueError(f"exponent must be >= 1, got {k}")
    return loose ** k


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(reference: str, prediction: str, n: int,
            config: NormalizationConfig = MINIMAL_CONFIG,
            mode: str = "recall") -> float:
    """Clipped n-gram overlap; recall by default, F-measure on request."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if mode not in ("recall", "fmeasure"):
        raise ValueError(f"unknown mode: {mode}")
    ref_tokens = normalize_tokens(reference, config)
    pred_tokens = normalize_tokens(prediction, config)
    ref_grams = _ngrams(ref_tokens, n)
    ref_total = sum(ref_grams.values())
    if ref_total == 0:
        warnings.warn(f"reference has no {n}-grams; returning 0.0")
        return 0.0
    pred_grams = _ngrams(pred_tokens, n)
    clipped = sum(min(count, pred_grams[gram]) for gram, count in ref_grams.items())
    if mode == "recall":
        return clipped / ref_total
    pred_total = sum(pred_grams.values())
    if clipped == 0:
        return 0.0
    return 2.0 * clipped / (ref_total + pred_total)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(reference: str, prediction: str,
            config: NormalizationConfig = MINIMAL_CONFIG,
            mode: str = "recall") -> float:
    """Longest-common-subsequence overlap; recall by default."""
    if mode not in ("recall", "fmeasure"):
        raise ValueError(f"unknown mode: {mode}")
    ref_tokens = normalize_tokens(reference, config)
    pred_tokens = normalize_tokens(prediction, config)
    if not ref_tokens:
        warnings.warn("empty reference; returning 1.0")
        return 1.0
    lcs = _lcs_length(ref_tokens, pred_tokens)
    if mode == "recall":
        return lcs / len(ref_tokens)
    if lcs == 0:
        return 0.0
    return 2.0 * lcs / (len(ref_tokens) + len(pred_tokens))


def extract_elements(text: str, model: OpmModel) -> set[ElementRef]:
    """Model elements whose canonical names occur in the text.

    Longer names are matched first and their spans masked, so a state name
    embedded in a process name is not double-counted.
    """
    hay = re.sub(r"\s+", " ", text.replace("&", " and ").lower())
    masked = [False] * len(hay)
    found: set[ElementRef] = set()
    refs = sorted(model.element_refs(),
                  key=lambda r: (-len(canonical_name(r.name)), canonical_name(r.name)))
    seen_names: set[str] = set()
    for ref in refs:
        canon = canonical_name(ref.name)
        if not canon or canon in seen_names:
            continue
        seen_names.add(canon)
        pattern = re.compile(r"\b" + re.escape(canon) + r"\b")
        for match in pattern.finditer(hay):
            lo, hi = match.span()
            if any(masked[lo:hi]):
                continue
            for i in range(lo, hi):
                masked[i] = True
            found.add(ref)
    return found


def _canonical_set(elements) -> set:
    return {e.canonical() if isinstance(e, ElementRef) else e for e in elements}


def transparency_scores(predicted, ground_truth) -> tuple[float, float, float]:
    """Precision, recall, F1 over element sets; empty sides score 0."""
    p_set = _canonical_set(predicted)
    g_set = _canonical_set(ground_truth)
    hits = len(p_set & g_set)
    precision = hits / len(p_set) if p_set else 0.0
    recall = hits / len(g_set) if g_set else 0.0
    f1 = 0.0
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def aggregate_stats(values: list[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (0.0 for a single value)."""
    if not values:
        raise ValueError("no values to aggregate")
    return fmean(values), stdev(values) if len(values) > 1 else 0.0


def significance_p(a: list[float], b: list[float]) -> float:
    """Two-sided Welch's t-test p-value, with a variance floor so constant
    samples compare cleanly (identical samples give p = 1.0)."""
    if len(a) < 2 or len(b) < 2:
        raise ValueError("need at least two values per sample")
    va = max(variance(a), _VAR_FLOOR)
    vb = max(variance(b), _VAR_FLOOR)
    se_a, se_b = va / len(a), vb / len(b)
    se2 = se_a + se_b
    t = (fmean(a) - fmean(b)) / math.sqrt(se2)
    df = se2 ** 2 / (se_a ** 2 / (len(a) - 1) + se_b ** 2 / (len(b) - 1))
    return float(2.0 * _scipy_stats.t.sf(abs(t), df))


@dataclass
class ItemScores:
    id: int
    loose: float
    strict: float
    rouge1: float
    rouge2: float
    rougeL: float
    t_precision: float
    t_recall: float
    t_f1: float
    bt: float | None = None
    gpt: float | None = None


METRIC_COLUMNS = ("loose", "strict", "rouge1", "rouge2", "rougeL",
                  "t_precision", "t_recall", "t_f1")
EXTERNAL_COLUMNS = ("bt", "gpt")


@dataclass
class MetricReport:
    items: list[ItemScores]
    aggregate: dict[str, tuple[float, float]]
    config: dict
    comparison: dict[str, float] | None = None

    def to_dict(self) -> dict:
        out = {
            "config": self.config,
            "items": [
                {col: getattr(item, col) for col in ("id",) + METRIC_COLUMNS + EXTERNAL_COLUMNS}
                for item in self.items
            ],
            "aggregate": {name: {"mean": m, "std": s}
                          for name, (m, s) in self.aggregate.items()},
        }
        if self.comparison is not None:
            out["comparison"] = self.comparison
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ("id",) + METRIC_COLUMNS + EXTERNAL_COLUMNS
        writer.writerow(header)
        for item in self.items:
            writer.writerow([getattr(item, col) if getattr(item, col) is not None else ""
                             for col in header])
        for stat_idx, stat_name in ((0, "mean"), (1, "std")):
            row = [stat_name]
            for col in METRIC_COLUMNS + EXTERNAL_COLUMNS:
                pair = self.aggregate.get(col)
                row.append(pair[stat_idx] if pair is not None else "")
            writer.writerow(row)
        return buf.getvalue()


def rouge_sibling(config: NormalizationConfig) -> NormalizationConfig:
    """ROUGE normalization used by evaluate_run: same stopwords, full stemming."""
    return NormalizationConfig(stopword_list=config.stopword_list, lemmatizer="porter")


def evaluate_run(references: list[QaRecord], predictions: list[PredictionRecord],
                 model: OpmModel, config: NormalizationConfig = DEFAULT_CONFIG,
                 k: float = 1.5,
                 external_scores: dict[int, dict[str, float]] | None = None) -> MetricReport:
    """Score a prediction run against references, one row per reference item.

    Accuracy metrics use the given normalization; ROUGE metrics are pinned to
    the stemmed F-measure variant of the same stopword list. Items without a
    prediction are scored against the empty string.
    """
    ref_ids = [r.id for r in references]
    if len(set(ref_ids)) != len(ref_ids):
        raise ValueError("duplicate ids in references")
    pred_ids = [p.id for p in predictions]
    if len(set(pred_ids)) != len(pred_ids):
        raise ValueError("duplicate ids in predictions")
    unmatched = sorted(set(pred_ids) - set(ref_ids))
    if unmatched:
        raise ValueError(f"predictions without references: {unmatched}")

    by_id = {p.id: p for p in predictions}
    rouge_config = rouge_sibling(config)
    external_scores = external_scores or {}

    items = []
    for ref in references:
        pred = by_id.get(ref.id)
        text = pred.prediction if pred is not None else ""
        loose = loose_accuracy(ref.answer, text, config)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r1 = rouge_n(ref.answer, text, 1, rouge_config, mode="fmeasure")
            r2 = rouge_n(ref.answer, text, 2, rouge_config, mode="fmeasure")
            rl = rouge_l(ref.answer, text, rouge_config, mode="fmeasure")
        p_t, r_t, f1_t = transparency_scores(extract_elements(text, model),
                                             extract_elements(ref.answer, model))
        extra = external_scores.get(ref.id, {})
        items.append(ItemScores(ref.id, loose, strict_accuracy(loose, k),
                                r1, r2, rl, p_t, r_t, f1_t,
                                bt=extra.get("bt"), gpt=extra.get("gpt")))

    aggregate = {}
    for col in METRIC_COLUMNS:
        aggregate[col] = aggregate_stats([getattr(i, col) for i in items])
    for col in EXTERNAL_COLUMNS:
        values = [getattr(i, col) for i in items if getattr(i, col) is not None]
        if values:
            aggregate[col] = aggregate_stats(values)

    report_config = {
        "k": k,
        "accuracy_normalization": config.to_dict(),
        "rouge_normalization": rouge_config.to_dict(),
        "rouge_mode": "fmeasure",
    }
    return MetricReport(items, aggregate, report_config)


def compare_runs(report_a: MetricReport, report_b: MetricReport) -> dict[str, float]:
    """Per-metric Welch p-values between two reports' per-item columns."""
    out = {}
    for col in METRIC_COLUMNS:
        a = [getattr(i, col) for i in report_a.items]
        b = [getattr(i, col) for i in report_b.items]
        if len(a) >= 2 and len(b) >= 2:
            out[col] = significance_p(a, b)
    return out

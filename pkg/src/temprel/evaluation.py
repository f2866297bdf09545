"""Evaluation suite: confusion matrix, accuracy, per-class P/R/F1, macro averages.

Zero-denominator conventions matter here: precision, recall, and F1 all
default to 0 for classes with no predictions or no support, and those
zero rows still count in the macro averages. The macro F1 is the harmonic
mean of macro precision and macro recall; the plain mean of per-class F1
scores is reported alongside as mean_class_f1.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SchemaError
from .relations import RELATIONS

REPORT_SCHEMA_VERSION = 1


@dataclass
class EvalReport:
    labels: tuple[str, ...]
    confusion: np.ndarray  # rows = gold, cols = predicted
    accuracy: float
    per_class: dict[str, tuple[float, float, float]]  # label -> (P, R, F1)
    macro_precision: float
    macro_recall: float
    macro_f1: float
    mean_class_f1: float

    def __eq__(self, other) -> bool:
        if not isinstance(other, EvalReport):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.confusion, other.confusion)
            and self.accuracy == other.accuracy
            and self.per_class == other.per_class
            and self.macro_precision == other.macro_precision
            and self.macro_recall == other.macro_recall
            and self.macro_f1 == other.macro_f1
            and self.mean_class_f1 == other.mean_class_f1
        )


def confusion_matrix(gold, pred, labels: tuple[str, ...] = RELATIONS) -> np.ndarray:
    """Count matrix over the fixed label ordering (rows gold, cols predicted)."""
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise InputError(f"gold has {len(gold)} entries, predictions {len(pred)}")
    if not gold:
        raise InputError("cannot build a confusion matrix from zero examples")
    ids = {label: i for i, label in enumerate(labels)}
    matrix = np.zeros((len(labels), len(labels)), dtype=int)
    for g, p in zip(gold, pred):
        if g not in ids or p not in ids:
            raise SchemaError(f"label outside the fixed set: {g!r} / {p!r}")
        matrix[ids[g], ids[p]] += 1
    return matrix


def _f1(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def compute_metrics(confusion: np.ndarray, labels: tuple[str, ...] = RELATIONS) -> EvalReport:
    confusion = np.asarray(confusion)
    n = len(labels)
    if confusion.shape != (n, n):
        raise InputError(f"confusion matrix must be {n}x{n}, got {confusion.shape}")
    total = confusion.sum()
    if total <= 0:
        raise InputError("confusion matrix is empty")

    diag = np.diag(confusion).astype(float)
    col_sums = confusion.sum(axis=0).astype(float)
    row_sums = confusion.sum(axis=1).astype(float)

    per_class = {}
    for k, label in enumerate(labels):
        precision = diag[k] / col_sums[k] if col_sums[k] > 0 else 0.0
        recall = diag[k] / row_sums[k] if row_sums[k] > 0 else 0.0
        per_class[label] = (precision, recall, _f1(precision, recall))

    macro_p = float(np.mean([v[0] for v in per_class.values()]))
    macro_r = float(np.mean([v[1] for v in per_class.values()]))
    return EvalReport(
        labels=tuple(labels),
        confusion=confusion.astype(int),
        accuracy=float(diag.sum() / total),
        per_class=per_class,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=_f1(macro_p, macro_r),
        mean_class_f1=float(np.mean([v[2] for v in per_class.values()])),
    )


def evaluate_predictions(gold, pred, labels: tuple[str, ...] = RELATIONS) -> EvalReport:
    return compute_metrics(confusion_matrix(gold, pred, labels), labels)


def render_report(report: EvalReport, fmt: str = "table") -> str:
    """Render as lossless JSON or as a per-class P/R/F table with a macro row."""
    if fmt == "json":
        payload = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "labels": list(report.labels),
            "confusion": report.confusion.tolist(),
            "accuracy": report.accuracy,
            "per_class": {
                label: {"precision": p, "recall": r, "f1": f}
                for label, (p, r, f) in report.per_class.items()
            },
            "macro": {
                "precision": report.macro_precision,
                "recall": report.macro_recall,
                "f1": report.macro_f1,
                "mean_class_f1": report.mean_class_f1,
            },
        }
        return json.dumps(payload, indent=2)
    if fmt == "table":
        width = max(len(label) for label in report.labels + ("macro avg",))
        out = io.StringIO()
        out.write(f"{'relation':<{width}}  {'P':>5}  {'R':>5}  {'F1':>5}\n")
        for label in report.labels:
            p, r, f = report.per_class[label]
            out.write(f"{label:<{width}}  {p:>5.2f}  {r:>5.2f}  {f:>5.2f}\n")
        out.write(
            f"{'macro avg':<{width}}  {report.macro_precision:>5.2f}  "
            f"{report.macro_recall:>5.2f}  {report.macro_f1:>5.2f}\n"
        )
        return out.getvalue()
    raise InputError(f"unknown report format {fmt!r}")


def report_from_json(text: str) -> EvalReport:
    payload = json.loads(text)
    if payload.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise SchemaError("unsupported report schema version")
    return EvalReport(
        labels=tuple(payload["labels"]),
        confusion=np.array(payload["confusion"], dtype=int),
        accuracy=payload["accuracy"],
        per_class={
            label: (v["precision"], v["recall"], v["f1"])
            for label, v in payload["per_class"].items()
        },
        macro_precision=payload["macro"]["precision"],
        macro_recall=payload["macro"]["recall"],
        macro_f1=payload["macro"]["f1"],
        mean_class_f1=payload["macro"]["mean_class_f1"],
    )


def confusion_csv(report: EvalReport) -> str:
    """Confusion matrix as CSV, gold labels down the rows."""
    out = io.StringIO()
    out.write("gold\\predicted," + ",".join(report.labels) + "\n")
    for label, row in zip(report.labels, report.confusion):
        out.write(label + "," + ",".join(str(int(v)) for v in row) + "\n")
    return out.getvalue()

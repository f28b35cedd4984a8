"""Frame-level metrics and the ablation harness.

The inattentive frame is the positive class throughout. G-mean is the
geometric mean of the true positive and true negative rates; when one rate
has a zero denominator (single-class ground truth) the metric is reported
as absent rather than silently zero. ROC-AUC is the Mann-Whitney statistic
P(score+ > score-) + 0.5 P(tie), computed from average ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ClassificationReport:
    tp: int
    fp: int
    tn: int
    fn: int
    tpr: Optional[float]
    tnr: Optional[float]
    g_mean: Optional[float]
    f1: float

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "tpr": self.tpr, "tnr": self.tnr, "g_mean": self.g_mean, "f1": self.f1,
        }


def frame_metrics(predicted_inattentive: np.ndarray, true_inattentive: np.ndarray) -> ClassificationReport:
    pred = np.asarray(predicted_inattentive, dtype=bool)
    true = np.asarray(true_inattentive, dtype=bool)
    if pred.shape != true.shape:
        raise DataError(f"prediction/truth length mismatch: {pred.shape} vs {true.shape}")
    tp = int(np.count_nonzero(pred & true))
    fp = int(np.count_nonzero(pred & ~true))
    tn = int(np.count_nonzero(~pred & ~true))
    fn = int(np.count_nonzero(~pred & true))
    tpr = tp / (tp + fn) if (tp + fn) > 0 else None
    tnr = tn / (tn + fp) if (tn + fp) > 0 else None
    g_mean = float(np.sqrt(tpr * tnr)) if tpr is not None and tnr is not None else None
    denom = 2 * tp + fp + fn
    f1 = 2 * tp / denom if denom > 0 else 0.0
    return ClassificationReport(tp=tp, fp=fp, tn=tn, fn=fn, tpr=tpr, tnr=tnr, g_mean=g_mean, f1=float(f1))


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Rank-based AUC; requires both classes present."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise DataError("scores and labels length mismatch")
    n_pos = int(np.count_nonzero(labels))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("roc_auc needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.size, dtype=np.float64)
    ranks[order] = np.arange(1, scores.size + 1)
    # average ranks over ties
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + 1 + j + 1)
        i = j + 1
    rank_sum = float(np.sum(ranks[labels]))
    return (rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def macro_f1(y_true: Sequence, y_pred: Sequence, labels: Sequence) -> float:
    """Unweighted mean of per-class F1 over the fixed label set."""
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred):
        raise DataError("macro_f1 length mismatch")
    scores = []
    for label in labels:
        t = np.array([y == label for y in y_true])
        p = np.array([y == label for y in y_pred])
        rep = frame_metrics(p, t)
        scores.append(rep.f1)
    return float(np.mean(scores))


def pooled_report(pairs: list[tuple[np.ndarray, np.ndarray]]) -> ClassificationReport:
    """Micro aggregation: concatenate all (pred, true) pairs, then score."""
    if not pairs:
        raise DataError("no sessions to aggregate")
    pred = np.concatenate([p for p, _ in pairs])
    true = np.concatenate([t for _, t in pairs])
    return frame_metrics(pred, true)


def per_session_mean(pairs: list[tuple[np.ndarray, np.ndarray]]) -> dict:
    """Macro aggregation: average per-session g-mean and F1 where defined."""
    gs, fs = [], []
    for pred, true in pairs:
        rep = frame_metrics(pred, true)
        if rep.g_mean is not None:
            gs.append(rep.g_mean)
        fs.append(rep.f1)
    return {
        "g_mean": float(np.mean(gs)) if gs else None,
        "f1": float(np.mean(fs)),
        "n_sessions": len(pairs),
    }


# ---------------------------------------------------------------------------
# ablation harness
# ---------------------------------------------------------------------------

@dataclass
class AblationRow:
    variant: str
    by_device: dict[str, ClassificationReport]


@dataclass
class AblationTable:
    rows: list[AblationRow]

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "variant": row.variant,
                    "by_device": {d: r.to_dict() for d, r in row.by_device.items()},
                }
                for row in self.rows
            ]
        }

    def get(self, variant: str, device: str) -> ClassificationReport:
        for row in self.rows:
            if row.variant == variant:
                return row.by_device[device]
        raise KeyError(variant)


def run_ablation(sessions, artifacts, variants, config) -> AblationTable:
    """Score identical sessions under each variant and tabulate per device.

    ``sessions`` is a list of (frames, truth, manifest) triples; an empty
    variant list degrades to the full model alone.
    """
    from .pipeline import FULL_VARIANT, score_session

    if not sessions:
        raise DataError("no sessions supplied to the ablation harness")
    variants = list(variants) or [FULL_VARIANT]
    rows = []
    for variant in variants:
        per_device: dict[str, list[tuple[np.ndarray, np.ndarray]]] = {}
        for frames, truth, manifest in sessions:
            scored = score_session(frames, manifest, artifacts, config, variant)
            pair = (~scored.timeline.attentive, ~truth.attentive)
            per_device.setdefault(manifest.device_type, []).append(pair)
        rows.append(
            AblationRow(
                variant=variant.name,
                by_device={d: pooled_report(pairs) for d, pairs in sorted(per_device.items())},
            )
        )
    return AblationTable(rows=rows)


def render_table(table: AblationTable) -> str:
    """Aligned plain-text rendering, one row per variant, g-mean and F1 per
    device type."""
    devices = sorted({d for row in table.rows for d in row.by_device})
    header = ["model"]
    for d in devices:
        header += [f"{d} g-mean", f"{d} F1"]
    lines = [header]
    for row in table.rows:
        cells = [row.variant]
        for d in devices:
            rep = row.by_device.get(d)
            if rep is None:
                cells += ["-", "-"]
            else:
                g = f"{rep.g_mean:.3f}" if rep.g_mean is not None else "n/a"
                cells += [g, f"{rep.f1:.3f}"]
        lines.append(cells)
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    out = []
    for k, line in enumerate(lines):
        out.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"

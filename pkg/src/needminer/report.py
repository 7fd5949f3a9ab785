"""Render evaluation artifacts: plain-text tables on stdout, delimited
files and matplotlib figures written next to them."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import CrossDomainReport, EvaluationReport, LearningCurve
from .needcat import CATEGORY_IDS, NeedQuantification

_METRIC_COLUMNS = ("Accuracy", "AUC", "Precision", "Recall", "F1-score")


def _fmt(value, digits: int = 3) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def _text_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    sep = "-+-".join("-" * w for w in widths)
    lines = [" | ".join(h.ljust(w) for h, w in zip(headers, widths)), sep]
    lines += [" | ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def render_report_table(report: EvaluationReport) -> str:
    """Per-fold table with chosen parameters and the standard metric
    columns, followed by the aggregate line and the baseline block."""
    param_names = sorted({name for fr in report.per_fold for name in fr.params})
    headers = ["#Outer fold", *param_names, *_METRIC_COLUMNS]
    rows = []
    for fr in report.per_fold:
        m = fr.metrics
        rows.append(
            [
                str(fr.fold + 1),
                *[_fmt(fr.params.get(name)) for name in param_names],
                _fmt(m.accuracy),
                _fmt(m.auc),
                _fmt(m.precision),
                _fmt(m.recall),
                _fmt(m.f_beta),
            ]
        )
    agg = report.aggregate()
    out = [_text_table(headers, rows)]
    out.append(
        f"F1 mean {agg['mean']:.3f}  min {agg['min']:.3f}  "
        f"max {agg['max']:.3f}  stddev {agg['stddev']:.3f}"
    )
    if report.baselines:
        rows = [
            [b.name, _fmt(b.p_guess), _fmt(b.f1), f"{b.improvement_pct:+.2f}%"]
            for b in report.baselines
        ]
        out.append("")
        out.append(_text_table(["Baseline", "p", "F1-score", "Improvement"], rows))
    return "\n".join(out)


def write_json(payload: dict, path: str | Path):
    Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False), encoding="utf-8")


def write_report_csv(report: EvaluationReport, path: str | Path):
    param_names = sorted({name for fr in report.per_fold for name in fr.params})
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", *param_names, "accuracy", "auc", "precision", "recall", "f1"])
        for fr in report.per_fold:
            m = fr.metrics
            writer.writerow(
                [
                    fr.fold + 1,
                    *[fr.params.get(name) for name in param_names],
                    m.accuracy,
                    m.auc,
                    m.precision,
                    m.recall,
                    m.f_beta,
                ]
            )


def plot_fold_f1(report: EvaluationReport, path: str | Path):
    f1s = report.f1_values()
    agg = report.aggregate()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([str(i + 1) for i in range(len(f1s))], f1s, color="#4878a8")
    ax.axhline(agg["mean"], color="#c44e52", linestyle="--", label=f"mean {agg['mean']:.3f}")
    for b in report.baselines:
        if b.name == "simple_assignment":
            ax.axhline(b.f1, color="#777777", linestyle=":", label=f"assign-all {b.f1:.3f}")
    ax.set_xlabel("outer fold")
    ax.set_ylabel("F1-score")
    ax.set_ylim(0, 1)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_learning_curve_csv(curve: LearningCurve, path: str | Path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size", "mean_f1"])
        for p in curve.points:
            writer.writerow([p.size, p.mean_f1])


def plot_learning_curve(curve: LearningCurve, path: str | Path):
    sizes = [p.size for p in curve.points]
    f1s = [p.mean_f1 for p in curve.points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sizes, f1s, marker="o", color="#4878a8")
    if curve.plateau_index is not None:
        px = sizes[curve.plateau_index]
        ax.axvline(px, color="#c44e52", linestyle="--", label=f"plateau at {px}")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("training set size")
    ax.set_ylabel("mean F1-score")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_quantification_csv(series: Sequence[NeedQuantification], path: str | Path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bucket_start", "category", "count", "share"])
        for q in series:
            for cat in CATEGORY_IDS:
                writer.writerow([q.bucket_start.isoformat(), cat, q.counts[cat], q.shares[cat]])


def plot_category_shares(q: NeedQuantification, path: str | Path, title: str = ""):
    shares = [q.shares.get(cat, 0.0) * 100 for cat in CATEGORY_IDS]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(CATEGORY_IDS)), shares, color="#4878a8")
    ax.set_xticks(range(len(CATEGORY_IDS)))
    ax.set_xticklabels(CATEGORY_IDS, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("share of assignments [%]")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_cross_domain_table(report: CrossDomainReport) -> str:
    rows = []
    for name in report.domains:
        rows.append([f"intra-domain ({name})", _fmt(report.intra[name])])
    rows.append(["combined", _fmt(report.combined_f1)])
    for pair, f1 in report.cross.items():
        rows.append([f"cross-domain ({pair})", _fmt(f1)])
    rows.append(["combined baseline", _fmt(report.combined_baseline)])
    rows.append(["best-cross improvement", f"{report.improvement_pct:+.1f}%"])
    return _text_table(["Scenario", "F1-score"], rows)


def plot_cross_domain(report: CrossDomainReport, path: str | Path):
    labels = (
        [f"intra {n}" for n in report.domains]
        + ["combined"]
        + [f"cross {p}" for p in report.cross]
    )
    values = (
        [report.intra[n] for n in report.domains]
        + [report.combined_f1]
        + list(report.cross.values())
    )
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(labels)), values, color="#4878a8")
    ax.axhline(report.combined_baseline, color="#777777", linestyle=":", label="combined baseline")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("F1-score")
    ax.set_ylim(0, 1)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Package verdicts, classification metrics, ROC sweeps, sensitive feature
recall and context-size statistics, plus report export."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .catalog import ApiCatalog
from .ingest import PackageRef, split_lines
from .slicer import Slice
from .tokens import ExternalTokenizerFailed, count_tokens

DEFAULT_TAU = 0.8
MALICIOUS, BENIGN = "Malicious", "Benign"

__all__ = [
    "DEFAULT_TAU", "ContextSummary", "ExternalTokenizerFailed", "MetricsReport", "MissingLabel",
    "PackageVerdict", "SfrRow", "aggregate", "compute_metrics", "context_stats", "count_tokens",
    "default_thresholds", "feature_lines", "nearest_rank", "roc_sweep", "sfr", "sfr_means",
    "summarize", "write_report",
]


class MissingLabel(ValueError):
    pass


@dataclass(frozen=True)
class PackageVerdict:
    package: PackageRef
    S: float
    tau: float
    label: str
    n_slices: int
    n_unscored: int
    top_slice_ref: tuple[str, int] | None
    annotations: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "package": self.package.id,
            "truth": self.package.declared_label,
            "S": self.S,
            "tau": self.tau,
            "label": self.label,
            "n_slices": self.n_slices,
            "n_unscored": self.n_unscored,
            "top_slice_ref": list(self.top_slice_ref) if self.top_slice_ref else None,
            "annotations": list(self.annotations),
        }


def aggregate(scores: Sequence, tau: float = DEFAULT_TAU, package: PackageRef | None = None,
              n_slices: int | None = None) -> PackageVerdict:
    """Package verdict from its slice scores: S is the largest malware score."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau {tau} outside [0, 1]")
    package = package or PackageRef("?", "")
    scored = [r for r in scores if r.scored]
    n_unscored = len(scores) - len(scored)
    notes = []
    if scored:
        top = max(range(len(scored)), key=lambda i: (scored[i].malware, -i))
        S = scored[top].malware
        ref = tuple(scored[top].slice_ref)
    else:
        S, ref = 0.0, None
        notes.append("no_scored_slices")
    if n_unscored:
        notes.append(f"unscored:{n_unscored}")
    label = MALICIOUS if S >= tau else BENIGN
    return PackageVerdict(package, S, tau, label, len(scores) if n_slices is None else n_slices,
                          n_unscored, ref, tuple(notes))


def _ratio(num: float, den: float) -> float | None:
    return num / den if den else None


@dataclass
class MetricsReport:
    TP: int
    TN: int
    FP: int
    FN: int
    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    roc: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.TP + self.TN + self.FP + self.FN

    def to_dict(self) -> dict:
        d = asdict(self)
        d["roc"] = [list(r) for r in self.roc]
        return d


def _truth(v: PackageVerdict, truth: Mapping[str, str] | None) -> bool:
    label = truth.get(v.package.id) if truth is not None else v.package.declared_label
    if label not in ("malware", "benign"):
        raise MissingLabel(v.package.id)
    return label == "malware"


def default_thresholds(step: float = 0.05) -> list[float]:
    n = int(round(1.0 / step))
    return [round(i * step, 10) for i in range(n + 1)]


def compute_metrics(verdicts: Sequence[PackageVerdict], truth: Mapping[str, str] | None = None,
                    thresholds: Sequence[float] | None = None) -> MetricsReport:
    """Confusion counts and derived rates; undefined ratios are None."""
    tp = tn = fp = fn = 0
    labels = []
    for v in verdicts:
        pos = _truth(v, truth)
        labels.append(pos)
        pred = v.label == MALICIOUS
        if pos and pred:
            tp += 1
        elif pos:
            fn += 1
        elif pred:
            fp += 1
        else:
            tn += 1
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    roc = roc_sweep([v.S for v in verdicts], labels,
                    default_thresholds() if thresholds is None else thresholds)
    return MetricsReport(tp, tn, fp, fn, _ratio(tp + tn, tp + tn + fp + fn), precision, recall, f1, roc)


def roc_sweep(scores: Sequence[float], labels: Sequence[bool],
              thresholds: Sequence[float] | None = None) -> list[tuple[float, float | None, float | None]]:
    """(threshold, FPR, TPR) per threshold, predicting positive when score >= threshold."""
    thresholds = default_thresholds() if thresholds is None else list(thresholds)
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be ascending")
    if len(scores) != len(labels):
        raise ValueError("scores and labels differ in length")
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    out = []
    for t in thresholds:
        tpr = _ratio(sum(s >= t for s in pos), len(pos))
        fpr = _ratio(sum(s >= t for s in neg), len(neg))
        out.append((t, fpr, tpr))
    return out


def feature_lines(files, catalog: ApiCatalog) -> set[tuple[str, int]]:
    """(file, line) pairs whose text mentions a catalog API."""
    out = set()
    for f in files:
        for i, text in enumerate(split_lines(f.text), 1):
            if catalog.line_matches(text):
                out.add((f.path, i))
    return out


@dataclass(frozen=True)
class SfrRow:
    package: str
    strategy: str
    label: str
    n_original: int
    n_retained: int
    sfr: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def sfr(original_files, slices: Iterable[Slice], catalog: ApiCatalog, package: PackageRef | None = None,
        strategy: str = "") -> SfrRow:
    """Share of the package's feature lines that appear in any of its slices, in percent."""
    original = feature_lines(original_files, catalog)
    sliced = set()
    for s in slices:
        sliced |= s.line_set
    retained = len(original & sliced)
    pct = 100.0 * retained / len(original) if original else None
    pid = package.id if package else ""
    label = package.declared_label if package else "unlabeled"
    return SfrRow(pid, strategy, label, len(original), retained, pct)


def sfr_means(rows: Iterable[SfrRow]) -> dict[str, dict[str, float | None]]:
    """Mean SFR per strategy and label over rows with a defined value."""
    acc: dict[str, dict[str, list[float]]] = {}
    for r in rows:
        acc.setdefault(r.strategy, {}).setdefault(r.label, [])
        if r.sfr is not None:
            acc[r.strategy][r.label].append(r.sfr)
    return {s: {lab: (sum(v) / len(v) if v else None) for lab, v in sorted(d.items())}
            for s, d in sorted(acc.items())}


def nearest_rank(sorted_values: Sequence[float], p: float) -> float:
    """Nearest-rank quantile of already sorted values."""
    if not sorted_values:
        raise ValueError("empty sample")
    if p <= 0:
        return sorted_values[0]
    k = math.ceil(p * len(sorted_values))
    return sorted_values[min(k, len(sorted_values)) - 1]


@dataclass(frozen=True)
class ContextSummary:
    n: int
    mean: float | None
    min: float | None
    q25: float | None
    median: float | None
    q75: float | None
    max: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(values: Iterable[float]) -> ContextSummary:
    xs = sorted(values)
    if not xs:
        return ContextSummary(0, None, None, None, None, None, None)
    return ContextSummary(len(xs), sum(xs) / len(xs), xs[0], nearest_rank(xs, 0.25),
                          nearest_rank(xs, 0.5), nearest_rank(xs, 0.75), xs[-1])


def context_stats(slices_by_method: Mapping[str, Iterable[Slice]], token_mode: str = "approx",
                  token_command: str | None = None) -> dict[str, dict[str, ContextSummary]]:
    """LOC and token summaries of the context handed to the scorer, per method."""
    out = {}
    for method in sorted(slices_by_method):
        locs, toks = [], []
        for s in slices_by_method[method]:
            locs.append(s.loc)
            toks.append(count_tokens(s.snippet, token_mode, token_command))
        out[method] = {"loc": summarize(locs), "tokens": summarize(toks)}
    return out


def file_context_stats(file_sets, token_mode: str = "approx", token_command: str | None = None):
    """LOC and token summaries of whole packages (the unsliced input)."""
    locs, toks = [], []
    for fs in file_sets:
        locs.append(sum(f.line_count for f in fs.files))
        toks.append(sum(count_tokens(f.text, token_mode, token_command) for f in fs.files))
    return {"loc": summarize(locs), "tokens": summarize(toks)}


def _csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in columns})
    return buf.getvalue()


def write_report(out_dir: str | Path, report: dict) -> list[Path]:
    """Write report.json plus one CSV per table; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        p = out / name
        p.write_text(text, encoding="utf-8")
        written.append(p)

    put("report.json", json.dumps(report, indent=2) + "\n")
    verdict_rows, metric_rows, roc_rows, sfr_rows, ctx_rows = [], [], [], [], []
    for strategy, sec in report.get("strategies", {}).items():
        for v in sec["verdicts"]:
            verdict_rows.append({"strategy": strategy, **v, "annotations": ";".join(v["annotations"]),
                                 "top_slice_ref": "" if v["top_slice_ref"] is None
                                 else f"{v['top_slice_ref'][0]}#{v['top_slice_ref'][1]}"})
        for view, m in sec["metrics"].items():
            metric_rows.append({"strategy": strategy, "view": view, **m})
            for t, fpr, tpr in m["roc"]:
                roc_rows.append({"strategy": strategy, "view": view, "threshold": t, "fpr": fpr, "tpr": tpr})
        for r in sec.get("sfr", {}).get("rows", []):
            sfr_rows.append(r)
    for method, sec in report.get("context_stats", {}).items():
        for unit, summ in sec.items():
            ctx_rows.append({"method": method, "unit": unit, **summ})
    put("verdicts.csv", _csv(verdict_rows, ["strategy", "package", "truth", "S", "tau", "label", "n_slices",
                                            "n_unscored", "top_slice_ref", "annotations"]))
    put("metrics.csv", _csv(metric_rows, ["strategy", "view", "TP", "TN", "FP", "FN", "accuracy",
                                          "precision", "recall", "f1"]))
    put("roc.csv", _csv(roc_rows, ["strategy", "view", "threshold", "fpr", "tpr"]))
    put("sfr.csv", _csv(sfr_rows, ["package", "strategy", "label", "n_original", "n_retained", "sfr"]))
    put("context_stats.csv", _csv(ctx_rows, ["method", "unit", "n", "mean", "min", "q25", "median",
                                             "q75", "max"]))
    plot = [{"series": "roc", "strategy": r["strategy"], "x": r["fpr"], "y": r["tpr"], "key": r["threshold"]}
            for r in roc_rows if r["view"] == "all"]
    for strategy, means in report.get("sfr_means", {}).items():
        for label, value in means.items():
            plot.append({"series": "sfr", "strategy": strategy, "x": label, "y": value, "key": ""})
    put("plot_data.csv", _csv(plot, ["series", "strategy", "key", "x", "y"]))
    return written

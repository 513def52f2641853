"""Cross-validation harness, confusion metrics, ROC/AUC, timing.

Metric values are exact rationals (`fractions.Fraction`): every metric is a
single integer division, so results carry no float accumulation error and
tests can assert equality instead of closeness.  The JSON report converts to
floats at the serialization boundary.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .datagen import Dataset

__all__ = [
    "EvaluationError",
    "ConfusionCounts",
    "MetricSet",
    "metrics",
    "stratified_folds",
    "roc_curve",
    "auc",
    "ClassifierResult",
    "EvaluationReport",
    "evaluate_all",
]


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    """Yes is the positive class."""

    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise EvaluationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_pairs(cls, pairs) -> "ConfusionCounts":
        """Count (predicted, actual) label pairs."""
        tp = tn = fp = fn = 0
        for predicted, actual in pairs:
            if actual == "Yes":
                if predicted == "Yes":
                    tp += 1
                else:
                    fn += 1
            else:
                if predicted == "Yes":
                    fp += 1
                else:
                    tn += 1
        return cls(tp=tp, tn=tn, fp=fp, fn=fn)

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )


@dataclass(frozen=True)
class MetricSet:
    accuracy: Fraction
    precision: Fraction
    recall: Fraction
    f_measure: Fraction

    def as_floats(self) -> dict[str, float]:
        return {
            "accuracy": float(self.accuracy),
            "precision": float(self.precision),
            "recall": float(self.recall),
            "f_measure": float(self.f_measure),
        }


def metrics(counts: ConfusionCounts) -> MetricSet:
    """Accuracy, precision, recall and F-measure from pooled counts.

    Conventions for degenerate denominators: precision is 0 when TP+FP = 0,
    recall is 0 when TP+FN = 0, F is 0 when precision+recall = 0.  F uses the
    identity 2PR/(P+R) = 2TP/(2TP+FP+FN), which keeps it a single exact
    division and covers the degenerate convention (P+R = 0 iff TP = 0).
    """
    c = counts
    if c.total == 0:
        raise EvaluationError("cannot compute metrics over zero samples")
    precision = Fraction(c.tp, c.tp + c.fp) if c.tp + c.fp else Fraction(0)
    recall = Fraction(c.tp, c.tp + c.fn) if c.tp + c.fn else Fraction(0)
    return MetricSet(
        accuracy=Fraction(c.tp + c.tn, c.total),
        precision=precision,
        recall=recall,
        f_measure=Fraction(2 * c.tp, 2 * c.tp + c.fp + c.fn)
        if 2 * c.tp + c.fp + c.fn
        else Fraction(0),
    )


def stratified_folds(
    dataset: Dataset, k: int, seed: int
) -> list[tuple[list[int], list[int]]]:
    """Partition indices into k stratified (train, test) splits.

    Per class, indices are shuffled under `seed` and dealt round-robin, so
    each test fold holds floor or ceil of class_count/k members of every
    class.  All classifiers evaluated on a dataset share the same partition.
    """
    if k < 2:
        raise EvaluationError("k must be >= 2")
    by_class: dict[str, list[int]] = {}
    for i, s in enumerate(dataset.samples):
        by_class.setdefault(s.label, []).append(i)
    rng = random.Random(seed)
    test_folds: list[list[int]] = [[] for _ in range(k)]
    for label in sorted(by_class):
        idx = by_class[label]
        if len(idx) < k:
            raise EvaluationError(
                f"class {label!r} has {len(idx)} members, fewer than k={k}"
            )
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            test_folds[pos % k].append(i)
    out = []
    all_indices = set(range(len(dataset.samples)))
    for test in test_folds:
        test_sorted = sorted(test)
        train_sorted = sorted(all_indices - set(test))
        out.append((train_sorted, test_sorted))
    return out


def roc_curve(scored: list[tuple[float, str]]) -> list[tuple[Fraction, Fraction]]:
    """ROC points from (score, true label) pairs, thresholds descending.

    Equal scores are grouped into one threshold step.  The curve starts at
    (0,0) and ends at (1,1); coordinates are exact rationals.
    """
    pos = sum(1 for _, label in scored if label == "Yes")
    neg = len(scored) - pos
    if pos == 0 or neg == 0:
        raise EvaluationError("ROC needs both classes present")
    curve = [(Fraction(0), Fraction(0))]
    tp = fp = 0
    ordered = sorted(scored, key=lambda t: -t[0])
    i = 0
    while i < len(ordered):
        j = i
        while j < len(ordered) and ordered[j][0] == ordered[i][0]:
            if ordered[j][1] == "Yes":
                tp += 1
            else:
                fp += 1
            j += 1
        curve.append((Fraction(fp, neg), Fraction(tp, pos)))
        i = j
    return curve


def auc(curve: list[tuple[Fraction, Fraction]]) -> Fraction:
    """Area under an ROC curve by the trapezoid rule, exact."""
    area = Fraction(0)
    for (x0, y0), (x1, y1) in zip(curve, curve[1:]):
        area += (Fraction(x1) - Fraction(x0)) * (Fraction(y0) + Fraction(y1)) / 2
    return area


@dataclass
class FoldRecord:
    fold: int
    counts: ConfusionCounts
    accuracy: Fraction


@dataclass
class ClassifierResult:
    kind: str
    counts: ConfusionCounts | None = None
    metric_set: MetricSet | None = None
    roc: list[tuple[Fraction, Fraction]] = field(default_factory=list)
    auc_value: Fraction | None = None
    train_ms: float = 0.0
    test_ms: float = 0.0
    folds: list[FoldRecord] = field(default_factory=list)
    error: str | None = None


@dataclass
class EvaluationReport:
    n: int
    k: int
    seed: int
    results: list[ClassifierResult]

    def result_for(self, kind: str) -> ClassifierResult:
        for r in self.results:
            if r.kind == kind:
                return r
        raise KeyError(kind)

    def to_dict(self, include_timings: bool = True) -> dict:
        """JSON-ready report.

        Everything except the timing fields is a pure function of
        (dataset, specs, k, seed); timings are measurements and can be left
        out to produce a byte-reproducible artifact.
        """
        out = {"n": self.n, "k": self.k, "seed": self.seed, "classifiers": []}
        for r in self.results:
            entry: dict = {"kind": r.kind}
            if r.error is not None:
                entry["error"] = r.error
                out["classifiers"].append(entry)
                continue
            entry.update(r.metric_set.as_floats())
            entry["auc"] = float(r.auc_value)
            entry["confusion"] = {
                "tp": r.counts.tp,
                "tn": r.counts.tn,
                "fp": r.counts.fp,
                "fn": r.counts.fn,
            }
            entry["roc"] = [[float(x), float(y)] for x, y in r.roc]
            if include_timings:
                entry["train_ms"] = r.train_ms
                entry["test_ms"] = r.test_ms
            entry["folds"] = [
                {
                    "fold": f.fold,
                    "tp": f.counts.tp,
                    "tn": f.counts.tn,
                    "fp": f.counts.fp,
                    "fn": f.counts.fn,
                    "accuracy": float(f.accuracy),
                }
                for f in r.folds
            ]
            out["classifiers"].append(entry)
        return out

    def to_json(self, include_timings: bool = True) -> str:
        return json.dumps(self.to_dict(include_timings=include_timings), indent=2)


def _subset(dataset: Dataset, indices: list[int]) -> Dataset:
    return Dataset(
        samples=[dataset.samples[i] for i in indices],
        seed=dataset.seed,
        provenance=dataset.provenance,
    )


def evaluate_all(
    dataset: Dataset, specs: list, k: int = 10, seed: int = 42
) -> EvaluationReport:
    """Cross-validate every spec over one shared fold partition.

    Confusion counts are pooled (micro-averaged) across folds, the ROC uses
    the pooled out-of-fold scores, and wall-clock per phase is summed over
    folds.  A failing spec is recorded in its result entry and does not
    abort the others.
    """
    from .learners import train  # deferred: learners use stratified_folds too

    folds = stratified_folds(dataset, k, seed)
    results: list[ClassifierResult] = []
    for spec in specs:
        result = ClassifierResult(kind=spec.kind)
        try:
            counts = ConfusionCounts()
            pooled_scores: list[tuple[float, str]] = []
            for fold_no, (train_idx, test_idx) in enumerate(folds):
                train_set = _subset(dataset, train_idx)
                test_set = _subset(dataset, test_idx)

                t0 = time.perf_counter()
                model = train(spec, train_set)
                result.train_ms += (time.perf_counter() - t0) * 1000.0

                t0 = time.perf_counter()
                scores = model.scores(test_set.samples)
                predictions = ["Yes" if v >= 0.5 else "No" for v in scores]
                result.test_ms += (time.perf_counter() - t0) * 1000.0

                fold_counts = ConfusionCounts.from_pairs(
                    zip(predictions, test_set.labels())
                )
                counts = counts + fold_counts
                pooled_scores.extend(zip(scores, test_set.labels()))
                result.folds.append(
                    FoldRecord(
                        fold=fold_no,
                        counts=fold_counts,
                        accuracy=metrics(fold_counts).accuracy,
                    )
                )
            result.counts = counts
            result.metric_set = metrics(counts)
            result.roc = roc_curve(pooled_scores)
            result.auc_value = auc(result.roc)
        except Exception as exc:  # isolate per classifier
            result.error = f"{type(exc).__name__}: {exc}"
        results.append(result)
    return EvaluationReport(n=len(dataset.samples), k=k, seed=seed, results=results)

"""Multinomial naive Bayes over the six categorical features."""

from __future__ import annotations

import math

from ..datagen import FEATURES, Dataset, Sample
from .base import ClassifierModel, ClassifierSpec, TrainingError, require_both_classes

LABELS = ("No", "Yes")


class NaiveBayesModel(ClassifierModel):
    kind = "NaiveBayes"

    def __init__(
        self,
        spec: ClassifierSpec,
        n_train: int,
        class_counts: dict[str, int],
        feature_counts: dict[str, list[dict[str, int]]],
        vocab_sizes: list[int],
        alpha: float,
        fit_ms: float = 0.0,
    ):
        super().__init__(spec, n_train, fit_ms)
        self.class_counts = class_counts
        self.feature_counts = feature_counts
        self.vocab_sizes = vocab_sizes
        self.alpha = alpha

    def _log_joint(self, sample: Sample, label: str) -> float:
        n_c = self.class_counts[label]
        total = self.class_counts["Yes"] + self.class_counts["No"]
        # priors unsmoothed; both classes are present by construction
        lp = math.log(n_c / total)
        for j, f in enumerate(FEATURES):
            count = self.feature_counts[label][j].get(getattr(sample, f), 0)
            lp += math.log(
                (count + self.alpha) / (n_c + self.alpha * self.vocab_sizes[j])
            )
        return lp

    def score(self, sample: Sample) -> float:
        log_yes = self._log_joint(sample, "Yes")
        log_no = self._log_joint(sample, "No")
        peak = max(log_yes, log_no)
        p_yes = math.exp(log_yes - peak)
        p_no = math.exp(log_no - peak)
        return p_yes / (p_yes + p_no)

    def params_dict(self) -> dict:
        return {
            "class_counts": dict(self.class_counts),
            "feature_counts": [
                [dict(fc) for fc in self.feature_counts[lab]] for lab in LABELS
            ],
            "labels": list(LABELS),
            "vocab_sizes": list(self.vocab_sizes),
            "alpha": self.alpha,
        }

    @classmethod
    def from_params(cls, spec: ClassifierSpec, n_train: int, params: dict):
        feature_counts = {
            lab: [dict(fc) for fc in params["feature_counts"][i]]
            for i, lab in enumerate(params["labels"])
        }
        return cls(
            spec=spec,
            n_train=n_train,
            class_counts=dict(params["class_counts"]),
            feature_counts=feature_counts,
            vocab_sizes=list(params["vocab_sizes"]),
            alpha=params["alpha"],
        )


def fit_naive_bayes(spec: ClassifierSpec, dataset: Dataset) -> NaiveBayesModel:
    require_both_classes(dataset)
    params = spec.params()
    alpha = float(params["alpha"])
    if alpha <= 0:
        raise TrainingError("alpha must be positive")
    class_counts = {"Yes": 0, "No": 0}
    feature_counts: dict[str, list[dict[str, int]]] = {
        "Yes": [{} for _ in FEATURES],
        "No": [{} for _ in FEATURES],
    }
    for s in dataset.samples:
        class_counts[s.label] += 1
        table = feature_counts[s.label]
        for j, f in enumerate(FEATURES):
            v = getattr(s, f)
            table[j][v] = table[j].get(v, 0) + 1
    # one extra slot per feature absorbs categories unseen at fit time
    vocab_sizes = [
        len({getattr(s, f) for s in dataset.samples}) + 1 for f in FEATURES
    ]
    return NaiveBayesModel(
        spec=spec,
        n_train=len(dataset.samples),
        class_counts=class_counts,
        feature_counts=feature_counts,
        vocab_sizes=vocab_sizes,
        alpha=alpha,
    )

"""Shared classifier plumbing: specs, the model interface, integer views.

Every model reduces to one contract: `score(sample)` in [0,1] is the attack
probability, and `predict` is Yes exactly when score >= 0.5.  Ties predict
Yes on purpose: when in doubt, flag.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..datagen import FEATURES, Dataset, Encoder, Sample

KINDS = ("NaiveBayes", "J48", "Bagging", "RandomForest", "SVM", "ESVM", "NeuralNet")

# allowed hyperparameter keys and their defaults, per kind
HYPERPARAMETERS: dict[str, dict] = {
    "NaiveBayes": {"alpha": 1.0},
    "J48": {"min_leaf": 2},
    "Bagging": {"trees": 10, "min_leaf": 2},
    "RandomForest": {
        "trees": 100,
        "feature_subsample": 3,
        "bootstrap": True,
        "min_leaf": 2,
    },
    "SVM": {"lam": 1e-3, "epochs": 50},
    "ESVM": {
        "population": 20,
        "generations": 10,
        "elite": 1,
        "inner_folds": 3,
        "crossover_rate": 0.9,
        "mutation_rate": 0.3,
    },
    "NeuralNet": {
        "hidden": 16,
        "lr": 0.1,
        "epochs": 200,
        "batch_size": 16,
        "init_scale": 0.5,
    },
}


class SpecError(ValueError):
    pass


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SpecError(f"unknown classifier kind {self.kind!r}")
        allowed = HYPERPARAMETERS[self.kind]
        unknown = set(self.hyperparameters) - set(allowed)
        if unknown:
            raise SpecError(
                f"{self.kind}: unknown hyperparameter(s) {sorted(unknown)}; "
                f"allowed: {sorted(allowed)}"
            )

    def params(self) -> dict:
        """Defaults overlaid with explicit hyperparameters."""
        merged = dict(HYPERPARAMETERS[self.kind])
        merged.update(self.hyperparameters)
        return merged

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "hyperparameters": dict(self.hyperparameters),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ClassifierSpec":
        return cls(
            kind=doc["kind"],
            hyperparameters=dict(doc.get("hyperparameters", {})),
            seed=doc.get("seed", 0),
        )


class ClassifierModel:
    """Trained classifier.  Immutable once fitted; safe to share."""

    kind: str = ""

    def __init__(self, spec: ClassifierSpec, n_train: int, fit_ms: float = 0.0):
        self.spec = spec
        self.n_train = n_train
        self.fit_ms = fit_ms

    def score(self, sample: Sample) -> float:
        raise NotImplementedError

    def scores(self, samples) -> list[float]:
        return [self.score(s) for s in samples]

    def predict(self, sample: Sample) -> str:
        return "Yes" if self.score(sample) >= 0.5 else "No"

    def predictions(self, samples) -> list[str]:
        return ["Yes" if v >= 0.5 else "No" for v in self.scores(samples)]

    def params_dict(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_params(cls, spec: ClassifierSpec, n_train: int, params: dict):
        raise NotImplementedError


@dataclass
class CodesView:
    """Training samples as integer codes, one column per feature.

    `values[f]` lists feature f's categories (sorted); `maps[f]` inverts it.
    `packed[i, j]` folds feature j's code and row i's label into one integer
    (`offsets[j] + 2 * code + label`), so a node's per-category class counts
    for every feature drop out of a single bincount over packed rows.
    """

    codes: np.ndarray  # (n, 6) int32
    labels: np.ndarray  # (n,) int8, Yes -> 1
    values: list[list[str]]
    maps: list[dict[str, int]]
    packed: np.ndarray  # (n, 6) int32
    offsets: np.ndarray  # (7,) int32, per-feature starts; [-1] is total width
    widths: list[int]


def codes_view(dataset: Dataset) -> CodesView:
    values = []
    maps = []
    for f in FEATURES:
        cats = sorted({getattr(s, f) for s in dataset.samples})
        values.append(cats)
        maps.append({c: i for i, c in enumerate(cats)})
    codes = np.empty((len(dataset.samples), len(FEATURES)), dtype=np.int32)
    labels = np.empty(len(dataset.samples), dtype=np.int8)
    for i, s in enumerate(dataset.samples):
        for j, f in enumerate(FEATURES):
            codes[i, j] = maps[j][getattr(s, f)]
        labels[i] = 1 if s.label == "Yes" else 0
    widths = [len(v) for v in values]
    offsets = np.zeros(len(FEATURES) + 1, dtype=np.int32)
    np.cumsum([2 * w for w in widths], out=offsets[1:])
    packed = (2 * codes + labels[:, None] + offsets[:-1]).astype(np.int32)
    return CodesView(
        codes=codes,
        labels=labels,
        values=values,
        maps=maps,
        packed=packed,
        offsets=offsets,
        widths=widths,
    )


def require_both_classes(dataset: Dataset) -> None:
    labels = {s.label for s in dataset.samples}
    if labels != {"Yes", "No"}:
        raise TrainingError(f"training needs both classes, got {sorted(labels)}")


def timed_fit(fit_fn):
    """Run a fit function, returning (model_payload, elapsed_ms)."""
    t0 = time.perf_counter()
    payload = fit_fn()
    return payload, (time.perf_counter() - t0) * 1000.0


def encoder_to_doc(enc: Encoder) -> dict:
    """Category lists per feature, in column order; enough to rebuild."""
    categories: dict[str, list[str]] = {f: [] for f in FEATURES}
    for (feature, cat), col in sorted(enc.column_map.items(), key=lambda kv: kv[1]):
        categories[feature].append(cat)
    return {"categories": categories}


def encoder_from_doc(doc: dict) -> Encoder:
    column_map: dict[tuple[str, str], int] = {}
    blocks: dict[str, tuple[int, int]] = {}
    col = 0
    for name in FEATURES:
        start = col
        for cat in doc["categories"][name]:
            column_map[(name, cat)] = col
            col += 1
        col += 1  # reserved unseen column
        blocks[name] = (start, col - start)
    return Encoder(column_map=column_map, blocks=blocks, width=col)

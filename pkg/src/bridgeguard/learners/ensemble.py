"""Bootstrap-aggregated tree ensembles: bagging and random forest.

Both average member scores; a forest additionally restricts each split to
a random feature subset.  Member randomness comes from independent spawned
seed sequences, so ensembles are reproducible for a given spec seed.
"""

from __future__ import annotations

import numpy as np

from ..datagen import Dataset, Sample
from .base import (
    ClassifierModel,
    ClassifierSpec,
    TrainingError,
    codes_view,
    require_both_classes,
)
from .tree import build_tree, tree_score


class TreeEnsembleModel(ClassifierModel):
    def __init__(
        self, spec: ClassifierSpec, n_train: int, trees: list[dict], fit_ms: float = 0.0
    ):
        super().__init__(spec, n_train, fit_ms)
        self.trees = trees

    def score(self, sample: Sample) -> float:
        total = 0.0
        for tree in self.trees:
            total += tree_score(tree, sample)
        return total / len(self.trees)

    def params_dict(self) -> dict:
        return {"trees": self.trees}

    @classmethod
    def from_params(cls, spec: ClassifierSpec, n_train: int, params: dict):
        return cls(spec=spec, n_train=n_train, trees=params["trees"])


class BaggingModel(TreeEnsembleModel):
    kind = "Bagging"


class RandomForestModel(TreeEnsembleModel):
    kind = "RandomForest"


def _fit_ensemble(
    spec: ClassifierSpec,
    dataset: Dataset,
    trees: int,
    min_leaf: int,
    feature_subsample: int | None,
    bootstrap: bool,
) -> list[dict]:
    require_both_classes(dataset)
    if trees < 1:
        raise TrainingError("trees must be >= 1")
    view = codes_view(dataset)
    n = len(dataset.samples)
    built = []
    for child_seq in np.random.SeedSequence(spec.seed).spawn(trees):
        rng = np.random.default_rng(child_seq)
        if bootstrap:
            idx = rng.integers(0, n, size=n, dtype=np.int64)
        else:
            idx = np.arange(n, dtype=np.int64)
        built.append(
            build_tree(
                view,
                idx,
                min_leaf=min_leaf,
                feature_subsample=feature_subsample,
                rng=rng,
            )
        )
    return built


def fit_bagging(spec: ClassifierSpec, dataset: Dataset) -> BaggingModel:
    params = spec.params()
    trees = _fit_ensemble(
        spec,
        dataset,
        trees=int(params["trees"]),
        min_leaf=int(params["min_leaf"]),
        feature_subsample=None,
        bootstrap=True,
    )
    return BaggingModel(spec=spec, n_train=len(dataset.samples), trees=trees)


def fit_random_forest(spec: ClassifierSpec, dataset: Dataset) -> RandomForestModel:
    params = spec.params()
    subsample = int(params["feature_subsample"])
    if not 1 <= subsample <= 6:
        raise TrainingError("feature_subsample must be in 1..6")
    trees = _fit_ensemble(
        spec,
        dataset,
        trees=int(params["trees"]),
        min_leaf=int(params["min_leaf"]),
        feature_subsample=subsample,
        bootstrap=bool(params["bootstrap"]),
    )
    return RandomForestModel(spec=spec, n_train=len(dataset.samples), trees=trees)

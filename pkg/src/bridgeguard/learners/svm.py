"""Linear SVM on the one-hot encoding, trained with Pegasos.

Per-sample subgradient steps with eta_t = 1/(lambda * t), labels in {-1, +1},
no projection step and no bias term (the one-hot blocks span the intercept).
The weight vector is kept as scale * direction so the per-step shrink
(1 - 1/t) costs O(1); rows are one-hot with exactly six active columns, so
the inner loop touches six weights per step and compiles tightly.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..datagen import FEATURES, Dataset, Encoder, Sample, fit_encoder
from .base import (
    ClassifierModel,
    ClassifierSpec,
    TrainingError,
    encoder_from_doc,
    encoder_to_doc,
    require_both_classes,
)


def sparse_columns(enc: Encoder, samples) -> np.ndarray:
    """Active one-hot column per feature for each sample, shape (n, 6)."""
    cols = np.empty((len(samples), len(FEATURES)), dtype=np.int32)
    for i, s in enumerate(samples):
        for j, f in enumerate(FEATURES):
            col = enc.column_map.get((f, getattr(s, f)))
            cols[i, j] = enc.unseen_column(f) if col is None else col
    return cols


@njit(cache=True)
def pegasos_kernel(
    cols: np.ndarray, ys: np.ndarray, order: np.ndarray, lam: float, dim: int
) -> np.ndarray:
    v = np.zeros(dim)
    s = 1.0
    t = 0
    k = cols.shape[1]
    for p in range(order.size):
        t += 1
        i = order[p]
        dot = 0.0
        for j in range(k):
            dot += v[cols[i, j]]
        margin = ys[i] * s * dot
        s *= 1.0 - 1.0 / t
        if s < 1e-9:
            for c in range(dim):
                v[c] *= s
            s = 1.0
        if margin < 1.0:
            add = ys[i] / (lam * t * s)
            for j in range(k):
                v[cols[i, j]] += add
    return v * s


def epoch_order(n: int, epochs: int, seed: int) -> np.ndarray:
    """Concatenated per-epoch permutations of range(n)."""
    rng = np.random.default_rng(seed)
    return np.concatenate(
        [rng.permutation(n).astype(np.int32) for _ in range(epochs)]
    )


def signed_labels(dataset: Dataset) -> np.ndarray:
    return np.array(
        [1.0 if s.label == "Yes" else -1.0 for s in dataset.samples], dtype=np.float64
    )


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


class SVMModel(ClassifierModel):
    kind = "SVM"

    def __init__(
        self,
        spec: ClassifierSpec,
        n_train: int,
        weights: np.ndarray,
        encoder: Encoder,
        fit_ms: float = 0.0,
    ):
        super().__init__(spec, n_train, fit_ms)
        self.weights = weights
        self.encoder = encoder

    def margin(self, sample: Sample) -> float:
        total = 0.0
        for f in FEATURES:
            col = self.encoder.column_map.get((f, getattr(sample, f)))
            if col is None:
                col = self.encoder.unseen_column(f)
            total += self.weights[col]
        return total

    def score(self, sample: Sample) -> float:
        return _sigmoid(self.margin(sample))

    def params_dict(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "encoder": encoder_to_doc(self.encoder),
        }

    @classmethod
    def from_params(cls, spec: ClassifierSpec, n_train: int, params: dict):
        return cls(
            spec=spec,
            n_train=n_train,
            weights=np.array(params["weights"], dtype=np.float64),
            encoder=encoder_from_doc(params["encoder"]),
        )


def fit_svm(spec: ClassifierSpec, dataset: Dataset) -> SVMModel:
    require_both_classes(dataset)
    params = spec.params()
    lam = float(params["lam"])
    epochs = int(params["epochs"])
    if lam <= 0:
        raise TrainingError("lam must be positive")
    if epochs < 1:
        raise TrainingError("epochs must be >= 1")
    enc = fit_encoder(dataset)
    cols = sparse_columns(enc, dataset.samples)
    ys = signed_labels(dataset)
    order = epoch_order(len(dataset.samples), epochs, spec.seed)
    weights = pegasos_kernel(cols, ys, order, lam, enc.width)
    return SVMModel(
        spec=spec, n_train=len(dataset.samples), weights=weights, encoder=enc
    )

"""Single-hidden-layer perceptron on the one-hot encoding.

Sigmoid hidden and output units, cross-entropy loss, plain mini-batch SGD.
`loss` and `gradients` are module-level pure functions of the parameter
dict so the backward pass can be checked against finite differences.
"""

from __future__ import annotations

import numpy as np

from ..datagen import Dataset, Encoder, Sample, encode, fit_encoder
from .base import (
    ClassifierModel,
    ClassifierSpec,
    TrainingError,
    encoder_from_doc,
    encoder_to_doc,
    require_both_classes,
)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_params(
    width: int, hidden: int, seed: int, init_scale: float = 0.5
) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    return {
        "w1": rng.uniform(-init_scale, init_scale, size=(width, hidden)),
        "b1": rng.uniform(-init_scale, init_scale, size=hidden),
        "w2": rng.uniform(-init_scale, init_scale, size=hidden),
        "b2": rng.uniform(-init_scale, init_scale, size=1),
    }


def forward(params: dict, x: np.ndarray) -> np.ndarray:
    """Output probabilities for a (n, width) batch."""
    a1 = _sigmoid(x @ params["w1"] + params["b1"])
    return _sigmoid(a1 @ params["w2"] + params["b2"][0])


def loss(params: dict, x: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy, computed from logits so it never overflows."""
    a1 = _sigmoid(x @ params["w1"] + params["b1"])
    z2 = a1 @ params["w2"] + params["b2"][0]
    return float(np.mean(np.logaddexp(0.0, z2) - y * z2))


def gradients(params: dict, x: np.ndarray, y: np.ndarray) -> dict[str, np.ndarray]:
    n = x.shape[0]
    a1 = _sigmoid(x @ params["w1"] + params["b1"])
    z2 = a1 @ params["w2"] + params["b2"][0]
    p = _sigmoid(z2)
    dz2 = (p - y) / n
    dw2 = a1.T @ dz2
    db2 = np.array([dz2.sum()])
    dz1 = np.outer(dz2, params["w2"]) * a1 * (1.0 - a1)
    return {
        "w1": x.T @ dz1,
        "b1": dz1.sum(axis=0),
        "w2": dw2,
        "b2": db2,
    }


class NeuralNetModel(ClassifierModel):
    kind = "NeuralNet"

    def __init__(
        self,
        spec: ClassifierSpec,
        n_train: int,
        params: dict[str, np.ndarray],
        encoder: Encoder,
        fit_ms: float = 0.0,
    ):
        super().__init__(spec, n_train, fit_ms)
        self.net = params
        self.encoder = encoder

    def score(self, sample: Sample) -> float:
        row = self.encoder.encode_row(sample)[None, :]
        return float(forward(self.net, row)[0])

    def scores(self, samples) -> list[float]:
        if not samples:
            return []
        x = np.stack([self.encoder.encode_row(s) for s in samples])
        return [float(v) for v in forward(self.net, x)]

    def params_dict(self) -> dict:
        return {
            "net": {k: v.tolist() for k, v in self.net.items()},
            "encoder": encoder_to_doc(self.encoder),
        }

    @classmethod
    def from_params(cls, spec: ClassifierSpec, n_train: int, params: dict):
        net = {k: np.array(v, dtype=np.float64) for k, v in params["net"].items()}
        return cls(
            spec=spec,
            n_train=n_train,
            params=net,
            encoder=encoder_from_doc(params["encoder"]),
        )


def fit_neural_net(spec: ClassifierSpec, dataset: Dataset) -> NeuralNetModel:
    require_both_classes(dataset)
    hp = spec.params()
    hidden = int(hp["hidden"])
    lr = float(hp["lr"])
    epochs = int(hp["epochs"])
    batch_size = int(hp["batch_size"])
    if min(hidden, epochs, batch_size) < 1 or lr <= 0:
        raise TrainingError("hidden, epochs, batch_size must be >= 1 and lr > 0")

    enc = fit_encoder(dataset)
    encoded = encode(enc, dataset)
    x = encoded.matrix
    y = encoded.labels.astype(np.float64)
    n = x.shape[0]

    params = init_params(enc.width, hidden, spec.seed, float(hp["init_scale"]))
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 1]))
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            grads = gradients(params, x[batch], y[batch])
            for key in params:
                params[key] -= lr * grads[key]
    return NeuralNetModel(
        spec=spec, n_train=n, params=params, encoder=enc
    )

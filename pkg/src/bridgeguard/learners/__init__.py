"""Seven classifiers behind one train/score/predict interface."""

from __future__ import annotations

import json
import time

from ..datagen import Dataset
from .base import (
    HYPERPARAMETERS,
    KINDS,
    ClassifierModel,
    ClassifierSpec,
    SpecError,
    TrainingError,
)
from .ensemble import BaggingModel, RandomForestModel, fit_bagging, fit_random_forest
from .evolutionary import ESVMModel, fit_esvm
from .mlp import NeuralNetModel, fit_neural_net
from .naive_bayes import NaiveBayesModel, fit_naive_bayes
from .svm import SVMModel, fit_svm
from .tree import J48Model, fit_j48

__all__ = [
    "KINDS",
    "HYPERPARAMETERS",
    "ClassifierSpec",
    "ClassifierModel",
    "SpecError",
    "TrainingError",
    "train",
    "save_model",
    "load_model",
    "NaiveBayesModel",
    "J48Model",
    "BaggingModel",
    "RandomForestModel",
    "SVMModel",
    "ESVMModel",
    "NeuralNetModel",
]

_FITTERS = {
    "NaiveBayes": fit_naive_bayes,
    "J48": fit_j48,
    "Bagging": fit_bagging,
    "RandomForest": fit_random_forest,
    "SVM": fit_svm,
    "ESVM": fit_esvm,
    "NeuralNet": fit_neural_net,
}

_MODELS = {
    "NaiveBayes": NaiveBayesModel,
    "J48": J48Model,
    "Bagging": BaggingModel,
    "RandomForest": RandomForestModel,
    "SVM": SVMModel,
    "ESVM": ESVMModel,
    "NeuralNet": NeuralNetModel,
}

MODEL_FORMAT = "bridgeguard-model"
MODEL_VERSION = 1


def train(spec: ClassifierSpec, dataset: Dataset) -> ClassifierModel:
    """Fit `spec` on `dataset`; wall-clock fit time lands on `model.fit_ms`."""
    if not dataset.samples:
        raise TrainingError("cannot train on an empty dataset")
    t0 = time.perf_counter()
    model = _FITTERS[spec.kind](spec, dataset)
    model.fit_ms = (time.perf_counter() - t0) * 1000.0
    return model


def save_model(model: ClassifierModel, path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "spec": model.spec.to_dict(),
        "n_train": model.n_train,
        "params": model.params_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path) -> ClassifierModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise SpecError(f"not a model file: format={doc.get('format')!r}")
    if doc.get("version") != MODEL_VERSION:
        raise SpecError(f"unsupported model version {doc.get('version')!r}")
    kind = doc["kind"]
    if kind not in _MODELS:
        raise SpecError(f"unknown model kind {kind!r}")
    spec = ClassifierSpec.from_dict(doc["spec"])
    if spec.kind != kind:
        raise SpecError(f"kind mismatch: file says {kind!r}, spec says {spec.kind!r}")
    return _MODELS[kind].from_params(spec, int(doc["n_train"]), doc["params"])

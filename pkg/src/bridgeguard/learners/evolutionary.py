"""Evolutionary SVM: a genetic search over Pegasos hyperparameters.

The genome is (log10 lambda in [-6, 0], epochs in [10, 200]).  Fitness is
pooled stratified inner-CV accuracy; selection is tournament-of-two with a
single elite whose fitness is cached, so each later generation spends
population - 1 evaluations.  The winner is refit on the full training set.

Inner-fold encodings and a per-fold permutation pool are built once and
shared by every genome: only the epoch count (a prefix of the pool) and
lambda vary between evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..datagen import Dataset, fit_encoder
from ..evaluation import stratified_folds
from .base import ClassifierSpec, TrainingError, require_both_classes
from .svm import SVMModel, pegasos_kernel, signed_labels, sparse_columns

LOG_LAM_RANGE = (-6.0, 0.0)
EPOCH_RANGE = (10, 200)


@dataclass(frozen=True)
class Genome:
    log_lam: float
    epochs: int

    @property
    def lam(self) -> float:
        return 10.0**self.log_lam


@dataclass
class _FoldData:
    cols_train: np.ndarray
    ys_train: np.ndarray
    cols_test: np.ndarray
    truth_test: np.ndarray  # bool, Yes -> True
    width: int
    perm_pool: np.ndarray  # (max_epochs, n_train) int32


class ESVMModel(SVMModel):
    kind = "ESVM"

    def __init__(self, *args, genome=None, evaluations=0, history=None, **kwargs):
        super().__init__(*args, **kwargs)
        self.genome = genome
        self.evaluations = evaluations
        self.history = history or []

    def params_dict(self) -> dict:
        doc = super().params_dict()
        doc["genome"] = {"log_lam": self.genome.log_lam, "epochs": self.genome.epochs}
        doc["evaluations"] = self.evaluations
        doc["history"] = [float(h) for h in self.history]
        return doc

    @classmethod
    def from_params(cls, spec: ClassifierSpec, n_train: int, params: dict):
        base = SVMModel.from_params(spec, n_train, params)
        return cls(
            spec,
            n_train,
            base.weights,
            base.encoder,
            genome=Genome(
                log_lam=params["genome"]["log_lam"],
                epochs=int(params["genome"]["epochs"]),
            ),
            evaluations=int(params["evaluations"]),
            history=list(params.get("history", [])),
        )


def _prepare_folds(
    dataset: Dataset, inner_folds: int, seed: int, max_epochs: int
) -> list[_FoldData]:
    prepared = []
    splits = stratified_folds(dataset, inner_folds, seed)
    for fold_no, (train_idx, test_idx) in enumerate(splits):
        train_samples = [dataset.samples[i] for i in train_idx]
        test_samples = [dataset.samples[i] for i in test_idx]
        enc = fit_encoder(Dataset(samples=train_samples))
        rng = np.random.default_rng(np.random.SeedSequence([seed, 100 + fold_no]))
        n = len(train_samples)
        pool = np.empty((max_epochs, n), dtype=np.int32)
        for e in range(max_epochs):
            pool[e] = rng.permutation(n)
        prepared.append(
            _FoldData(
                cols_train=sparse_columns(enc, train_samples),
                ys_train=np.array(
                    [1.0 if s.label == "Yes" else -1.0 for s in train_samples]
                ),
                cols_test=sparse_columns(enc, test_samples),
                truth_test=np.array(
                    [s.label == "Yes" for s in test_samples], dtype=bool
                ),
                width=enc.width,
                perm_pool=pool,
            )
        )
    return prepared


def _fitness(genome: Genome, folds: list[_FoldData]) -> float:
    correct = 0
    total = 0
    for fd in folds:
        order = np.ascontiguousarray(fd.perm_pool[: genome.epochs]).ravel()
        weights = pegasos_kernel(fd.cols_train, fd.ys_train, order, genome.lam, fd.width)
        margins = weights[fd.cols_test].sum(axis=1)
        correct += int(((margins >= 0.0) == fd.truth_test).sum())
        total += fd.truth_test.size
    return correct / total


def _random_genome(rng: np.random.Generator) -> Genome:
    return Genome(
        log_lam=float(rng.uniform(*LOG_LAM_RANGE)),
        epochs=int(rng.integers(EPOCH_RANGE[0], EPOCH_RANGE[1] + 1)),
    )


def _tournament(scored: list[tuple[Genome, float]], rng) -> Genome:
    i, j = rng.integers(0, len(scored), size=2)
    a, b = scored[int(i)], scored[int(j)]
    return a[0] if a[1] >= b[1] else b[0]


def _crossover(a: Genome, b: Genome, rng) -> Genome:
    w = float(rng.random())
    return Genome(
        log_lam=w * a.log_lam + (1.0 - w) * b.log_lam,
        epochs=a.epochs if rng.random() < 0.5 else b.epochs,
    )


def _mutate(g: Genome, rate: float, rng) -> Genome:
    log_lam, epochs = g.log_lam, g.epochs
    if rng.random() < rate:
        log_lam = float(np.clip(log_lam + rng.normal(0.0, 0.5), *LOG_LAM_RANGE))
    if rng.random() < rate:
        epochs = int(np.clip(epochs + int(rng.integers(-20, 21)), *EPOCH_RANGE))
    return Genome(log_lam=log_lam, epochs=epochs)


def fit_esvm(spec: ClassifierSpec, dataset: Dataset) -> ESVMModel:
    require_both_classes(dataset)
    params = spec.params()
    population = int(params["population"])
    generations = int(params["generations"])
    elite = int(params["elite"])
    inner_folds = int(params["inner_folds"])
    crossover_rate = float(params["crossover_rate"])
    mutation_rate = float(params["mutation_rate"])
    if population < 2 or generations < 1:
        raise TrainingError("population must be >= 2 and generations >= 1")
    if elite != 1:
        raise TrainingError("exactly one elite genome is supported")

    folds = _prepare_folds(dataset, inner_folds, spec.seed, EPOCH_RANGE[1])
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 0]))
    evaluations = 0

    scored: list[tuple[Genome, float]] = []
    for _ in range(population):
        g = _random_genome(rng)
        scored.append((g, _fitness(g, folds)))
        evaluations += 1
    history = [max(f for _, f in scored)]

    for _ in range(generations - 1):
        scored.sort(key=lambda gf: -gf[1])
        next_scored = [scored[0]]  # elite keeps its cached fitness
        while len(next_scored) < population:
            child = _tournament(scored, rng)
            if rng.random() < crossover_rate:
                child = _crossover(child, _tournament(scored, rng), rng)
            child = _mutate(child, mutation_rate, rng)
            next_scored.append((child, _fitness(child, folds)))
            evaluations += 1
        scored = next_scored
        history.append(max(f for _, f in scored))

    scored.sort(key=lambda gf: -gf[1])
    best = scored[0][0]

    enc = fit_encoder(dataset)
    cols = sparse_columns(enc, dataset.samples)
    ys = signed_labels(dataset)
    final_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 1]))
    n = len(dataset.samples)
    order = np.concatenate(
        [final_rng.permutation(n).astype(np.int32) for _ in range(best.epochs)]
    )
    weights = pegasos_kernel(cols, ys, order, best.lam, enc.width)
    return ESVMModel(
        spec,
        n,
        weights,
        enc,
        genome=best,
        evaluations=evaluations,
        history=history,
    )

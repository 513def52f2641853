"""Shared fixtures: the default dataset and one full cross-validation run."""

from __future__ import annotations

import time

import pytest

from bridgeguard.datagen import Dataset, Sample, generate
from bridgeguard.evaluation import evaluate_all
from bridgeguard.learners import KINDS, ClassifierSpec, train


def make_sample(
    api: str,
    label: str | None = "Yes",
    app: str = "app",
    perm: str = "INTERNET",
    site: str = "site.example",
    ip: str = "10.0.0.1",
    loc: str = "US",
) -> Sample:
    return Sample(
        app_name=app,
        permissions=perm,
        api_name=api,
        website_name=site,
        ip=ip,
        location=loc,
        label=label,
    )


def tiny_dataset(rows, seed: int = 0) -> Dataset:
    """rows: iterable of (api, label) or full make_sample kwargs dicts."""
    samples = []
    for row in rows:
        if isinstance(row, dict):
            samples.append(make_sample(**row))
        else:
            api, label = row
            samples.append(make_sample(api, label))
    return Dataset(samples=samples, seed=seed)


@pytest.fixture(scope="session")
def default_dataset() -> Dataset:
    return generate(460, attack_ratio=0.5, noise=0.05, seed=42)


@pytest.fixture(scope="session")
def cv_report(default_dataset):
    """One stratified 10-fold run over every classifier kind.

    JIT-compiled kernels are warmed on a throwaway dataset first so the
    recorded training times compare compiled code, not compiler runs.
    """
    warm = generate(40, attack_ratio=0.5, noise=0.0, seed=7)
    train(ClassifierSpec(kind="J48", seed=0), warm)
    train(ClassifierSpec(kind="SVM", seed=0, hyperparameters={"epochs": 2}), warm)
    start = time.perf_counter()
    specs = tuple(ClassifierSpec(kind=kind, seed=42) for kind in KINDS)
    report = evaluate_all(default_dataset, specs, k=10, seed=42)
    elapsed = time.perf_counter() - start
    return report, elapsed

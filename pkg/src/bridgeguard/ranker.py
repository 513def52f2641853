"""Feature ranking over the six categorical features.

Three scorers: information gain (Shannon, base 2), gain ratio, and Relief-F
with a 0/1 per-feature distance.  All of them are deterministic functions of
the multiset of rows: IG and GR by construction, Relief-F because instances
are processed in a canonical content-sorted order, with ties in neighbor
distance broken by that same order.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .datagen import FEATURES, Dataset

__all__ = [
    "FeatureRanking",
    "information_gain",
    "gain_ratio",
    "relief_f",
    "relief_f_all",
    "rank_all",
    "METHODS",
]

METHODS = ("IG", "GR", "ReliefF")


class RankingError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureRanking:
    method: str
    scores: dict[str, float]
    order: tuple[str, ...]  # descending score, ties alphabetical


def _entropy(counts: Counter) -> float:
    total = sum(counts.values())
    h = 0.0
    for c in counts.values():
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def information_gain(dataset: Dataset, feature: str) -> float:
    """H(label) minus the feature-conditional entropy of the label."""
    if not dataset.samples:
        raise RankingError("dataset is empty")
    n = len(dataset.samples)
    label_counts = Counter(s.label for s in dataset.samples)
    by_value: dict[str, Counter] = {}
    for s in dataset.samples:
        by_value.setdefault(getattr(s, feature), Counter())[s.label] += 1
    conditional = sum(
        (sum(c.values()) / n) * _entropy(c) for c in by_value.values()
    )
    return _entropy(label_counts) - conditional


def _split_info(dataset: Dataset, feature: str) -> float:
    n = len(dataset.samples)
    value_counts = Counter(getattr(s, feature) for s in dataset.samples)
    return _entropy(value_counts) if n else 0.0


def gain_ratio(dataset: Dataset, feature: str) -> float:
    """Information gain normalized by split information; 0 if the split
    information is 0 (constant feature)."""
    if not dataset.samples:
        raise RankingError("dataset is empty")
    split = _split_info(dataset, feature)
    if split == 0.0:
        return 0.0
    return information_gain(dataset, feature) / split


def _canonical_codes(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Rows as integer codes, sorted by content so row order never matters.

    Returns (codes, labels): codes is (n, 6) int32, labels (n,) int8.
    """
    rows = sorted((s.features(), s.label) for s in dataset.samples)
    maps: list[dict[str, int]] = [{} for _ in FEATURES]
    codes = np.empty((len(rows), len(FEATURES)), dtype=np.int32)
    labels = np.empty(len(rows), dtype=np.int8)
    label_ids: dict[str, int] = {}
    for i, (feats, label) in enumerate(rows):
        for j, value in enumerate(feats):
            codes[i, j] = maps[j].setdefault(value, len(maps[j]))
        labels[i] = label_ids.setdefault(label, len(label_ids))
    return codes, labels


def relief_f_all(
    dataset: Dataset, k: int = 10, m: int | None = None, seed: int = 0
) -> dict[str, float]:
    """Relief-F weights for all six features in one pass.

    Neighbors are ranked by whole-row Hamming distance; per class, up to `k`
    nearest hits/misses are averaged (fewer if the class is small).  Miss
    contributions are weighted by class priors as usual.  `m` defaults to the
    dataset size, in which case every instance is visited once.
    """
    if k < 1:
        raise RankingError("k must be >= 1")
    n = len(dataset.samples)
    if n == 0:
        raise RankingError("dataset is empty")
    codes, labels = _canonical_codes(dataset)
    classes = np.unique(labels)
    if len(classes) < 2:
        raise RankingError("Relief-F needs both classes present")
    if m is None:
        m = n
    if not 1 <= m <= n:
        raise RankingError(f"m must be in [1, {n}]")

    if m == n:
        visited = np.arange(n)
    else:
        rng = random.Random(seed)
        visited = np.array(sorted(rng.sample(range(n), m)))

    priors = {c: float(np.mean(labels == c)) for c in classes}
    # pairwise Hamming distances over all features; ties resolved by index
    dist = (codes[:, None, :] != codes[None, :, :]).sum(axis=2)

    weights = np.zeros(len(FEATURES))
    for i in visited:
        own = labels[i]
        for c in classes:
            pool = np.flatnonzero(labels == c)
            pool = pool[pool != i]
            if len(pool) == 0:
                continue
            take = min(k, len(pool))
            order = np.lexsort((pool, dist[i, pool]))[:take]
            neighbors = pool[order]
            mean_diff = (codes[neighbors] != codes[i]).mean(axis=0)
            if c == own:
                weights -= mean_diff / m
            else:
                weights += (priors[c] / (1.0 - priors[own])) * mean_diff / m
    return {feature: float(weights[j]) for j, feature in enumerate(FEATURES)}


def relief_f(
    dataset: Dataset,
    feature: str,
    k: int = 10,
    m: int | None = None,
    seed: int = 0,
) -> float:
    return relief_f_all(dataset, k=k, m=m, seed=seed)[feature]


_ALIASES = {
    "ig": "IG",
    "gr": "GR",
    "relieff": "ReliefF",
    "relief-f": "ReliefF",
}


def rank_all(dataset: Dataset, method: str, params: dict | None = None) -> FeatureRanking:
    """Score all six features with one method and order them.

    Descending score, ties broken alphabetically by feature name.
    """
    canonical = _ALIASES.get(method.lower())
    if canonical is None:
        raise RankingError(f"unknown ranking method {method!r}")
    params = params or {}
    if canonical == "IG":
        scores = {f: information_gain(dataset, f) for f in FEATURES}
    elif canonical == "GR":
        scores = {f: gain_ratio(dataset, f) for f in FEATURES}
    else:
        scores = relief_f_all(
            dataset,
            k=params.get("k", 10),
            m=params.get("m"),
            seed=params.get("seed", 0),
        )
    for f, v in scores.items():
        if not math.isfinite(v):
            raise RankingError(f"non-finite score for {f}: {v}")
    order = tuple(sorted(FEATURES, key=lambda f: (-scores[f], f)))
    return FeatureRanking(method=canonical, scores=scores, order=order)

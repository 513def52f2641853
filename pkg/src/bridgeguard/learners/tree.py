"""Gain-ratio decision tree with multiway categorical splits.

No pruning.  A split is admissible when it produces at least two non-empty
branches, at least two branches hold `min_leaf` or more rows, and its
information gain is positive.  Among admissible features the highest gain
ratio wins; exact ties fall to the alphabetically first feature name.
Rows reaching a branch for a category unseen at fit time score with the
deepest matched node's class mix.

Split search reads class-by-category counts for all candidate features out
of one bincount over the view's packed codes, and children are carved from
one stable argsort, which keeps a full forest fit in the tens of
milliseconds.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ..datagen import FEATURES, Dataset, Sample
from .base import (
    ClassifierModel,
    ClassifierSpec,
    CodesView,
    codes_view,
    require_both_classes,
)

_EPS = 1e-12

# feature indices in alphabetical name order, the split tie-break order
_ALPHA = tuple(sorted(range(len(FEATURES)), key=lambda j: FEATURES[j]))


def _entropy(yes: float, n: float) -> float:
    if n <= 0:
        return 0.0
    p = yes / n
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p))


@njit(cache=True)
def _split_kernel(
    packed: np.ndarray,
    idx: np.ndarray,
    offsets: np.ndarray,
    cand: np.ndarray,
    min_leaf: int,
    n: int,
    yes: int,
) -> int:
    """Index of the admissible feature with the best gain ratio, or -1.

    `cand` is already in alphabetical-name order, so keeping the strictly
    larger gain ratio realizes the documented tie-break.
    """
    p_node = yes / n
    h_node = -(p_node * np.log2(p_node) + (1.0 - p_node) * np.log2(1.0 - p_node))
    buf = np.zeros(offsets[-1], dtype=np.int64)
    for r in idx:
        for j in cand:
            buf[packed[r, j]] += 1
    best_j = -1
    best_gr = 0.0
    for j in cand:
        non_empty = 0
        filled = 0
        weighted_h = 0.0
        split_info = 0.0
        for pos in range(offsets[j], offsets[j + 1], 2):
            y = buf[pos + 1]
            c = buf[pos] + y
            if c == 0:
                continue
            non_empty += 1
            if c >= min_leaf:
                filled += 1
            frac = c / n
            if 0 < y < c:
                p = y / c
                weighted_h -= frac * (
                    p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p)
                )
            split_info -= frac * np.log2(frac)
        if non_empty < 2 or filled < 2:
            continue
        ig = h_node - weighted_h
        if ig <= 1e-12:
            continue
        gr = ig / split_info
        if gr > best_gr:
            best_gr = gr
            best_j = j
    return best_j


def _best_feature(
    view: CodesView,
    idx: np.ndarray,
    candidates: list[int],
    min_leaf: int,
    n: int,
    yes: int,
):
    """Admissible feature with the best gain ratio, or None.

    Returns (feature index, per-category counts, per-category yes counts)
    so the caller can partition without recounting.
    """
    cand = np.array([j for j in _ALPHA if j in candidates], dtype=np.int64)
    j = int(
        _split_kernel(view.packed, idx, view.offsets, cand, min_leaf, n, yes)
    )
    if j < 0:
        return None
    local = view.packed[idx, j] - view.offsets[j]
    bc = np.bincount(local, minlength=2 * view.widths[j])
    yes_counts = bc[1::2]
    counts = bc[0::2] + yes_counts
    return j, counts, yes_counts


def build_tree(
    view: CodesView,
    idx: np.ndarray,
    min_leaf: int = 2,
    feature_subsample: int | None = None,
    rng: np.random.Generator | None = None,
    available: frozenset[int] | None = None,
    node_n: int | None = None,
    node_yes: int | None = None,
) -> dict:
    if available is None:
        available = frozenset(range(len(FEATURES)))
    n = int(idx.size) if node_n is None else node_n
    yes = int(view.labels[idx].sum()) if node_yes is None else node_yes
    node = {"n": n, "yes": yes}
    if yes == 0 or yes == n or not available:
        node["leaf"] = True
        return node
    candidates = sorted(available)
    if feature_subsample is not None and feature_subsample < len(candidates):
        picked = rng.permutation(len(candidates))[:feature_subsample]
        candidates = [candidates[i] for i in sorted(picked)]
    found = _best_feature(view, idx, candidates, min_leaf, n, yes)
    if found is None:
        node["leaf"] = True
        return node
    j, counts, yes_counts = found
    order = np.argsort(view.codes[idx, j], kind="stable")
    sorted_idx = idx[order]
    children = {}
    start = 0
    remaining = available - {j}
    for code in np.flatnonzero(counts):
        size = int(counts[code])
        children[view.values[j][int(code)]] = build_tree(
            view,
            sorted_idx[start : start + size],
            min_leaf=min_leaf,
            feature_subsample=feature_subsample,
            rng=rng,
            available=remaining,
            node_n=size,
            node_yes=int(yes_counts[code]),
        )
        start += size
    node["leaf"] = False
    node["feature"] = FEATURES[j]
    node["children"] = children
    return node


def tree_score(tree: dict, sample: Sample) -> float:
    node = tree
    while not node["leaf"]:
        child = node["children"].get(getattr(sample, node["feature"]))
        if child is None:
            break
        node = child
    return node["yes"] / node["n"]


def tree_depth(tree: dict) -> int:
    if tree["leaf"]:
        return 0
    return 1 + max(tree_depth(c) for c in tree["children"].values())


class J48Model(ClassifierModel):
    kind = "J48"

    def __init__(
        self, spec: ClassifierSpec, n_train: int, tree: dict, fit_ms: float = 0.0
    ):
        super().__init__(spec, n_train, fit_ms)
        self.tree = tree

    def score(self, sample: Sample) -> float:
        return tree_score(self.tree, sample)

    def params_dict(self) -> dict:
        return {"tree": self.tree}

    @classmethod
    def from_params(cls, spec: ClassifierSpec, n_train: int, params: dict):
        return cls(spec=spec, n_train=n_train, tree=params["tree"])


def fit_j48(spec: ClassifierSpec, dataset: Dataset) -> J48Model:
    require_both_classes(dataset)
    params = spec.params()
    view = codes_view(dataset)
    idx = np.arange(len(dataset.samples), dtype=np.int64)
    tree = build_tree(view, idx, min_leaf=int(params["min_leaf"]))
    return J48Model(spec=spec, n_train=len(dataset.samples), tree=tree)

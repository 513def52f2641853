"""Brute-force reference implementations used to cross-check the library.

Everything here is written straight from the definitions: plain loops, no
numpy, no code shared with the package.  Slow and obvious on purpose.
"""

from __future__ import annotations

import math
from fractions import Fraction


def entropy_of(labels) -> float:
    n = len(labels)
    h = 0.0
    for value in set(labels):
        p = labels.count(value) / n
        h -= p * math.log2(p)
    return h


def info_gain(rows, labels, col: int) -> float:
    groups: dict = {}
    for row, lab in zip(rows, labels):
        groups.setdefault(row[col], []).append(lab)
    remainder = 0.0
    for part in groups.values():
        remainder += (len(part) / len(labels)) * entropy_of(part)
    return entropy_of(labels) - remainder


def split_information(rows, col: int) -> float:
    n = len(rows)
    counts: dict = {}
    for row in rows:
        counts[row[col]] = counts.get(row[col], 0) + 1
    si = 0.0
    for c in counts.values():
        si -= (c / n) * math.log2(c / n)
    return si


def gain_ratio(rows, labels, col: int) -> float:
    si = split_information(rows, col)
    if si == 0.0:
        return 0.0
    return info_gain(rows, labels, col) / si


def relief_f_weights(rows, labels, k: int) -> list[float]:
    """Relief-F with m = n: visit every instance of the canonical ordering.

    Distance between instances is the number of differing features; per
    class the k nearest neighbors are chosen by (distance, index); misses
    are weighted by prior(c) / (1 - prior(own)).
    """
    ordered = sorted(zip(rows, labels))
    feats = [r for r, _ in ordered]
    labs = [l for _, l in ordered]
    n = len(feats)
    nf = len(feats[0])
    prior = {c: labs.count(c) / n for c in set(labs)}
    weights = [0.0] * nf
    for i in range(n):
        for c in sorted(set(labs)):
            pool = [j for j in range(n) if labs[j] == c and j != i]
            if not pool:
                continue
            pool.sort(
                key=lambda j: (sum(a != b for a, b in zip(feats[i], feats[j])), j)
            )
            near = pool[: min(k, len(pool))]
            for f in range(nf):
                mean_diff = sum(feats[i][f] != feats[j][f] for j in near) / len(near)
                if c == labs[i]:
                    weights[f] -= mean_diff / n
                else:
                    weights[f] += (prior[c] / (1.0 - prior[labs[i]])) * mean_diff / n
    return weights


def metrics_from_pairs(pairs) -> dict[str, Fraction]:
    """Eq.-by-eq. metric recount over (predicted, actual) label pairs."""
    n = len(pairs)
    correct = sum(1 for p, a in pairs if p == a)
    tp = sum(1 for p, a in pairs if p == "Yes" and a == "Yes")
    pred_yes = sum(1 for p, _ in pairs if p == "Yes")
    actual_yes = sum(1 for _, a in pairs if a == "Yes")
    precision = Fraction(tp, pred_yes) if pred_yes else Fraction(0)
    recall = Fraction(tp, actual_yes) if actual_yes else Fraction(0)
    if precision + recall:
        f_measure = 2 * precision * recall / (precision + recall)
    else:
        f_measure = Fraction(0)
    return {
        "accuracy": Fraction(correct, n),
        "precision": precision,
        "recall": recall,
        "f_measure": f_measure,
    }


def auc_pairwise(scored) -> Fraction:
    """Mann-Whitney: P(score_pos > score_neg) + half the ties, exact."""
    pos = [s for s, lab in scored if lab == "Yes"]
    neg = [s for s, lab in scored if lab == "No"]
    total = Fraction(0)
    for p in pos:
        for q in neg:
            if p > q:
                total += 1
            elif p == q:
                total += Fraction(1, 2)
    return total / (len(pos) * len(neg))


def pegasos_dense(x, y, order, lam: float) -> list[float]:
    """Textbook Pegasos on dense rows, no scale trick, no projection."""
    d = len(x[0])
    w = [0.0] * d
    t = 0
    for i in order:
        t += 1
        eta = 1.0 / (lam * t)
        margin = y[i] * sum(wc * xc for wc, xc in zip(w, x[i]))
        shrink = 1.0 - 1.0 / t
        w = [wc * shrink for wc in w]
        if margin < 1.0:
            w = [wc + eta * y[i] * xc for wc, xc in zip(w, x[i])]
    return w

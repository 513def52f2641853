"""Feature scorers against hand-worked values and brute-force oracles."""

import math
import random

import pytest

from bridgeguard.datagen import FEATURES, Dataset
from bridgeguard.ranker import (
    METHODS,
    RankingError,
    gain_ratio,
    information_gain,
    rank_all,
    relief_f,
    relief_f_all,
)
from conftest import make_sample, tiny_dataset
from oracles import gain_ratio as oracle_gr
from oracles import info_gain as oracle_ig
from oracles import relief_f_weights as oracle_relief


def four_sample_case():
    """api_name value 'a' carries 2 Yes / 1 No, value 'b' carries 1 No."""
    return tiny_dataset([("a", "Yes"), ("a", "Yes"), ("a", "No"), ("b", "No")])


def random_dataset(rng: random.Random, max_n: int = 12) -> Dataset:
    """Small random categorical dataset guaranteed to contain both classes."""
    n = rng.randint(4, max_n)
    pools = {
        "app": ["a1", "a2"],
        "perm": ["INTERNET", "READ_SMS", "CAMERA"],
        "api": ["getDeviceId", "log", "toString"],
        "site": ["s1.example", "s2.example"],
        "ip": ["1.1.1.1", "2.2.2.2", "3.3.3.3"],
        "loc": ["US", "RU"],
    }
    samples = []
    labels = ["Yes", "No"] + [rng.choice(["Yes", "No"]) for _ in range(n - 2)]
    rng.shuffle(labels)
    for label in labels:
        samples.append(
            make_sample(
                rng.choice(pools["api"]),
                label,
                app=rng.choice(pools["app"]),
                perm=rng.choice(pools["perm"]),
                site=rng.choice(pools["site"]),
                ip=rng.choice(pools["ip"]),
                loc=rng.choice(pools["loc"]),
            )
        )
    return Dataset(samples=samples)


class TestInformationGain:
    def test_hand_worked_four_sample_value(self):
        data = four_sample_case()
        expected = 1.0 - 0.75 * (math.log2(3) - 2.0 / 3.0)
        assert information_gain(data, "api_name") == pytest.approx(expected, abs=1e-12)
        assert information_gain(data, "api_name") == pytest.approx(0.3113, abs=5e-5)

    def test_label_copy_feature_scores_one(self):
        data = tiny_dataset([("yes", "Yes"), ("yes", "Yes"), ("no", "No"), ("no", "No")])
        assert information_gain(data, "api_name") == pytest.approx(1.0)

    def test_constant_feature_scores_zero(self):
        data = four_sample_case()
        assert information_gain(data, "app_name") == 0.0

    def test_empty_dataset_rejected(self):
        with pytest.raises(RankingError):
            information_gain(Dataset(samples=[]), "api_name")

    def test_row_permutation_invariance(self):
        rng = random.Random(5)
        data = random_dataset(rng)
        shuffled = Dataset(samples=list(data.samples))
        rng.shuffle(shuffled.samples)
        for f in FEATURES:
            assert information_gain(data, f) == information_gain(shuffled, f)


class TestGainRatio:
    def test_hand_worked_four_sample_value(self):
        data = four_sample_case()
        ig = 1.0 - 0.75 * (math.log2(3) - 2.0 / 3.0)
        split = 2.0 - 0.75 * math.log2(3)
        assert gain_ratio(data, "api_name") == pytest.approx(ig / split, abs=1e-12)
        assert gain_ratio(data, "api_name") == pytest.approx(0.3837, abs=5e-5)

    def test_label_copy_feature_scores_one(self):
        data = tiny_dataset([("yes", "Yes"), ("yes", "Yes"), ("no", "No"), ("no", "No")])
        assert gain_ratio(data, "api_name") == pytest.approx(1.0)

    def test_constant_feature_guarded_to_zero(self):
        data = four_sample_case()
        assert gain_ratio(data, "app_name") == 0.0

    def test_bounded_by_unit_interval(self):
        rng = random.Random(17)
        for _ in range(10):
            data = random_dataset(rng)
            for f in FEATURES:
                assert 0.0 <= gain_ratio(data, f) <= 1.0 + 1e-12


class TestReliefF:
    def test_constant_feature_scores_zero(self):
        data = four_sample_case()
        assert relief_f(data, "app_name", k=1) == 0.0

    def test_label_copy_feature_positive_and_maximal(self):
        data = tiny_dataset(
            [("yes", "Yes"), ("yes", "Yes"), ("no", "No"), ("no", "No")]
        )
        scores = relief_f_all(data, k=1)
        assert scores["api_name"] > 0.0
        assert scores["api_name"] == max(scores.values())

    def test_anti_correlated_feature_negative(self):
        # app_name varies within each class but matches across classes, so
        # nearest hits disagree on it while nearest misses agree.
        data = tiny_dataset(
            [
                {"api": "yes", "label": "Yes", "app": "p"},
                {"api": "yes", "label": "Yes", "app": "q"},
                {"api": "no", "label": "No", "app": "p"},
                {"api": "no", "label": "No", "app": "q"},
            ]
        )
        scores = relief_f_all(data, k=1)
        assert scores["app_name"] < 0.0
        assert scores["api_name"] > 0.0

    def test_single_class_rejected(self):
        data = tiny_dataset([("a", "Yes"), ("b", "Yes")])
        with pytest.raises(RankingError):
            relief_f_all(data, k=1)

    def test_bad_k_rejected(self):
        with pytest.raises(RankingError):
            relief_f_all(four_sample_case(), k=0)

    def test_bad_m_rejected(self):
        with pytest.raises(RankingError):
            relief_f_all(four_sample_case(), k=1, m=99)

    def test_row_permutation_invariance(self):
        rng = random.Random(23)
        data = random_dataset(rng)
        shuffled = Dataset(samples=list(data.samples))
        rng.shuffle(shuffled.samples)
        assert relief_f_all(data, k=3) == relief_f_all(shuffled, k=3)

    def test_subsampled_m_is_deterministic(self):
        data = random_dataset(random.Random(31))
        a = relief_f_all(data, k=2, m=3, seed=9)
        b = relief_f_all(data, k=2, m=3, seed=9)
        assert a == b

    def test_matches_brute_force_oracle(self):
        rng = random.Random(1234)
        for _ in range(5):
            data = random_dataset(rng)
            k = rng.randint(1, 4)
            got = relief_f_all(data, k=k)
            rows = [s.features() for s in data.samples]
            labels = data.labels()
            want = oracle_relief(rows, labels, k)
            for j, f in enumerate(FEATURES):
                assert got[f] == pytest.approx(want[j], abs=1e-9)


class TestAgainstOracles:
    def test_ig_and_gr_match_brute_force(self):
        rng = random.Random(99)
        for _ in range(5):
            data = random_dataset(rng)
            rows = [s.features() for s in data.samples]
            labels = data.labels()
            for j, f in enumerate(FEATURES):
                assert information_gain(data, f) == pytest.approx(
                    oracle_ig(rows, labels, j), abs=1e-9
                )
                assert gain_ratio(data, f) == pytest.approx(
                    oracle_gr(rows, labels, j), abs=1e-9
                )


class TestRankAll:
    def test_api_name_first_under_all_methods(self, default_dataset):
        for method in METHODS:
            ranking = rank_all(default_dataset, method)
            assert ranking.order[0] == "api_name", method

    def test_method_aliases(self, default_dataset):
        assert rank_all(default_dataset, "ig").method == "IG"
        assert rank_all(default_dataset, "Relief-F").method == "ReliefF"

    def test_unknown_method_rejected(self):
        with pytest.raises(RankingError):
            rank_all(four_sample_case(), "chi2")

    def test_repeated_row_gives_zero_scores_alphabetical_order(self):
        data = tiny_dataset([("a", "Yes"), ("a", "Yes"), ("a", "Yes")])
        for method in ("IG", "GR"):
            ranking = rank_all(data, method)
            assert all(v == 0.0 for v in ranking.scores.values())
            assert ranking.order == tuple(sorted(FEATURES))

    def test_constant_features_rank_alphabetically_under_relief(self):
        data = tiny_dataset([("a", "Yes"), ("a", "Yes"), ("a", "No")])
        ranking = rank_all(data, "ReliefF", params={"k": 1})
        assert all(v == 0.0 for v in ranking.scores.values())
        assert ranking.order == tuple(sorted(FEATURES))

    def test_duplicated_columns_score_equally(self):
        # location mirrors app_name row by row, so any column-determined
        # scorer must give the two features identical weights
        rows = [
            {"api": "x", "label": "Yes", "app": "p", "loc": "p"},
            {"api": "y", "label": "No", "app": "q", "loc": "q"},
            {"api": "x", "label": "Yes", "app": "q", "loc": "q"},
            {"api": "z", "label": "No", "app": "p", "loc": "p"},
        ]
        data = tiny_dataset(rows)
        for method in METHODS:
            scores = rank_all(data, method, params={"k": 1}).scores
            assert scores["app_name"] == pytest.approx(scores["location"], abs=1e-12)

    def test_order_is_permutation_of_features(self, default_dataset):
        for method in METHODS:
            ranking = rank_all(default_dataset, method)
            assert sorted(ranking.order) == sorted(FEATURES)

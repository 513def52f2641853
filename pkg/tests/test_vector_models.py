"""SVM / evolutionary SVM / neural-net specifics: kernels, GA accounting,
gradient correctness."""

import math

import numpy as np
import pytest

from bridgeguard.datagen import encode, fit_encoder, generate
from bridgeguard.learners import ClassifierSpec, TrainingError, train
from bridgeguard.learners.evolutionary import EPOCH_RANGE, LOG_LAM_RANGE
from bridgeguard.learners.mlp import forward, gradients, init_params, loss
from bridgeguard.learners.svm import (
    epoch_order,
    pegasos_kernel,
    signed_labels,
    sparse_columns,
)
from conftest import make_sample
from oracles import pegasos_dense


@pytest.fixture(scope="module")
def small_dataset():
    return generate(24, attack_ratio=0.5, noise=0.0, seed=8)


class TestPegasos:
    def test_kernel_matches_dense_reference(self, small_dataset):
        enc = fit_encoder(small_dataset)
        cols = sparse_columns(enc, small_dataset.samples)
        ys = signed_labels(small_dataset)
        lam = 0.05
        order = epoch_order(len(small_dataset.samples), 3, seed=2)
        got = pegasos_kernel(cols, ys, order, lam, enc.width)

        dense = encode(enc, small_dataset).matrix.tolist()
        want = pegasos_dense(dense, ys.tolist(), order.tolist(), lam)
        assert np.allclose(got, np.array(want), atol=1e-9)

    def test_scale_trick_renormalization_is_transparent(self, small_dataset):
        # tiny lambda pushes the running scale below the renorm threshold;
        # the returned weights must still match the plain reference
        enc = fit_encoder(small_dataset)
        cols = sparse_columns(enc, small_dataset.samples)
        ys = signed_labels(small_dataset)
        lam = 1e-8
        order = epoch_order(len(small_dataset.samples), 2, seed=3)
        got = pegasos_kernel(cols, ys, order, lam, enc.width)
        dense = encode(enc, small_dataset).matrix.tolist()
        want = np.array(pegasos_dense(dense, ys.tolist(), order.tolist(), lam))
        assert np.allclose(got, want, rtol=1e-9, atol=1e-9)

    def test_epoch_order_deterministic_and_complete(self):
        a = epoch_order(7, 3, seed=5)
        b = epoch_order(7, 3, seed=5)
        assert (a == b).all()
        assert len(a) == 21
        for e in range(3):
            assert sorted(a[7 * e : 7 * (e + 1)].tolist()) == list(range(7))

    def test_margin_zero_scores_half(self, small_dataset):
        model = train(ClassifierSpec(kind="SVM", hyperparameters={"epochs": 5}), small_dataset)
        fresh = make_sample("u1", app="u2", perm="NEVER_SEEN", site="u3", ip="9.9.9.9", loc="ZZ")
        # every feature lands on an unseen column, which no training step
        # ever touched, so the margin is exactly zero
        assert model.margin(fresh) == 0.0
        assert model.score(fresh) == 0.5
        assert model.predict(fresh) == "Yes"

    def test_score_is_sigmoid_of_margin(self, small_dataset):
        model = train(ClassifierSpec(kind="SVM"), small_dataset)
        for s in small_dataset.samples[:5]:
            m = model.margin(s)
            assert model.score(s) == pytest.approx(1.0 / (1.0 + math.exp(-m)))

    def test_separable_data_trains_to_high_accuracy(self, small_dataset):
        model = train(ClassifierSpec(kind="SVM"), small_dataset)
        right = sum(model.predict(s) == s.label for s in small_dataset.samples)
        assert right >= 22  # 24 noise-free samples

    def test_bad_hyperparameters_rejected(self, small_dataset):
        with pytest.raises(TrainingError):
            train(ClassifierSpec(kind="SVM", hyperparameters={"lam": 0.0}), small_dataset)
        with pytest.raises(TrainingError):
            train(ClassifierSpec(kind="SVM", hyperparameters={"epochs": 0}), small_dataset)


@pytest.fixture(scope="module")
def esvm(small_dataset):
    spec = ClassifierSpec(
        kind="ESVM", hyperparameters={"population": 4, "generations": 3}, seed=5
    )
    return train(spec, small_dataset)


class TestEvolutionarySVM:
    def test_evaluation_count_accounts_for_elite_carry(self, esvm):
        # generation 0 scores the full population; each later generation
        # re-scores everyone except the carried elite
        assert esvm.evaluations == 4 + 2 * (4 - 1)

    def test_genome_within_search_ranges(self, esvm):
        assert LOG_LAM_RANGE[0] <= esvm.genome.log_lam <= LOG_LAM_RANGE[1]
        assert EPOCH_RANGE[0] <= esvm.genome.epochs <= EPOCH_RANGE[1]
        assert esvm.genome.lam == pytest.approx(10.0 ** esvm.genome.log_lam)

    def test_history_is_monotone_best_fitness(self, esvm):
        assert len(esvm.history) == 3
        assert all(0.0 <= h <= 1.0 for h in esvm.history)
        assert all(b >= a - 1e-12 for a, b in zip(esvm.history, esvm.history[1:]))

    def test_deterministic_under_seed(self, small_dataset, esvm):
        spec = ClassifierSpec(
            kind="ESVM", hyperparameters={"population": 4, "generations": 3}, seed=5
        )
        again = train(spec, small_dataset)
        assert again.genome == esvm.genome
        assert again.scores(small_dataset.samples) == esvm.scores(small_dataset.samples)

    def test_population_must_be_at_least_two(self, small_dataset):
        spec = ClassifierSpec(kind="ESVM", hyperparameters={"population": 1})
        with pytest.raises(TrainingError):
            train(spec, small_dataset)

    def test_final_model_is_a_working_svm(self, esvm, small_dataset):
        right = sum(esvm.predict(s) == s.label for s in small_dataset.samples)
        assert right >= 20


class TestNeuralNet:
    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(11)
        width, hidden, n = 9, 4, 5
        params = init_params(width, hidden, seed=3)
        x = (rng.random((n, width)) < 0.4).astype(float)
        y = rng.integers(0, 2, size=n).astype(float)
        analytic = gradients(params, x, y)
        h = 1e-5
        for key in params:
            flat = params[key].reshape(-1)
            for idx in range(flat.size):
                orig = flat[idx]
                flat[idx] = orig + h
                up = loss(params, x, y)
                flat[idx] = orig - h
                down = loss(params, x, y)
                flat[idx] = orig
                numeric = (up - down) / (2 * h)
                got = analytic[key].reshape(-1)[idx]
                assert got == pytest.approx(numeric, rel=1e-4, abs=1e-8), key

    def test_training_reduces_loss(self, small_dataset):
        enc = fit_encoder(small_dataset)
        encoded = encode(enc, small_dataset)
        y = encoded.labels.astype(float)
        start = init_params(enc.width, 16, seed=4)
        before = loss(start, encoded.matrix, y)
        model = train(
            ClassifierSpec(kind="NeuralNet", hyperparameters={"epochs": 60}, seed=4),
            small_dataset,
        )
        after = loss(model.net, encoded.matrix, y)
        assert after < before

    def test_forward_outputs_probabilities(self):
        params = init_params(6, 3, seed=0)
        x = np.eye(6)
        out = forward(params, x)
        assert out.shape == (6,)
        assert ((0.0 < out) & (out < 1.0)).all()

    def test_batch_scores_match_single_scores(self, small_dataset):
        model = train(
            ClassifierSpec(kind="NeuralNet", hyperparameters={"epochs": 3}), small_dataset
        )
        probes = small_dataset.samples[:6]
        assert model.scores(probes) == pytest.approx([model.score(s) for s in probes])

    def test_loss_is_stable_for_extreme_logits(self):
        params = init_params(4, 2, seed=1)
        params["w2"] = params["w2"] * 1e4  # drive |z2| into overflow territory
        x = np.ones((3, 4))
        y = np.array([1.0, 0.0, 1.0])
        value = loss(params, x, y)
        assert math.isfinite(value)

    def test_bad_hyperparameters_rejected(self, small_dataset):
        with pytest.raises(TrainingError):
            train(ClassifierSpec(kind="NeuralNet", hyperparameters={"lr": 0.0}), small_dataset)

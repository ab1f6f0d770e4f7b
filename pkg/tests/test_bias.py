"""Distribution bias, ensemble composition and inverse supervision."""

import numpy as np
import pytest

from ggebench.benchmark.dataset import summarize_priors
from ggebench.core.errors import ConfigError, DatasetError
from ggebench.ensemble.bias import (
    DistributionBiasTable,
    compose_ensemble,
    distribution_bias_from_labels,
    fit_distribution_bias,
    pseudo_targets,
)
from ggebench.ensemble.inverse import inverse_supervision_round, non_empty, top_n_answers

pytestmark = pytest.mark.unit


class TestDistributionBias:
    def test_counting(self):
        labels = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        table = distribution_bias_from_labels(np.zeros(3, dtype=int), labels, 1)
        np.testing.assert_allclose(table.table[0], [2 / 3, 1 / 3])

    def test_single_instance(self):
        table = distribution_bias_from_labels(np.array([0]), np.array([[0.0, 1.0, 0.0]]), 1)
        np.testing.assert_array_equal(table.table[0], [0.0, 1.0, 0.0])

    def test_soft_labels(self):
        labels = np.array([[0.9, 0.3], [0.3, 0.9]])
        table = distribution_bias_from_labels(np.zeros(2, dtype=int), labels, 1)
        np.testing.assert_allclose(table.table[0], [0.5, 0.5])

    def test_empty_type_is_named(self):
        with pytest.raises(DatasetError, match="Type 1") as excinfo:
            distribution_bias_from_labels(np.array([0, 0]), np.eye(2), 2)
        assert excinfo.value.details["empty_types"] == [1]

    def test_empty_dataset(self):
        with pytest.raises(DatasetError):
            distribution_bias_from_labels(np.zeros(0, dtype=int), np.zeros((0, 3)), 1)

    def test_matches_brute_force_recount(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            T, C = int(rng.integers(1, 5)), int(rng.integers(2, 8))
            n = int(rng.integers(T, 1000))
            types = np.concatenate([np.arange(T), rng.integers(0, T, size=n - T)])
            labels = np.where(rng.random((n, C)) < 0.3, rng.random((n, C)), 0.0)
            labels[np.arange(n), rng.integers(0, C, size=n)] = 1.0

            expected = np.zeros((T, C))
            for t, row in zip(types, labels):
                for c in range(C):
                    expected[t, c] += row[c]
            for t in range(T):
                expected[t] /= sum(expected[t])

            table = distribution_bias_from_labels(types, labels, T)
            assert np.max(np.abs(table.table - expected)) <= 1e-12
            np.testing.assert_allclose(table.table.sum(axis=1), 1.0, atol=1e-9)

    def test_fit_matches_summarize_priors(self, tiny_train):
        np.testing.assert_array_equal(
            fit_distribution_bias(tiny_train).table, summarize_priors(tiny_train)
        )

    def test_dict_round_trip(self):
        table = DistributionBiasTable(np.array([[0.25, 0.75], [0.5, 0.5]]))
        restored = DistributionBiasTable.from_dict(table.to_dict())
        np.testing.assert_array_equal(restored.table, table.table)
        np.testing.assert_array_equal(restored.rows(np.array([1, 0])), table.table[[1, 0]])


class TestComposeEnsemble:
    def test_distribution_only(self):
        row = np.array([0.7, 0.3])
        np.testing.assert_array_equal(compose_ensemble("gge-d", row), row)

    def test_shortcut_only(self):
        H = compose_ensemble("gge-q", biased_logits=np.zeros(2))
        np.testing.assert_allclose(H, [0.5, 0.5])

    def test_distribution_plus_shortcut(self):
        H = compose_ensemble("gge-dq", np.array([0.7, 0.3]), np.array([2.0, -2.0]))
        np.testing.assert_allclose(H, [1.5808, 0.4192], atol=1e-4)

    def test_self_variants(self):
        logits = np.array([[0.0, 1.0]])
        np.testing.assert_allclose(compose_ensemble("gge-sf", None, logits), [[0.5, 0.7310586]])
        H = compose_ensemble("gge-d-sf", np.array([[0.1, 0.9]]), logits)
        np.testing.assert_allclose(H, [[0.6, 1.6310586]], atol=1e-7)

    def test_softmax_family_uses_probabilities(self):
        H = compose_ensemble("gge-q", biased_logits=np.zeros(4), family="sxce")
        np.testing.assert_allclose(H, 0.25)
        row = np.array([0.1, 0.2, 0.3, 0.4])
        np.testing.assert_array_equal(compose_ensemble("gge-d", row, family="sxce"), row)

    @pytest.mark.parametrize(
        "variant,row,logits",
        [
            ("gge-d", None, np.zeros(2)),
            ("gge-q", np.ones(2), None),
            ("gge-dq", np.ones(2), None),
            ("gge-dq", None, np.zeros(2)),
        ],
    )
    def test_missing_component(self, variant, row, logits):
        with pytest.raises(ConfigError, match="missing"):
            compose_ensemble(variant, row, logits)

    def test_variant_without_ensemble(self):
        with pytest.raises(ConfigError):
            compose_ensemble("baseline", np.ones(2), np.zeros(2))

    def test_pseudo_targets_dispatch(self):
        y = np.array([[1.0, 0.0]])
        H = np.array([[0.7, 0.3]])
        np.testing.assert_allclose(pseudo_targets("sxce", y, H), [[0.3, 0.0]])
        np.testing.assert_allclose(
            pseudo_targets("bce", y, H), [[2.0 / (1.0 + np.exp(1.4)), 0.0]]
        )

    def test_shortcut_fitting_labels_yields_small_targets(self):
        # sigmoid(B) close to the label on the support: H near 1 on positives
        y = np.array([[1.0, 0.0, 0.0]])
        H = compose_ensemble("gge-q", biased_logits=np.array([[12.0, -12.0, -12.0]]))
        targets = pseudo_targets("bce", y, H)
        assert targets[0, 0] == pytest.approx(2.0 / (1.0 + np.exp(2.0 * H[0, 0])))
        assert np.all(targets[0, 1:] == 0.0)


class TestInverseSupervision:
    def test_drop_top_answer(self):
        labels = np.array([1.0, 1.0, 0.0])
        reduced = inverse_supervision_round(labels, np.array([0.6, 0.3, 0.1]), 1)
        np.testing.assert_array_equal(reduced, [0.0, 1.0, 0.0])

    def test_single_label_becomes_empty(self):
        labels = np.array([[0.0, 1.0]])
        reduced = inverse_supervision_round(labels, np.array([[0.2, 0.8]]), 1)
        assert not non_empty(reduced)[0]

    def test_top_two(self):
        labels = np.array([1.0, 1.0, 1.0, 0.0])
        reduced = inverse_supervision_round(labels, np.array([0.5, 0.1, 0.05, 0.35]), 2)
        np.testing.assert_array_equal(reduced, [0.0, 1.0, 1.0, 0.0])

    def test_ties_prefer_lower_index(self):
        np.testing.assert_array_equal(top_n_answers(np.array([0.4, 0.4, 0.2]), 1), [[0]])

    def test_input_untouched(self):
        labels = np.array([1.0, 1.0])
        inverse_supervision_round(labels, np.array([0.9, 0.1]))
        np.testing.assert_array_equal(labels, [1.0, 1.0])

    def test_n_must_be_positive(self):
        with pytest.raises(ValueError):
            inverse_supervision_round(np.ones(2), np.ones(2) / 2, 0)

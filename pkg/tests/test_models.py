"""Forward passes traced by hand, invariances and cache checks."""

import math

import numpy as np
import pytest

from ggebench.core.errors import CacheError, ShapeError
from ggebench.models.instance import Batch, Instance
from ggebench.models.networks import (
    AttentionNet,
    ContextBranch,
    EvidenceNet,
    LinearHead,
    forward_base,
    forward_context_branch,
    forward_evidence_only,
    forward_self_head,
)
from ggebench.nn.optim import OptimizerState, adamax_step
from ggebench.nn.params import Params

pytestmark = pytest.mark.unit


def filled(network, value: float) -> Params:
    return Params({name: np.full(shape, value) for name, shape in network.arch.shapes().items()})


def instance(evidence, context, n_classes=2) -> Instance:
    evidence = np.asarray(evidence, dtype=float)
    return Instance(
        evidence=evidence,
        context=np.asarray(context, dtype=float),
        type_id=0,
        label=np.eye(n_classes)[0],
        grounding_mask=np.eye(evidence.shape[0])[0],
    )


def random_batch(rng, n=5, n_v=4, d_v=3, d_q=3, c=4) -> Batch:
    return Batch(
        evidence=rng.normal(size=(n, n_v, d_v)),
        context=rng.normal(size=(n, d_q)),
        type_ids=np.zeros(n, dtype=np.int64),
        labels=np.zeros((n, c)),
        masks=np.zeros((n, n_v)),
    )


class TestAttentionNet:
    def test_attention_is_a_distribution(self):
        rng = np.random.default_rng(0)
        net = AttentionNet(3, 3, 6, 4)
        out = net.forward(net.init(0), random_batch(rng))
        assert out.logits.shape == (5, 4)
        np.testing.assert_allclose(out.attention.sum(axis=1), 1.0, atol=1e-6)
        assert np.all(out.attention >= 0)

    def test_identical_regions_give_uniform_attention(self):
        net = AttentionNet(3, 3, 6, 4)
        region = np.array([0.3, -1.0, 2.0])
        inst = instance(np.tile(region, (5, 1)), [1.0, 0.5, -0.5], n_classes=4)
        out = net.forward(net.init(1), inst)
        np.testing.assert_allclose(out.attention[0], np.full(5, 0.2))

    def test_hand_traced_forward(self):
        net = AttentionNet(2, 2, 2, 2)
        inst = instance([[1.0, 2.0], [3.0, 4.0]], [1.0, 0.0])
        out = forward_base(filled(net, 0.1), inst)

        q = 0.1 * 1.0 + 0.1  # each entry of relu(W_q c + b)
        za1 = 0.1 * (1.0 * q + 2.0 * q) + 0.1
        za2 = 0.1 * (3.0 * q + 4.0 * q) + 0.1
        s1, s2 = 0.1 * 2 * za1, 0.1 * 2 * za2
        a2 = 1.0 / (1.0 + math.exp(s1 - s2))
        a1 = 1.0 - a2
        vhat = (a1 * 1.0 + a2 * 3.0, a1 * 2.0 + a2 * 4.0)
        zv = 0.1 * sum(vhat) + 0.1
        zf = 0.1 * 1.0 + 0.1
        r = zv * zf
        z1 = 0.1 * 2 * r + 0.1
        logit = 0.1 * 2 * z1 + 0.1

        np.testing.assert_allclose(out.attention[0], [a1, a2], rtol=1e-12)
        np.testing.assert_allclose(out.joint_repr[0], [r, r], rtol=1e-12)
        np.testing.assert_allclose(out.logits[0], [logit, logit], rtol=1e-12)

    def test_wrong_evidence_dim(self):
        net = AttentionNet(3, 3, 6, 4)
        with pytest.raises(ShapeError):
            net.forward(net.init(0), random_batch(np.random.default_rng(0), d_v=2))

    def test_wrong_region_count(self):
        net = AttentionNet(3, 3, 6, 4, n_regions=8)
        with pytest.raises(ShapeError):
            net.forward(net.init(0), random_batch(np.random.default_rng(0), n_v=4))


class TestContextBranch:
    def test_ignores_evidence(self):
        net = ContextBranch(3, 5, 4)
        params = net.init(0)
        rng = np.random.default_rng(2)
        batch = random_batch(rng)
        other = Batch(
            rng.normal(size=batch.evidence.shape),
            batch.context,
            batch.type_ids,
            batch.labels,
            batch.masks,
        )
        np.testing.assert_array_equal(
            net.forward(params, batch).logits, net.forward(params, other).logits
        )

    def test_zero_weights_give_final_bias(self):
        net = ContextBranch(2, 3, 2)
        params = filled(net, 0.0)
        params["qonly_out.bias"] = np.array([0.25, -1.5])
        logits = forward_context_branch(params, instance([[1.0, 1.0]], [4.0, -2.0]))
        np.testing.assert_array_equal(logits[0], [0.25, -1.5])

    def test_hand_traced(self):
        net = ContextBranch(2, 2, 2)
        params = Params(
            {
                "qonly_hidden.weight": np.array([[1.0, -1.0], [0.5, 2.0]]),
                "qonly_hidden.bias": np.array([0.0, -1.0]),
                "qonly_out.weight": np.array([[1.0, 1.0], [2.0, -1.0]]),
                "qonly_out.bias": np.array([0.5, 0.0]),
            }
        )
        # hidden = relu((1 - 2, 0.5 + 4 - 1)) = (0, 3.5)
        logits = forward_context_branch(params, instance([[0.0, 0.0]], [1.0, 2.0]))
        np.testing.assert_allclose(logits[0], [4.0, -3.5])


class TestEvidenceNet:
    def test_ignores_context(self):
        net = EvidenceNet(3, 5, 4)
        params = net.init(0)
        rng = np.random.default_rng(3)
        batch = random_batch(rng)
        other = Batch(
            batch.evidence,
            rng.normal(size=batch.context.shape),
            batch.type_ids,
            batch.labels,
            batch.masks,
        )
        np.testing.assert_array_equal(
            net.forward(params, batch).logits, net.forward(params, other).logits
        )

    def test_single_region_pooling_is_identity(self):
        net = EvidenceNet(2, 3, 2)
        params = net.init(4)
        v = np.array([0.7, -0.2])
        hidden = np.maximum(params["vo_hidden.weight"] @ v + params["vo_hidden.bias"], 0.0)
        expected = params["vo_out.weight"] @ hidden + params["vo_out.bias"]
        logits = forward_evidence_only(params, instance([v], [0.0, 0.0]))
        np.testing.assert_allclose(logits[0], expected)

    def test_hand_traced(self):
        net = EvidenceNet(2, 1, 1)
        params = Params(
            {
                "vo_hidden.weight": np.array([[1.0, 1.0]]),
                "vo_hidden.bias": np.array([0.5]),
                "vo_out.weight": np.array([[2.0]]),
                "vo_out.bias": np.array([-1.0]),
            }
        )
        # mean region (2, 3) -> hidden 5.5 -> logit 10
        logits = forward_evidence_only(params, instance([[1.0, 2.0], [3.0, 4.0]], [0.0, 0.0], 1))
        assert logits[0, 0] == pytest.approx(10.0)

    def test_reports_uniform_attention(self):
        net = EvidenceNet(3, 5, 4)
        out = net.forward(net.init(0), random_batch(np.random.default_rng(0)))
        np.testing.assert_allclose(out.attention, 0.25)


class TestSelfHead:
    def test_zero_weights(self):
        head = LinearHead("self", 3, 2)
        logits = forward_self_head(filled(head, 0.0), np.array([1.0, 2.0, 3.0]))
        np.testing.assert_array_equal(logits, [[0.0, 0.0]])

    def test_zero_input_gives_bias(self):
        head = LinearHead("self", 3, 2)
        params = head.init(0)
        params["self.out.bias"] = np.array([0.1, -0.4])
        np.testing.assert_array_equal(forward_self_head(params, np.zeros(3))[0], [0.1, -0.4])

    def test_hand_traced(self):
        params = Params(
            {
                "self.out.weight": np.array([[1.0, 0.0, -1.0], [0.5, 0.5, 0.5]]),
                "self.out.bias": np.array([0.0, 1.0]),
            }
        )
        logits = forward_self_head(params, np.array([2.0, 4.0, 1.0]))
        np.testing.assert_allclose(logits[0], [1.0, 4.5])

    def test_head_training_leaves_base_untouched(self):
        rng = np.random.default_rng(5)
        base = AttentionNet(3, 3, 6, 4)
        base_params = base.init(0)
        snapshot = base_params.copy()
        head = LinearHead("self", 6, 4)
        head_params = head.init(1)

        out = base.forward(base_params, random_batch(rng))
        head_out = head.forward(head_params, out.joint_repr)
        grads = head.backward(head_params, head_out.cache, np.ones_like(head_out.logits))
        adamax_step(OptimizerState.for_params(head_params), head_params, grads)
        assert base_params.equals(snapshot)


class TestCaches:
    def test_stale_cache_rejected(self):
        net = ContextBranch(3, 5, 4)
        params = net.init(0)
        out = net.forward(params, random_batch(np.random.default_rng(0)))
        params.touch()
        with pytest.raises(CacheError):
            net.backward(params, out.cache, np.zeros_like(out.logits))

    def test_cache_from_other_network_rejected(self):
        context, evidence = ContextBranch(3, 5, 4), EvidenceNet(3, 5, 4)
        out = context.forward(context.init(0), random_batch(np.random.default_rng(0)))
        with pytest.raises(CacheError):
            evidence.backward(evidence.init(0), out.cache, np.zeros_like(out.logits))

    def test_zero_upstream_gradient(self):
        net = AttentionNet(3, 3, 6, 4)
        params = net.init(0)
        out = net.forward(params, random_batch(np.random.default_rng(0)))
        grads = net.backward(params, out.cache, np.zeros_like(out.logits))
        assert all(not value.any() for _, value in grads.items())

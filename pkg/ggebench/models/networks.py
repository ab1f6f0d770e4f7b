"""Forward and manual backward passes for the fixed architectures."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ggebench.core.errors import CacheError, ShapeError
from ggebench.models.architecture import (
    attention_architecture,
    context_architecture,
    evidence_architecture,
    head_architecture,
)
from ggebench.models.instance import Batch, Instance
from ggebench.nn.layers import (
    linear_backward,
    linear_forward,
    relu,
    relu_backward,
    softmax,
    softmax_backward,
)
from ggebench.nn.params import ArchitectureSpec, ParamGrads, Params, init_params


@dataclass
class ForwardCache:
    """Activations recorded by a forward pass, tied to the params that made them."""

    network: str
    params_id: int
    params_version: int
    tensors: dict[str, np.ndarray]
    relu_inputs: tuple[str, ...] = ()

    def activation_pattern(self) -> bytes:
        """Signature of every ReLU on/off state; changes when a kink is crossed."""
        return b"".join((self.tensors[name] > 0).tobytes() for name in self.relu_inputs)


@dataclass
class Forward:
    logits: np.ndarray
    cache: ForwardCache


@dataclass
class BaseForward(Forward):
    """Base-model output: logits, attention over regions and the fused representation."""

    attention: np.ndarray = field(default_factory=lambda: np.zeros(0))
    joint_repr: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _as_batch(inputs: Batch | Instance) -> Batch:
    return Batch.of(inputs) if isinstance(inputs, Instance) else inputs


class Network(ABC):
    """A fixed architecture with hand-written backpropagation."""

    relu_inputs: tuple[str, ...] = ()

    def __init__(self, arch: ArchitectureSpec):
        self.arch = arch

    @property
    def name(self) -> str:
        return self.arch.name

    def init(self, seed: int) -> Params:
        return init_params(self.arch, seed)

    @abstractmethod
    def forward(self, params: Params, inputs: Any) -> Forward:
        """Run the network on a batch (or a single instance)."""

    @abstractmethod
    def _backward(self, params: Params, cache: ForwardCache, grad_logits: np.ndarray) -> ParamGrads:
        pass

    def backward(self, params: Params, cache: ForwardCache, grad_logits: np.ndarray) -> ParamGrads:
        """Exact gradients of a loss whose logit-gradient is ``grad_logits``."""
        if cache.network != self.name:
            raise CacheError(
                f"Cache from '{cache.network}' passed to '{self.name}' backward",
                {"expected": self.name, "found": cache.network},
            )
        if cache.params_id != id(params) or cache.params_version != params.version:
            raise CacheError(
                f"Stale cache for '{self.name}': parameters changed since the forward pass",
                {"cached_version": cache.params_version, "current_version": params.version},
            )
        logits = cache.tensors["logits"]
        grad_logits = np.asarray(grad_logits, dtype=np.float64).reshape(logits.shape)
        return self._backward(params, cache, grad_logits)

    def _cache(self, params: Params, **tensors: np.ndarray) -> ForwardCache:
        return ForwardCache(
            network=self.name,
            params_id=id(params),
            params_version=params.version,
            tensors=tensors,
            relu_inputs=self.relu_inputs,
        )


class AttentionNet(Network):
    """Attention-pooling base model.

    q' = relu(W_q c); s_i = w . relu(W_a (v_i * q')); a = softmax(s);
    r = relu(W_v sum_i a_i v_i) * relu(W_f c); logits = W_2 relu(W_1 r)
    """

    relu_inputs = ("zq", "za", "zv", "zf", "z1")

    def __init__(
        self,
        evidence_dim: int,
        context_dim: int,
        hidden_dim: int,
        num_classes: int,
        n_regions: int | None = None,
    ):
        super().__init__(attention_architecture(evidence_dim, context_dim, hidden_dim, num_classes))
        self.evidence_dim = evidence_dim
        self.context_dim = context_dim
        self.n_regions = n_regions

    @classmethod
    def from_params(cls, params: Params) -> "AttentionNet":
        d_v, d_q = params["q_proj.weight"].shape
        hidden = params["att_hidden.weight"].shape[0]
        classes = params["cls_out.weight"].shape[0]
        return cls(d_v, d_q, hidden, classes)

    def _check(self, batch: Batch) -> None:
        if batch.evidence.ndim != 3 or batch.evidence.shape[2] != self.evidence_dim:
            raise ShapeError("evidence", f"(B, n_v, {self.evidence_dim})", batch.evidence.shape)
        if self.n_regions is not None and batch.evidence.shape[1] != self.n_regions:
            raise ShapeError("evidence regions", self.n_regions, batch.evidence.shape[1])
        if batch.context.shape[1:] != (self.context_dim,):
            raise ShapeError("context", (self.context_dim,), batch.context.shape[1:])

    def forward(self, params: Params, inputs: Batch | Instance) -> BaseForward:
        batch = _as_batch(inputs)
        self._check(batch)
        V, ctx = batch.evidence, batch.context

        zq = linear_forward(params["q_proj.weight"], params["q_proj.bias"], ctx)
        qp = relu(zq)
        X = V * qp[:, None, :]
        za = linear_forward(params["att_hidden.weight"], params["att_hidden.bias"], X)
        ha = relu(za)
        scores = linear_forward(params["att_score.weight"], None, ha)[..., 0]
        alpha = softmax(scores, axis=1)
        vhat = np.einsum("bn,bnd->bd", alpha, V)
        zv = linear_forward(params["v_proj.weight"], params["v_proj.bias"], vhat)
        zf = linear_forward(params["q_fuse.weight"], params["q_fuse.bias"], ctx)
        pv, pf = relu(zv), relu(zf)
        r = pv * pf
        z1 = linear_forward(params["cls_hidden.weight"], params["cls_hidden.bias"], r)
        a1 = relu(z1)
        logits = linear_forward(params["cls_out.weight"], params["cls_out.bias"], a1)

        tensors = {
            "V": V,
            "ctx": ctx,
            "zq": zq,
            "qp": qp,
            "X": X,
            "za": za,
            "ha": ha,
            "alpha": alpha,
            "vhat": vhat,
            "zv": zv,
            "zf": zf,
            "pv": pv,
            "pf": pf,
            "r": r,
            "z1": z1,
            "a1": a1,
            "logits": logits,
        }
        cache = self._cache(params, **tensors)
        return BaseForward(logits=logits, cache=cache, attention=alpha, joint_repr=r)

    def _backward(self, params: Params, cache: ForwardCache, grad_logits: np.ndarray) -> ParamGrads:
        t = cache.tensors
        grads = params.zeros_like()

        grads["cls_out.weight"], grads["cls_out.bias"], d_a1 = linear_backward(
            params["cls_out.weight"], t["a1"], grad_logits
        )
        d_z1 = relu_backward(t["z1"], d_a1)
        grads["cls_hidden.weight"], grads["cls_hidden.bias"], d_r = linear_backward(
            params["cls_hidden.weight"], t["r"], d_z1
        )

        d_zv = relu_backward(t["zv"], d_r * t["pf"])
        d_zf = relu_backward(t["zf"], d_r * t["pv"])
        grads["v_proj.weight"], grads["v_proj.bias"], d_vhat = linear_backward(
            params["v_proj.weight"], t["vhat"], d_zv
        )
        grads["q_fuse.weight"], grads["q_fuse.bias"], d_ctx = linear_backward(
            params["q_fuse.weight"], t["ctx"], d_zf
        )

        V, alpha = t["V"], t["alpha"]
        d_alpha = np.einsum("bd,bnd->bn", d_vhat, V)
        d_V = alpha[:, :, None] * d_vhat[:, None, :]
        d_scores = softmax_backward(alpha, d_alpha, axis=1)

        grads["att_score.weight"], _, d_ha = linear_backward(
            params["att_score.weight"], t["ha"], d_scores[..., None]
        )
        d_za = relu_backward(t["za"], d_ha)
        grads["att_hidden.weight"], grads["att_hidden.bias"], d_X = linear_backward(
            params["att_hidden.weight"], t["X"], d_za
        )
        d_V = d_V + d_X * t["qp"][:, None, :]
        d_qp = np.sum(d_X * V, axis=1)
        d_zq = relu_backward(t["zq"], d_qp)
        grads["q_proj.weight"], grads["q_proj.bias"], d_ctx_q = linear_backward(
            params["q_proj.weight"], t["ctx"], d_zq
        )
        return ParamGrads(grads, {"evidence": d_V, "context": d_ctx + d_ctx_q})


class ContextBranch(Network):
    """Context-only branch: two fully-connected layers with ReLU."""

    relu_inputs = ("z1",)

    def __init__(self, context_dim: int, hidden_dim: int, num_classes: int):
        super().__init__(context_architecture(context_dim, hidden_dim, num_classes))
        self.context_dim = context_dim

    @classmethod
    def from_params(cls, params: Params) -> "ContextBranch":
        hidden, d_q = params["qonly_hidden.weight"].shape
        return cls(d_q, hidden, params["qonly_out.weight"].shape[0])

    def forward(self, params: Params, inputs: Batch | Instance) -> Forward:
        ctx = _as_batch(inputs).context
        if ctx.shape[1:] != (self.context_dim,):
            raise ShapeError("context", (self.context_dim,), ctx.shape[1:])
        z1 = linear_forward(params["qonly_hidden.weight"], params["qonly_hidden.bias"], ctx)
        a1 = relu(z1)
        logits = linear_forward(params["qonly_out.weight"], params["qonly_out.bias"], a1)
        return Forward(logits, self._cache(params, ctx=ctx, z1=z1, a1=a1, logits=logits))

    def _backward(self, params: Params, cache: ForwardCache, grad_logits: np.ndarray) -> ParamGrads:
        t = cache.tensors
        grads = params.zeros_like()
        grads["qonly_out.weight"], grads["qonly_out.bias"], d_a1 = linear_backward(
            params["qonly_out.weight"], t["a1"], grad_logits
        )
        d_z1 = relu_backward(t["z1"], d_a1)
        grads["qonly_hidden.weight"], grads["qonly_hidden.bias"], d_ctx = linear_backward(
            params["qonly_hidden.weight"], t["ctx"], d_z1
        )
        return ParamGrads(grads, {"context": d_ctx})


class EvidenceNet(Network):
    """Evidence-only variant: mean-pooled regions into a 2-layer classifier."""

    relu_inputs = ("z1",)

    def __init__(self, evidence_dim: int, hidden_dim: int, num_classes: int):
        super().__init__(evidence_architecture(evidence_dim, hidden_dim, num_classes))
        self.evidence_dim = evidence_dim

    @classmethod
    def from_params(cls, params: Params) -> "EvidenceNet":
        hidden, d_v = params["vo_hidden.weight"].shape
        return cls(d_v, hidden, params["vo_out.weight"].shape[0])

    def forward(self, params: Params, inputs: Batch | Instance) -> BaseForward:
        V = _as_batch(inputs).evidence
        if V.ndim != 3 or V.shape[2] != self.evidence_dim:
            raise ShapeError("evidence", f"(B, n_v, {self.evidence_dim})", V.shape)
        n_regions = V.shape[1]
        pooled = V.mean(axis=1)
        z1 = linear_forward(params["vo_hidden.weight"], params["vo_hidden.bias"], pooled)
        a1 = relu(z1)
        logits = linear_forward(params["vo_out.weight"], params["vo_out.bias"], a1)
        cache = self._cache(params, V=V, pooled=pooled, z1=z1, a1=a1, logits=logits)
        uniform = np.full(V.shape[:2], 1.0 / n_regions)
        return BaseForward(logits=logits, cache=cache, attention=uniform, joint_repr=a1)

    def _backward(self, params: Params, cache: ForwardCache, grad_logits: np.ndarray) -> ParamGrads:
        t = cache.tensors
        grads = params.zeros_like()
        grads["vo_out.weight"], grads["vo_out.bias"], d_a1 = linear_backward(
            params["vo_out.weight"], t["a1"], grad_logits
        )
        d_z1 = relu_backward(t["z1"], d_a1)
        grads["vo_hidden.weight"], grads["vo_hidden.bias"], d_pooled = linear_backward(
            params["vo_hidden.weight"], t["pooled"], d_z1
        )
        n_regions = t["V"].shape[1]
        d_V = np.repeat(d_pooled[:, None, :] / n_regions, n_regions, axis=1)
        return ParamGrads(grads, {"evidence": d_V})


class LinearHead(Network):
    """Single linear classifier over a feature vector.

    Used as the self-ensemble head on the joint representation and as the
    RUBi classifier over the mask logits. The input is copied on entry, so
    gradients never reach whatever produced it.
    """

    def __init__(self, name: str, in_features: int, num_classes: int):
        super().__init__(head_architecture(name, in_features, num_classes))
        self.in_features = in_features
        self._w = f"{name}.out.weight"
        self._b = f"{name}.out.bias"

    @classmethod
    def from_params(cls, params: Params) -> "LinearHead":
        weight_name = next(iter(params))
        classes, in_features = params[weight_name].shape
        return cls(weight_name.split(".")[0], in_features, classes)

    def forward(self, params: Params, inputs: np.ndarray) -> Forward:
        features = np.array(inputs, dtype=np.float64, copy=True)
        if features.ndim == 1:
            features = features[None, :]
        if features.shape[1:] != (self.in_features,):
            raise ShapeError(f"{self.name} input", (self.in_features,), features.shape[1:])
        logits = linear_forward(params[self._w], params[self._b], features)
        return Forward(logits, self._cache(params, features=features, logits=logits))

    def _backward(self, params: Params, cache: ForwardCache, grad_logits: np.ndarray) -> ParamGrads:
        grads = params.zeros_like()
        grads[self._w], grads[self._b], d_in = linear_backward(
            params[self._w], cache.tensors["features"], grad_logits
        )
        return ParamGrads(grads, {"features": d_in})


def forward_base(params: Params, inst: Batch | Instance) -> BaseForward:
    return AttentionNet.from_params(params).forward(params, inst)


def forward_context_branch(params: Params, inst: Batch | Instance) -> np.ndarray:
    return ContextBranch.from_params(params).forward(params, inst).logits


def forward_evidence_only(params: Params, inst: Batch | Instance) -> np.ndarray:
    return EvidenceNet.from_params(params).forward(params, inst).logits


def forward_self_head(params: Params, joint_repr: np.ndarray) -> np.ndarray:
    return LinearHead.from_params(params).forward(params, joint_repr).logits


def backward(
    network: Network, params: Params, cached_forward: ForwardCache, grad_output: np.ndarray
) -> ParamGrads:
    """Module-level entry point for ``Network.backward``."""
    return network.backward(params, cached_forward, grad_output)

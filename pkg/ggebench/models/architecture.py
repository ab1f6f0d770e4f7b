"""Layer declarations for the fixed architectures."""

from typing import Literal

from ggebench.nn.params import ArchitectureSpec, LayerSpec

NetworkKind = Literal["attention", "context", "evidence", "self_head", "rubi_head"]


def attention_architecture(
    evidence_dim: int, context_dim: int, hidden_dim: int, num_classes: int
) -> ArchitectureSpec:
    """Attention-pooling base: linear attention, Hadamard fusion, 2-layer classifier."""
    return ArchitectureSpec(
        name="attention",
        layers=(
            LayerSpec("q_proj", evidence_dim, context_dim),
            LayerSpec("att_hidden", hidden_dim, evidence_dim),
            LayerSpec("att_score", 1, hidden_dim, bias=False),
            LayerSpec("v_proj", hidden_dim, evidence_dim),
            LayerSpec("q_fuse", hidden_dim, context_dim),
            LayerSpec("cls_hidden", hidden_dim, hidden_dim),
            LayerSpec("cls_out", num_classes, hidden_dim),
        ),
    )


def context_architecture(context_dim: int, hidden_dim: int, num_classes: int) -> ArchitectureSpec:
    return ArchitectureSpec(
        name="context",
        layers=(
            LayerSpec("qonly_hidden", hidden_dim, context_dim),
            LayerSpec("qonly_out", num_classes, hidden_dim),
        ),
    )


def evidence_architecture(evidence_dim: int, hidden_dim: int, num_classes: int) -> ArchitectureSpec:
    return ArchitectureSpec(
        name="evidence",
        layers=(
            LayerSpec("vo_hidden", hidden_dim, evidence_dim),
            LayerSpec("vo_out", num_classes, hidden_dim),
        ),
    )


def head_architecture(name: str, in_features: int, num_classes: int) -> ArchitectureSpec:
    return ArchitectureSpec(name=name, layers=(LayerSpec(f"{name}.out", num_classes, in_features),))

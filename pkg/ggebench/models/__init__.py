"""Fixed architectures: attention base, context branch, evidence-only, linear heads."""

from .architecture import NetworkKind
from .instance import Batch, Instance
from .networks import (
    AttentionNet,
    BaseForward,
    ContextBranch,
    EvidenceNet,
    Forward,
    ForwardCache,
    LinearHead,
    Network,
    backward,
    forward_base,
    forward_context_branch,
    forward_evidence_only,
    forward_self_head,
)

__all__ = [
    "NetworkKind",
    "Batch",
    "Instance",
    "Network",
    "AttentionNet",
    "ContextBranch",
    "EvidenceNet",
    "LinearHead",
    "Forward",
    "BaseForward",
    "ForwardCache",
    "backward",
    "forward_base",
    "forward_context_branch",
    "forward_evidence_only",
    "forward_self_head",
]

"""Score the base model of a run on a dataset."""

import logging

import numpy as np

from ggebench.benchmark.dataset import Dataset
from ggebench.core.errors import EvaluationError
from ggebench.metrics.grounding import MetricsReport, cgr_cgw_cgd, sweep_thresholds
from ggebench.metrics.records import PredictionRecord
from ggebench.models.networks import AttentionNet, BaseForward, EvidenceNet, Network
from ggebench.nn.params import Params

logger = logging.getLogger(__name__)


def base_network_for(params: Params) -> Network:
    """Pick the base architecture from the checkpoint's entry names."""
    if "q_proj.weight" in params:
        return AttentionNet.from_params(params)
    if "vo_hidden.weight" in params:
        return EvidenceNet.from_params(params)
    raise EvaluationError(
        "Checkpoint is not a base model", {"entries": ", ".join(list(params)[:4])}
    )


def predict(params: Params, data: Dataset, batch_size: int = 512) -> list[PredictionRecord]:
    """Base-model predictions, one record per instance."""
    network = base_network_for(params)
    records: list[PredictionRecord] = []
    for start in range(0, len(data), batch_size):
        window = slice(start, start + batch_size)
        batch = data.batch(window)
        forward = network.forward(params, batch)
        preds = np.argmax(forward.logits, axis=1)
        scores = batch.labels[np.arange(len(batch)), preds]
        if not isinstance(forward, BaseForward):
            raise EvaluationError(f"{network.name} does not report attention")
        attention = forward.attention
        for i in range(len(batch)):
            records.append(
                PredictionRecord(
                    pred_index=int(preds[i]),
                    score=float(scores[i]),
                    attention=attention[i],
                    mask=batch.masks[i],
                    type_id=int(batch.type_ids[i]),
                )
            )
    return records


def evaluate(
    params: Params,
    data: Dataset,
    t: float = 0.2,
    cap: int | None = None,
    strict: bool = False,
) -> tuple[MetricsReport, list[PredictionRecord]]:
    records = predict(params, data)
    report = cgr_cgw_cgd(records, t, cap, strict)
    logger.info(
        f"{data.meta.split}: acc={report.accuracy:.4f} CGR={report.cgr:.2f} "
        f"CGW={report.cgw:.2f} CGD={report.cgd:.2f}",
        extra={"extra": {"split": data.meta.split, **report.to_row()}},
    )
    return report, records


def sweep(
    params: Params, data: Dataset, thresholds: list[float], strict: bool = False
) -> list[MetricsReport]:
    return sweep_thresholds(predict(params, data), thresholds, strict)

"""Multi-seed aggregation of result rows."""

from typing import Any

import pandas as pd

AGGREGATED_METRICS = ["ood_acc", "id_acc", "cgr", "cgw", "cgd", "cgd_inverted"]


def aggregate_results(
    rows: list[dict[str, Any]],
    key: str = "variant",
    metrics: list[str] | None = None,
) -> pd.DataFrame:
    """Mean and sample std of each metric per ``key``; input order of keys is kept."""
    if not rows:
        return pd.DataFrame()
    frame = pd.DataFrame(rows)
    metrics = [m for m in (metrics or AGGREGATED_METRICS) if m in frame.columns]
    order = list(dict.fromkeys(frame[key]))

    grouped = frame.groupby(key, sort=False)[metrics]
    stats = grouped.agg(["mean", "std"])
    stats.columns = [f"{metric}_{stat}" for metric, stat in stats.columns]
    stats = stats.fillna(0.0)
    stats.insert(0, "seeds", grouped.size())
    return stats.loc[order].reset_index()


def summary_rows(stats: pd.DataFrame, key: str = "variant") -> list[dict[str, Any]]:
    """Rows with ``mean ± std`` strings, for the aligned text table."""
    rows = []
    metrics = [c[: -len("_mean")] for c in stats.columns if c.endswith("_mean")]
    for record in stats.to_dict(orient="records"):
        row: dict[str, Any] = {key: record[key], "seeds": int(record["seeds"])}
        for metric in metrics:
            row[metric] = f"{record[f'{metric}_mean']:.2f} ± {record[f'{metric}_std']:.2f}"
        rows.append(row)
    return rows

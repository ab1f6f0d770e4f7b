"""Report sinks and multi-seed aggregation."""

from .aggregate import aggregate_results, summary_rows
from .sink import CSVSink, JSONSink, ReportSink, TableSink, render_table

__all__ = [
    "CSVSink",
    "JSONSink",
    "ReportSink",
    "TableSink",
    "aggregate_results",
    "render_table",
    "summary_rows",
]

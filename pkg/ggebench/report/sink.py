"""Report sinks for different output formats."""

import csv
import io
import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.table import Table

from ggebench.core.fs import atomic_write, ensure_dir


class ReportSink(ABC):
    """Abstract base class for report sinks."""

    @abstractmethod
    def write(self, data: list[dict[str, Any]], path: Path):
        """Write rows to ``path``."""
        pass


class JSONSink(ReportSink):
    def write(self, data: list[dict[str, Any]], path: Path):
        atomic_write(path, json.dumps(data, indent=2, default=str))


class CSVSink(ReportSink):
    """Flat CSV; columns keep first-seen order, floats use round-trip repr."""

    def write(self, data: list[dict[str, Any]], path: Path):
        if not data:
            return

        flat_data = [self._flatten_dict(row) for row in data]
        fieldnames: list[str] = []
        for row in flat_data:
            fieldnames.extend(key for key in row if key not in fieldnames)

        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat_data)
        atomic_write(path, buffer.getvalue())

    def _flatten_dict(self, d: dict[str, Any], parent_key: str = "") -> dict[str, Any]:
        items: list[tuple[str, Any]] = []
        for k, v in d.items():
            new_key = f"{parent_key}_{k}" if parent_key else str(k)
            if isinstance(v, dict):
                items.extend(self._flatten_dict(v, new_key).items())
            else:
                items.append((new_key, v))
        return dict(items)


def _cell(value: Any, precision: int) -> str:
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    return str(value)


def render_table(
    data: list[dict[str, Any]], title: str | None = None, precision: int = 2
) -> Table:
    table = Table(title=title, show_lines=False)
    columns: list[str] = []
    for row in data:
        columns.extend(key for key in row if key not in columns)
    for column in columns:
        table.add_column(column, justify="left" if column in ("variant", "split") else "right")
    for row in data:
        table.add_row(*(_cell(row.get(column, ""), precision) for column in columns))
    return table


class TableSink(ReportSink):
    """Aligned plain-text table rendered with rich."""

    def __init__(self, title: str | None = None, precision: int = 2, width: int = 160):
        self.title = title
        self.precision = precision
        self.width = width

    def render(self, data: list[dict[str, Any]]) -> str:
        console = Console(file=io.StringIO(), width=self.width, record=True, color_system=None)
        console.print(render_table(data, self.title, self.precision))
        return console.export_text()

    def write(self, data: list[dict[str, Any]], path: Path):
        ensure_dir(Path(path).parent)
        atomic_write(path, self.render(data))


SINKS: dict[str, type[ReportSink]] = {"json": JSONSink, "csv": CSVSink, "table": TableSink}

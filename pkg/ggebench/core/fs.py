"""File helpers: atomic writes, JSON-lines files and digests."""

import hashlib
import json
import tempfile
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import Any

from ggebench.core.errors import ParseError


def ensure_dir(path: str | Path) -> Path:
    """Ensure directory exists, create if needed."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def atomic_write(path: str | Path, content: str):
    """Write text through a sibling temporary file and rename it into place."""
    path = Path(path)
    ensure_dir(path.parent)

    with tempfile.NamedTemporaryFile(
        mode="w",
        dir=path.parent,
        delete=False,
        prefix=f".{path.name}.",
        suffix=".tmp",
        newline="\n",
    ) as tmp:
        tmp.write(content)
        tmp.flush()
        temp_path = Path(tmp.name)

    temp_path.replace(path)


def dumps_jsonl(records: Iterable[dict[str, Any]]) -> str:
    """One JSON object per line, newline-terminated; empty input gives ''."""
    lines = [json.dumps(record) for record in records]
    return "\n".join(lines) + "\n" if lines else ""


def write_jsonl(path: str | Path, records: Iterable[dict[str, Any]]) -> None:
    atomic_write(path, dumps_jsonl(records))


def iter_jsonl(path: str | Path, what: str = "record") -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield ``(line_number, object)`` for every non-blank line.

    Lines that are not JSON objects raise ``ParseError`` with their 1-based number.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path.as_posix()}")
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(path.as_posix(), line_no, f"bad {what}: {e}") from e
            if not isinstance(record, dict):
                raise ParseError(path.as_posix(), line_no, f"bad {what}: not a JSON object")
            yield line_no, record


def file_digest(path: str | Path, algorithm: str = "sha256") -> str:
    """Hex digest of a file, read in chunks."""
    hasher = hashlib.new(algorithm)
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


def text_digest(content: str, algorithm: str = "sha256") -> str:
    return hashlib.new(algorithm, content.encode("utf-8")).hexdigest()

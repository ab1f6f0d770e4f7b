"""JSON-lines checkpoints: one record per parameter entry."""

from collections.abc import Iterator
from pathlib import Path
from typing import Any

import numpy as np

from ggebench.core.errors import ParseError
from ggebench.core.fs import dumps_jsonl, iter_jsonl, write_jsonl
from ggebench.nn.params import Params


def _records(params: Params) -> Iterator[dict[str, Any]]:
    for name, value in params.items():
        values = [float(v) for v in value.ravel()]
        yield {"name": name, "shape": list(value.shape), "values": values}


def dumps_params(params: Params) -> str:
    """Serialise parameters; floats use shortest round-trip repr."""
    return dumps_jsonl(_records(params))


def save_params(params: Params, path: Path) -> None:
    write_jsonl(path, _records(params))


def load_params(path: Path) -> Params:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path.as_posix()}")

    params = Params()
    for line_no, record in iter_jsonl(path, "checkpoint record"):
        try:
            shape = tuple(int(d) for d in record["shape"])
            values = np.asarray(record["values"], dtype=np.float64)
            params[str(record["name"])] = values.reshape(shape)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(path.as_posix(), line_no, f"bad checkpoint record: {e}") from e
    return params

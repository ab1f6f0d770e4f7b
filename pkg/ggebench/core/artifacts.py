"""Run directory layout and metadata."""

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from ggebench.core.fs import atomic_write, ensure_dir, file_digest


class RunArtifacts:
    """Files belonging to one training run.

    Layout::

        <run_dir>/config.yaml
        <run_dir>/losses.csv
        <run_dir>/metadata.json
        <run_dir>/train.log
        <run_dir>/checkpoints/<branch>.jsonl
        <run_dir>/reports/
    """

    def __init__(self, run_dir: Path, create: bool = True):
        self.run_dir = Path(run_dir)
        self.checkpoints_dir = self.run_dir / "checkpoints"
        self.reports_dir = self.run_dir / "reports"
        if create:
            ensure_dir(self.checkpoints_dir)
            ensure_dir(self.reports_dir)
        self.config_file = self.run_dir / "config.yaml"
        self.losses_file = self.run_dir / "losses.csv"
        self.metadata_file = self.run_dir / "metadata.json"
        self.log_file = self.run_dir / "train.log"

    def checkpoint_path(self, branch: str) -> Path:
        return self.checkpoints_dir / f"{branch}.jsonl"

    def branches(self) -> list[str]:
        """Branches with a checkpoint on disk, sorted by name."""
        if not self.checkpoints_dir.exists():
            return []
        return sorted(p.stem for p in self.checkpoints_dir.glob("*.jsonl"))

    def save_metadata(self, metadata: dict[str, Any]) -> None:
        """Merge ``metadata`` into metadata.json."""
        existing = self.load_metadata()
        existing.update(metadata)
        existing["updated_at"] = datetime.now(timezone.utc).isoformat()
        atomic_write(self.metadata_file, json.dumps(existing, indent=2, default=str))

    def load_metadata(self) -> dict[str, Any]:
        if not self.metadata_file.exists():
            return {}
        with open(self.metadata_file) as f:
            data: dict[str, Any] = json.load(f)
            return data

    def register_artifact(
        self, kind: str, path: Path, metadata: dict[str, Any] | None = None
    ) -> str:
        """Record a written file with its checksum; returns the artifact id."""
        artifact_id = file_digest(path)[:16]
        record: dict[str, Any] = {
            "type": kind,
            "path": Path(path).relative_to(self.run_dir).as_posix(),
            "size": Path(path).stat().st_size,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "checksum": artifact_id,
        }
        if metadata:
            record["metadata"] = metadata
        artifacts = self.load_metadata().get("artifacts", {})
        artifacts[record["path"]] = record
        self.save_metadata({"artifacts": artifacts})
        return artifact_id

"""Custom exception types."""

from typing import Any


class GGEBenchError(Exception):
    """Base exception for ggebench."""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.details = details or {}

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable error summary."""
        return {"error": type(self).__name__, "message": str(self), **self.details}


class ShapeError(GGEBenchError):
    """Array shapes do not match the declared architecture."""

    def __init__(self, what: str, expected: Any, found: Any):
        super().__init__(
            f"Shape mismatch for {what}: expected {expected}, found {found}",
            {"what": what, "expected": str(expected), "found": str(found)},
        )


class ArchitectureError(GGEBenchError):
    """Invalid architecture declaration."""

    pass


class CacheError(GGEBenchError):
    """Forward cache is stale or belongs to another network."""

    pass


class NumericError(GGEBenchError):
    """Non-finite values where finite ones are required."""

    def __init__(self, name: str, reason: str = "non-finite gradient"):
        super().__init__(f"{reason} in '{name}'", {"name": name, "reason": reason})


class ConfigError(GGEBenchError):
    """Configuration-related errors."""

    def __init__(self, message: str, violations: list[str] | None = None):
        violations = violations or []
        if violations:
            message = message + ": " + "; ".join(violations)
        super().__init__(message, {"violations": violations})
        self.violations = violations


class ParseError(GGEBenchError):
    """Malformed record in a line-oriented file."""

    def __init__(self, path: str, line: int, reason: str):
        super().__init__(
            f"{path}:{line}: {reason}", {"path": path, "line": line, "reason": reason}
        )
        self.line = line


class TrainingError(GGEBenchError):
    """A training step produced an unusable loss."""

    def __init__(self, branch: str, batch_index: int, reason: str):
        super().__init__(
            f"Training failed in branch '{branch}' at batch {batch_index}: {reason}",
            {"branch": branch, "batch_index": batch_index, "reason": reason},
        )


class EvaluationError(GGEBenchError):
    """Errors raised while scoring predictions."""

    pass


class DatasetError(GGEBenchError):
    """Dataset content cannot support the requested computation."""

    pass

"""Configuration schema definitions using Pydantic."""

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ggebench.core.errors import ConfigError

Variant = Literal[
    "baseline",
    "gge-d",
    "gge-q",
    "gge-dq",
    "gge-sf",
    "gge-d-sf",
    "sum-dq",
    "rubi",
    "inverse-supervision",
    "vision-only",
]
Schedule = Literal["iter", "tog"]
LossFamily = Literal["bce", "sxce"]

DEFAULT_ABLATION = [
    "baseline",
    "sum-dq",
    "rubi",
    "gge-d",
    "gge-q-iter",
    "gge-q-tog",
    "gge-dq-iter",
    "gge-dq-tog",
    "gge-sf",
    "vision-only",
    "inverse-supervision",
]


class StrictModel(BaseModel):
    """Base for config sections: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")


class GeneratorConfig(StrictModel):
    """Synthetic changing-prior benchmark parameters."""

    num_classes: int = Field(20, description="Answer classes C")
    num_types: int = Field(4, description="Question types T")
    n_regions: int = Field(8, description="Evidence regions per instance")
    evidence_dim: int = Field(16, description="Region vector size d_v")
    context_dim: int = Field(16, description="Context vector size d_q")
    n_train: int = Field(8000, description="Train split size")
    n_test: int = Field(2000, description="Size of each test split")
    head_mass: float = Field(0.7, description="Train prior mass on each type's head answer")
    shortcut_rate: float = Field(
        0.8, description="Probability the train context carries the answer cue"
    )
    noise_sigma: float = Field(0.25, description="Gaussian noise scale")
    type_affinity: float = Field(
        1.0, description="Weight of the per-type feature channel in evidence prototypes"
    )
    soft_labels: bool = Field(False, description="Spread label mass over near answers")
    soft_scores: tuple[float, float, float] = Field(
        (0.9, 0.6, 0.3), description="Scores for the answer and its two neighbours"
    )
    seed: int = Field(0, description="Generator seed")

    @property
    def answers_per_type(self) -> int:
        return self.num_classes // max(self.num_types, 1)

    def violations(self) -> list[str]:
        problems = []
        for name in ("num_classes", "num_types", "n_regions", "evidence_dim", "context_dim"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if self.n_train < 1 or self.n_test < 1:
            problems.append("n_train and n_test must be >= 1")
        if self.num_types >= 1 and self.num_classes % self.num_types != 0:
            problems.append(
                f"num_classes ({self.num_classes}) must be divisible "
                f"by num_types ({self.num_types})"
            )
        k = self.answers_per_type
        if k < 2:
            problems.append("each type needs at least 2 answers")
        elif not (1.0 / k <= self.head_mass < 1.0):
            problems.append(f"head_mass must lie in [1/{k}, 1), got {self.head_mass}")
        if not 0.0 <= self.shortcut_rate <= 1.0:
            problems.append(f"shortcut_rate must lie in [0, 1], got {self.shortcut_rate}")
        if self.noise_sigma <= 0:
            problems.append(f"noise_sigma must be > 0, got {self.noise_sigma}")
        if self.type_affinity < 0:
            problems.append(f"type_affinity must be >= 0, got {self.type_affinity}")
        elif self.type_affinity > 0 and self.num_types > self.evidence_dim:
            problems.append("num_types must not exceed evidence_dim when type_affinity > 0")
        if self.num_types > self.context_dim:
            problems.append("num_types must not exceed context_dim (one-hot type embedding)")
        if self.n_regions > 1 and self.num_types < 2:
            problems.append("distractor regions need at least 2 types")
        if any(not 0.0 <= s <= 1.0 for s in self.soft_scores):
            problems.append("soft_scores must lie in [0, 1]")
        return problems

    @model_validator(mode="after")
    def validate_generator(self):
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))
        return self


class ModelConfig(StrictModel):
    """Architecture dimensions."""

    n_regions: int = Field(8, ge=1)
    evidence_dim: int = Field(16, ge=1)
    context_dim: int = Field(16, ge=1)
    hidden_dim: int = Field(32, ge=1)
    num_classes: int = Field(20, ge=1)


class TrainingConfig(StrictModel):
    """Ensemble training configuration."""

    variant: Variant = "baseline"
    schedule: Schedule = "iter"
    loss_family: LossFamily = "bce"
    epochs: int = Field(20, ge=0)
    batch_size: int = Field(64, ge=1)
    lr: float = Field(0.002, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    seed: int = 0
    inverse_supervision_n: int = Field(1, ge=1, description="Top-N answers removed in round 2")
    vision_only: bool = Field(False, description="Use the evidence-only base network")
    rubi_source: Literal["context", "joint"] = Field(
        "context", description="Input of the RUBi mask branch"
    )

    @property
    def evidence_only(self) -> bool:
        return self.vision_only or self.variant == "vision-only"

    @property
    def label(self) -> str:
        label = self.variant
        if self.variant in ("gge-q", "gge-dq", "gge-sf", "gge-d-sf"):
            label = f"{label}-{self.schedule}"
        if self.vision_only and self.variant != "vision-only":
            label = f"{label}-vo"
        return label


class EvaluationConfig(StrictModel):
    """Grounding metric settings."""

    threshold: float = Field(0.2, gt=0, lt=1)
    cap: int | None = Field(
        None, ge=1, description="Sensitive-set cap; paired with threshold if unset"
    )
    thresholds: list[float] = Field(default_factory=lambda: [0.1, 0.2, 0.3, 0.4])
    strict: bool = Field(False, description="Require all ground-truth regions in the sensitive set")


class AblationConfig(StrictModel):
    variants: list[str] = Field(default_factory=lambda: list(DEFAULT_ABLATION))
    seeds: int = Field(5, ge=1)
    jobs: int = Field(1, ge=1)


class PathsConfig(StrictModel):
    data_dir: str = "artifacts/data"
    runs_dir: str = "artifacts/runs"
    reports_dir: str = "artifacts/reports"


class Experiment(StrictModel):
    """Complete run configuration."""

    generator: GeneratorConfig = Field(default_factory=lambda: GeneratorConfig())
    model: ModelConfig = Field(default_factory=lambda: ModelConfig())
    training: TrainingConfig = Field(default_factory=lambda: TrainingConfig())
    evaluation: EvaluationConfig = Field(default_factory=lambda: EvaluationConfig())
    ablation: AblationConfig = Field(default_factory=lambda: AblationConfig())
    paths: PathsConfig = Field(default_factory=lambda: PathsConfig())

    @model_validator(mode="after")
    def validate_dimensions(self):
        gen, model = self.generator, self.model
        mismatched = [
            name
            for name in ("n_regions", "evidence_dim", "context_dim", "num_classes")
            if getattr(gen, name) != getattr(model, name)
        ]
        if mismatched:
            raise ValueError(f"model dimensions disagree with generator: {', '.join(mismatched)}")
        return self

    def with_overrides(self, **overrides: Any) -> "Experiment":
        """Return a validated copy with ``section.key`` style overrides applied.

        ``None`` values are ignored so CLI options can be passed through directly.
        """
        data = self.model_dump()
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, key = dotted.split(".", 1)
            data[section][key] = value
        try:
            return Experiment.model_validate(data)
        except ValidationError as e:
            messages = [f"{'.'.join(map(str, i['loc']))}: {i['msg']}" for i in e.errors()]
            raise ConfigError("Invalid override", messages) from e

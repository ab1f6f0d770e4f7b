"""Parameter containers and deterministic initialisation."""

from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from ggebench.core.errors import ArchitectureError, ShapeError
from ggebench.core.rng import stream


@dataclass(frozen=True)
class LayerSpec:
    """A dense layer ``out_features x in_features`` with an optional bias."""

    name: str
    out_features: int
    in_features: int
    bias: bool = True

    @property
    def weight_name(self) -> str:
        return f"{self.name}.weight"

    @property
    def bias_name(self) -> str:
        return f"{self.name}.bias"


@dataclass(frozen=True)
class ArchitectureSpec:
    """Named collection of layer declarations."""

    name: str
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for layer in self.layers:
            if layer.out_features <= 0 or layer.in_features <= 0:
                raise ArchitectureError(
                    f"Layer '{layer.name}' of '{self.name}' has a zero-sized dimension "
                    f"({layer.out_features}x{layer.in_features})",
                    {"architecture": self.name, "layer": layer.name},
                )
            if layer.name in seen:
                raise ArchitectureError(
                    f"Duplicate layer '{layer.name}' in '{self.name}'",
                    {"architecture": self.name, "layer": layer.name},
                )
            seen.add(layer.name)

    def shapes(self) -> dict[str, tuple[int, ...]]:
        """Expected shape of every parameter entry, in declaration order."""
        shapes: dict[str, tuple[int, ...]] = {}
        for layer in self.layers:
            shapes[layer.weight_name] = (layer.out_features, layer.in_features)
            if layer.bias:
                shapes[layer.bias_name] = (layer.out_features,)
        return shapes


class Params(dict[str, np.ndarray]):
    """Ordered map from entry name to weight matrix or bias vector.

    ``version`` is bumped on every in-place update so forward caches can
    detect that they were produced with older values.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.version = 0

    def touch(self) -> None:
        self.version += 1

    def copy(self) -> "Params":  # type: ignore[override]
        clone = Params({name: value.copy() for name, value in self.items()})
        clone.version = self.version
        return clone

    def zeros_like(self) -> "Params":
        return Params({name: np.zeros_like(value) for name, value in self.items()})

    def check_shapes(self, arch: ArchitectureSpec) -> None:
        expected = arch.shapes()
        if list(expected) != list(self):
            raise ShapeError(f"{arch.name} entries", list(expected), list(self))
        for name, shape in expected.items():
            if self[name].shape != shape:
                raise ShapeError(name, shape, self[name].shape)

    def equals(self, other: "Params") -> bool:
        """Bit-identical comparison of names, shapes and values."""
        if list(self) != list(other):
            return False
        return all(
            self[name].shape == other[name].shape
            and self[name].tobytes() == other[name].tobytes()
            for name in self
        )


@dataclass
class ParamGrads:
    """Gradients for every entry of a ``Params``, plus input gradients."""

    params: Params
    inputs: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.params)

    def items(self):
        return self.params.items()


def init_params(arch: ArchitectureSpec, seed: int) -> Params:
    """Glorot-uniform weights, zero biases.

    Each layer draws from its own stream keyed by (seed, architecture, layer),
    so declaration order does not change the values.
    """
    params = Params()
    for layer in arch.layers:
        bound = np.sqrt(6.0 / (layer.in_features + layer.out_features))
        rng = stream(seed, "init", arch.name, layer.name)
        params[layer.weight_name] = rng.uniform(
            -bound, bound, size=(layer.out_features, layer.in_features)
        )
        if layer.bias:
            params[layer.bias_name] = np.zeros(layer.out_features)
    return params

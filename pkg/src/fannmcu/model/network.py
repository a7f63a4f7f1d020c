"""Network and dataset domain types."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import DimensionMismatch, WeightCountMismatch


class ActivationKind(enum.Enum):
    LINEAR = "linear"
    THRESHOLD = "threshold"
    SIGMOID = "sigmoid"
    SIGMOID_STEPWISE = "sigmoid_stepwise"
    SIGMOID_SYMMETRIC = "sigmoid_symmetric"
    SIGMOID_SYMMETRIC_STEPWISE = "sigmoid_symmetric_stepwise"

    @property
    def is_sigmoid_family(self) -> bool:
        return self in _SIGMOID_FAMILY

    @property
    def is_symmetric(self) -> bool:
        return self in (ActivationKind.SIGMOID_SYMMETRIC,
                        ActivationKind.SIGMOID_SYMMETRIC_STEPWISE)

    @property
    def is_stepwise(self) -> bool:
        return self in (ActivationKind.SIGMOID_STEPWISE,
                        ActivationKind.SIGMOID_SYMMETRIC_STEPWISE)

    def stepwise(self) -> "ActivationKind":
        """The stepwise counterpart used by fixed-point inference."""
        if self is ActivationKind.SIGMOID:
            return ActivationKind.SIGMOID_STEPWISE
        if self is ActivationKind.SIGMOID_SYMMETRIC:
            return ActivationKind.SIGMOID_SYMMETRIC_STEPWISE
        return self

    def output_range(self) -> tuple[float, float]:
        if self.is_symmetric:
            return (-1.0, 1.0)
        if self.is_sigmoid_family or self is ActivationKind.THRESHOLD:
            return (0.0, 1.0)
        return (float("-inf"), float("inf"))


_SIGMOID_FAMILY = frozenset({
    ActivationKind.SIGMOID,
    ActivationKind.SIGMOID_STEPWISE,
    ActivationKind.SIGMOID_SYMMETRIC,
    ActivationKind.SIGMOID_SYMMETRIC_STEPWISE,
})


@dataclass(frozen=True)
class Neuron:
    activation: ActivationKind
    steepness: float
    fan_in: int


@dataclass(frozen=True)
class Layer:
    size: int
    neurons: tuple[Neuron, ...] = ()

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"layer size must be >= 1, got {self.size}")


@dataclass(frozen=True)
class Float:
    """Floating-point parameter format."""

    def __str__(self):
        return "float"


@dataclass(frozen=True)
class Fixed:
    """Fixed-point format: values are int32 scaled by ``2**decimal_point``."""
    decimal_point: int

    @property
    def multiplier(self) -> int:
        return 1 << self.decimal_point

    def __str__(self):
        return f"fixed(dp={self.decimal_point})"


NumericFormat = Float | Fixed


@dataclass(frozen=True)
class Network:
    """A fully connected layered MLP.

    ``weights`` is flat and grouped per destination neuron, bias weight last
    in each group, destination neurons in layer order.
    """
    layers: tuple[Layer, ...]
    weights: tuple
    format: NumericFormat = field(default_factory=Float)
    connection_rate: float = 1.0

    @property
    def layer_sizes(self) -> list[int]:
        return [layer.size for layer in self.layers]

    @property
    def num_inputs(self) -> int:
        return self.layers[0].size

    @property
    def num_outputs(self) -> int:
        return self.layers[-1].size

    @property
    def is_fixed(self) -> bool:
        return isinstance(self.format, Fixed)

    @property
    def decimal_point(self) -> Optional[int]:
        return self.format.decimal_point if self.is_fixed else None

    def layer_weight_offsets(self) -> list[int]:
        """Offset of each non-input layer's first weight in ``weights``."""
        offsets, pos = [], 0
        for prev, cur in zip(self.layers, self.layers[1:]):
            offsets.append(pos)
            pos += (prev.size + 1) * cur.size
        return offsets

    def layer_matrix(self, index: int):
        """Weights of non-input layer ``index`` (1-based layer number) as a
        ``(cur, prev + 1)`` numpy array."""
        import numpy as np

        prev, cur = self.layers[index - 1].size, self.layers[index].size
        start = self.layer_weight_offsets()[index - 1]
        dtype = np.int64 if self.is_fixed else np.float64
        flat = np.asarray(self.weights[start:start + (prev + 1) * cur], dtype=dtype)
        return flat.reshape(cur, prev + 1)

    def with_weights(self, weights: Sequence) -> "Network":
        return Network(self.layers, tuple(weights), self.format, self.connection_rate)


def expected_weight_count(layer_sizes: Sequence[int]) -> int:
    return sum((prev + 1) * cur for prev, cur in zip(layer_sizes, layer_sizes[1:]))


def build_mlp(layer_sizes: Sequence[int], activation: ActivationKind,
              steepness: float, weights: Sequence[float]) -> Network:
    """Build a fully connected float network with a uniform activation."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ValueError("a network needs at least an input and an output layer")
    need = expected_weight_count(sizes)
    if len(weights) != need:
        raise WeightCountMismatch(
            f"layer sizes {sizes} need {need} weights, got {len(weights)}")
    layers = [Layer(sizes[0])]
    for prev, cur in zip(sizes, sizes[1:]):
        neuron = Neuron(activation, float(steepness), prev + 1)
        layers.append(Layer(cur, (neuron,) * cur))
    return Network(tuple(layers), tuple(float(w) for w in weights), Float())


def count_macs(net: Network) -> int:
    """Multiply-accumulates per inference, bias additions excluded."""
    sizes = net.layer_sizes
    return sum(prev * cur for prev, cur in zip(sizes, sizes[1:]))


def count_params(net: Network) -> tuple[int, int, int]:
    """``(n_neurons, n_weights, n_layers)`` in FANN's counting convention.

    Every layer, output included, carries one bias slot in ``n_neurons``.
    """
    sizes = net.layer_sizes
    n_neurons = sum(sizes) + len(sizes)
    return n_neurons, expected_weight_count(sizes), len(sizes)


@dataclass(frozen=True)
class Dataset:
    inputs: tuple[tuple[float, ...], ...]
    outputs: tuple[tuple[float, ...], ...]
    num_inputs: int
    num_outputs: int

    @property
    def num_samples(self) -> int:
        return len(self.inputs)

    def __post_init__(self):
        if len(self.inputs) != len(self.outputs):
            raise DimensionMismatch("inputs and outputs differ in sample count")
        for row in self.inputs:
            if len(row) != self.num_inputs:
                raise DimensionMismatch("input row width differs from num_inputs")
        for row in self.outputs:
            if len(row) != self.num_outputs:
                raise DimensionMismatch("output row width differs from num_outputs")

    def input_matrix(self):
        import numpy as np
        return np.asarray(self.inputs, dtype=np.float64).reshape(self.num_samples, self.num_inputs)

    def output_matrix(self):
        import numpy as np
        return np.asarray(self.outputs, dtype=np.float64).reshape(self.num_samples, self.num_outputs)

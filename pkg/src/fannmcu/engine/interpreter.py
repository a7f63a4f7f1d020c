"""Reference interpreters.

``forward_fixed`` defines the bit-exact integer semantics every generated C
flavor must reproduce:

* the accumulator is int32 and starts at zero;
* each term adds ``(int64(w) * int64(x)) >> dp`` truncated to int32, where
  ``>>`` is an arithmetic (flooring) shift and the bias term uses
  ``x = 1 << dp``, so it contributes exactly the bias weight;
* overflow wraps in two's complement;
* the activation is applied through the stepwise table.

The batched paths use numpy; passing a :class:`Trace` switches to a scalar
loop that records every operation, which is what the instrumentation tests
inspect.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import DimensionMismatch, FormatMismatch
from ..model.network import ActivationKind, Dataset, Network
from .activation import (activation_array, activation_eval, fixed_activation,
                         fixed_activation_array, round_half_away, wrap32)


@dataclass
class Trace:
    """Operation counts gathered by an instrumented run."""
    multiplies: int = 0
    term_adds: int = 0
    bias_adds: int = 0
    output_writes: int = 0
    max_abs_acc: int = 0
    writes_per_neuron: dict = field(default_factory=dict)

    def write(self, layer: int, neuron: int):
        key = (layer, neuron)
        self.writes_per_neuron[key] = self.writes_per_neuron.get(key, 0) + 1
        self.output_writes += 1


def _groups(net: Network):
    """Yield ``(layer_index, neurons, weight_rows)`` per non-input layer."""
    pos = 0
    for li in range(1, len(net.layers)):
        prev = net.layers[li - 1].size
        layer = net.layers[li]
        rows = []
        for _ in range(layer.size):
            rows.append(net.weights[pos:pos + prev + 1])
            pos += prev + 1
        yield li, layer.neurons, rows


def _check_input(net: Network, n: int):
    if n != net.num_inputs:
        raise DimensionMismatch(f"network expects {net.num_inputs} inputs, got {n}")


def forward_float(net: Network, inputs: Sequence[float], trace: Optional[Trace] = None) -> list[float]:
    """Float inference of one sample."""
    if net.is_fixed:
        raise FormatMismatch("forward_float needs a float network; use forward_fixed")
    _check_input(net, len(inputs))
    if trace is None:
        return forward_float_batch(net, np.asarray([inputs], dtype=np.float64))[0].tolist()

    values = [float(v) for v in inputs]
    for li, neurons, rows in _groups(net):
        out = [0.0] * len(rows)
        for k, (neuron, row) in enumerate(zip(neurons, rows)):
            acc = 0.0
            for w, x in zip(row[:-1], values):
                acc += w * x
                trace.multiplies += 1
                trace.term_adds += 1
            acc += row[-1]
            trace.bias_adds += 1
            out[k] = activation_eval(neuron.activation, neuron.steepness, acc)
            trace.write(li, k)
        values = out
    return values


def _layer_kinds(neurons):
    """Group neuron indices sharing (activation, steepness)."""
    groups: dict = {}
    for k, n in enumerate(neurons):
        groups.setdefault((n.activation, n.steepness), []).append(k)
    return groups


def forward_float_batch(net: Network, x: np.ndarray) -> np.ndarray:
    """Float inference for a ``(samples, inputs)`` matrix."""
    x = np.asarray(x, dtype=np.float64)
    _check_input(net, x.shape[1])
    for li in range(1, len(net.layers)):
        w = net.layer_matrix(li)
        sums = x @ w[:, :-1].T + w[:, -1]
        out = np.empty_like(sums)
        for (kind, steep), idx in _layer_kinds(net.layers[li].neurons).items():
            out[:, idx] = activation_array(kind, steep, sums[:, idx])
        x = out
    return x


def forward_fixed(net: Network, inputs: Sequence[int], trace: Optional[Trace] = None) -> list[int]:
    """Fixed-point inference of one sample of already scaled int32 inputs."""
    if not net.is_fixed:
        raise FormatMismatch("forward_fixed needs a fixed-point network")
    _check_input(net, len(inputs))
    if trace is None:
        return forward_fixed_batch(net, np.asarray([inputs], dtype=np.int64))[0].tolist()

    dp = net.format.decimal_point
    one = 1 << dp
    values = [wrap32(int(v)) for v in inputs]
    for li, neurons, rows in _groups(net):
        out = [0] * len(rows)
        for k, (neuron, row) in enumerate(zip(neurons, rows)):
            acc = 0
            for w, x in zip(row[:-1], values):
                term = wrap32((int(w) * x) >> dp)
                trace.multiplies += 1
                acc = wrap32(acc + term)
                trace.term_adds += 1
                trace.max_abs_acc = max(trace.max_abs_acc, abs(acc))
            acc = wrap32(acc + wrap32((int(row[-1]) * one) >> dp))
            trace.bias_adds += 1
            trace.max_abs_acc = max(trace.max_abs_acc, abs(acc))
            out[k] = fixed_activation(neuron.activation, neuron.steepness, dp, acc)
            trace.write(li, k)
        values = out
    return values


def _wrap32_array(a: np.ndarray) -> np.ndarray:
    return a.astype(np.int32).astype(np.int64)


def forward_fixed_batch(net: Network, x: np.ndarray, acc_probe: Optional[list] = None) -> np.ndarray:
    """Fixed-point inference for a ``(samples, inputs)`` int matrix.

    If ``acc_probe`` is a list, the largest running-accumulator magnitude seen
    is appended to it per layer.
    """
    if not net.is_fixed:
        raise FormatMismatch("forward_fixed needs a fixed-point network")
    x = _wrap32_array(np.asarray(x, dtype=np.int64))
    _check_input(net, x.shape[1])
    dp = net.format.decimal_point
    for li in range(1, len(net.layers)):
        w = net.layer_matrix(li)
        # (samples, cur, prev) terms; int64 products cannot overflow for int32 operands
        terms = _wrap32_array((x[:, None, :] * w[None, :, :-1]) >> dp)
        bias = w[:, -1]
        if acc_probe is not None:
            running = np.cumsum(terms, axis=2)
            full = running[:, :, -1] + bias
            acc_probe.append(max(int(np.abs(running).max()), int(np.abs(full).max())))
        sums = _wrap32_array(terms.sum(axis=2) + bias)
        out = np.empty_like(sums)
        for (kind, steep), idx in _layer_kinds(net.layers[li].neurons).items():
            out[:, idx] = fixed_activation_array(kind, steep, dp, sums[:, idx])
        x = out
    return x


def scale_inputs(values, dp: int) -> list[int]:
    """Real inputs to int32 fixed point (round half away from zero)."""
    scale = float(1 << dp)
    return [round_half_away(float(v) * scale) for v in values]


def _decision_threshold(net: Network) -> float:
    kind = net.layers[-1].neurons[0].activation
    return 0.0 if kind.is_symmetric else 0.5


def batch_evaluate(net: Network, ds: Dataset) -> tuple[np.ndarray, float]:
    """Run every sample; return real-valued outputs and classification accuracy.

    Multi-output nets score by argmax (lowest index wins ties). Single-output
    nets score by which side of the activation's midpoint output and label fall.
    """
    if ds.num_inputs != net.num_inputs:
        raise DimensionMismatch(f"dataset has {ds.num_inputs} inputs, network expects {net.num_inputs}")
    if ds.num_outputs != net.num_outputs:
        raise DimensionMismatch(f"dataset has {ds.num_outputs} outputs, network produces {net.num_outputs}")
    x = ds.input_matrix()
    if net.is_fixed:
        dp = net.format.decimal_point
        xi = np.asarray([scale_inputs(row, dp) for row in x], dtype=np.int64).reshape(x.shape)
        outputs = forward_fixed_batch(net, xi).astype(np.float64) / float(1 << dp)
    else:
        outputs = forward_float_batch(net, x)
    labels = ds.output_matrix()
    if ds.num_samples == 0:
        return outputs, 0.0
    if net.num_outputs == 1:
        t = _decision_threshold(net)
        hits = (outputs[:, 0] >= t) == (labels[:, 0] >= t)
    else:
        hits = np.argmax(outputs, axis=1) == np.argmax(labels, axis=1)
    return outputs, float(np.mean(hits))


def with_stepwise_activations(net: Network) -> Network:
    """Float copy of ``net`` whose sigmoid-family neurons use stepwise tables."""
    from ..model.network import Layer, Neuron

    layers = [net.layers[0]]
    for layer in net.layers[1:]:
        layers.append(Layer(layer.size, tuple(
            Neuron(n.activation.stepwise(), n.steepness, n.fan_in) for n in layer.neurons)))
    return Network(tuple(layers), net.weights, net.format, net.connection_rate)


__all__ = [
    "Trace", "forward_float", "forward_float_batch", "forward_fixed",
    "forward_fixed_batch", "batch_evaluate", "scale_inputs",
    "with_stepwise_activations", "ActivationKind",
]

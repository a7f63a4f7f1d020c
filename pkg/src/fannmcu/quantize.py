"""Float to fixed-point conversion.

The decimal point is chosen from a worst-case accumulator bound: with every
input at its extreme magnitude ``A`` and signs aligned with the weights, the
accumulator of neuron ``k`` reaches ``sum_i |W_ki| * A_i`` (``W`` the rounded
integer weights, bias input ``A = 1``). One guard bit is kept on top of that,
and every stepwise table breakpoint must fit in int32.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine.activation import (lipschitz, real_breakpoints, round_half_away,
                                stepwise_approx, stepwise_max_error)
from .errors import FormatMismatch, UnboundedActivation, Unquantizable
from .model.network import (ActivationKind, Fixed, Layer, Network, Neuron)

MAX_DP = 30
ACC_LIMIT = 1 << 31
GUARD_FACTOR = 2

__all__ = [
    "FixedPlan", "plan_fixed", "to_fixed", "stepwise_approx",
    "worst_case_acc_bound", "stepwise_error_bound", "parity_epsilon",
    "fan_in_max", "to_float",
]


@dataclass(frozen=True)
class FixedPlan:
    dp: int
    multiplier: int
    worst_case_acc_bound: int
    tables: dict  # (kind, steepness) -> ActivationTable

    def __post_init__(self):
        if self.multiplier != 1 << self.dp:
            raise ValueError("multiplier must equal 2**dp")
        if self.worst_case_acc_bound >= ACC_LIMIT:
            raise ValueError("accumulator bound must stay below 2**31")


def _fixed_weights(net: Network, dp: int) -> list[int]:
    scale = float(1 << dp)
    return [round_half_away(w * scale) for w in net.weights]


def _output_bound(kind: ActivationKind, steepness: float, acc_bound: float, one: int) -> float:
    """Largest neuron output magnitude (fixed units) given its accumulator bound."""
    if kind is ActivationKind.LINEAR:
        return 2.0 * steepness * acc_bound
    return float(one)


def worst_case_acc_bound(net: Network, dp: int, input_range: float = 1.0) -> tuple[int, float]:
    """Return ``(accumulator_bound, output_bound)`` in fixed units at ``dp``.

    The accumulator bound is the largest ``sum |W| * A`` over all neurons;
    the output bound the largest value any neuron or input feeds forward.
    """
    one = 1 << dp
    weights = _fixed_weights(net, dp)
    a_prev = [input_range * one] * net.num_inputs
    acc_bound = 0.0
    out_bound = max(a_prev, default=0.0)
    pos = 0
    for layer in net.layers[1:]:
        a_next = []
        for neuron in layer.neurons:
            n_in = len(a_prev)
            row = weights[pos:pos + n_in + 1]
            pos += n_in + 1
            # each term is (|W| * A) >> dp; the bias term is exactly |W_bias|
            acc = sum(abs(w) * a for w, a in zip(row[:-1], a_prev)) / one + abs(row[-1])
            acc_bound = max(acc_bound, acc)
            a_next.append(_output_bound(neuron.activation, neuron.steepness, acc, one))
        a_prev = a_next
        out_bound = max(out_bound, max(a_next))
    return int(math.ceil(acc_bound)), out_bound


def _tables_fit(net: Network, dp: int) -> bool:
    for layer in net.layers[1:]:
        for n in layer.neurons:
            if n.activation.is_sigmoid_family:
                xs, _ = real_breakpoints(n.activation, n.steepness)
                if max(abs(x) for x in xs) * (1 << dp) >= ACC_LIMIT - 1:
                    return False
            elif n.activation is ActivationKind.LINEAR:
                if abs(n.steepness) * (1 << dp) >= ACC_LIMIT:
                    return False
    return True


def _check_bounded(net: Network, input_range: Optional[float]) -> float:
    if input_range is not None:
        if input_range <= 0:
            raise ValueError("input_range must be positive")
        return float(input_range)
    if all(n.activation is ActivationKind.LINEAR for layer in net.layers[1:] for n in layer.neurons):
        raise UnboundedActivation(
            "a purely linear network needs a declared input range to bound its accumulators")
    return 1.0


def plan_fixed(net: Network, *, max_dp: int = MAX_DP, input_range: Optional[float] = 1.0) -> FixedPlan:
    """Choose the largest decimal point in ``0..max_dp`` that cannot overflow.

    ``input_range`` is the declared magnitude bound of the (pre-scaled) inputs;
    ``None`` means undeclared, which is only accepted when some layer has a
    bounded activation.
    """
    if net.is_fixed:
        raise FormatMismatch("network is already fixed point")
    if not 0 <= max_dp <= MAX_DP:
        raise ValueError(f"max_dp must lie in 0..{MAX_DP}")
    a_in = _check_bounded(net, input_range)
    for dp in range(max_dp, -1, -1):
        if not _tables_fit(net, dp):
            continue
        weights = _fixed_weights(net, dp)
        if any(abs(w) >= ACC_LIMIT for w in weights):
            continue
        acc, out = worst_case_acc_bound(net, dp, a_in)
        if GUARD_FACTOR * acc < ACC_LIMIT and out < ACC_LIMIT:
            tables = {}
            for layer in net.layers[1:]:
                for n in layer.neurons:
                    if n.activation.is_sigmoid_family:
                        tables[(n.activation.stepwise(), n.steepness)] = stepwise_approx(
                            n.activation, n.steepness, dp)
            return FixedPlan(dp, 1 << dp, acc, tables)
    raise Unquantizable("no decimal point in 0..%d keeps the accumulator below 2**31" % max_dp)


def to_fixed(net: Network, plan: FixedPlan) -> Network:
    """Quantize weights to ``round(w * 2**dp)`` and switch to stepwise activations."""
    if net.is_fixed:
        raise FormatMismatch("network is already fixed point")
    dp = plan.dp
    one = 1 << dp
    layers = [net.layers[0]]
    for layer in net.layers[1:]:
        neurons = tuple(
            # steepness snaps to the 2**-dp grid the file format can store
            Neuron(n.activation.stepwise(), round_half_away(n.steepness * one) / one, n.fan_in)
            for n in layer.neurons)
        layers.append(Layer(layer.size, neurons))
    return Network(tuple(layers), tuple(_fixed_weights(net, dp)), Fixed(dp), net.connection_rate)


def to_float(net: Network) -> Network:
    """Dequantize a fixed-point network (activations keep their stepwise kind)."""
    if not net.is_fixed:
        raise FormatMismatch("network is already floating point")
    scale = float(net.format.multiplier)
    from .model.network import Float
    return Network(net.layers, tuple(w / scale for w in net.weights), Float(), net.connection_rate)


def fan_in_max(net: Network) -> int:
    """Largest neuron fan-in, bias connection included."""
    return max(prev.size + 1 for prev in net.layers[:-1])


def stepwise_error_bound(net: Network) -> float:
    """Bound on ``|stepwise float output - exact float output|``.

    Propagates each layer's table error through the next layer's weights using
    the exact activation's Lipschitz constant.
    """
    err = 0.0
    for li in range(1, len(net.layers)):
        w = np.abs(net.layer_matrix(li)[:, :-1].astype(np.float64))
        layer_err = 0.0
        for k, n in enumerate(net.layers[li].neurons):
            kind = n.activation
            if kind is ActivationKind.THRESHOLD:
                if err > 0:
                    return math.inf
                continue
            own = stepwise_max_error(kind) if kind.is_sigmoid_family else 0.0
            layer_err = max(layer_err, lipschitz(kind, n.steepness) * float(w[k].sum()) * err + own)
        err = layer_err
    return err


def parity_epsilon(net: Network, dp: int) -> float:
    """``fan_in_max * 2**-dp + stepwise_error_bound``: tolerance between the
    rescaled fixed-point and the exact float outputs of ``net``."""
    return fan_in_max(net) * 2.0 ** -dp + stepwise_error_bound(net)

"""Memory footprint estimate and tier/transfer-strategy selection."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from ..errors import NetworkTooLarge
from ..model.network import Network, count_params
from .targets import Family, MemoryTier, TargetDescriptor, TierKind


class Strategy(enum.Enum):
    RESIDENT = "resident"
    LAYER_WISE_DMA = "layer-wise DMA"
    NEURON_WISE_DMA = "neuron-wise DMA"


# Resident-L1 -> layer-wise -> neuron-wise is the only progression on a cluster
STRATEGY_ORDER = (Strategy.RESIDENT, Strategy.LAYER_WISE_DMA, Strategy.NEURON_WISE_DMA)


@dataclass(frozen=True)
class PlacementPlan:
    e_m: int
    tier: MemoryTier
    strategy: Strategy
    largest_layer_bytes: int
    double_buffered: bool
    dtype_bytes: int = 4
    buffer_bytes: int = 0  # neuron records + data buffers, the non-weight part of e_m

    def summary(self) -> str:
        return (f"E_m: {self.e_m} bytes\n"
                f"tier: {self.tier.name} ({self.tier.kind.value}, {self.tier.capacity} bytes)\n"
                f"strategy: {self.strategy.value}\n"
                f"largest layer: {self.largest_layer_bytes} bytes\n"
                f"double buffered: {'yes' if self.double_buffered else 'no'}")


def estimate_memory(net: Network, dtype_bytes: int, data_buffer_len: int) -> int:
    """E_m = (2*L_buf + 5*N_neurons + N_weights + 2*N_layers) * dtype_bytes.

    ``data_buffer_len`` is the raw length of one input sample; the factor 2
    for double buffering is applied here and nowhere else.
    """
    n_neurons, n_weights, n_layers = count_params(net)
    return (2 * data_buffer_len + 5 * n_neurons + n_weights + 2 * n_layers) * dtype_bytes


def layer_bytes(net: Network, dtype_bytes: int) -> list[int]:
    """Bytes of each non-input layer: its weights plus its neuron records."""
    sizes = net.layer_sizes
    return [((p + 1) * c + 5 * (c + 1)) * dtype_bytes for p, c in zip(sizes, sizes[1:])]


def largest_row_bytes(net: Network, dtype_bytes: int) -> int:
    """Largest single-neuron weight row (bias included)."""
    return max(p + 1 for p in net.layer_sizes[:-1]) * dtype_bytes


def _buffer_bytes(net: Network, dtype_bytes: int, data_buffer_len: int) -> int:
    _, n_weights, _ = count_params(net)
    return estimate_memory(net, dtype_bytes, data_buffer_len) - n_weights * dtype_bytes


def _require(target: TargetDescriptor, kind: TierKind) -> MemoryTier:
    tier = target.tier(kind)
    if tier is None:
        raise NetworkTooLarge(f"target {target.name} has no {kind.value} tier")
    return tier


def plan_placement(net: Network, target: TargetDescriptor, dtype_bytes: int = 4,
                   data_buffer_len: Optional[int] = None,
                   force: Optional[Strategy] = None) -> PlacementPlan:
    """Pick the memory tier closest to the core that holds the network.

    ``force`` pins a cluster strategy (if it is feasible), which the cost
    model comparisons use.
    """
    if dtype_bytes <= 0:
        raise ValueError("dtype_bytes must be positive")
    buf_len = net.num_inputs if data_buffer_len is None else data_buffer_len
    e_m = estimate_memory(net, dtype_bytes, buf_len)
    largest = max(layer_bytes(net, dtype_bytes))
    buffers = _buffer_bytes(net, dtype_bytes, buf_len)

    def plan(tier, strategy, dbuf=False):
        return PlacementPlan(e_m, tier, strategy, largest, dbuf, dtype_bytes, buffers)

    if target.family is Family.CORTEX_M:
        ram = _require(target, TierKind.WORKING_RAM)
        if e_m <= ram.capacity:
            return plan(ram, Strategy.RESIDENT)
        flash = target.tier(TierKind.FLASH)
        if flash is not None and e_m <= flash.capacity:
            # weights are read-only in flash; neuron buffers still need RAM
            if buffers > ram.capacity:
                raise NetworkTooLarge(
                    f"neuron buffers ({buffers} bytes) exceed {ram.name} ({ram.capacity} bytes)")
            return plan(flash, Strategy.RESIDENT)
        raise NetworkTooLarge(f"network needs {e_m} bytes; no tier of {target.name} holds it")

    if target.family is Family.PULP_FC:
        for kind in (TierKind.PRIVATE_L2, TierKind.SHARED_L2):
            tier = target.tier(kind)
            if tier is not None and e_m <= tier.capacity:
                return plan(tier, Strategy.RESIDENT)
        raise NetworkTooLarge(f"network needs {e_m} bytes; no tier of {target.name} holds it")

    l1 = _require(target, TierKind.CLUSTER_L1)
    l2 = _require(target, TierKind.SHARED_L2)
    if e_m > l2.capacity:
        raise NetworkTooLarge(f"network needs {e_m} bytes, {l2.name} holds {l2.capacity}")
    resident_ok = e_m <= l1.capacity
    layer_ok = 2 * largest <= l1.capacity
    neuron_ok = 2 * largest_row_bytes(net, dtype_bytes) + buffers <= l1.capacity
    if force is None:
        if resident_ok:
            return plan(l1, Strategy.RESIDENT)
        if layer_ok:
            return plan(l2, Strategy.LAYER_WISE_DMA, True)
        if neuron_ok:
            return plan(l2, Strategy.NEURON_WISE_DMA, True)
        raise NetworkTooLarge("a single neuron's weight row does not fit twice in L1")
    feasible = {Strategy.RESIDENT: resident_ok, Strategy.LAYER_WISE_DMA: layer_ok,
                Strategy.NEURON_WISE_DMA: neuron_ok}[force]
    if not feasible:
        raise NetworkTooLarge(f"strategy {force.value} does not fit {l1.name}")
    if force is Strategy.RESIDENT:
        return plan(l1, force)
    return plan(l2, force, True)

"""Analytical cycle, time and energy model.

Per inference, layer ``(p inputs, c neurons)`` on ``n`` cores costs
``ceil(c/n) * p * cycles_per_mac * tier_multiplier`` compute cycles and
``ceil(c/n) * activation_cycles`` activation cycles. Multi-core runs pay a
fork per inference and a barrier per layer. DMA transfers are double
buffered: each chunk (a layer, or one neuron per core) is charged
``max(work, transfer)``, so only the excess of the transfer over the work
shows up as ``dma_cycles``. The cluster wake-up overhead is paid once per
batch.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass

from .errors import InconsistentPlan
from .memplan.placement import PlacementPlan, Strategy, layer_bytes
from .memplan.targets import Family, TargetDescriptor
from .model.network import Network

__all__ = ["CostReport", "simulate", "speedup", "reports_to_csv", "format_table", "CSV_COLUMNS"]


@dataclass(frozen=True)
class CostReport:
    """Batch totals for ``n_inferences`` runs; :meth:`per_inference` gives one run."""
    target: str
    strategy: str
    n_cores: int
    n_inferences: int
    compute_cycles: int
    activation_cycles: int
    dma_cycles: int
    overhead_cycles: int
    total_cycles: int
    frequency: float
    compute_power_mw: float
    overhead_power_mw: float

    def __post_init__(self):
        parts = self.compute_cycles + self.activation_cycles + self.dma_cycles + self.overhead_cycles
        if parts != self.total_cycles:
            raise ValueError("total_cycles must equal the sum of its parts")

    @property
    def time(self) -> float:
        return self.total_cycles / self.frequency

    @property
    def overhead_time(self) -> float:
        return self.overhead_cycles / self.frequency

    @property
    def busy_time(self) -> float:
        return self.time - self.overhead_time

    @property
    def energy(self) -> float:
        """Joules: compute power over busy time plus idle power over overhead."""
        return (self.compute_power_mw * self.busy_time + self.overhead_power_mw * self.overhead_time) * 1e-3

    def per_inference(self) -> "CostReport":
        """One inference with the batch overhead excluded (the n -> inf slope)."""
        n = self.n_inferences
        c, a, d = self.compute_cycles // n, self.activation_cycles // n, self.dma_cycles // n
        return dataclasses.replace(self, n_inferences=1, compute_cycles=c, activation_cycles=a,
                                   dma_cycles=d, overhead_cycles=0, total_cycles=c + a + d)

    def row(self) -> dict:
        return {
            "target": self.target, "strategy": self.strategy, "cores": self.n_cores,
            "inferences": self.n_inferences, "compute_cycles": self.compute_cycles,
            "activation_cycles": self.activation_cycles, "dma_cycles": self.dma_cycles,
            "overhead_cycles": self.overhead_cycles, "total_cycles": self.total_cycles,
            "time_s": f"{self.time:.9g}", "energy_j": f"{self.energy:.9g}",
        }


CSV_COLUMNS = ["target", "strategy", "cores", "inferences", "compute_cycles", "activation_cycles",
               "dma_cycles", "overhead_cycles", "total_cycles", "time_s", "energy_j"]


def _cycles_per_mac(net: Network, target: TargetDescriptor) -> int:
    fmt = "fixed" if net.is_fixed else "float"
    if fmt not in target.cycle_table:
        raise InconsistentPlan(f"{target.name} has no FPU; simulate a fixed-point network")
    return target.cycle_table[fmt]


def _check(net: Network, target: TargetDescriptor, plan: PlacementPlan):
    if plan.tier not in target.tiers:
        raise InconsistentPlan(f"plan tier {plan.tier.name} is not a tier of {target.name}")
    if plan.strategy is not Strategy.RESIDENT and target.family is not Family.PULP_CLUSTER:
        raise InconsistentPlan(f"{plan.strategy.value} needs a cluster target with DMA")
    if plan.largest_layer_bytes != max(layer_bytes(net, plan.dtype_bytes)):
        raise InconsistentPlan("plan was computed for a different network")


def _dma(target: TargetDescriptor, nbytes: float) -> float:
    return target.dma.setup_cycles + nbytes / target.dma.bytes_per_cycle


def simulate(net: Network, target: TargetDescriptor, plan: PlacementPlan, n_inferences: int = 1,
             *, include_activation: bool = True) -> CostReport:
    if n_inferences < 1:
        raise ValueError("n_inferences must be >= 1")
    _check(net, target, plan)
    cpm = _cycles_per_mac(net, target)
    n = target.n_cores
    mult = plan.tier.access_multiplier if plan.strategy is Strategy.RESIDENT else 1.0
    act = target.activation_cycles if include_activation else 0
    dtype = plan.dtype_bytes
    cluster = target.family is Family.PULP_CLUSTER
    sizes = net.layer_sizes

    compute = activation = 0.0
    dma_extra = 0.0
    if n > 1:
        compute += target.fork_cycles + target.barrier_cycles * (len(sizes) - 1)
    if cluster:
        # the input sample moves from L2 into L1 before the first layer
        dma_extra += _dma(target, sizes[0] * dtype)
    lbytes = layer_bytes(net, dtype)
    for li, (p, c) in enumerate(zip(sizes, sizes[1:])):
        per_core = math.ceil(c / n)
        mac_cycles = per_core * p * cpm * mult
        act_cycles = per_core * act
        compute += mac_cycles
        activation += act_cycles
        if plan.strategy is Strategy.LAYER_WISE_DMA:
            dma_extra += max(0.0, _dma(target, lbytes[li]) - (mac_cycles + act_cycles))
        elif plan.strategy is Strategy.NEURON_WISE_DMA:
            step_work = p * cpm + act
            remaining = c
            for _ in range(per_core):
                rows = min(n, remaining)
                remaining -= rows
                dma_extra += max(0.0, _dma(target, rows * (p + 1) * dtype) - step_work)

    c_i, a_i, d_i = (int(math.ceil(v)) for v in (compute, activation, dma_extra))
    overhead = target.cluster_overhead_cycles if cluster else 0
    return CostReport(
        target=target.name, strategy=plan.strategy.value, n_cores=n, n_inferences=n_inferences,
        compute_cycles=c_i * n_inferences, activation_cycles=a_i * n_inferences,
        dma_cycles=d_i * n_inferences, overhead_cycles=overhead,
        total_cycles=(c_i + a_i + d_i) * n_inferences + overhead,
        frequency=target.frequency, compute_power_mw=target.compute_power_mw(),
        overhead_power_mw=target.overhead_power_mw(),
    )


def speedup(a: CostReport, b: CostReport) -> float:
    """How many times faster ``b`` runs than ``a``."""
    return a.time / b.time


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def format_table(reports) -> str:
    """Human-readable report table."""
    header = f"{'target':<14}{'strategy':<18}{'cores':>5}{'n':>7}{'cycles':>12}{'time':>12}{'energy':>12}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(f"{r.target:<14}{r.strategy:<18}{r.n_cores:>5}{r.n_inferences:>7}"
                     f"{r.total_cycles:>12}{r.time * 1e3:>9.3f} ms{r.energy * 1e6:>9.2f} uJ")
    return "\n".join(lines)

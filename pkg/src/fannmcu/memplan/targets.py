"""Target descriptors: memory tiers, cycle tables, DMA, power.

Descriptors are plain data. The built-ins cover the devices the toolkit knows;
anything else comes from a descriptor file (see :func:`parse_target`)::

    name=my-cluster
    family=PulpCluster
    cores=8
    fpu=1
    frequency_hz=100000000
    tier L1 ClusterL1 65536
    tier L2 SharedL2 458752
    cycles fixed 5
    cycles float 5
    dma=50 8
    cluster_overhead_cycles=120000
    power active@1 20.35
    power active@8 61.79
    power overhead 11.88
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Optional

from ..errors import TargetFileError

KB = 1024


class TierKind(enum.Enum):
    WORKING_RAM = "WorkingRAM"
    FLASH = "Flash"
    PRIVATE_L2 = "PrivateL2"
    SHARED_L2 = "SharedL2"
    CLUSTER_L1 = "ClusterL1"


class Family(enum.Enum):
    CORTEX_M = "CortexM"
    PULP_FC = "PulpFC"
    PULP_CLUSTER = "PulpCluster"


@dataclass(frozen=True)
class MemoryTier:
    name: str
    capacity: int
    kind: TierKind
    access_multiplier: float = 1.0  # compute slowdown when weights live here

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError(f"tier {self.name}: capacity must be positive")


@dataclass(frozen=True)
class DmaParams:
    setup_cycles: int = 50
    bytes_per_cycle: float = 4.0


# Cost-model defaults
DEFAULT_ACTIVATION_CYCLES = 50
DEFAULT_FORK_CYCLES = 300
DEFAULT_BARRIER_CYCLES = 20
DEFAULT_FLASH_MULTIPLIER = 1.15


@dataclass(frozen=True)
class TargetDescriptor:
    name: str
    family: Family
    n_cores: int
    has_fpu: bool
    tiers: tuple[MemoryTier, ...]
    cycle_table: dict  # "fixed" / "float" -> cycles per MAC in the inner loop
    frequency: float
    power_profile: dict = field(default_factory=dict)  # mode -> mW
    dma: Optional[DmaParams] = None
    cluster_overhead_cycles: int = 0
    activation_cycles: int = DEFAULT_ACTIVATION_CYCLES
    fork_cycles: int = DEFAULT_FORK_CYCLES
    barrier_cycles: int = DEFAULT_BARRIER_CYCLES

    def __post_init__(self):
        if self.n_cores < 1:
            raise ValueError("n_cores must be >= 1")
        if self.family is Family.PULP_CLUSTER and self.dma is None:
            raise ValueError(f"{self.name}: a PulpCluster target needs DMA parameters")
        if "fixed" not in self.cycle_table:
            raise ValueError(f"{self.name}: cycle_table needs a 'fixed' entry")
        if self.has_fpu != ("float" in self.cycle_table):
            raise ValueError(f"{self.name}: cycle_table has a 'float' entry iff the target has an FPU")
        if not self.tiers:
            raise ValueError(f"{self.name}: at least one memory tier is required")

    def tier(self, kind: TierKind) -> Optional[MemoryTier]:
        for t in self.tiers:
            if t.kind is kind:
                return t
        return None

    def with_cores(self, n: int) -> "TargetDescriptor":
        return dataclasses.replace(self, n_cores=n)

    def compute_power_mw(self) -> float:
        """Average power while computing with ``n_cores`` cores."""
        p = self.power_profile
        key = f"active@{self.n_cores}"
        if key in p:
            return p[key]
        points = sorted((int(k.split("@")[1]), v) for k, v in p.items() if k.startswith("active@"))
        if points:
            if len(points) == 1:
                return points[0][1]
            (n0, p0), (n1, p1) = points[0], points[-1]
            return p0 + (p1 - p0) * (self.n_cores - n0) / (n1 - n0)
        return p.get("active", 0.0)

    def overhead_power_mw(self) -> float:
        return self.power_profile.get("overhead", self.compute_power_mw())


def _m(name, family, cores, fpu, tiers, cycles, mhz, power, **kw):
    return TargetDescriptor(name, family, cores, fpu, tuple(tiers), cycles, mhz * 1e6, power, **kw)


def _flash(capacity):
    return MemoryTier("flash", capacity, TierKind.FLASH, DEFAULT_FLASH_MULTIPLIER)


# Cortex-M4: 8 (float) and 7 (fixed) inner-loop cycles per MAC; nRF52832 power.
# Cortex-M0/M7 and the generic host numbers are estimates, not measurements.
BUILTIN_TARGETS = {
    "generic": _m("generic", Family.CORTEX_M, 1, True,
                  [MemoryTier("ram", 1 << 30, TierKind.WORKING_RAM)],
                  {"fixed": 7, "float": 8}, 100, {"active": 10.0}),
    "cortex-m0": _m("cortex-m0", Family.CORTEX_M, 1, False,
                    [MemoryTier("ram", 32 * KB, TierKind.WORKING_RAM), _flash(256 * KB)],
                    {"fixed": 11}, 48, {"active": 3.0}),
    "cortex-m4": _m("cortex-m4", Family.CORTEX_M, 1, True,
                    [MemoryTier("ram", 96 * KB, TierKind.WORKING_RAM), _flash(1024 * KB)],
                    {"fixed": 7, "float": 8}, 64, {"active": 10.44}),
    "cortex-m7": _m("cortex-m7", Family.CORTEX_M, 1, True,
                    [MemoryTier("ram", 512 * KB, TierKind.WORKING_RAM), _flash(2048 * KB)],
                    {"fixed": 5, "float": 6}, 216, {"active": 100.0}),
    # IBEX fabric controller (RV32IMC, no FPU), ~2.2x slower than one RI5CY
    "pulp-fc": _m("pulp-fc", Family.PULP_FC, 1, False,
                  [MemoryTier("private-l2", 64 * KB, TierKind.PRIVATE_L2),
                   MemoryTier("shared-l2", 448 * KB, TierKind.SHARED_L2)],
                  {"fixed": 11}, 100, {"active": 10.75}),
    # eight RI5CY cores, 5 cycles per MAC in either format; 64-bit cluster DMA
    "pulp-cluster": _m("pulp-cluster", Family.PULP_CLUSTER, 8, True,
                       [MemoryTier("l1", 64 * KB, TierKind.CLUSTER_L1),
                        MemoryTier("shared-l2", 448 * KB, TierKind.SHARED_L2)],
                       {"fixed": 5, "float": 5}, 100,
                       {"active@1": 20.35, "active@8": 61.79, "overhead": 11.88},
                       dma=DmaParams(50, 8.0), cluster_overhead_cycles=120_000),
}


def get_target(name: str) -> TargetDescriptor:
    try:
        return BUILTIN_TARGETS[name]
    except KeyError:
        raise TargetFileError(
            f"unknown platform {name!r}; choose one of {', '.join(BUILTIN_TARGETS)} or pass a target file"
        ) from None


_BOOL = {"1": True, "0": False, "true": True, "false": False, "yes": True, "no": False}


def parse_target(text: str) -> TargetDescriptor:
    """Parse a line-oriented target descriptor (``key=value`` plus ``tier``,
    ``cycles`` and ``power`` entries). ``#`` starts a comment."""
    kv: dict[str, str] = {}
    tiers, cycles, power = [], {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "tier":
                mult = float(words[4]) if len(words) > 4 else (
                    DEFAULT_FLASH_MULTIPLIER if words[2] == "Flash" else 1.0)
                tiers.append(MemoryTier(words[1], int(words[3]), TierKind(words[2]), mult))
            elif words[0] == "cycles":
                cycles[words[1].lower()] = int(words[2])
            elif words[0] == "power":
                power[words[1]] = float(words[2])
            elif "=" in line:
                key, value = line.split("=", 1)
                kv[key.strip()] = value.strip()
            else:
                raise ValueError(f"unrecognised entry {line!r}")
        except (IndexError, ValueError) as exc:
            raise TargetFileError(f"line {lineno}: {exc or 'incomplete entry'}") from None

    try:
        family = Family(kv["family"])
        fpu = _BOOL[kv.get("fpu", "0").lower()]
        dma = None
        if kv.get("dma", "none") != "none":
            setup, bw = kv["dma"].split()
            dma = DmaParams(int(setup), float(bw))
        elif family is Family.PULP_CLUSTER:
            dma = DmaParams()
        extras = {}
        for key in ("cluster_overhead_cycles", "activation_cycles", "fork_cycles", "barrier_cycles"):
            if key in kv:
                extras[key] = int(kv[key])
        return TargetDescriptor(
            name=kv.get("name", "custom"),
            family=family,
            n_cores=int(kv.get("cores", "1")),
            has_fpu=fpu,
            tiers=tuple(tiers),
            cycle_table=cycles,
            frequency=float(kv["frequency_hz"]),
            power_profile=power,
            dma=dma,
            **extras,
        )
    except KeyError as exc:
        raise TargetFileError(f"target file is missing {exc.args[0]!r}") from None
    except ValueError as exc:
        raise TargetFileError(str(exc)) from None


def format_target(t: TargetDescriptor) -> str:
    """Inverse of :func:`parse_target`."""
    lines = [
        f"name={t.name}",
        f"family={t.family.value}",
        f"cores={t.n_cores}",
        f"fpu={1 if t.has_fpu else 0}",
        f"frequency_hz={t.frequency:.0f}",
    ]
    for tier in t.tiers:
        lines.append(f"tier {tier.name} {tier.kind.value} {tier.capacity} {tier.access_multiplier:g}")
    for fmt, c in sorted(t.cycle_table.items()):
        lines.append(f"cycles {fmt} {c}")
    lines.append("dma=none" if t.dma is None else f"dma={t.dma.setup_cycles} {t.dma.bytes_per_cycle:g}")
    for key in ("cluster_overhead_cycles", "activation_cycles", "fork_cycles", "barrier_cycles"):
        lines.append(f"{key}={getattr(t, key)}")
    for mode, mw in t.power_profile.items():
        lines.append(f"power {mode} {mw:g}")
    return "\n".join(lines) + "\n"


def read_target(path) -> TargetDescriptor:
    with open(path, encoding="utf-8") as f:
        return parse_target(f.read())

"""Benchmark network family and target sweeps (CSV output)."""

from __future__ import annotations

import csv
import dataclasses
import functools
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .costsim import simulate, speedup
from .errors import NetworkTooLarge
from .memplan.placement import plan_placement
from .memplan.targets import TargetDescriptor
from .model.network import ActivationKind, Network, build_mlp, expected_weight_count
from .quantize import plan_fixed, to_fixed

FAMILY_INPUTS = 100
FAMILY_OUTPUTS = 8
SWEEP_SEED = 1234

SWEEP_COLUMNS = ["L", "hidden_units", "target", "cores", "dtype", "strategy", "e_m",
                 "cycles", "time_s", "speedup_vs_first", "speedup_vs_1core"]
LAYER_COLUMNS = ["inputs", "outputs", "target", "cores", "dtype", "strategy", "cycles", "time_s"]


def hidden_width(l: int, d: int) -> int:
    """Width of hidden layer ``l`` (1-based): ``(l mod 2 + l div 2) * d``."""
    return (l % 2 + l // 2) * d


def gen_family(L: int, d: int) -> list[int]:
    if L < 1 or d < 1:
        raise ValueError("L and d must be >= 1")
    return [FAMILY_INPUTS] + [hidden_width(l, d) for l in range(1, L + 1)] + [FAMILY_OUTPUTS]


def family_hidden_total(L: int, d: int) -> int:
    """Closed form of ``sum_l hidden_width(l, d)`` for ``l = 1..L``."""
    k = L // 2
    if L % 2 == 0:
        return d * k * (k + 1)
    return d * (k + 1) ** 2


def family_net(sizes: Sequence[int], dtype: str = "fixed", seed: int = SWEEP_SEED) -> Network:
    """Deterministic pseudo-random sigmoid net; fixed-point if asked."""
    return _family_net(tuple(sizes), dtype, seed)


@functools.lru_cache(maxsize=64)
def _family_net(sizes, dtype, seed):
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-0.1, 0.1, expected_weight_count(sizes))
    net = build_mlp(sizes, ActivationKind.SIGMOID, 0.5, weights.tolist())
    if dtype == "fixed":
        net = to_fixed(net, plan_fixed(net))
    return net


@dataclass(frozen=True)
class SweepRow:
    L: int
    hidden_units: int
    target: str
    cores: int
    dtype: str
    strategy: str
    e_m: int
    cycles: int
    time_s: float
    speedup_vs_first: float
    speedup_vs_1core: float

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("time_s", "speedup_vs_first", "speedup_vs_1core"):
            d[key] = f"{d[key]:.6g}"
        return d


def _dtype_bytes(dtype: str) -> int:
    return 4  # int32 and float32 alike


def _one_config(sizes, target: TargetDescriptor, dtype: str, include_activation: bool):
    """Per-inference report of ``sizes`` on ``target`` (None when it does not fit)."""
    net = family_net(sizes, dtype)
    try:
        plan = plan_placement(net, target, _dtype_bytes(dtype), sizes[0])
    except NetworkTooLarge:
        return None, None
    return plan, simulate(net, target, plan, include_activation=include_activation).per_inference()


def sweep(targets: Sequence[TargetDescriptor], L_range: Iterable[int], d: int = 8,
          dtype: str = "fixed", *, include_activation: bool = False,
          workers: Optional[int] = None) -> list[SweepRow]:
    """One row per (L, target).

    ``speedup_vs_first`` compares against the first target in the list;
    ``speedup_vs_1core`` against the same target restricted to one core.
    Targets without an FPU are skipped for float sweeps; configurations
    that do not fit a target are skipped too.
    """
    targets = list(targets)
    if dtype == "float":
        targets = [t for t in targets if t.has_fpu]
    Ls = list(L_range)

    def work(L):
        sizes = gen_family(L, d)
        out = []
        base = None
        for t in targets:
            plan, rep = _one_config(sizes, t, dtype, include_activation)
            if rep is None:
                continue
            if base is None:
                base = rep
            one = rep
            if t.n_cores > 1:
                _, one = _one_config(sizes, t.with_cores(1), dtype, include_activation)
            out.append(SweepRow(L, sum(sizes[1:-1]), t.name, t.n_cores, dtype, plan.strategy.value,
                                plan.e_m, rep.total_cycles, rep.time, speedup(base, rep),
                                speedup(one, rep)))
        return out

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(work, Ls))
    return [row for rows in results for row in rows]


def layer_sweep(targets: Sequence[TargetDescriptor], inputs: Iterable[int], outputs: Iterable[int],
                dtype: str = "fixed") -> list[dict]:
    """Single-layer ``inputs x outputs`` grid; activation excluded."""
    rows = []
    for t in targets:
        if dtype == "float" and not t.has_fpu:
            continue
        for n_in in inputs:
            for n_out in outputs:
                plan, rep = _one_config([n_in, n_out], t, dtype, False)
                if rep is None:
                    continue
                rows.append({"inputs": n_in, "outputs": n_out, "target": t.name, "cores": t.n_cores,
                             "dtype": dtype, "strategy": plan.strategy.value,
                             "cycles": rep.total_cycles, "time_s": f"{rep.time:.6g}"})
    return rows


def rows_to_csv(rows, columns=SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.as_dict() if isinstance(r, SweepRow) else r)
    return buf.getvalue()


def parse_range(text: str) -> list[int]:
    """``"1..24"`` or ``"1,2,5"`` or ``"4"``."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v.strip()]


__all__ = ["gen_family", "hidden_width", "family_hidden_total", "family_net", "sweep",
           "layer_sweep", "rows_to_csv", "parse_range", "SweepRow", "SWEEP_COLUMNS",
           "LAYER_COLUMNS"]

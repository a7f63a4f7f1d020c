"""Activation functions and their stepwise (piecewise-linear) tables."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from ..model.network import ActivationKind

# Sigmoid output levels at which the six breakpoints sit (FANN's choice).
STEPWISE_LEVELS = (0.005, 0.05, 0.25, 0.75, 0.95, 0.995)

INT32_MIN = -(1 << 31)
INT32_MAX = (1 << 31) - 1


def round_half_away(x: float) -> int:
    """Round to nearest integer, ties away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def wrap32(v: int) -> int:
    """Two's complement truncation of an integer to int32."""
    return ((v + (1 << 31)) & 0xFFFFFFFF) - (1 << 31)


def c_div(a: int, b: int) -> int:
    """Integer division truncating toward zero, as C99 ``/`` does."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def activation_eval(kind: ActivationKind, steepness: float, x: float) -> float:
    """Real-valued activation of a neuron sum ``x``.

    Linear has gain ``2 * steepness``. Stepwise kinds evaluate their
    real-valued breakpoint table.
    """
    if kind is ActivationKind.LINEAR:
        return 2.0 * steepness * x
    if kind is ActivationKind.THRESHOLD:
        return 0.0 if x < 0 else 1.0
    if kind is ActivationKind.SIGMOID:
        t = 2.0 * steepness * x
        if t >= 0:
            return 1.0 / (1.0 + math.exp(-t))
        e = math.exp(t)
        return e / (1.0 + e)
    if kind is ActivationKind.SIGMOID_SYMMETRIC:
        return math.tanh(steepness * x)
    if kind.is_stepwise:
        xs, ys = real_breakpoints(kind, steepness)
        return float(np.interp(x, xs, ys))
    raise ValueError(f"unknown activation {kind}")


def activation_array(kind: ActivationKind, steepness: float, x: np.ndarray) -> np.ndarray:
    """Vectorised :func:`activation_eval`."""
    if kind is ActivationKind.LINEAR:
        return 2.0 * steepness * x
    if kind is ActivationKind.THRESHOLD:
        return np.where(x < 0, 0.0, 1.0)
    if kind is ActivationKind.SIGMOID:
        t = np.clip(2.0 * steepness * x, -700, 700)
        return 1.0 / (1.0 + np.exp(-t))
    if kind is ActivationKind.SIGMOID_SYMMETRIC:
        return np.tanh(steepness * x)
    if kind.is_stepwise:
        xs, ys = real_breakpoints(kind, steepness)
        return np.interp(x, xs, ys)
    raise ValueError(f"unknown activation {kind}")


def _base(kind: ActivationKind) -> ActivationKind:
    if kind in (ActivationKind.SIGMOID, ActivationKind.SIGMOID_STEPWISE):
        return ActivationKind.SIGMOID
    if kind in (ActivationKind.SIGMOID_SYMMETRIC, ActivationKind.SIGMOID_SYMMETRIC_STEPWISE):
        return ActivationKind.SIGMOID_SYMMETRIC
    raise ValueError(f"{kind} has no stepwise table")


@functools.lru_cache(maxsize=None)
def real_breakpoints(kind: ActivationKind, steepness: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Real-valued ``(xs, ys)`` of the 6-point table for a sigmoid-family kind.

    Breakpoints are the inverse activation of :data:`STEPWISE_LEVELS`; steepness
    is folded into the x positions. Both sigmoid and tanh place their points at
    the same x since ``tanh(s*x) = 2*sigmoid(2*s*x) - 1``.
    """
    if steepness <= 0:
        raise ValueError("stepwise tables need steepness > 0")
    base = _base(kind)
    xs = tuple(math.log(p / (1.0 - p)) / (2.0 * steepness) for p in STEPWISE_LEVELS)
    if base is ActivationKind.SIGMOID:
        ys = STEPWISE_LEVELS
    else:
        ys = tuple(2.0 * p - 1.0 for p in STEPWISE_LEVELS)
    return xs, tuple(ys)


@dataclass(frozen=True)
class ActivationTable:
    """Six fixed-point breakpoints of a stepwise activation.

    Inputs below the first x saturate to the first y, inputs at or above the
    last x to the last y; in between, linear interpolation with C-style
    truncating division.
    """
    kind: ActivationKind
    xs: tuple[int, ...]
    ys: tuple[int, ...]

    def __post_init__(self):
        if len(self.xs) != 6 or len(self.ys) != 6:
            raise ValueError("an activation table has exactly 6 breakpoints")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError(f"breakpoint x positions must increase strictly: {self.xs}")

    def __call__(self, v: int) -> int:
        xs, ys = self.xs, self.ys
        if v < xs[0]:
            return ys[0]
        if v >= xs[5]:
            return ys[5]
        i = 0
        while v >= xs[i + 1]:
            i += 1
        return ys[i] + c_div((ys[i + 1] - ys[i]) * (v - xs[i]), xs[i + 1] - xs[i])

    def eval_array(self, v: np.ndarray) -> np.ndarray:
        """Vectorised ``__call__`` over an int64 array; bit-identical."""
        xs = np.asarray(self.xs, dtype=np.int64)
        ys = np.asarray(self.ys, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        seg = np.clip(np.searchsorted(xs, v, side="right") - 1, 0, 4)
        x0, x1, y0, y1 = xs[seg], xs[seg + 1], ys[seg], ys[seg + 1]
        num = (y1 - y0) * (v - x0)
        den = x1 - x0
        q = np.abs(num) // den  # den > 0
        out = y0 + np.where(num >= 0, q, -q)
        out = np.where(v < xs[0], ys[0], out)
        return np.where(v >= xs[5], ys[5], out)


@functools.lru_cache(maxsize=None)
def stepwise_approx(kind: ActivationKind, steepness: float, dp: int) -> ActivationTable:
    """Fixed-point stepwise table for ``kind`` at decimal point ``dp``."""
    if not kind.is_sigmoid_family:
        raise ValueError(f"{kind.value} is not a sigmoid-family activation")
    xs, ys = real_breakpoints(kind, steepness)
    scale = float(1 << dp)
    return ActivationTable(kind.stepwise(),
                           tuple(round_half_away(x * scale) for x in xs),
                           tuple(round_half_away(y * scale) for y in ys))


def fixed_activation(kind: ActivationKind, steepness: float, dp: int, v: int) -> int:
    """Activation of an int32 neuron sum ``v`` in fixed point."""
    if kind is ActivationKind.LINEAR:
        s = round_half_away(steepness * (1 << dp))
        return wrap32((s * v) >> (dp - 1) if dp >= 1 else 2 * s * v)
    if kind is ActivationKind.THRESHOLD:
        return 0 if v < 0 else 1 << dp
    return stepwise_approx(kind, steepness, dp)(v)


def fixed_activation_array(kind: ActivationKind, steepness: float, dp: int, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if kind is ActivationKind.LINEAR:
        s = round_half_away(steepness * (1 << dp))
        out = (s * v) >> (dp - 1) if dp >= 1 else 2 * s * v
        return out.astype(np.int32).astype(np.int64)
    if kind is ActivationKind.THRESHOLD:
        return np.where(v < 0, 0, 1 << dp).astype(np.int64)
    return stepwise_approx(kind, steepness, dp).eval_array(v)


@functools.lru_cache(maxsize=None)
def stepwise_max_error(kind: ActivationKind) -> float:
    """Largest gap, in output units, between a real stepwise table and the
    exact function it approximates.

    Independent of steepness (which only scales x). Evaluated on a dense grid
    plus a margin covering the grid spacing.
    """
    base = _base(kind)
    xs, ys = real_breakpoints(kind, 0.5)  # steepness 0.5: sigmoid(x) = 1/(1+e^-x)
    grid = np.linspace(-40.0, 40.0, 2_000_001)
    approx = np.interp(grid, xs, ys)
    exact = activation_array(base, 0.5, grid)
    step = grid[1] - grid[0]
    lipschitz = 0.25 if base is ActivationKind.SIGMOID else 0.5
    return float(np.max(np.abs(approx - exact)) + lipschitz * step)


def lipschitz(kind: ActivationKind, steepness: float) -> float:
    """Lipschitz constant of the exact activation."""
    if kind is ActivationKind.LINEAR:
        return 2.0 * steepness
    if kind in (ActivationKind.SIGMOID, ActivationKind.SIGMOID_STEPWISE):
        return steepness / 2.0
    if kind in (ActivationKind.SIGMOID_SYMMETRIC, ActivationKind.SIGMOID_SYMMETRIC_STEPWISE):
        return steepness
    raise ValueError(f"{kind.value} is not Lipschitz continuous")

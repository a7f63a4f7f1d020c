import shutil

import numpy as np
import pytest

from fannmcu.model import ActivationKind, Layer, Network, Neuron
from fannmcu.model.fixtures import (APP_B, APP_C, app_net, identity_net,
                                    random_mlp, xor_net)
from fannmcu.quantize import plan_fixed, to_fixed

ALL_KINDS = [ActivationKind.LINEAR, ActivationKind.THRESHOLD, ActivationKind.SIGMOID,
             ActivationKind.SIGMOID_SYMMETRIC, ActivationKind.SIGMOID_STEPWISE,
             ActivationKind.SIGMOID_SYMMETRIC_STEPWISE]


def mixed_net(sizes, seed=0, kinds=ALL_KINDS):
    """Float net with a random activation and steepness per neuron."""
    rng = np.random.default_rng(seed)
    layers = [Layer(sizes[0])]
    for p, c in zip(sizes, sizes[1:]):
        layers.append(Layer(c, tuple(
            Neuron(kinds[int(rng.integers(len(kinds)))], float(rng.choice([0.25, 0.5, 1.0])), p + 1)
            for _ in range(c))))
    n = sum((p + 1) * c for p, c in zip(sizes, sizes[1:]))
    return Network(tuple(layers), tuple(rng.uniform(-1, 1, n).tolist()))


def quantized(net, **kw):
    return to_fixed(net, plan_fixed(net, **kw))


def float_fixtures():
    """Named float fixtures shared by round-trip, overflow and codegen tests."""
    return {
        "identity": identity_net(),
        "xor": xor_net(),
        "app_c": app_net(APP_C, seed=1),
        "app_b": app_net(APP_B, seed=2),
        "tanh_3l": random_mlp([6, 9, 4], ActivationKind.SIGMOID_SYMMETRIC, 1.0, seed=3),
        "mixed": mixed_net([5, 8, 7, 3], seed=4,
                           kinds=[k for k in ALL_KINDS if k is not ActivationKind.LINEAR]),
    }


def fixed_fixtures():
    return {name: quantized(net) for name, net in float_fixtures().items()}


@pytest.fixture(scope="session")
def cc():
    """Host C compiler, or skip."""
    for name in ("gcc", "cc", "clang"):
        path = shutil.which(name)
        if path:
            return path
    pytest.skip("no host C compiler")


# ---- acceptance summary: one line per criterion, from the real outcomes

_CRITERIA = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    state = _CRITERIA.setdefault(n, [title, "PASS"])
    if call.excinfo is not None and state[1] == "PASS":
        state[1] = "SKIP" if call.excinfo.errisinstance(pytest.skip.Exception) else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, state = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {state}  {title}")

"""Reference networks and datasets used by tests, the CLI and benchmarks."""

from __future__ import annotations

import numpy as np

from .network import (ActivationKind, Dataset, Network, build_mlp,
                      expected_weight_count)

APP_A = (76, 300, 200, 100, 10)  # hand gesture recognition
APP_B = (117, 20, 2)             # fall detection
APP_C = (7, 6, 5)                # activity classification
EXAMPLE_NET = (5, 100, 100, 3)   # profiling network, tanh activations


def identity_net() -> Network:
    # linear gain is 2*steepness, so steepness 0.5 passes values through
    return build_mlp([1, 1], ActivationKind.LINEAR, 0.5, [1.0, 0.0])


def xor_net() -> Network:
    """2-2-1 tanh network solving XOR on {-1, 1} inputs.

    Hidden unit 0 fires for OR, unit 1 for AND; the output computes
    OR and not AND.
    """
    weights = [
        2.0, 2.0, 2.0,     # h0 = tanh(2*(x0 + x1 + 1))
        2.0, 2.0, -2.0,    # h1 = tanh(2*(x0 + x1 - 1))
        2.0, -2.0, -2.0,   # y  = tanh(2*(h0 - h1 - 1))
    ]
    return build_mlp([2, 2, 1], ActivationKind.SIGMOID_SYMMETRIC, 1.0, weights)


def xor_dataset() -> Dataset:
    inputs = ((-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0))
    outputs = ((-1.0,), (1.0,), (1.0,), (-1.0,))
    return Dataset(inputs, outputs, 2, 1)


def random_mlp(layer_sizes, activation=ActivationKind.SIGMOID, steepness=0.5,
               seed=0, scale=1.0) -> Network:
    """Float network with weights drawn uniform in ``[-scale, scale]``."""
    rng = np.random.default_rng(seed)
    n = expected_weight_count(layer_sizes)
    return build_mlp(layer_sizes, activation, steepness,
                     rng.uniform(-scale, scale, n).tolist())


def app_net(sizes, seed=0, activation=ActivationKind.SIGMOID) -> Network:
    """Application-shaped network with Glorot-scaled random weights."""
    rng = np.random.default_rng(seed)
    weights = []
    for prev, cur in zip(sizes, sizes[1:]):
        limit = float(np.sqrt(6.0 / (prev + 1 + cur)))
        weights.extend(rng.uniform(-limit, limit, (prev + 1) * cur).tolist())
    return build_mlp(sizes, activation, 0.5, weights)


def random_dataset(num_inputs, num_outputs, num_samples, seed=0) -> Dataset:
    """Inputs uniform in [-1, 1]; one-hot labels."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, (num_samples, num_inputs))
    labels = rng.integers(0, num_outputs, num_samples)
    y = np.zeros((num_samples, num_outputs))
    y[np.arange(num_samples), labels] = 1.0
    return Dataset(tuple(map(tuple, x.tolist())), tuple(map(tuple, y.tolist())),
                   num_inputs, num_outputs)

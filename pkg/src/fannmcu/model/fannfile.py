"""Reader and writer for FANN's textual network (.net) and dataset (.data)
formats, as produced by FANN 2.2's ``fann_save`` / ``fann_save_to_fixed``.
"""

from __future__ import annotations

import re
from typing import Iterable

from ..errors import (HeaderMismatch, MalformedField, NotFullyConnected,
                      RaggedRow, UnsupportedVersion)
from .network import (ActivationKind, Dataset, Fixed, Float, Layer, Network,
                      Neuron, count_params, expected_weight_count)

FLOAT_VERSION = "FANN_FLO_2.1"
FIXED_VERSION = "FANN_FIX_2.0"

# FANN's enum fann_activationfunc_enum; only the kinds we model are mapped.
ACTIVATION_CODES = {
    0: ActivationKind.LINEAR,
    1: ActivationKind.THRESHOLD,
    3: ActivationKind.SIGMOID,
    4: ActivationKind.SIGMOID_STEPWISE,
    5: ActivationKind.SIGMOID_SYMMETRIC,
    6: ActivationKind.SIGMOID_SYMMETRIC_STEPWISE,
}
ACTIVATION_IDS = {kind: code for code, kind in ACTIVATION_CODES.items()}

_TUPLE_RE = re.compile(r"\(([^()]*)\)")

# Training parameters FANN writes; we emit FANN 2.2 defaults so the files load
# in FANN itself. The reader ignores all of them.
_TRAINING_DEFAULTS = [
    ("learning_rate", "0.700000"),
    ("connection_rate", "1.000000"),
    ("network_type", "0"),
    ("learning_momentum", "0.000000"),
    ("training_algorithm", "2"),
    ("train_error_function", "1"),
    ("train_stop_function", "0"),
    ("cascade_output_change_fraction", "0.010000"),
    ("quickprop_decay", "-0.000100"),
    ("quickprop_mu", "1.750000"),
    ("rprop_increase_factor", "1.200000"),
    ("rprop_decrease_factor", "0.500000"),
    ("rprop_delta_min", "0.000000"),
    ("rprop_delta_max", "50.000000"),
    ("rprop_delta_zero", "0.100000"),
    ("cascade_output_stagnation_epochs", "12"),
    ("cascade_candidate_change_fraction", "0.010000"),
    ("cascade_candidate_stagnation_epochs", "12"),
    ("cascade_max_out_epochs", "150"),
    ("cascade_min_out_epochs", "50"),
    ("cascade_max_cand_epochs", "150"),
    ("cascade_min_cand_epochs", "50"),
    ("cascade_num_candidate_groups", "2"),
    ("bit_fail_limit", "0.350000"),
    ("cascade_candidate_limit", "1000.000000"),
    ("cascade_weight_multiplier", "0.400000"),
]


def _split_fields(text: str) -> tuple[str, dict[str, str]]:
    lines = text.splitlines()
    if not lines:
        raise UnsupportedVersion("empty network file")
    version = lines[0].strip()
    fields: dict[str, str] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if "=" not in line:
            raise MalformedField(f"line {lineno}: expected key=value, got {line.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        # "neurons (num_inputs, ...)" and "connections (...)" carry a legend
        if key.startswith("neurons ") or key.startswith("connections "):
            key = key.split(" ", 1)[0]
        fields[key] = value.strip()
    return version, fields


def _int_field(fields: dict, key: str) -> int:
    try:
        return int(fields[key])
    except KeyError:
        raise MalformedField(f"missing field {key!r}") from None
    except ValueError:
        raise MalformedField(f"field {key!r} is not an integer: {fields[key]!r}") from None


def _tuples(value: str, width: int, what: str) -> list[list[str]]:
    out = []
    for m in _TUPLE_RE.finditer(value):
        parts = [p.strip() for p in m.group(1).split(",")]
        if len(parts) != width:
            raise MalformedField(f"{what} entry {m.group(0)!r} should have {width} fields")
        out.append(parts)
    return out


def _number(token: str, fixed: bool, what: str):
    try:
        return int(token) if fixed else float(token)
    except ValueError:
        raise MalformedField(f"bad {what} value {token!r}") from None


def parse_network(text: str) -> Network:
    """Parse a FANN_FLO_2.1 or FANN_FIX_2.0 network file.

    Unknown ``key=value`` lines are ignored; only structural inconsistencies
    are rejected. Layer sizes in the file include the bias neuron.
    """
    version, fields = _split_fields(text)
    if version == FLOAT_VERSION:
        fmt = Float()
    elif version == FIXED_VERSION:
        fmt = Fixed(_int_field(fields, "decimal_point"))
        if not 0 <= fmt.decimal_point <= 30:
            raise MalformedField(f"decimal_point {fmt.decimal_point} outside 0..30")
    else:
        raise UnsupportedVersion(f"unsupported FANN version tag {version!r}")
    fixed = isinstance(fmt, Fixed)

    rate = float(fields.get("connection_rate", "1"))
    if rate != 1.0:
        raise NotFullyConnected(f"connection_rate={rate:g}; only fully connected networks are supported")
    if fields.get("network_type", "0").strip() != "0":
        raise NotFullyConnected("network_type is not LAYER (shortcut networks are not supported)")

    try:
        file_sizes = [int(t) for t in fields["layer_sizes"].split()]
    except KeyError:
        raise MalformedField("missing field 'layer_sizes'") from None
    except ValueError:
        raise MalformedField(f"bad layer_sizes {fields['layer_sizes']!r}") from None
    num_layers = _int_field(fields, "num_layers")
    if num_layers != len(file_sizes):
        raise MalformedField(f"num_layers={num_layers} but layer_sizes lists {len(file_sizes)}")
    if len(file_sizes) < 2 or any(s < 2 for s in file_sizes):
        raise MalformedField(f"layer_sizes {file_sizes} must hold >= 2 layers of >= 1 neuron plus bias")
    sizes = [s - 1 for s in file_sizes]

    neuron_entries = _tuples(fields.get("neurons", ""), 3, "neuron")
    if len(neuron_entries) != sum(file_sizes):
        raise MalformedField(
            f"layer_sizes declare {sum(file_sizes)} neurons, file lists {len(neuron_entries)}")
    conn_entries = _tuples(fields.get("connections", ""), 2, "connection")
    need = expected_weight_count(sizes)
    if len(conn_entries) != need:
        raise MalformedField(f"expected {need} connections, file lists {len(conn_entries)}")

    multiplier = fmt.multiplier if fixed else 1
    layers = [Layer(sizes[0])]
    weights = []
    first = 0  # global index of the previous layer's first neuron
    pos = file_sizes[0]
    conn = 0
    for li in range(1, len(sizes)):
        prev_file = file_sizes[li - 1]
        neurons = []
        for k in range(file_sizes[li]):
            n_in, act, steep = neuron_entries[pos + k]
            n_in = int(n_in)
            if k == file_sizes[li] - 1:  # bias neuron
                if n_in != 0:
                    raise MalformedField(f"bias neuron of layer {li} has {n_in} inputs")
                continue
            if n_in != prev_file:
                raise NotFullyConnected(
                    f"layer {li} neuron {k} has {n_in} inputs, expected {prev_file}")
            try:
                kind = ACTIVATION_CODES[int(act)]
            except (KeyError, ValueError):
                raise MalformedField(f"unsupported activation function code {act!r}") from None
            steepness = _number(steep, fixed, "steepness")
            neurons.append(Neuron(kind, steepness / multiplier if fixed else steepness, n_in))
            for i in range(n_in):
                src, w = conn_entries[conn]
                if int(src) != first + i:
                    raise NotFullyConnected(
                        f"connection {conn} goes to neuron {src}, expected {first + i}")
                weights.append(_number(w, fixed, "weight"))
                conn += 1
        layers.append(Layer(sizes[li], tuple(neurons)))
        first += prev_file
        pos += file_sizes[li]
    return Network(tuple(layers), tuple(weights), fmt, 1.0)


def _fmt_float(x: float) -> str:
    return repr(float(x))


def serialize_network(net: Network) -> str:
    """Emit ``net`` in FANN's text format; layer sizes include the bias."""
    fixed = net.is_fixed
    lines = [FIXED_VERSION if fixed else FLOAT_VERSION]
    if fixed:
        lines.append(f"decimal_point={net.format.decimal_point}")
    lines.append(f"num_layers={len(net.layers)}")
    lines.extend(f"{k}={v}" for k, v in _TRAINING_DEFAULTS)
    lines.append("cascade_activation_functions_count=0")
    lines.append("cascade_activation_functions=")
    lines.append("cascade_activation_steepnesses_count=0")
    lines.append("cascade_activation_steepnesses=")
    lines.append("layer_sizes=" + " ".join(str(s + 1) for s in net.layer_sizes) + " ")
    lines.append("scale_included=0")

    def steep_text(s: float) -> str:
        if fixed:
            return str(int(round(s * net.format.multiplier)))
        return _fmt_float(s)

    zero = "0" if fixed else _fmt_float(0.0)
    entries = [f"(0, 0, {zero})"] * (net.layers[0].size + 1)
    for layer in net.layers[1:]:
        for n in layer.neurons:
            entries.append(f"({n.fan_in}, {ACTIVATION_IDS[n.activation]}, {steep_text(n.steepness)})")
        last = layer.neurons[-1]
        entries.append(f"(0, {ACTIVATION_IDS[last.activation]}, {steep_text(last.steepness)})")
    lines.append("neurons (num_inputs, activation_function, activation_steepness)="
                 + " ".join(entries) + " ")

    conns = []
    w = iter(net.weights)
    first = 0
    for prev, cur in zip(net.layers, net.layers[1:]):
        for _ in range(cur.size):
            for i in range(prev.size + 1):
                value = next(w)
                conns.append(f"({first + i}, {int(value) if fixed else _fmt_float(value)})")
        first += prev.size + 1
    lines.append("connections (connected_to_neuron, weight)=" + " ".join(conns) + " ")
    return "\n".join(lines) + "\n"


def read_network(path) -> Network:
    with open(path, encoding="utf-8") as f:
        return parse_network(f.read())


def write_network(net: Network, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_network(net))


def parse_dataset(text: str) -> Dataset:
    """Parse a FANN .data file: header triple, then alternating input and
    output lines."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise HeaderMismatch("empty dataset")
    try:
        n, n_in, n_out = (int(t) for t in lines[0].split())
    except ValueError:
        raise HeaderMismatch(f"bad header {lines[0]!r}; expected 'num_samples num_inputs num_outputs'") from None
    body = lines[1:]
    if len(body) != 2 * n:
        raise HeaderMismatch(f"header declares {n} samples, file holds {len(body) / 2:g}")
    inputs, outputs = [], []
    for i in range(n):
        for line, width, sink, what in ((body[2 * i], n_in, inputs, "input"),
                                        (body[2 * i + 1], n_out, outputs, "output")):
            try:
                row = tuple(float(t) for t in line.split())
            except ValueError:
                raise RaggedRow(f"sample {i}: non-numeric {what} line {line!r}") from None
            if len(row) != width:
                raise RaggedRow(f"sample {i}: {what} line has {len(row)} values, expected {width}")
            sink.append(row)
    return Dataset(tuple(inputs), tuple(outputs), n_in, n_out)


def serialize_dataset(ds: Dataset) -> str:
    out = [f"{ds.num_samples} {ds.num_inputs} {ds.num_outputs}"]
    for x, y in zip(ds.inputs, ds.outputs):
        out.append(" ".join(_fmt_float(v) for v in x))
        out.append(" ".join(_fmt_float(v) for v in y))
    return "\n".join(out) + "\n"


def read_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as f:
        return parse_dataset(f.read())


def make_dataset(inputs: Iterable, outputs: Iterable) -> Dataset:
    ins = tuple(tuple(float(v) for v in row) for row in inputs)
    outs = tuple(tuple(float(v) for v in row) for row in outputs)
    return Dataset(ins, outs, len(ins[0]) if ins else 0, len(outs[0]) if outs else 0)


__all__ = [
    "parse_network", "serialize_network", "read_network", "write_network",
    "parse_dataset", "serialize_dataset", "read_dataset", "make_dataset",
    "count_params", "FLOAT_VERSION", "FIXED_VERSION", "ACTIVATION_CODES",
]

from .network import (ActivationKind, Dataset, Fixed, Float, Layer, Network,
                      Neuron, build_mlp, count_macs, count_params,
                      expected_weight_count)
from .fannfile import (make_dataset, parse_dataset, parse_network,
                       read_dataset, read_network, serialize_dataset,
                       serialize_network, write_network)

__all__ = [
    "ActivationKind", "Dataset", "Fixed", "Float", "Layer", "Network", "Neuron",
    "build_mlp", "count_macs", "count_params", "expected_weight_count",
    "make_dataset", "parse_dataset", "parse_network", "read_dataset",
    "read_network", "serialize_dataset", "serialize_network", "write_network",
]

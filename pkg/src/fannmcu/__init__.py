"""Deploy FANN multi-layer perceptrons to microcontrollers: parse, quantize,
plan memory, generate C, and predict runtime and energy."""

__version__ = "0.1.0"

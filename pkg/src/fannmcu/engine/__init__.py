from .activation import (ActivationTable, activation_eval, fixed_activation,
                         round_half_away, stepwise_approx, wrap32)
from .interpreter import (Trace, batch_evaluate, forward_fixed,
                          forward_fixed_batch, forward_float,
                          forward_float_batch, scale_inputs,
                          with_stepwise_activations)

__all__ = [
    "ActivationTable", "activation_eval", "fixed_activation", "round_half_away",
    "stepwise_approx", "wrap32", "Trace", "batch_evaluate", "forward_fixed",
    "forward_fixed_batch", "forward_float", "forward_float_batch",
    "scale_inputs", "with_stepwise_activations",
]

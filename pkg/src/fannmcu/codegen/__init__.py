from .emitter import (Flavor, GeneratedSource, flavor_for, generate, partition)
from .golden import golden_check, write_golden
from .shim import SHIM_NAME, SHIM_TEXT

__all__ = ["Flavor", "GeneratedSource", "flavor_for", "generate", "partition",
           "golden_check", "write_golden", "SHIM_NAME", "SHIM_TEXT"]

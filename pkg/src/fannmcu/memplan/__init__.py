from .placement import (PlacementPlan, Strategy, estimate_memory, layer_bytes,
                        largest_row_bytes, plan_placement)
from .targets import (BUILTIN_TARGETS, DmaParams, Family, MemoryTier,
                      TargetDescriptor, TierKind, format_target, get_target,
                      parse_target, read_target)

__all__ = [
    "PlacementPlan", "Strategy", "estimate_memory", "layer_bytes",
    "largest_row_bytes", "plan_placement", "BUILTIN_TARGETS", "DmaParams",
    "Family", "MemoryTier", "TargetDescriptor", "TierKind", "format_target",
    "get_target", "parse_target", "read_target",
]

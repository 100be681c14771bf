from hebbiantools.core import systems
from hebbiantools.core.box import InvariantBox, invariant_box, symmetric_box
from hebbiantools.core.network import (
    ModelError,
    NetworkSpec,
    ReducedState3,
    SymmetricParams,
    SystemState,
    bidirectional_motif,
    single_synapse_motif,
)

__all__ = [
    "InvariantBox",
    "ModelError",
    "NetworkSpec",
    "ReducedState3",
    "SymmetricParams",
    "SystemState",
    "bidirectional_motif",
    "invariant_box",
    "single_synapse_motif",
    "symmetric_box",
    "systems",
]

from hebbiantools.core import NetworkSpec, bidirectional_motif, single_synapse_motif, systems
from hebbiantools.lib.equilibria import find_equilibria
from hebbiantools.lib.integrate import integrate

VERSION = __version__ = "0.1.0"
__all__ = [
    "VERSION",
    "NetworkSpec",
    "bidirectional_motif",
    "find_equilibria",
    "integrate",
    "single_synapse_motif",
    "systems",
]

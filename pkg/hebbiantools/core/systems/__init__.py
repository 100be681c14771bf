"""
The ``hebbiantools.core.systems`` module wraps the dynamical systems behind a common interface.

Each wrapper exposes the vector field, the analytic Jacobian and the invariant box on flat state
vectors, so that integration, equilibrium search and sweeps work on any of them.

.. code-block:: python

    from hebbiantools.core.network import bidirectional_motif
    from hebbiantools.core.systems import NetworkSystem, Reduced3System

    motif = NetworkSystem(bidirectional_motif(c1=-3.0, c2=-3.0))
    reduced = Reduced3System(c=-3.0)
"""

from hebbiantools.core.network import NetworkSpec
from hebbiantools.core.systems.default import DefaultSystem
from hebbiantools.core.systems.network import NetworkSystem
from hebbiantools.core.systems.reduced import PlanarSystem, Reduced3System

SYSTEMS_LOOKUP: dict[str, type[DefaultSystem]] = {
    NetworkSystem.kind: NetworkSystem,
    Reduced3System.kind: Reduced3System,
    PlanarSystem.kind: PlanarSystem,
}


def as_system(system: DefaultSystem | NetworkSpec) -> DefaultSystem:
    """
    Wraps a bare :class:`NetworkSpec` into a :class:`NetworkSystem`; systems pass through.

    :param system: A system or a network specification.
    :type system: Union[DefaultSystem, NetworkSpec]
    :return: The system.
    :rtype: DefaultSystem
    """
    if isinstance(system, NetworkSpec):
        return NetworkSystem(system)
    return system


__all__ = [
    "DefaultSystem",
    "NetworkSystem",
    "PlanarSystem",
    "Reduced3System",
    "SYSTEMS_LOOKUP",
    "as_system",
]

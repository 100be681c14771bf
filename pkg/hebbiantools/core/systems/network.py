from collections.abc import Sequence
from typing import Any

import numpy as np

from hebbiantools.core import dynamics as dyn
from hebbiantools.core.box import InvariantBox, invariant_box
from hebbiantools.core.network import NetworkSpec, is_bidirectional_motif
from hebbiantools.core.systems.default import DefaultSystem


class NetworkSystem(DefaultSystem):
    """The general network system described by a :class:`NetworkSpec`."""

    kind = "network"

    def __init__(self, spec: NetworkSpec) -> None:
        """
        Wraps a network specification.

        :param spec: The network.
        :type spec: NetworkSpec
        """
        self._spec = spec

    def __repr__(self) -> str:
        return f"<NetworkSystem {self._spec!r}>"

    @property
    def spec(self) -> NetworkSpec:
        """
        The wrapped network specification.

        :return: The specification.
        :rtype: NetworkSpec
        """
        return self._spec

    @property
    def n_nodes(self) -> int:
        return self._spec.n

    @property
    def n_weights(self) -> int:
        return self._spec.n_edges

    @property
    def is_autonomous(self) -> bool:
        return self._spec.is_autonomous

    @property
    def is_swap_symmetric(self) -> bool:
        """
        ``True`` for the bidirectional motif with identical parameters on both sides, whose
        symmetric plane ``x1 = x2, w1 = w2`` is invariant.
        """
        spec = self._spec
        return (
            is_bidirectional_motif(spec)
            and spec.a[0] == spec.a[1]
            and spec.b[0] == spec.b[1]
            and spec.c[0] == spec.c[1]
            and spec.u[0] == spec.u[1]
        )

    def field(self, vector: np.ndarray) -> np.ndarray:
        return dyn.vector_field(self._spec, vector)

    def jacobian(self, vector: np.ndarray) -> np.ndarray:
        return dyn.jacobian(self._spec, vector)

    def invariant_box(self) -> InvariantBox:
        return invariant_box(self._spec)

    def weight_nullcline(self, x: np.ndarray) -> np.ndarray:
        spec = self._spec
        phi = dyn.sigmoid(np.asarray(x, dtype=float).reshape(spec.n))
        return spec.c * phi[spec.edges[:, 0]] * phi[spec.edges[:, 1]] / spec.b

    def labels(self) -> list[str]:
        return self._spec.state_labels()

    def require_autonomous(self) -> None:
        self._spec.require_autonomous()

    def with_learning_rate(
        self,
        value: float,
        targets: Sequence[int] | None = None,
        ratios: Sequence[float] | None = None,
    ) -> "NetworkSystem":
        indices = list(range(self._spec.n_edges) if targets is None else targets)
        values = value if ratios is None else value * np.asarray(ratios, dtype=float)
        return NetworkSystem(self._spec.with_learning_rates(indices, values))

    def mirror(self, vector: np.ndarray) -> np.ndarray | None:
        if not self.is_swap_symmetric:
            return None
        x1, x2, w1, w2 = np.asarray(vector, dtype=float)
        return np.array([x2, x1, w2, w1])

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "spec": self._spec.to_dict()}

from collections.abc import Sequence
from typing import Any

import numpy as np

from hebbiantools.core import dynamics as dyn
from hebbiantools.core.box import InvariantBox, symmetric_box
from hebbiantools.core.network import ModelError
from hebbiantools.core.systems.default import DefaultSystem


class _SymmetricReduction(DefaultSystem):
    """Systems parameterized by the single learning rate ``c`` of the symmetric motif."""

    def __init__(self, c: float) -> None:
        """
        :param c: The shared learning rate, nonzero.
        :type c: float
        :raises ModelError: If ``c`` is zero or not finite.
        """
        if not np.isfinite(c) or c == 0:
            raise ModelError("c must be finite and nonzero")
        self._c = float(c)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} c={self._c!r}>"

    @property
    def c(self) -> float:
        """The shared learning rate."""
        return self._c

    def invariant_box(self) -> InvariantBox:
        return symmetric_box(self._c)

    def with_learning_rate(
        self,
        value: float,
        targets: Sequence[int] | None = None,
        ratios: Sequence[float] | None = None,
    ) -> "_SymmetricReduction":
        return type(self)(value)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "c": self._c}


class Reduced3System(_SymmetricReduction):
    """
    The three-dimensional system ``(x1, x2, w)`` of the symmetric bidirectional motif.

    .. code-block:: python

        from hebbiantools.core.systems import Reduced3System

        system = Reduced3System(c=-150.0)
        print(system.field([0.0, 0.0, 0.0]))
    """

    kind = "reduced3"

    @property
    def n_nodes(self) -> int:
        return 2

    @property
    def n_weights(self) -> int:
        return 1

    def field(self, vector: np.ndarray) -> np.ndarray:
        return dyn.reduced3_field(self._c, vector)

    def jacobian(self, vector: np.ndarray) -> np.ndarray:
        return dyn.reduced3_jacobian(self._c, vector)

    def weight_nullcline(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = np.asarray(x, dtype=float).reshape(2)
        return np.array([self._c * dyn.sigmoid(x1) * dyn.sigmoid(x2)])

    def labels(self) -> list[str]:
        return ["x_1", "x_2", "w"]

    def mirror(self, vector: np.ndarray) -> np.ndarray:
        return dyn.apply_symmetry_s(vector).as_array()


class PlanarSystem(_SymmetricReduction):
    """The planar system ``(x1, w)`` on the symmetric plane."""

    kind = "planar"

    @property
    def n_nodes(self) -> int:
        return 1

    @property
    def n_weights(self) -> int:
        return 1

    def field(self, vector: np.ndarray) -> np.ndarray:
        x1, w = np.asarray(vector, dtype=float).reshape(2)
        return dyn.reduced_planar_field(self._c, x1, w)

    def jacobian(self, vector: np.ndarray) -> np.ndarray:
        x1, w = np.asarray(vector, dtype=float).reshape(2)
        return dyn.reduced_planar_jacobian(self._c, x1, w)

    def weight_nullcline(self, x: np.ndarray) -> np.ndarray:
        (x1,) = np.asarray(x, dtype=float).reshape(1)
        return np.array([self._c * dyn.sigmoid(x1) ** 2])

    def labels(self) -> list[str]:
        return ["x_1", "w"]

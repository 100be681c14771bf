from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import Any

import numpy as np

from hebbiantools.constants import DEDUP_REL_TOL, SymmetryTag
from hebbiantools.core.box import InvariantBox


class DefaultSystem(ABC):
    """
    Common interface of the autonomous systems that the integrators, the equilibrium search and
    the sweeps operate on.

    A system owns its parameters and exposes its vector field and Jacobian on flat state vectors.
    The state vector holds ``n_nodes`` activations followed by ``n_weights`` weights.
    """

    kind: str = "default"

    @property
    @abstractmethod
    def n_nodes(self) -> int:
        """The number of activation coordinates."""

    @property
    @abstractmethod
    def n_weights(self) -> int:
        """The number of weight coordinates."""

    @property
    def dimension(self) -> int:
        """
        The dimension of the state vector.

        :return: ``n_nodes + n_weights``.
        :rtype: int
        """
        return self.n_nodes + self.n_weights

    @property
    def is_autonomous(self) -> bool:
        """Whether the system is free of constant inputs."""
        return True

    @abstractmethod
    def field(self, vector: np.ndarray) -> np.ndarray:
        """The vector field at ``vector``."""

    @abstractmethod
    def jacobian(self, vector: np.ndarray) -> np.ndarray:
        """The analytic Jacobian of the vector field at ``vector``."""

    @abstractmethod
    def invariant_box(self) -> InvariantBox:
        """The forward invariant box of the system."""

    @abstractmethod
    def weight_nullcline(self, x: np.ndarray) -> np.ndarray:
        """
        The weights at which every weight derivative vanishes for the activations ``x``.

        Every equilibrium ``(x, w)`` has ``w = weight_nullcline(x)``.

        :param x: The ``n_nodes`` activations.
        :type x: np.ndarray
        :return: The ``n_weights`` weights.
        :rtype: np.ndarray
        """

    @abstractmethod
    def labels(self) -> list[str]:
        """Column labels of the state coordinates."""

    @abstractmethod
    def with_learning_rate(
        self,
        value: float,
        targets: Sequence[int] | None = None,
        ratios: Sequence[float] | None = None,
    ) -> "DefaultSystem":
        """
        Returns a copy of the system with the targeted learning rates set to ``value``.

        :param value: The new learning rate.
        :type value: float
        :param targets: Which learning rates to replace. Systems with a single learning rate
            ignore it.
        :type targets: Optional[Sequence[int]]
        :param ratios: Per-target multipliers, so that target ``k`` is set to
            ``value * ratios[k]``. Defaults to all ones.
        :type ratios: Optional[Sequence[float]]
        """

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """A JSON-ready description of the system."""

    def require_autonomous(self) -> None:
        """Systems without inputs always pass."""

    def mirror(self, vector: np.ndarray) -> np.ndarray | None:
        """
        The image of ``vector`` under the swap symmetry of the system, or ``None`` if the system
        has no such symmetry.
        """
        return None

    def symmetry_tag(self, vector: np.ndarray) -> SymmetryTag | None:
        """
        Tells whether ``vector`` is fixed by the swap symmetry.

        :return: The tag, or ``None`` for systems without the symmetry.
        :rtype: Optional[SymmetryTag]
        """
        image = self.mirror(vector)
        if image is None:
            return None
        tol = DEDUP_REL_TOL * (1.0 + self.invariant_box().scale)
        if np.max(np.abs(image - vector)) <= tol:
            return SymmetryTag.ON_PLANE_L
        return SymmetryTag.OFF_PLANE

from dataclasses import dataclass

import numpy as np

from hebbiantools.core.network import ModelError, NetworkSpec

__all__ = ["InvariantBox", "invariant_box", "symmetric_box"]


@dataclass(frozen=True)
class InvariantBox:
    """
    A forward invariant and attractive box ``|x_i| <= x_bound``, ``|w_ij| <= w_bound``.

    Every equilibrium and every omega-limit set of the autonomous dynamics lies inside.
    """

    x_bound: float
    w_bound: float

    def __post_init__(self) -> None:
        if not (self.x_bound > 0 and self.w_bound > 0):
            raise ModelError("box bounds must be > 0")

    @property
    def scale(self) -> float:
        """The largest half-width of the box."""
        return max(self.x_bound, self.w_bound)

    def upper(self, n_nodes: int, n_weights: int) -> np.ndarray:
        """
        Per-coordinate half-widths for a state with ``n_nodes`` activations followed by
        ``n_weights`` weights.

        :return: The vector of bounds, symmetric around zero.
        :rtype: np.ndarray
        """
        return np.concatenate([np.full(n_nodes, self.x_bound), np.full(n_weights, self.w_bound)])

    def inflate(self, factor: float) -> "InvariantBox":
        """Returns the box scaled by ``factor``."""
        return InvariantBox(self.x_bound * factor, self.w_bound * factor)

    def excursion(self, vector: np.ndarray, n_nodes: int) -> float:
        """
        How far a state lies outside the box, in the infinity norm.

        :return: ``0.0`` for points inside, otherwise the largest coordinate overshoot.
        :rtype: float
        """
        bounds = self.upper(n_nodes, np.size(vector) - n_nodes)
        return float(np.max(np.maximum(np.abs(vector) - bounds, 0.0), initial=0.0))

    def contains(self, vector: np.ndarray, n_nodes: int, slack: float = 0.0) -> bool:
        """``True`` if the state lies in the box enlarged by ``slack`` in every coordinate."""
        return self.excursion(vector, n_nodes) <= slack


def invariant_box(spec: NetworkSpec) -> InvariantBox:
    """
    Builds the invariant box of a network.

    ``w_max = max|c_ij| / min b_ij`` and ``x_max = (w_max * max(1, max in-degree) + max|u_i|) /
    min a_i``. For networks whose in-degree is at most one and without inputs this is
    ``x_max = w_max / min a_i``.

    :param spec: The network.
    :type spec: NetworkSpec
    :return: The invariant box.
    :rtype: InvariantBox
    :raises ModelError: If the network has no synapses.
    """
    if spec.n_edges == 0:
        raise ModelError("edges must not be empty to bound the weights")
    w_max = float(np.max(np.abs(spec.c)) / np.min(spec.b))
    fan_in = max(1, int(np.max(spec.in_degree)))
    x_max = float((w_max * fan_in + np.max(np.abs(spec.u))) / np.min(spec.a))
    return InvariantBox(x_bound=x_max, w_bound=w_max)


def symmetric_box(c: float) -> InvariantBox:
    """The box ``{|x1|, |x2|, |w| <= |c|}`` of the reduced symmetric systems."""
    if c == 0:
        raise ModelError("c must be nonzero")
    return InvariantBox(x_bound=abs(c), w_bound=abs(c))

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from hebbiantools import constants as const

__all__ = [
    "ModelError",
    "NetworkSpec",
    "ReducedState3",
    "SymmetricParams",
    "SystemState",
    "bidirectional_motif",
    "single_synapse_motif",
]


class ModelError(Exception):
    """Raised when a network specification or state is malformed."""


def _as_float_array(values: Iterable[float] | np.ndarray, name: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        index = int(np.flatnonzero(~np.isfinite(array))[0])
        raise ModelError(f"{name}[{index}] must be finite")
    return array


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """
    Full parameterization of a recurrent network with Hebbian/anti-Hebbian pairwise plasticity.

    Edge ``(i, j)`` is a synapse carrying ``phi(x_j)`` into the equation of node ``i`` with the
    live weight ``w_ij``. Weights are stored by edge, in the order of ``edges``.

    :Example:

    .. code-block:: python

        from hebbiantools.core.network import NetworkSpec

        spec = NetworkSpec(n=2, a=[1, 1], edges=[(1, 0), (0, 1)], b=[1, 1], c=[-3, -3])
        print(spec.dimension)  # 4
    """

    n: int
    a: np.ndarray
    edges: np.ndarray
    b: np.ndarray
    c: np.ndarray
    u: np.ndarray = field(default_factory=lambda: np.zeros(0))
    metadata: dict[str, Any] = field(default_factory=dict)

    def __init__(
        self,
        n: int,
        a: Sequence[float] | np.ndarray,
        edges: Sequence[tuple[int, int]] | np.ndarray,
        b: Sequence[float] | np.ndarray,
        c: Sequence[float] | np.ndarray,
        u: Sequence[float] | np.ndarray | None = None,
        metadata: dict[str, Any] | None = None,
    ) -> None:
        """
        Initialize and validate a ``NetworkSpec``.

        :param n: The number of nodes.
        :type n: int
        :param a: Per-node decay rates, all > 0.
        :type a: Sequence[float]
        :param edges: Directed pairs ``(i, j)``, no duplicates.
        :type edges: Sequence[tuple[int, int]]
        :param b: Per-edge decay rates, all > 0.
        :type b: Sequence[float]
        :param c: Per-edge learning rates, all nonzero.
        :type c: Sequence[float]
        :param u: Per-node constant inputs. Defaults to zeros.
        :type u: Optional[Sequence[float]]
        :param metadata: Free-form provenance recorded with the network.
        :type metadata: Optional[dict[str, Any]]
        :raises ModelError: If any field violates its invariant.
        """
        if int(n) != n or n < 1:
            raise ModelError("n must be an integer >= 1")
        n = int(n)
        edge_array = np.array(edges, dtype=np.int64).reshape(-1, 2)
        a_array = _as_float_array(a, "a")
        b_array = _as_float_array(b, "b")
        c_array = _as_float_array(c, "c")
        u_array = np.zeros(n) if u is None else _as_float_array(u, "u")

        if a_array.size != n:
            raise ModelError(f"a must have {n} entries, got {a_array.size}")
        if u_array.size != n:
            raise ModelError(f"u must have {n} entries, got {u_array.size}")
        m = edge_array.shape[0]
        for name, array in (("b", b_array), ("c", c_array)):
            if array.size != m:
                raise ModelError(f"{name} must have {m} entries (one per edge), got {array.size}")
        for index, value in enumerate(a_array):
            if value <= 0:
                raise ModelError(f"a[{index}] must be > 0")
        for index, value in enumerate(b_array):
            if value <= 0:
                raise ModelError(f"b[{index}] must be > 0")
        for index, value in enumerate(c_array):
            if value == 0:
                raise ModelError(f"c[{index}] must be nonzero")
        seen: set[tuple[int, int]] = set()
        for index, (i, j) in enumerate(edge_array.tolist()):
            if not (0 <= i < n and 0 <= j < n):
                raise ModelError(
                    f"edges[{index}] = ({i}, {j}) references a node outside 0..{n - 1}"
                )
            if (i, j) in seen:
                raise ModelError(f"edges[{index}] = ({i}, {j}) is a duplicate edge")
            seen.add((i, j))

        for array in (a_array, edge_array, b_array, c_array, u_array):
            array.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "a", a_array)
        object.__setattr__(self, "edges", edge_array)
        object.__setattr__(self, "b", b_array)
        object.__setattr__(self, "c", c_array)
        object.__setattr__(self, "u", u_array)
        object.__setattr__(self, "metadata", dict(metadata or {}))

    def __repr__(self) -> str:
        return f"<NetworkSpec n={self.n} edges={self.n_edges} autonomous={self.is_autonomous}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkSpec):
            return False
        return (
            self.n == other.n
            and np.array_equal(self.edges, other.edges)
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("a", "b", "c", "u")
            )
        )

    @property
    def n_edges(self) -> int:
        """The number of synapses."""
        return int(self.edges.shape[0])

    @property
    def dimension(self) -> int:
        """
        The dimension of the state vector, ``n + |edges|``.

        :return: The state dimension.
        :rtype: int
        """
        return self.n + self.n_edges

    @property
    def is_autonomous(self) -> bool:
        """``True`` if all constant inputs are zero."""
        return not np.any(self.u)

    @property
    def in_degree(self) -> np.ndarray:
        """Number of incoming synapses per node."""
        return np.bincount(self.edges[:, 0], minlength=self.n)

    @property
    def index_map(self) -> dict[tuple[int, int], int]:
        """
        The bijection between edges and weight slots.

        :return: A mapping ``(i, j) -> slot`` where ``slot`` indexes the weight vector.
        :rtype: dict[tuple[int, int], int]
        """
        return {(int(i), int(j)): k for k, (i, j) in enumerate(self.edges)}

    def edge_index(self, i: int, j: int) -> int:
        """
        Returns the weight slot of edge ``(i, j)``.

        :raises ModelError: If the edge does not exist.
        """
        try:
            return self.index_map[(i, j)]
        except KeyError as e:
            raise ModelError(f"edge ({i}, {j}) is not part of the network") from e

    def require_autonomous(self) -> None:
        """
        Equilibrium and bifurcation routines only apply to the autonomous system.

        :raises ModelError: If any constant input is nonzero.
        """
        if not self.is_autonomous:
            index = int(np.flatnonzero(self.u)[0])
            raise ModelError(
                f"u[{index}] = {self.u[index]!r}: constant inputs are supported in simulation "
                "only; equilibrium and bifurcation analysis require u = 0"
            )

    def with_learning_rates(
        self, edge_indices: Sequence[int], values: Sequence[float] | float
    ) -> "NetworkSpec":
        """
        Returns a copy with the learning rates of the given edges replaced.

        :param edge_indices: Weight slots to modify.
        :type edge_indices: Sequence[int]
        :param values: One value for all edges, or one value per edge.
        :type values: Union[Sequence[float], float]
        :return: The modified specification.
        :rtype: NetworkSpec
        """
        c = self.c.copy()
        c[np.asarray(edge_indices, dtype=np.int64)] = values
        return NetworkSpec(self.n, self.a, self.edges, self.b, c, self.u, self.metadata)

    def dense_weights(self, w: np.ndarray) -> np.ndarray:
        """
        Reconstructs the dense ``n x n`` weight matrix from the per-edge weight vector.

        :param w: Weight vector with one entry per edge.
        :type w: np.ndarray
        :return: The matrix ``W`` with ``W[i, j] = w_ij`` and zeros where no edge exists.
        :rtype: np.ndarray
        """
        dense = np.zeros((self.n, self.n))
        dense[self.edges[:, 0], self.edges[:, 1]] = w
        return dense

    def state_labels(self) -> list[str]:
        """Column labels ``x_1..x_n, w_<i>_<j>`` using 1-based node numbers."""
        labels = [f"x_{i + 1}" for i in range(self.n)]
        labels += [f"w_{i + 1}_{j + 1}" for i, j in self.edges.tolist()]
        return labels

    def to_dict(self) -> dict[str, Any]:
        """
        Serializes the specification to the versioned JSON schema
        ``{n, a[], edges[{i, j, b, c}], u[], metadata{}}``.
        """
        return {
            "schema_version": const.SCHEMA_VERSION,
            "n": self.n,
            "a": self.a.tolist(),
            "edges": [
                {"i": int(i), "j": int(j), "b": float(b), "c": float(c)}
                for (i, j), b, c in zip(self.edges.tolist(), self.b, self.c)
            ],
            "u": self.u.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NetworkSpec":
        """
        Builds a specification from its JSON form.

        :raises ModelError: If required keys are missing or values are invalid.
        """
        try:
            edges = data["edges"]
            return cls(
                n=data["n"],
                a=data["a"],
                edges=[(e["i"], e["j"]) for e in edges],
                b=[e["b"] for e in edges],
                c=[e["c"] for e in edges],
                u=data.get("u"),
                metadata=data.get("metadata"),
            )
        except (KeyError, TypeError) as e:
            raise ModelError(f"invalid network specification: missing or malformed {e}") from e


@dataclass
class SystemState:
    """
    Neuron activations and live synaptic weights of a network, with the edge-to-slot map.
    """

    x: np.ndarray
    w: np.ndarray
    index_map: dict[tuple[int, int], int]

    @classmethod
    def from_vector(cls, spec: NetworkSpec, vector: Sequence[float] | np.ndarray) -> "SystemState":
        """
        Splits a flat vector ``(x_1..x_n, w_1..w_m)`` into a ``SystemState``.

        :raises ModelError: If the vector length does not match the specification.
        """
        vector = np.asarray(vector, dtype=float).reshape(-1)
        if vector.size != spec.dimension:
            raise ModelError(
                f"state has {vector.size} entries, expected n + |edges| = {spec.dimension}"
            )
        return cls(x=vector[: spec.n].copy(), w=vector[spec.n :].copy(), index_map=spec.index_map)

    @classmethod
    def zeros(cls, spec: NetworkSpec) -> "SystemState":
        """The all-zero state of ``spec``."""
        return cls.from_vector(spec, np.zeros(spec.dimension))

    @property
    def dimension(self) -> int:
        """``n + |edges|``."""
        return int(self.x.size + self.w.size)

    def as_vector(self) -> np.ndarray:
        """The flat state vector."""
        return np.concatenate([self.x, self.w])

    def weight(self, i: int, j: int) -> float:
        """The weight of edge ``(i, j)``."""
        return float(self.w[self.index_map[(i, j)]])


@dataclass(frozen=True)
class ReducedState3:
    """State ``(x1, x2, w)`` of the reduced symmetric motif."""

    x1: float
    x2: float
    w: float

    @classmethod
    def from_array(cls, values: Sequence[float] | np.ndarray) -> "ReducedState3":
        """Builds a state from a length-3 sequence."""
        x1, x2, w = (float(v) for v in np.asarray(values, dtype=float).reshape(3))
        return cls(x1, x2, w)

    def as_array(self) -> np.ndarray:
        """The state as ``np.array([x1, x2, w])``."""
        return np.array([self.x1, self.x2, self.w])


@dataclass(frozen=True)
class SymmetricParams:
    """
    Parametric symmetry ``b2 * a1 = b1 * a2 = A`` and ``c1 = c2 = c`` of the bidirectional motif.
    """

    A: float
    c: float

    def __post_init__(self) -> None:
        if self.A <= 0:
            raise ModelError("A must be > 0")
        if self.c == 0:
            raise ModelError("c must be nonzero")

    @property
    def effective_c(self) -> float:
        """The learning rate of the equivalent ``A = 1`` problem, ``c / A``."""
        return self.c / self.A

    @classmethod
    def from_spec(cls, spec: NetworkSpec, rel_tol: float = 1e-12) -> "SymmetricParams | None":
        """
        Detects the parametric symmetry in a bidirectional motif.

        :return: The symmetric parameters, or ``None`` if the network is not a symmetric motif.
        :rtype: Optional[SymmetricParams]
        """
        if not is_bidirectional_motif(spec):
            return None
        a1, a2 = spec.a
        b1, b2 = spec.b
        c1, c2 = spec.c
        products_match = np.isclose(b2 * a1, b1 * a2, rtol=rel_tol, atol=0.0)
        if not (products_match and np.isclose(c1, c2, rtol=rel_tol, atol=0.0)):
            return None
        return cls(A=float(b2 * a1), c=float(c1))


def bidirectional_motif(
    a1: float = 1.0,
    a2: float = 1.0,
    b1: float = 1.0,
    b2: float = 1.0,
    c1: float = 1.0,
    c2: float = 1.0,
    u1: float = 0.0,
    u2: float = 0.0,
) -> NetworkSpec:
    """
    The two-neuron motif with synapses in both directions.

    The state vector is ``(x1, x2, w1, w2)``: ``w1`` carries ``phi(x1)`` into neuron 2 and ``w2``
    carries ``phi(x2)`` into neuron 1.

    :return: The motif specification.
    :rtype: NetworkSpec
    """
    return NetworkSpec(
        n=2,
        a=[a1, a2],
        edges=[(1, 0), (0, 1)],
        b=[b1, b2],
        c=[c1, c2],
        u=[u1, u2],
        metadata={"kind": "bidirectional_motif"},
    )


def single_synapse_motif(
    a1: float = 1.0, a2: float = 1.0, b1: float = 1.0, c1: float = 1.0
) -> NetworkSpec:
    """
    The two-neuron motif with one synapse directed from neuron 1 to neuron 2.

    The state vector is ``(x1, x2, w1)``.

    :return: The motif specification.
    :rtype: NetworkSpec
    """
    return NetworkSpec(
        n=2,
        a=[a1, a2],
        edges=[(1, 0)],
        b=[b1],
        c=[c1],
        metadata={"kind": "single_synapse_motif"},
    )


def is_bidirectional_motif(spec: NetworkSpec) -> bool:
    """``True`` if ``spec`` has the layout produced by :func:`bidirectional_motif`."""
    return spec.n == 2 and spec.edges.tolist() == [[1, 0], [0, 1]]

"""
Network presets: the random 12-node network with mixed uni- and bidirectional synapses, two
complete subnetworks joined through a pair of gateway neurons, and the two-neuron motifs.

Generators draw from ``numpy.random.default_rng`` (PCG64), so a configuration and a seed produce
the same specification on every platform.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from hebbiantools import constants as const
from hebbiantools.constants import TopologyKind
from hebbiantools.core.network import ModelError, NetworkSpec, bidirectional_motif

logger = logging.getLogger(__name__)

__all__ = [
    "GeneratedNetwork",
    "TopologyConfig",
    "TopologyError",
    "asymmetric_motif_preset",
    "build_interconnected",
    "build_network",
    "build_random_mixed",
    "symmetric_motif_preset",
]


class TopologyError(Exception):
    """Raised when a topology cannot be generated."""


@dataclass
class TopologyConfig:
    """
    Options of the network generators.

    :param kind: Which preset to build.
    :param n: Node count of the random network.
    :param k: Node count of each subnetwork of the interconnected network.
    :param density: Probability that an ordered pair is sampled.
    :param bidirectional_fraction: Probability that a sampled pair also gets its reverse edge.
    :param decay_range: Sampling interval of the node and synapse decay rates.
    :param c_range: Sampling interval of the frozen learning rates.
    :param c_exclusion: Frozen learning rates avoid ``(-c_exclusion, c_exclusion)``.
    :param self_loops: Whether the random network may contain self-loops.
    :param seed: The generator seed.
    """

    kind: TopologyKind = TopologyKind.RANDOM_MIXED
    n: int = 12
    k: int = 3
    density: float = 0.25
    bidirectional_fraction: float = 0.5
    decay_range: tuple[float, float] = const.DEFAULT_DECAY_RANGE
    c_range: tuple[float, float] = const.DEFAULT_C_RANGE
    c_exclusion: float = const.DEFAULT_C_EXCLUSION
    self_loops: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        self.kind = TopologyKind(self.kind)
        self.decay_range = tuple(self.decay_range)  # type: ignore[assignment]
        self.c_range = tuple(self.c_range)  # type: ignore[assignment]
        if not 0 < self.density <= 1:
            raise TopologyError("density must be in (0, 1]")
        if not 0 <= self.bidirectional_fraction <= 1:
            raise TopologyError("bidirectional_fraction must be in [0, 1]")
        if self.n < 2:
            raise TopologyError("n must be >= 2")
        if self.k < 2:
            raise TopologyError("k must be >= 2")
        low, high = self.decay_range
        if not 0 < low <= high:
            raise TopologyError("decay_range must satisfy 0 < low <= high")
        low, high = self.c_range
        if self.c_exclusion < 0 or not low <= high:
            raise TopologyError("c_range must satisfy low <= high and c_exclusion >= 0")
        if max(high, 0.0) <= self.c_exclusion and min(low, 0.0) >= -self.c_exclusion:
            raise TopologyError("c_range lies entirely inside the excluded interval")

    def to_dict(self) -> dict[str, Any]:
        """The configuration as recorded in the generated specification's metadata."""
        data = asdict(self)
        data["kind"] = self.kind.value
        data["decay_range"] = list(self.decay_range)
        data["c_range"] = list(self.c_range)
        return data


@dataclass
class GeneratedNetwork:
    """A generated specification with the edge indices whose learning rates are swept."""

    spec: NetworkSpec
    swept_edges: list[int]
    ratios: list[float] | None = None
    gateways: tuple[int, int] | None = None
    metadata: dict[str, Any] = field(default_factory=dict)


def _sample_learning_rates(rng: np.random.Generator, size: int, cfg: TopologyConfig) -> np.ndarray:
    """Uniform samples on ``c_range`` minus ``(-c_exclusion, c_exclusion)``."""
    low, high = cfg.c_range
    negative = max(0.0, min(high, -cfg.c_exclusion) - low)
    positive = max(0.0, high - max(low, cfg.c_exclusion))
    draws = rng.uniform(0.0, negative + positive, size=size)
    values = np.where(
        draws < negative,
        low + draws,
        max(low, cfg.c_exclusion) + (draws - negative),
    )
    values[values == 0.0] = cfg.c_exclusion or np.finfo(float).tiny
    return values


def _finish(
    cfg: TopologyConfig,
    n: int,
    edges: list[tuple[int, int]],
    swept: set[tuple[int, int]],
    extra_metadata: dict[str, Any],
) -> tuple[NetworkSpec, list[int]]:
    rng = np.random.default_rng(cfg.seed)
    edges = sorted(edges) if cfg.kind == TopologyKind.RANDOM_MIXED else edges
    a = rng.uniform(*cfg.decay_range, size=n)
    b = rng.uniform(*cfg.decay_range, size=len(edges))
    c = _sample_learning_rates(rng, len(edges), cfg)
    metadata = {"generator": cfg.to_dict(), **extra_metadata}
    try:
        spec = NetworkSpec(n=n, a=a, edges=edges, b=b, c=c, metadata=metadata)
    except ModelError as e:
        raise TopologyError(f"generated an invalid network: {e}") from e
    swept_edges = [index for index, edge in enumerate(edges) if edge in swept]
    return spec, swept_edges


def build_random_mixed(cfg: TopologyConfig) -> GeneratedNetwork:
    """
    A random network whose bidirectional connections are swept uniformly while the learning
    rates of the unidirectional ones stay frozen.

    Ordered pairs are visited in lexicographic order; each is sampled with probability
    ``density``, and a sampled pair also receives its reverse edge with probability
    ``bidirectional_fraction``.

    :param cfg: The generator options, ``kind`` must be ``random_mixed``.
    :type cfg: TopologyConfig
    :return: The network, with every edge that has a reverse edge in the swept set.
    :rtype: GeneratedNetwork
    :raises TopologyError: If the network has no bidirectional connection.
    """
    if cfg.kind != TopologyKind.RANDOM_MIXED:
        raise TopologyError(f"expected kind random_mixed, got {cfg.kind.value}")
    rng = np.random.default_rng([cfg.seed, 1])
    chosen: set[tuple[int, int]] = set()
    for i in range(cfg.n):
        for j in range(cfg.n):
            if i == j and not cfg.self_loops:
                continue
            if rng.random() < cfg.density:
                chosen.add((i, j))
                if i != j and rng.random() < cfg.bidirectional_fraction:
                    chosen.add((j, i))
    swept = {(i, j) for i, j in chosen if i != j and (j, i) in chosen}
    if not swept:
        raise TopologyError("nothing to sweep: the network has no bidirectional connection")
    spec, swept_edges = _finish(cfg, cfg.n, list(chosen), swept, {"kind": cfg.kind.value})
    logger.info(
        "Random network: %d nodes, %d edges, %d swept", spec.n, spec.n_edges, len(swept_edges)
    )
    return GeneratedNetwork(spec=spec, swept_edges=swept_edges, metadata=dict(spec.metadata))


def build_interconnected(cfg: TopologyConfig) -> GeneratedNetwork:
    """
    Two complete directed subnetworks of ``k`` nodes joined by two cross edges between their
    gateway neurons, node ``0`` and node ``k``.

    Intra-subnetwork learning rates are frozen; the two cross edges are swept.

    :param cfg: The generator options, ``kind`` must be ``interconnected``.
    :type cfg: TopologyConfig
    :return: The network, ``k(k-1)`` edges per subnetwork plus the cross edges ``(k, 0)`` and
        ``(0, k)``, listed last.
    :rtype: GeneratedNetwork
    """
    if cfg.kind != TopologyKind.INTERCONNECTED:
        raise TopologyError(f"expected kind interconnected, got {cfg.kind.value}")
    k = cfg.k
    edges = []
    for offset in (0, k):
        edges += [
            (offset + i, offset + j) for i in range(k) for j in range(k) if i != j
        ]
    cross = [(k, 0), (0, k)]
    edges += cross
    spec, swept_edges = _finish(
        cfg, 2 * k, edges, set(cross), {"kind": cfg.kind.value, "gateways": [0, k]}
    )
    return GeneratedNetwork(
        spec=spec, swept_edges=swept_edges, gateways=(0, k), metadata=dict(spec.metadata)
    )


def build_network(cfg: TopologyConfig) -> GeneratedNetwork:
    """Dispatches on ``cfg.kind``."""
    if cfg.kind == TopologyKind.INTERCONNECTED:
        return build_interconnected(cfg)
    return build_random_mixed(cfg)


def symmetric_motif_preset(c: float = -3.0) -> GeneratedNetwork:
    """The bidirectional motif with unit decay rates, both learning rates swept together."""
    spec = bidirectional_motif(c1=c, c2=c)
    return GeneratedNetwork(spec=spec, swept_edges=[0, 1], ratios=[1.0, 1.0])


def asymmetric_motif_preset(ratio: float = 0.8, c: float = -3.0) -> GeneratedNetwork:
    """
    The bidirectional motif with ``a1 = 0.2``, ``a2 = 0.4``, ``b1 = 0.25``, ``b2 = 0.5``.

    These decay rates satisfy ``b2 a1 = b1 a2``, so the second learning rate is swept as
    ``ratio`` times the first to break the mirror symmetry.

    :param ratio: ``c2 / c1`` along the sweep.
    :type ratio: float
    :param c: The initial first learning rate.
    :type c: float
    :return: The motif with ``swept_edges = [0, 1]`` and ``ratios = [1, ratio]``.
    :rtype: GeneratedNetwork
    """
    if ratio == 0:
        raise TopologyError("ratio must be nonzero")
    spec = bidirectional_motif(a1=0.2, a2=0.4, b1=0.25, b2=0.5, c1=c, c2=ratio * c)
    return GeneratedNetwork(spec=spec, swept_edges=[0, 1], ratios=[1.0, ratio])

"""
Equilibrium search by multi-start damped Newton inside the invariant box.

Starting points cover the box inflated by 20%: a scrambled Sobol sequence (or a grid, or uniform
random points), the box centre and its corners. Further layers sample the unsaturated range of
the activations with the weights placed on their nullcline. Converged roots are sorted before
deduplication, so the result only depends on the seed, not on the number of worker processes.
"""

import logging
import warnings
from dataclasses import dataclass, field
from functools import partial
from itertools import product
from typing import Any

import numpy as np
from scipy import linalg
from scipy.stats import qmc

from hebbiantools import constants as const
from hebbiantools.constants import Stability, StartStrategy, SymmetryTag
from hebbiantools.core import dynamics as dyn
from hebbiantools.core.box import InvariantBox, invariant_box
from hebbiantools.core.network import NetworkSpec, is_bidirectional_motif
from hebbiantools.core.systems import DefaultSystem, as_system
from hebbiantools.lib.stability import StabilityError, StabilityReport, stability_report
from hebbiantools.utils.misc import map_ordered

logger = logging.getLogger(__name__)

__all__ = [
    "EquilibriumError",
    "EquilibriumRecord",
    "EquilibriumSearch",
    "InvariantBox",
    "NewtonConfig",
    "NewtonOutcome",
    "NoEquilibriumFoundError",
    "damped_newton",
    "find_equilibria",
    "fixed_point_jacobian",
    "fixed_point_map_F",
    "fixed_point_norm",
    "invariant_box",
    "newton_starts",
    "search_equilibria",
]


class EquilibriumError(Exception):
    """Raised when the equilibrium search is misconfigured or fails."""


class NoEquilibriumFoundError(EquilibriumError):
    """Raised when no Newton start converged to an equilibrium."""


@dataclass
class NewtonConfig:
    """
    Options of the multi-start Newton search.

    ``n_starts`` defaults to ``max(64, 8 * dimension)``. ``dedup_tol`` is relative: two roots are
    merged when their infinity-norm distance is below ``dedup_tol * (1 + box scale)``.
    """

    n_starts: int | None = None
    start_strategy: StartStrategy = StartStrategy.SOBOL
    max_iters: int = const.NEWTON_MAX_ITERS
    newton_tol: float = const.NEWTON_TOL
    dedup_tol: float = const.DEDUP_REL_TOL
    backtrack_factor: float = const.BACKTRACK_FACTOR
    max_backtracks: int = const.MAX_BACKTRACKS
    box_inflation: float = const.BOX_INFLATION
    seed: int = 0

    def __post_init__(self) -> None:
        self.start_strategy = StartStrategy(self.start_strategy)
        if self.n_starts is not None and self.n_starts < 1:
            raise EquilibriumError("n_starts must be >= 1")
        for name in ("max_iters", "newton_tol", "dedup_tol", "max_backtracks", "box_inflation"):
            if not getattr(self, name) > 0:
                raise EquilibriumError(f"{name} must be > 0")
        if not 0 < self.backtrack_factor < 1:
            raise EquilibriumError("backtrack_factor must be in (0, 1)")
        if not self.dedup_tol > self.newton_tol:
            raise EquilibriumError("dedup_tol must be > newton_tol")

    def starts_for(self, dimension: int) -> int:
        """The number of sampled starts for a system of the given dimension."""
        if self.n_starts is not None:
            return self.n_starts
        return max(const.NEWTON_MIN_STARTS, const.NEWTON_STARTS_PER_DIM * dimension)


@dataclass
class NewtonOutcome:
    """The result of one damped Newton run."""

    point: np.ndarray
    residual: float
    iterations: int
    status: str

    @property
    def converged(self) -> bool:
        """``True`` if the residual went below the tolerance."""
        return self.status == "converged"


def damped_newton(system: DefaultSystem, start: np.ndarray, cfg: NewtonConfig) -> NewtonOutcome:
    """
    Newton's method on the vector field with backtracking.

    The full step is halved (by ``cfg.backtrack_factor``) up to ``cfg.max_backtracks`` times until
    the infinity norm of the residual decreases. A numerically singular Jacobian abandons the run.

    :param system: The system.
    :type system: DefaultSystem
    :param start: The starting point.
    :type start: np.ndarray
    :param cfg: The Newton options.
    :type cfg: NewtonConfig
    :return: The final point and how the run ended: ``converged``, ``singular``, ``stalled`` or
        ``max_iters``.
    :rtype: NewtonOutcome
    """
    point = np.array(start, dtype=float)
    residual = system.field(point)
    norm = float(np.max(np.abs(residual)))
    for iteration in range(cfg.max_iters + 1):
        if norm < cfg.newton_tol:
            return NewtonOutcome(point, norm, iteration, "converged")
        if iteration == cfg.max_iters:
            break
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", linalg.LinAlgWarning)
                step = linalg.solve(system.jacobian(point), -residual)
        except (linalg.LinAlgError, linalg.LinAlgWarning):
            return NewtonOutcome(point, norm, iteration, "singular")

        scale = 1.0
        for _ in range(cfg.max_backtracks + 1):
            candidate = point + scale * step
            candidate_residual = system.field(candidate)
            candidate_norm = float(np.max(np.abs(candidate_residual)))
            if np.isfinite(candidate_norm) and candidate_norm < norm:
                point, residual, norm = candidate, candidate_residual, candidate_norm
                break
            scale *= cfg.backtrack_factor
        else:
            return NewtonOutcome(point, norm, iteration, "stalled")
    return NewtonOutcome(point, norm, cfg.max_iters, "max_iters")


def _corners(upper: np.ndarray) -> np.ndarray:
    if 2 ** upper.size <= const.MAX_CORNER_STARTS:
        signs = product((-1.0, 1.0), repeat=upper.size)
        return np.array([np.array(sign) * upper for sign in signs])
    return np.array([-upper, upper])


def _sample(
    strategy: StartStrategy, upper: np.ndarray, n_starts: int, seed: int | list[int]
) -> np.ndarray:
    dimension = upper.size
    if strategy == StartStrategy.SOBOL:
        sampler = qmc.Sobol(d=dimension, scramble=True, rng=np.random.default_rng(seed))
        unit = sampler.random_base2(int(np.ceil(np.log2(n_starts))))[:n_starts]
        return qmc.scale(unit, -upper, upper)
    if strategy == StartStrategy.GRID:
        per_axis = max(2, int(np.ceil(n_starts ** (1.0 / dimension))))
        axes = [np.linspace(-bound, bound, per_axis) for bound in upper]
        return np.array(list(product(*axes))[:n_starts])
    return np.random.default_rng(seed).uniform(-upper, upper, size=(n_starts, dimension))


def newton_starts(
    system: DefaultSystem, cfg: NewtonConfig, box: InvariantBox | None = None
) -> np.ndarray:
    """
    The starting points of the search, one per row:

    * ``cfg.starts_for(dimension)`` points sampled in the inflated box;
    * for each half-width in ``ACTIVE_X_BOUNDS`` that is smaller than the box,
      ``cfg.starts_for(n_nodes)`` activations sampled in the inflated range, completed with the
      weights of :meth:`DefaultSystem.weight_nullcline`;
    * the box centre and its corners (only the two diagonal corners when the box has more than
      1024 of them).

    Equilibria with unsaturated activations sit in a small region of a large box, the second
    group covers it.

    :return: One start per row.
    :rtype: np.ndarray
    """
    box = box or system.invariant_box()
    inflated = box.inflate(cfg.box_inflation)
    upper = inflated.upper(system.n_nodes, system.n_weights)
    layers = [_sample(cfg.start_strategy, upper, cfg.starts_for(upper.size), cfg.seed)]

    n_active = cfg.starts_for(system.n_nodes)
    for index, bound in enumerate(const.ACTIVE_X_BOUNDS):
        if bound >= box.x_bound:
            break
        x_upper = np.full(system.n_nodes, bound * cfg.box_inflation)
        activations = _sample(cfg.start_strategy, x_upper, n_active, [cfg.seed, index + 1])
        weights = np.array([system.weight_nullcline(x) for x in activations])
        layers.append(np.hstack([activations, weights]))

    layers += [np.zeros((1, upper.size)), _corners(upper)]
    return np.vstack(layers)


@dataclass
class EquilibriumRecord:
    """An equilibrium with its residual, spectrum and classification."""

    point: np.ndarray
    residual: float
    report: StabilityReport
    symmetry_tag: SymmetryTag | None = None
    basin_hits: int = 1
    labels: list[str] = field(default_factory=list)

    @property
    def eigenvalues(self) -> np.ndarray:
        """The eigenvalues of the Jacobian at the point."""
        return self.report.eigenvalues

    @property
    def stability(self) -> Stability:
        """The stability class."""
        return self.report.classification

    def to_dict(self) -> dict[str, Any]:
        """
        Serializes the record: coordinates, residual, eigenvalues as ``[re, im]`` pairs,
        stability, symmetry tag and basin hits.
        """
        data = {
            "point": {label: float(v) for label, v in zip(self.labels, self.point)},
            "coordinates": [float(v) for v in self.point],
            "residual": self.residual,
            "symmetry_tag": self.symmetry_tag.value if self.symmetry_tag else None,
            "basin_hits": self.basin_hits,
        }
        data.update(self.report.to_dict())
        return data


@dataclass
class EquilibriumSearch:
    """The deduplicated equilibria of a search together with per-start diagnostics."""

    records: list[EquilibriumRecord]
    box: InvariantBox
    n_starts: int
    status_counts: dict[str, int]

    @property
    def count(self) -> int:
        """The number of distinct equilibria."""
        return len(self.records)

    @property
    def anomaly(self) -> bool:
        """``True`` if no equilibrium was found, which the invariant box rules out."""
        return not self.records

    def to_dict(self) -> dict[str, Any]:
        """Serializes the search."""
        return {
            "count": self.count,
            "n_starts": self.n_starts,
            "status_counts": dict(self.status_counts),
            "box": {"x_bound": self.box.x_bound, "w_bound": self.box.w_bound},
            "equilibria": [record.to_dict() for record in self.records],
        }


def _lexsorted(points: np.ndarray) -> np.ndarray:
    return np.lexsort(points.T[::-1])


def _deduplicate(outcomes: list[NewtonOutcome], tol: float) -> list[tuple[np.ndarray, float, int]]:
    converged = [outcome for outcome in outcomes if outcome.converged]
    if not converged:
        return []
    points = np.array([outcome.point for outcome in converged])
    residuals = np.array([outcome.residual for outcome in converged])
    order = _lexsorted(points)

    clusters: list[list[int]] = []
    for index in order:
        for cluster in clusters:
            if np.max(np.abs(points[index] - points[cluster[0]])) < tol:
                cluster.append(int(index))
                break
        else:
            clusters.append([int(index)])

    merged = []
    for cluster in clusters:
        best = min(cluster, key=lambda i: (residuals[i], i))
        merged.append((points[best], float(residuals[best]), len(cluster)))
    return merged


def _newton_worker(start: np.ndarray, system: DefaultSystem, cfg: NewtonConfig) -> NewtonOutcome:
    return damped_newton(system, start, cfg)


def search_equilibria(
    system: DefaultSystem | NetworkSpec,
    cfg: NewtonConfig | None = None,
    extra_starts: np.ndarray | None = None,
    jobs: int = 1,
    sampled: bool = True,
) -> EquilibriumSearch:
    """
    Runs the multi-start Newton search and classifies every distinct root.

    Records are sorted by their first coordinate, then lexicographically.

    :param system: An autonomous system, or a network specification with ``u = 0``.
    :type system: Union[DefaultSystem, NetworkSpec]
    :param cfg: The Newton options.
    :type cfg: Optional[NewtonConfig]
    :param extra_starts: Additional starting points tried first, e.g. equilibria of a nearby
        parameter value.
    :type extra_starts: Optional[np.ndarray]
    :param jobs: The number of worker processes for the Newton runs.
    :type jobs: int
    :param sampled: Whether to add the starts of :func:`newton_starts`; without them only
        ``extra_starts`` are run.
    :type sampled: bool
    :return: The search result, possibly empty (flagged as an anomaly).
    :rtype: EquilibriumSearch
    :raises EquilibriumError: If there is no start at all.
    """
    system = as_system(system)
    system.require_autonomous()
    cfg = cfg or NewtonConfig()
    box = system.invariant_box()
    layers = []
    if extra_starts is not None and np.size(extra_starts):
        layers.append(np.atleast_2d(extra_starts))
    if sampled:
        layers.append(newton_starts(system, cfg, box))
    if not layers:
        raise EquilibriumError("no starting points: pass extra_starts or keep sampled starts")
    starts = np.vstack(layers)

    worker = partial(_newton_worker, system=system, cfg=cfg)
    outcomes = map_ordered(worker, list(starts), jobs)
    status_counts: dict[str, int] = {}
    for outcome in outcomes:
        status_counts[outcome.status] = status_counts.get(outcome.status, 0) + 1

    records = []
    labels = system.labels()
    for point, residual, hits in _deduplicate(outcomes, cfg.dedup_tol * (1.0 + box.scale)):
        try:
            report = stability_report(system.jacobian(point))
        except StabilityError as e:
            raise EquilibriumError(
                f"cannot classify the equilibrium at {point.tolist()}: {e}"
            ) from e
        records.append(
            EquilibriumRecord(
                point=point,
                residual=residual,
                report=report,
                symmetry_tag=system.symmetry_tag(point),
                basin_hits=hits,
                labels=labels,
            )
        )
    if records:
        order = _lexsorted(np.array([record.point for record in records]))
        records = [records[i] for i in order]

    logger.debug("Newton outcomes for %r: %s", system, status_counts)
    if not records:
        logger.warning("No equilibrium found for %r from %d starts", system, len(starts))
    else:
        logger.info("Found %d equilibria for %r", len(records), system)
    return EquilibriumSearch(
        records=records, box=box, n_starts=len(starts), status_counts=status_counts
    )


def find_equilibria(
    system: DefaultSystem | NetworkSpec,
    cfg: NewtonConfig | None = None,
    extra_starts: np.ndarray | None = None,
    jobs: int = 1,
) -> list[EquilibriumRecord]:
    """
    All equilibria found by :func:`search_equilibria`.

    :return: The records, sorted by first coordinate then lexicographically.
    :rtype: list[EquilibriumRecord]
    :raises NoEquilibriumFoundError: If no start converged.
    """
    search = search_equilibria(system, cfg, extra_starts, jobs)
    if search.anomaly:
        raise NoEquilibriumFoundError(
            f"no equilibrium found from {search.n_starts} starts ({search.status_counts})"
        )
    return search.records


def _motif_parameters(spec: NetworkSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not is_bidirectional_motif(spec):
        raise EquilibriumError("the fixed-point map is defined for the bidirectional motif only")
    return spec.a, spec.b, spec.c


# pylint: disable-next=invalid-name
def fixed_point_map_F(spec: NetworkSpec, vector: np.ndarray) -> np.ndarray:
    """
    The map whose fixed points are the equilibria of the bidirectional motif,
    ``F(X) = (w2 phi(x2)/a1, w1 phi(x1)/a2, c1 phi(x1) phi(x2)/b1, c2 phi(x1) phi(x2)/b2)``.

    :param spec: A bidirectional motif.
    :type spec: NetworkSpec
    :param vector: The state ``(x1, x2, w1, w2)``.
    :type vector: np.ndarray
    :return: ``F(X)``.
    :rtype: np.ndarray
    """
    (a1, a2), (b1, b2), (c1, c2) = _motif_parameters(spec)
    x1, x2, w1, w2 = np.asarray(vector, dtype=float)
    phi1, phi2 = dyn.sigmoid(x1), dyn.sigmoid(x2)
    return np.array(
        [w2 * phi2 / a1, w1 * phi1 / a2, c1 * phi1 * phi2 / b1, c2 * phi1 * phi2 / b2]
    )


def fixed_point_jacobian(spec: NetworkSpec, vector: np.ndarray) -> np.ndarray:
    """The Jacobian of :func:`fixed_point_map_F`."""
    (a1, a2), (b1, b2), (c1, c2) = _motif_parameters(spec)
    x1, x2, w1, w2 = np.asarray(vector, dtype=float)
    phi1, phi2 = dyn.sigmoid(x1), dyn.sigmoid(x2)
    dphi1, dphi2 = dyn.sigmoid_prime(x1), dyn.sigmoid_prime(x2)
    return np.array(
        [
            [0.0, w2 * dphi2 / a1, 0.0, phi2 / a1],
            [w1 * dphi1 / a2, 0.0, phi1 / a2, 0.0],
            [c1 * dphi1 * phi2 / b1, c1 * phi1 * dphi2 / b1, 0.0, 0.0],
            [c2 * dphi1 * phi2 / b2, c2 * phi1 * dphi2 / b2, 0.0, 0.0],
        ]
    )


def fixed_point_norm(spec: NetworkSpec, vector: np.ndarray) -> float:
    """The induced 1-norm (largest absolute column sum) of :func:`fixed_point_jacobian`."""
    return float(np.linalg.norm(fixed_point_jacobian(spec, vector), 1))

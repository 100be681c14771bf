"""
Learning-rate sweeps: equilibria per parameter value, branch tracking, transition detection and
refinement, and the bifurcation-diagram CSV.
"""

import csv
import io
import logging
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from hebbiantools import constants as const
from hebbiantools.constants import Stability
from hebbiantools.core.network import ModelError
from hebbiantools.core.systems import DefaultSystem, as_system
from hebbiantools.lib.equilibria import (
    EquilibriumRecord,
    EquilibriumSearch,
    NewtonConfig,
    search_equilibria,
)

logger = logging.getLogger(__name__)

__all__ = [
    "BifurcationError",
    "Branch",
    "DiagramTable",
    "SweepPoint",
    "SweepResult",
    "SweepSpec",
    "Transition",
    "count_windows",
    "export_diagram",
    "parse_diagram",
    "refine_transition",
    "sweep",
    "sweep_grid",
]

# Relative sizes, in units of (1 + box scale), of the perturbed warm starts.
_WARM_START_SCALES = (1e-3, 1e-2, 1e-1)


class BifurcationError(Exception):
    """Raised when a sweep is misconfigured or its transitions cannot be resolved."""


def sweep_grid(
    c_lo: float,
    c_hi: float,
    n: int = const.DEFAULT_SWEEP_POINTS,
    foci: tuple[float, ...] | list[float] = (),
    width: float | None = None,
    gain: float = 4.0,
) -> np.ndarray:
    """
    A monotone grid on ``[c_lo, c_hi]`` that is denser around the ``foci``.

    Grid points follow the density ``1 + gain * sum(exp(-|c - focus| / width))``, so the spacing
    shrinks geometrically when approaching a focus. Without foci the grid is uniform.

    :param c_lo: The first grid value.
    :type c_lo: float
    :param c_hi: The last grid value, different from ``c_lo``.
    :type c_hi: float
    :param n: The number of points, at least 2.
    :type n: int
    :param foci: Values around which to densify.
    :type foci: Sequence[float]
    :param width: Decay length of the densification, by default 2% of the range.
    :type width: Optional[float]
    :param gain: Peak extra density at a focus, relative to the background.
    :type gain: float
    :return: The grid, increasing when ``c_lo < c_hi`` and decreasing otherwise.
    :rtype: np.ndarray
    """
    if n < 2 or c_lo == c_hi:
        raise BifurcationError("a sweep grid needs n >= 2 and c_lo != c_hi")
    if not foci:
        return np.linspace(c_lo, c_hi, n)
    lo, hi = min(c_lo, c_hi), max(c_lo, c_hi)
    width = width or 0.02 * (hi - lo)
    mesh = np.linspace(lo, hi, 20 * n + 1)
    density = 1.0 + gain * sum(np.exp(-np.abs(mesh - focus) / width) for focus in foci)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(mesh))])
    grid = np.interp(np.linspace(0.0, cdf[-1], n), cdf, mesh)
    grid[0], grid[-1] = lo, hi
    return grid if c_lo < c_hi else grid[::-1]


@dataclass
class SweepSpec:
    """
    What to sweep: a base system, the targeted learning rates and the grid of values.

    For network systems, target ``k`` is set to ``c * ratios[k]`` at grid value ``c``; ``targets``
    defaults to every edge. Reduced systems have a single learning rate and ignore both.
    """

    system: DefaultSystem
    c_values: np.ndarray
    targets: list[int] | None = None
    ratios: list[float] | None = None
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    seed: int | None = None
    projection: int = 0
    refine_tol: float = const.REFINE_TOL

    def __post_init__(self) -> None:
        self.system = as_system(self.system)
        self.c_values = np.asarray(self.c_values, dtype=float).reshape(-1)
        if self.c_values.size < 2:
            raise BifurcationError("c_values must have at least 2 entries")
        steps = np.diff(self.c_values)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise BifurcationError("c_values must be strictly monotone")
        if self.targets is not None:
            if not self.targets:
                raise BifurcationError("targets must not be empty")
            n_weights = self.system.n_weights
            for index, target in enumerate(self.targets):
                if not 0 <= target < n_weights:
                    raise BifurcationError(
                        f"targets[{index}] = {target} is not an edge index (0..{n_weights - 1})"
                    )
        if self.ratios is not None:
            expected = self.system.n_weights if self.targets is None else len(self.targets)
            if len(self.ratios) != expected:
                raise BifurcationError(f"ratios must have {expected} entries")
        if not 0 <= self.projection < self.system.dimension:
            raise BifurcationError(f"projection must be in 0..{self.system.dimension - 1}")
        if not self.refine_tol > 0:
            raise BifurcationError("refine_tol must be > 0")
        if self.seed is not None:
            self.newton = replace(self.newton, seed=self.seed)

    def system_at(self, c: float) -> DefaultSystem:
        """
        The base system with the targeted learning rates set for grid value ``c``.

        :raises BifurcationError: If the resulting system is invalid (e.g. ``c = 0``).
        """
        try:
            return self.system.with_learning_rate(c, self.targets, self.ratios)
        except ModelError as e:
            raise BifurcationError(f"cannot set learning rate {c!r}: {e}") from e


@dataclass
class SweepPoint:
    """The equilibria found at one grid value and the branch each belongs to."""

    c: float
    records: list[EquilibriumRecord]
    branch_ids: list[int]

    @property
    def count(self) -> int:
        """The number of equilibria."""
        return len(self.records)


@dataclass
class Branch:
    """A chain of equilibria linked across consecutive grid values."""

    branch_id: int
    c_values: list[float] = field(default_factory=list)
    points: list[np.ndarray] = field(default_factory=list)
    stability: list[Stability] = field(default_factory=list)


@dataclass
class Transition:
    """A grid interval across which the equilibrium count changes."""

    c_lo: float
    c_hi: float
    count_before: int
    count_after: int

    def to_dict(self) -> dict[str, Any]:
        """Serializes the transition."""
        return {
            "c_lo": self.c_lo,
            "c_hi": self.c_hi,
            "count_before": self.count_before,
            "count_after": self.count_after,
        }


@dataclass
class SweepResult:
    """The outcome of :func:`sweep`."""

    spec: SweepSpec
    points: list[SweepPoint]
    branches: list[Branch]
    transitions: list[Transition]

    @property
    def c_values(self) -> np.ndarray:
        """The swept grid."""
        return np.array([point.c for point in self.points])

    @property
    def counts(self) -> list[int]:
        """The equilibrium count at each grid value."""
        return [point.count for point in self.points]

    def transitions_to_dict(self) -> list[dict[str, Any]]:
        """The transition report."""
        return [transition.to_dict() for transition in self.transitions]


def _warm_starts(
    previous: list[np.ndarray], scale: float, rng: np.random.Generator
) -> np.ndarray | None:
    if not previous:
        return None
    starts = []
    for point in previous:
        starts.append(point)
        for size in _WARM_START_SCALES:
            direction = rng.standard_normal(point.size)
            direction /= np.linalg.norm(direction)
            starts.append(point + size * (1.0 + scale) * direction)
            starts.append(point - size * (1.0 + scale) * direction)
    return np.array(starts)


def _solve_at(
    spec: SweepSpec,
    c: float,
    previous: list[np.ndarray],
    rng: np.random.Generator,
    jobs: int,
    known: list[np.ndarray] | None = None,
    sampled: bool = True,
) -> EquilibriumSearch:
    system = spec.system_at(c)
    layers = [np.array(known)] if known else []
    warm = _warm_starts(previous, system.invariant_box().scale, rng)
    if warm is not None:
        layers.append(warm)
    extra = np.vstack(layers) if layers else None
    search = search_equilibria(system, spec.newton, extra_starts=extra, jobs=jobs, sampled=sampled)
    if search.anomaly:
        raise BifurcationError(f"no equilibrium found at c={c!r} ({search.status_counts})")
    return search


def _link(previous: list[np.ndarray], current: list[np.ndarray]) -> list[int | None]:
    """
    Greedy nearest-neighbour matching of ``current`` to ``previous``; distances must stay below
    half the smallest distance between previous points.
    """
    if not previous:
        return [None] * len(current)
    prev = np.array(previous)
    if len(prev) > 1:
        gaps = np.linalg.norm(prev[:, None, :] - prev[None, :, :], axis=-1)
        threshold = const.LINK_FRACTION * float(np.min(gaps[np.triu_indices(len(prev), k=1)]))
    else:
        threshold = np.inf
    distances = np.linalg.norm(np.array(current)[:, None, :] - prev[None, :, :], axis=-1)
    pairs = sorted(
        (float(distances[i, j]), i, j) for i in range(len(current)) for j in range(len(prev))
    )
    matched: list[int | None] = [None] * len(current)
    used: set[int] = set()
    for distance, i, j in pairs:
        if distance >= threshold:
            break
        if matched[i] is None and j not in used:
            matched[i] = j
            used.add(j)
    return matched


def sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """
    Solves for all equilibria at every grid value and tracks branches.

    The grid is walked twice. The forward pass runs the full multi-start search at every value,
    warm-started from the equilibria of the previous value and small perturbations of them. The
    backward pass walks the grid in reverse and only runs Newton from the forward roots and the
    perturbed equilibria of the next value, so a branch found anywhere is continued over its whole
    extent in both directions. Branches are linked by nearest neighbour; every count change whose
    bracket is wider than ``spec.refine_tol`` logs a warning with the interval to refine.

    :param spec: What to sweep.
    :type spec: SweepSpec
    :param jobs: The number of worker processes for the Newton runs.
    :type jobs: int
    :return: Per-value equilibria, branches and transitions.
    :rtype: SweepResult
    :raises BifurcationError: If the base system has inputs or a grid value has no equilibrium.
    """
    try:
        spec.system.require_autonomous()
    except ModelError as e:
        raise BifurcationError(str(e)) from e
    rng = np.random.default_rng(spec.newton.seed)
    c_values = [float(c) for c in spec.c_values]

    forward: list[list[EquilibriumRecord]] = []
    previous: list[np.ndarray] = []
    for c in c_values:
        records = _solve_at(spec, c, previous, rng, jobs).records
        forward.append(records)
        previous = [record.point for record in records]

    solved: list[list[EquilibriumRecord]] = list(forward)
    previous = []
    for index in reversed(range(len(c_values))):
        known = [record.point for record in forward[index]]
        records = _solve_at(
            spec, c_values[index], previous, rng, jobs, known=known, sampled=False
        ).records
        if len(records) > len(forward[index]):
            logger.info(
                "c=%.10g: backward pass recovered %d equilibria",
                c_values[index],
                len(records) - len(forward[index]),
            )
        solved[index] = records
        previous = [record.point for record in records]

    points: list[SweepPoint] = []
    branches: list[Branch] = []
    previous_ids: list[int] = []
    previous = []
    for c, records in zip(c_values, solved):
        current = [record.point for record in records]
        branch_ids = []
        for record, match in zip(records, _link(previous, current)):
            if match is None:
                branch = Branch(branch_id=len(branches))
                branches.append(branch)
            else:
                branch = branches[previous_ids[match]]
            branch.c_values.append(c)
            branch.points.append(record.point)
            branch.stability.append(record.stability)
            branch_ids.append(branch.branch_id)
        points.append(SweepPoint(c=c, records=records, branch_ids=branch_ids))
        previous, previous_ids = current, branch_ids
        logger.info("c=%.10g: %d equilibria", c, len(records))

    transitions = []
    for before, after in zip(points[:-1], points[1:]):
        if before.count == after.count:
            continue
        transitions.append(Transition(before.c, after.c, before.count, after.count))
        if abs(after.c - before.c) > spec.refine_tol:
            logger.warning(
                "Equilibrium count changes from %d to %d between c=%.10g and c=%.10g, a bracket "
                "wider than %g; refine it on [%.10g, %.10g]",
                before.count,
                after.count,
                before.c,
                after.c,
                spec.refine_tol,
                min(before.c, after.c),
                max(before.c, after.c),
            )
    return SweepResult(spec=spec, points=points, branches=branches, transitions=transitions)


def refine_transition(
    result: SweepResult, interval_index: int, tol: float = const.REFINE_TOL, jobs: int = 1
) -> float:
    """
    Bisects a detected transition with a full equilibrium solve at each midpoint.

    Each solve is warm-started from the equilibria at the two ends of the current bracket.

    :param result: A sweep result.
    :type result: SweepResult
    :param interval_index: Index into ``result.transitions``.
    :type interval_index: int
    :param tol: Width of the final bracket.
    :type tol: float
    :param jobs: The number of worker processes for the Newton runs.
    :type jobs: int
    :return: The midpoint of the final bracket.
    :rtype: float
    :raises BifurcationError: If the interval does not exist or a midpoint count matches neither
        side, which means the bracket holds more than one transition.
    """
    if not 0 <= interval_index < len(result.transitions):
        raise BifurcationError(
            f"no transition #{interval_index}; the sweep has {len(result.transitions)}"
        )
    transition = result.transitions[interval_index]
    by_c = {point.c: point for point in result.points}
    lo_seeds = [record.point for record in by_c[transition.c_lo].records]
    hi_seeds = [record.point for record in by_c[transition.c_hi].records]
    rng = np.random.default_rng(result.spec.newton.seed)

    lo, hi = transition.c_lo, transition.c_hi
    while abs(hi - lo) >= tol:
        mid = 0.5 * (lo + hi)
        search = _solve_at(result.spec, mid, lo_seeds + hi_seeds, rng, jobs)
        if search.count == transition.count_before:
            lo, lo_seeds = mid, [record.point for record in search.records]
        elif search.count == transition.count_after:
            hi, hi_seeds = mid, [record.point for record in search.records]
        else:
            raise BifurcationError(
                f"count {search.count} at c={mid!r} matches neither side "
                f"({transition.count_before} -> {transition.count_after}); "
                "the bracket holds several transitions, use a finer initial grid"
            )
    estimate = 0.5 * (lo + hi)
    logger.info("Transition #%d refined to c=%.10g", interval_index, estimate)
    return estimate


def count_windows(result: SweepResult, count: int) -> list[tuple[float, float]]:
    """
    Maximal runs of consecutive grid values with exactly ``count`` equilibria.

    :return: ``(c_start, c_end)`` pairs in increasing ``c``, each spanning grid values of the run.
    :rtype: list[tuple[float, float]]
    """
    order = np.argsort(result.c_values)
    windows = []
    start: float | None = None
    end: float | None = None
    for index in order:
        point = result.points[index]
        if point.count == count:
            start = point.c if start is None else start
            end = point.c
        elif start is not None:
            windows.append((start, end))
            start = None
    if start is not None:
        windows.append((start, end))
    return windows


def export_diagram(result: SweepResult, projection: int | None = None) -> str:
    """
    The bifurcation diagram as CSV, one row per ``(c, equilibrium)``.

    The first line is the format tag; the columns are ``c``, ``branch_id``, the projected
    coordinate and ``stability``.

    :param result: A sweep result.
    :type result: SweepResult
    :param projection: Index of the projected state coordinate, by default the sweep's.
    :type projection: Optional[int]
    :return: The CSV text.
    :rtype: str
    """
    projection = result.spec.projection if projection is None else projection
    label = result.spec.system.labels()[projection]
    buffer = io.StringIO()
    buffer.write(const.DIAGRAM_HEADER + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["c", "branch_id", label, "stability"])
    for point in result.points:
        for record, branch_id in zip(point.records, point.branch_ids):
            writer.writerow(
                [
                    format(point.c, const.FLOAT_FORMAT),
                    branch_id,
                    format(float(record.point[projection]), const.FLOAT_FORMAT),
                    record.stability.value,
                ]
            )
    return buffer.getvalue()


@dataclass
class DiagramTable:
    """The columns of a parsed diagram CSV."""

    label: str
    c: np.ndarray
    branch_id: np.ndarray
    value: np.ndarray
    stability: list[Stability]

    @classmethod
    def from_result(cls, result: SweepResult, projection: int | None = None) -> "DiagramTable":
        """The table :func:`export_diagram` would write for ``result``."""
        projection = result.spec.projection if projection is None else projection
        rows = [
            (point.c, branch_id, float(record.point[projection]), record.stability)
            for point in result.points
            for record, branch_id in zip(point.records, point.branch_ids)
        ]
        return cls(
            label=result.spec.system.labels()[projection],
            c=np.array([row[0] for row in rows]),
            branch_id=np.array([row[1] for row in rows], dtype=int),
            value=np.array([row[2] for row in rows]),
            stability=[row[3] for row in rows],
        )


def parse_diagram(text: str) -> DiagramTable:
    """
    Parses the CSV written by :func:`export_diagram`.

    :raises BifurcationError: If the format tag or the column header is missing.
    """
    lines = text.splitlines()
    if not lines or lines[0] != const.DIAGRAM_HEADER:
        raise BifurcationError("not a diagram file: missing format tag")
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header is None or len(header) != 4 or header[:2] != ["c", "branch_id"]:
        raise BifurcationError("not a diagram file: bad column header")
    rows = list(reader)
    return DiagramTable(
        label=header[2],
        c=np.array([float(row[0]) for row in rows]),
        branch_id=np.array([int(row[1]) for row in rows], dtype=int),
        value=np.array([float(row[2]) for row in rows]),
        stability=[Stability(row[3]) for row in rows],
    )


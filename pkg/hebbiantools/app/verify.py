"""
Verification suites: numerical checks of the results the package reproduces, runnable from the
command line.

Every suite returns named criteria with a pass flag and the measured quantities. A suite that
raises is reported as a failed ``<suite>/error`` criterion, so that a broken building block shows
up in the report instead of aborting the run.
"""

# pylint: disable=broad-exception-caught
import json
import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from hebbiantools import constants as const
from hebbiantools.constants import Certificate, Stability, SymmetryTag, TopologyKind
from hebbiantools.core import dynamics as dyn
from hebbiantools.core.box import symmetric_box
from hebbiantools.core.network import bidirectional_motif, single_synapse_motif
from hebbiantools.core.systems import DefaultSystem, NetworkSystem, PlanarSystem, Reduced3System
from hebbiantools.lib.bifurcation import (
    SweepSpec,
    count_windows,
    refine_transition,
    sweep,
    sweep_grid,
)
from hebbiantools.lib.equilibria import NewtonConfig, fixed_point_norm, search_equilibria
from hebbiantools.lib.integrate import (
    IntegrationConfig,
    check_forward_invariance,
    lyapunov_monitor,
    rk4_step,
    sample_box,
)
from hebbiantools.lib.netgen import (
    TopologyConfig,
    asymmetric_motif_preset,
    build_network,
)
from hebbiantools.lib.stability import (
    contraction_certificate,
    eigen_dense,
    lambda1,
    reduced3_eigenvalues_closed_form,
    single_synapse_stability,
)
from hebbiantools.lib.symmetric import (
    count_f_roots,
    critical_c0,
    critical_eigenvector,
    critical_xhat0,
    equilibria_from_f_roots,
    planar_boundary_check,
    reduced3_characteristic_polynomial,
    symmetric_equilibrium,
)
from hebbiantools.utils.misc import stopwatch
from hebbiantools.utils.path_tools import write_text

logger = logging.getLogger(__name__)

X_HAT0_REFERENCE = -1.27846
SEED_COUNT = 5


class VerifyError(Exception):
    """Raised when a verification criterion fails."""


class UnknownSuiteError(VerifyError):
    """Raised when a suite selector names no registered suite."""


@dataclass
class CriterionResult:
    """The outcome of one named check."""

    suite: str
    name: str
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def qualified_name(self) -> str:
        """``<suite>/<name>``."""
        return f"{self.suite}/{self.name}"

    def to_dict(self) -> dict[str, Any]:
        """Serializes the result."""
        return {
            "criterion": self.qualified_name,
            "status": "pass" if self.passed else "fail",
            "details": self.details,
        }


@dataclass
class VerifyContext:
    """Seed, pool size and solver options shared by the suites."""

    seed: int = 0
    jobs: int = 1
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)


@dataclass
class VerifyReport:
    """All criteria of a verification run."""

    suites: list[str]
    results: list[CriterionResult]

    @property
    def passed(self) -> bool:
        """``True`` if every criterion passed."""
        return all(result.passed for result in self.results)

    @property
    def failed(self) -> list[str]:
        """Qualified names of the failed criteria."""
        return [result.qualified_name for result in self.results if not result.passed]

    def to_dict(self) -> dict[str, Any]:
        """The machine-readable report."""
        return {
            "schema_version": const.SCHEMA_VERSION,
            "suites": self.suites,
            "passed": self.passed,
            "failed": self.failed,
            "criteria": [result.to_dict() for result in self.results],
        }


SuiteFunc = Callable[[VerifyContext], list[CriterionResult]]


def _criterion(suite: str, name: str, passed: bool, **details: Any) -> CriterionResult:
    return CriterionResult(suite=suite, name=name, passed=bool(passed), details=details)


def _scaled_gap(left: np.ndarray, right: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(left))), float(np.max(np.abs(right))))
    return float(np.max(np.abs(np.asarray(left) - np.asarray(right)))) / scale


def _finite_difference_jacobian(system: DefaultSystem, vector: np.ndarray) -> np.ndarray:
    columns = []
    for index in range(vector.size):
        h = 1e-6 * max(1.0, abs(vector[index]))
        step = np.zeros_like(vector)
        step[index] = h
        columns.append((system.field(vector + step) - system.field(vector - step)) / (2.0 * h))
    return np.column_stack(columns)


def critical_value_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """The critical learning rate, its diagonal root and the critical eigenvector."""
    suite = "critical-value"
    with stopwatch() as timing:
        c0 = critical_c0()
        x0 = critical_xhat0()
    vector = critical_eigenvector()
    return [
        _criterion(
            suite,
            "c0",
            abs(c0 - const.C0_REFERENCE) < 5e-4,
            c0=c0,
            reference=const.C0_REFERENCE,
            elapsed=timing["elapsed"],
        ),
        _criterion(suite, "x_hat0", abs(x0 - X_HAT0_REFERENCE) < 1e-5, x_hat0=x0),
        _criterion(suite, "lambda1-vanishes", abs(lambda1(c0)) < 1e-9, lambda1=lambda1(c0)),
        _criterion(
            suite,
            "eigenvector-transverse",
            abs(vector[0] + vector[1]) < 1e-8 and abs(vector[2]) < 1e-8,
            eigenvector=vector.tolist(),
        ),
    ]


def pitchfork_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """Three equilibria below the critical value, one above, and the refined transition."""
    suite = "pitchfork"
    c0 = critical_c0()
    spec = SweepSpec(
        system=Reduced3System(-3.0),
        c_values=sweep_grid(-150.0, -3.0, 48, foci=[c0]),
        newton=ctx.newton,
        seed=ctx.seed,
    )
    with stopwatch() as timing:
        result = sweep(spec, ctx.jobs)
    below = [point.count for point in result.points if point.c < c0 - 0.5]
    above = [point.count for point in result.points if point.c > c0 + 0.5]
    criteria = [
        _criterion(suite, "three-below-c0", below and set(below) == {3}, counts=below),
        _criterion(suite, "one-above-c0", above and set(above) == {1}, counts=above),
    ]
    candidates = [
        index
        for index, transition in enumerate(result.transitions)
        if {transition.count_before, transition.count_after} == {1, 3}
    ]
    if not candidates:
        criteria.append(
            _criterion(
                suite, "refined-transition", False, transitions=result.transitions_to_dict()
            )
        )
        return criteria
    index = min(
        candidates,
        key=lambda i: abs(0.5 * (result.transitions[i].c_lo + result.transitions[i].c_hi) - c0),
    )
    estimate = refine_transition(result, index, tol=1e-4, jobs=ctx.jobs)
    criteria.append(
        _criterion(
            suite,
            "refined-transition",
            abs(estimate - c0) < 1e-3,
            estimate=estimate,
            c0=c0,
            sweep_elapsed=timing["elapsed"],
        )
    )
    return criteria


def stability_exchange_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """Stable, unstable, stable at strong inhibition; a single stable equilibrium when weak."""
    suite = "stability-exchange"
    strong = search_equilibria(Reduced3System(-150.0), ctx.newton, jobs=ctx.jobs)
    pattern = [record.stability.value for record in strong.records]
    on_plane = [
        record.symmetry_tag.value if record.symmetry_tag else None for record in strong.records
    ]
    weak = search_equilibria(Reduced3System(-3.0), ctx.newton, jobs=ctx.jobs)
    return [
        _criterion(
            suite,
            "strong-pattern",
            pattern == [Stability.STABLE.value, Stability.UNSTABLE.value, Stability.STABLE.value],
            pattern=pattern,
        ),
        _criterion(
            suite,
            "unstable-on-plane",
            len(on_plane) == 3 and on_plane[1] == SymmetryTag.ON_PLANE_L.value,
            symmetry_tags=on_plane,
        ),
        _criterion(
            suite,
            "weak-single-stable",
            weak.count == 1 and weak.records[0].stability == Stability.STABLE,
            count=weak.count,
            stability=[record.stability.value for record in weak.records],
        ),
    ]


def _polynomial_residual(coefficients: np.ndarray, value: complex) -> float:
    """``|p(value)|`` relative to the size of its terms, each power taken at ``max(1, |value|)``."""
    degrees = np.arange(len(coefficients) - 1, -1, -1)
    scale = float(np.sum(np.abs(coefficients) * max(1.0, abs(value)) ** degrees))
    return abs(complex(np.polyval(coefficients, value))) / scale


def closed_form_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """
    Closed-form spectrum and characteristic polynomial against the Jacobian.

    The closed-form eigenvalues are checked as roots of the Jacobian's characteristic polynomial.
    A direct comparison with a dense eigensolve only holds to about ``sqrt(eps)`` where the
    complex pair collides (``k = -8``), so that gap gets the looser tolerance.
    """
    suite = "closed-form"
    residuals, dense_gaps, poly_gaps = [], [], []
    for c in np.linspace(-200.0, 50.0, 50):
        jac = dyn.reduced3_jacobian(c, symmetric_equilibrium(c))
        coefficients = np.poly(jac)
        closed = np.sort_complex(np.array(reduced3_eigenvalues_closed_form(c)))
        residuals.append(max(_polynomial_residual(coefficients, value) for value in closed))
        dense_gaps.append(_scaled_gap(np.sort_complex(eigen_dense(jac)), closed))
        poly_gaps.append(_scaled_gap(coefficients, reduced3_characteristic_polynomial(c)))
    return [
        _criterion(suite, "eigenvalues", max(residuals) < 1e-11, worst_residual=max(residuals)),
        _criterion(suite, "dense-eigensolve", max(dense_gaps) < 1e-6, worst=max(dense_gaps)),
        _criterion(
            suite, "characteristic-polynomial", max(poly_gaps) < 1e-9, worst=max(poly_gaps)
        ),
    ]


def single_synapse_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """Random single-synapse motifs: negative determinant and a stable spectrum, always."""
    suite = "single-synapse"
    rng = np.random.default_rng(ctx.seed)
    failures, spectrum_gaps, det_gaps = [], [], []
    with stopwatch() as timing:
        for _ in range(500):
            a1, a2, b1 = rng.uniform(0.1, 10.0, size=3)
            c1 = 0.0
            while c1 == 0.0:
                c1 = rng.uniform(-100.0, 100.0)
            report = single_synapse_stability(a1, a2, b1, c1)
            if not report.exponentially_stable:
                failures.append([a1, a2, b1, c1])
            closed = np.sort_complex(np.array(report.closed_form_eigenvalues))
            spectrum_gaps.append(_scaled_gap(np.sort_complex(report.eigenvalues), closed))
            det_gaps.append(
                abs(report.determinant - report.closed_form_determinant)
                / max(1.0, abs(report.closed_form_determinant))
            )
    return [
        _criterion(
            suite,
            "exponentially-stable",
            not failures,
            failures=failures,
            elapsed=timing["elapsed"],
        ),
        _criterion(
            suite, "closed-form-spectrum", max(spectrum_gaps) < 1e-6, worst=max(spectrum_gaps)
        ),
        _criterion(suite, "closed-form-determinant", max(det_gaps) < 1e-9, worst=max(det_gaps)),
    ]


def contraction_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """Certified motifs have exactly one equilibrium and respect the norm bound."""
    suite = "contraction"
    rng = np.random.default_rng(ctx.seed)
    newton = replace(ctx.newton, n_starts=512)
    counts, norm_excess, attempts = [], [], 0
    while len(counts) < 50 and attempts < 20000:
        attempts += 1
        a1, a2 = rng.uniform(1.05, 5.0, size=2)
        b1, b2 = rng.uniform(0.5, 5.0, size=2)
        c1, c2 = rng.uniform(-3.0, 3.0, size=2)
        if min(abs(c1), abs(c2)) < 1e-3:
            continue
        spec = bidirectional_motif(a1=a1, a2=a2, b1=b1, b2=b2, c1=c1, c2=c2)
        certificate = contraction_certificate(spec)
        if certificate.verdict != Certificate.UNIQUE_GUARANTEED:
            continue
        counts.append(search_equilibria(spec, newton, jobs=ctx.jobs).count)
        system = NetworkSystem(spec)
        samples = sample_box(system.invariant_box(), 2, 2, 100, rng)
        worst = max(fixed_point_norm(spec, sample) for sample in samples)
        norm_excess.append(worst - certificate.norm_bound)
    return [
        _criterion(suite, "enough-certified-specs", len(counts) == 50, certified=len(counts)),
        _criterion(
            suite,
            "unique-equilibrium",
            counts and set(counts) == {1},
            counts=sorted(set(counts)),
        ),
        _criterion(
            suite,
            "norm-bound",
            norm_excess and max(norm_excess) <= 1e-12,
            worst_excess=max(norm_excess, default=None),
        ),
    ]


def global_stability_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """
    At ``c = -15`` every start in the invariant box converges to the on-plane equilibrium; the
    planar field points inward on its square and has negative divergence for ``|c| < 8``.
    """
    suite = "global-stability"
    c = -15.0
    target = symmetric_equilibrium(c).as_array()
    upper = symmetric_box(c).upper(2, 1)
    rng = np.random.default_rng(ctx.seed)
    distances, slow, increases = [], [], []
    for start in rng.uniform(-upper, upper, size=(100, 3)):
        series = lyapunov_monitor(c, start, ctx.integration)
        distances.append(float(np.max(np.abs(series.trajectory.terminal_state - target))))
        if series.trajectory.terminal_time > 500.0:
            slow.append(series.trajectory.terminal_time)
        increases.append(series.max_increase)
    planar = [planar_boundary_check(value) for value in (-3.9, -1.0, 2.0, 7.5)]
    return [
        _criterion(
            suite,
            "converges-to-plane-equilibrium",
            max(distances) < 1e-6 and not slow,
            worst_distance=max(distances),
            late=slow,
        ),
        _criterion(
            suite,
            "lyapunov-non-increasing",
            max(increases) <= const.LYAPUNOV_SLACK,
            worst_increase=max(increases),
        ),
        _criterion(
            suite,
            "planar-boundary-inward",
            all(report.inward for report in planar),
            worst_outward=max(report.worst_outward for report in planar),
        ),
        _criterion(
            suite,
            "planar-divergence-negative",
            all(report.divergence_negative for report in planar if abs(report.c) < 8.0),
            max_divergence={report.c: report.max_divergence for report in planar},
        ),
    ]


def f_roots_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """Root counts of the scalar equation and agreement with the Newton search."""
    suite = "f-roots"
    weak, strong = count_f_roots(-100.0), count_f_roots(-150.0)
    mismatches = []
    for c in np.linspace(-200.0, -5.0, 20):
        from_roots = len(equilibria_from_f_roots(c))
        from_newton = search_equilibria(Reduced3System(c), ctx.newton, jobs=ctx.jobs).count
        if from_roots != from_newton:
            mismatches.append({"c": float(c), "f_roots": from_roots, "newton": from_newton})
    return [
        _criterion(suite, "one-root-at-minus-100", len(weak) == 1, roots=weak),
        _criterion(suite, "three-roots-at-minus-150", len(strong) == 3, roots=strong),
        _criterion(suite, "matches-newton", not mismatches, mismatches=mismatches),
    ]


def imperfect_pitchfork_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """
    The asymmetric motif: one fold, near c = -38, where a stable/unstable pair appears, the same on
    every seed.
    """
    suite = "imperfect-pitchfork"
    preset = asymmetric_motif_preset()
    grid = sweep_grid(-80.0, -2.0, 64)
    signatures, windows, failures = [], [], []
    for seed in range(ctx.seed, ctx.seed + SEED_COUNT):
        spec = SweepSpec(
            system=NetworkSystem(preset.spec),
            c_values=grid,
            targets=preset.swept_edges,
            ratios=preset.ratios,
            newton=ctx.newton,
            seed=seed,
        )
        result = sweep(spec, ctx.jobs)
        signatures.append(result.counts)
        windows.append(count_windows(result, 2))
        if len(result.transitions) != 1:
            failures.append({"seed": seed, "transitions": result.transitions_to_dict()})
            continue
        transition = result.transitions[0]
        if {transition.count_before, transition.count_after} != {1, 3}:
            failures.append({"seed": seed, "transitions": result.transitions_to_dict()})
            continue
        triple = next(
            point
            for point in result.points
            if point.c in (transition.c_lo, transition.c_hi) and point.count == 3
        )
        born = sorted(record.stability.value for record in triple.records)
        if born != sorted([Stability.STABLE.value] * 2 + [Stability.UNSTABLE.value]):
            failures.append({"seed": seed, "stability_at_fold": born})
        weak_branch = result.branches[result.points[-1].branch_ids[0]]
        if any(stability != Stability.STABLE for stability in weak_branch.stability):
            failures.append({"seed": seed, "weak_branch": "not stable throughout"})
    return [
        _criterion(suite, "fold-signature", not failures, failures=failures),
        _criterion(
            suite,
            "seed-stable",
            all(counts == signatures[0] for counts in signatures)
            and all(window == windows[0] for window in windows),
            windows_with_two=windows[0],
        ),
    ]


def _sweep_counts(
    system: NetworkSystem, targets: list[int], grid: np.ndarray, ctx: VerifyContext
) -> list[int]:
    spec = SweepSpec(
        system=system, c_values=grid, targets=targets, newton=ctx.newton, seed=ctx.seed
    )
    return sweep(spec, ctx.jobs).counts


def networks_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """
    Larger presets gain equilibria when the swept inhibition strengthens.

    The 3+3 interconnected network shows the fold of the minimal motif. For the random 5+5 and
    12-node presets the frozen learning rates are drawn per seed, and a gateway held down by its
    own subnetwork can keep a single equilibrium at any inhibition; so no seed may lose equilibria
    between the weak and the strong end, and at least one must gain some. Counts come from
    sweeps, so branches found anywhere on the grid are continued to both ends.
    """
    suite = "networks"
    small = build_network(TopologyConfig(kind=TopologyKind.INTERCONNECTED, k=3, seed=ctx.seed))
    counts = _sweep_counts(
        NetworkSystem(small.spec), small.swept_edges, sweep_grid(-250.0, -1.0, 40), ctx
    )
    jumps = [
        (before, after)
        for before, after in zip(counts[:-1], counts[1:])
        if {before, after} == {1, 3}
    ]
    criteria = [_criterion(suite, "interconnected-3-fold", bool(jumps), counts=counts)]

    grid = sweep_grid(-250.0, -1.0, 16)
    for name, kind in (
        ("interconnected-5-trend", TopologyKind.INTERCONNECTED),
        ("random-mixed-trend", TopologyKind.RANDOM_MIXED),
    ):
        trend = []
        for seed in range(ctx.seed, ctx.seed + SEED_COUNT):
            generated = build_network(TopologyConfig(kind=kind, k=5, seed=seed))
            counts = _sweep_counts(
                NetworkSystem(generated.spec), generated.swept_edges, grid, ctx
            )
            trend.append({"seed": seed, "strong": counts[0], "weak": counts[-1]})
        criteria.append(
            _criterion(
                suite,
                name,
                all(item["strong"] >= item["weak"] for item in trend)
                and any(item["strong"] > item["weak"] for item in trend),
                counts=trend,
            )
        )
    return criteria


def hygiene_suite(ctx: VerifyContext) -> list[CriterionResult]:
    """Analytic Jacobians, the order of the fixed-step scheme and forward invariance of the box."""
    suite = "hygiene"
    rng = np.random.default_rng(ctx.seed)
    random_network = build_network(TopologyConfig(seed=ctx.seed)).spec
    systems: dict[str, DefaultSystem] = {
        "motif": NetworkSystem(bidirectional_motif(a1=0.7, a2=1.3, b1=0.9, b2=1.1, c1=-3, c2=2)),
        "single-synapse": NetworkSystem(single_synapse_motif(a1=0.5, a2=2.0, b1=0.8, c1=-7.0)),
        "random-network": NetworkSystem(random_network),
        "reduced3": Reduced3System(-150.0),
        "planar": PlanarSystem(-3.0),
    }
    criteria = []
    for name, system in systems.items():
        samples = sample_box(
            system.invariant_box(), system.n_nodes, system.n_weights, 100, rng, boundary_fraction=0
        )
        worst = max(
            _scaled_gap(system.jacobian(sample), _finite_difference_jacobian(system, sample))
            for sample in samples
        )
        criteria.append(_criterion(suite, f"jacobian-{name}", worst < 1e-5, worst=worst))

    reduced = Reduced3System(-3.0)
    start = np.array([2.0, -1.0, 0.5])

    def solve(h: float, t_end: float = 2.0) -> np.ndarray:
        vector = start.copy()
        for _ in range(int(round(t_end / h))):
            vector = rk4_step(reduced.field, vector, h)
        return vector

    reference = solve(0.1 / 64)
    ratio = float(
        np.max(np.abs(solve(0.1) - reference)) / np.max(np.abs(solve(0.05) - reference))
    )
    criteria.append(_criterion(suite, "rk4-order", 12.0 <= ratio <= 20.0, ratio=ratio))

    for name, system in (
        ("reduced3", reduced),
        ("motif", NetworkSystem(bidirectional_motif(c1=-3.0, c2=-2.0))),
    ):
        invariance = check_forward_invariance(
            system, n_samples=200, cfg=ctx.integration, seed=ctx.seed, jobs=ctx.jobs
        )
        criteria.append(
            _criterion(
                suite,
                f"forward-invariance-{name}",
                invariance.passed,
                violations=invariance.violations,
                max_excursion=invariance.max_excursion,
            )
        )
    return criteria


SUITES: dict[str, SuiteFunc] = {
    "critical-value": critical_value_suite,
    "pitchfork": pitchfork_suite,
    "stability-exchange": stability_exchange_suite,
    "closed-form": closed_form_suite,
    "single-synapse": single_synapse_suite,
    "contraction": contraction_suite,
    "global-stability": global_stability_suite,
    "f-roots": f_roots_suite,
    "imperfect-pitchfork": imperfect_pitchfork_suite,
    "networks": networks_suite,
    "hygiene": hygiene_suite,
}


def select_suites(selector: str) -> list[str]:
    """
    Expands a comma-separated selector; ``all`` stands for every registered suite.

    :param selector: E.g. ``"pitchfork,hygiene"``.
    :type selector: str
    :return: Suite names in registry order, without duplicates.
    :rtype: list[str]
    :raises UnknownSuiteError: If a name is not registered.
    """
    names = {name.strip() for name in selector.split(",") if name.strip()}
    if not names:
        raise UnknownSuiteError("empty suite selector")
    if "all" in names:
        return list(SUITES)
    unknown = sorted(names - set(SUITES))
    if unknown:
        raise UnknownSuiteError(
            f"unknown suite(s) {', '.join(unknown)}; choose from all, {', '.join(SUITES)}"
        )
    return [name for name in SUITES if name in names]


def run_suites(selector: str, ctx: VerifyContext | None = None) -> VerifyReport:
    """
    Runs the selected suites.

    :param selector: The comma-separated suite selector.
    :type selector: str
    :param ctx: Seed, pool size and solver options.
    :type ctx: Optional[VerifyContext]
    :return: The report, failed criteria included.
    :rtype: VerifyReport
    """
    ctx = ctx or VerifyContext()
    names = select_suites(selector)
    results: list[CriterionResult] = []
    for name in names:
        with stopwatch() as timing:
            try:
                suite_results = SUITES[name](ctx)
            except Exception as e:
                logger.error("Suite %s raised: %s", name, e)
                suite_results = [
                    _criterion(name, "error", False, error=f"{type(e).__name__}: {e}")
                ]
        for result in suite_results:
            logger.info("%s: %s", result.qualified_name, "pass" if result.passed else "FAIL")
        logger.info("Suite %s finished in %.2f s", name, timing["elapsed"])
        results.extend(suite_results)
    return VerifyReport(suites=names, results=results)


def run(
    selector: str, out_dir: Path, ctx: VerifyContext | None = None
) -> tuple[VerifyReport, list[Path]]:
    """
    Runs the selected suites and writes ``verify_report.json``.

    :param selector: The comma-separated suite selector.
    :type selector: str
    :param out_dir: The output directory.
    :type out_dir: Path
    :param ctx: Seed, pool size and solver options.
    :type ctx: Optional[VerifyContext]
    :return: The report and the written files.
    :rtype: tuple[VerifyReport, list[Path]]
    :raises UnknownSuiteError: If the selector names an unregistered suite.
    :raises VerifyError: If any criterion failed; the report is written first.
    """
    report = run_suites(selector, ctx)
    path = write_text(out_dir / "verify_report.json", json.dumps(report.to_dict(), indent=2) + "\n")
    if not report.passed:
        raise VerifyError(f"failed criteria: {', '.join(report.failed)}")
    return report, [path]

"""
Time integration of the network and reduced systems.

Two schemes are available: a fixed-step classical Runge-Kutta method and the adaptive
Dormand-Prince pair of ``scipy.integrate.RK45``. Both stop early once the vector field is below
the convergence threshold (after the burn-in time) or once the state leaves a generous multiple of
the invariant box.
"""

import io
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.integrate import RK45

from hebbiantools import constants as const
from hebbiantools.constants import Method, TerminalReason
from hebbiantools.core import dynamics as dyn
from hebbiantools.core.box import InvariantBox
from hebbiantools.core.network import ModelError, NetworkSpec, ReducedState3, SystemState
from hebbiantools.core.systems import DefaultSystem, Reduced3System, as_system
from hebbiantools.utils.misc import map_ordered

logger = logging.getLogger(__name__)

FieldFunc = Callable[[np.ndarray], np.ndarray]


class IntegrationError(Exception):
    """Raised when an integration cannot be started."""


@dataclass
class IntegrationConfig:
    """
    Options of :func:`integrate`.

    :param method: The stepping scheme.
    :param dt: The step of the fixed scheme, or the first step of the adaptive one.
    :param t_max: The time horizon.
    :param abs_tol: Absolute tolerance of the adaptive scheme.
    :param rel_tol: Relative tolerance of the adaptive scheme.
    :param record_every: Keep one accepted step out of ``record_every``.
    :param convergence_eps: Infinity-norm threshold on the vector field for declaring convergence.
    :param burn_in: Time before the convergence test starts.
    """

    method: Method = Method.RK45_ADAPTIVE
    dt: float = const.DEFAULT_DT
    t_max: float = const.DEFAULT_T_MAX
    abs_tol: float = const.DEFAULT_ABS_TOL
    rel_tol: float = const.DEFAULT_REL_TOL
    record_every: int = 1
    convergence_eps: float = const.DEFAULT_CONVERGENCE_EPS
    burn_in: float = const.DEFAULT_BURN_IN

    def __post_init__(self) -> None:
        self.method = Method(self.method)
        for name in ("dt", "t_max", "abs_tol", "rel_tol", "convergence_eps"):
            if not getattr(self, name) > 0:
                raise IntegrationError(f"{name} must be > 0")
        if self.burn_in < 0:
            raise IntegrationError("burn_in must be >= 0")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise IntegrationError("record_every must be an integer >= 1")


@dataclass
class Trajectory:
    """
    A sampled solution. ``states`` has one row per entry of ``times``; the first row is the initial
    state and the last row is ``terminal_state``.
    """

    times: np.ndarray
    states: np.ndarray
    terminal_reason: TerminalReason
    labels: list[str] = field(default_factory=list)
    diagnostic: str = ""

    @property
    def terminal_state(self) -> np.ndarray:
        """The last recorded state."""
        return self.states[-1]

    @property
    def terminal_time(self) -> float:
        """The time of the last recorded state."""
        return float(self.times[-1])

    @property
    def n_samples(self) -> int:
        """The number of recorded samples."""
        return int(self.times.size)

    def to_csv(self) -> str:
        """
        Serializes the trajectory.

        The first line is the format tag, the second the column names ``t, x_1..x_n,
        w_<i>_<j>...``; values use 17 significant digits.

        :return: The CSV text.
        :rtype: str
        """
        buffer = io.StringIO()
        columns = ",".join(["t", *self.labels])
        np.savetxt(
            buffer,
            np.column_stack([self.times, self.states]),
            fmt="%" + const.FLOAT_FORMAT,
            delimiter=",",
            header=f"{const.TRAJECTORY_HEADER}\n{columns}",
            comments="",
        )
        return buffer.getvalue()


def _initial_vector(s0: SystemState | ReducedState3 | np.ndarray, dimension: int) -> np.ndarray:
    if isinstance(s0, SystemState):
        vector = s0.as_vector()
    elif isinstance(s0, ReducedState3):
        vector = s0.as_array()
    else:
        vector = np.array(s0, dtype=float).reshape(-1)
    if vector.size != dimension:
        raise IntegrationError(f"initial state has {vector.size} entries, expected {dimension}")
    if not np.all(np.isfinite(vector)):
        raise IntegrationError("initial state must be finite")
    return vector


def _divergence_limit(system: DefaultSystem) -> float:
    try:
        scale = system.invariant_box().scale
    except ModelError:
        scale = 1.0
    return const.DIVERGENCE_FACTOR * (1.0 + scale)


def rk4_step(func: FieldFunc, vector: np.ndarray, h: float) -> np.ndarray:
    """
    One step of the classical fourth-order Runge-Kutta scheme for an autonomous field.

    :param func: The vector field.
    :type func: Callable[[np.ndarray], np.ndarray]
    :param vector: The current state.
    :type vector: np.ndarray
    :param h: The step size.
    :type h: float
    :return: The state after one step.
    :rtype: np.ndarray
    """
    k1 = func(vector)
    k2 = func(vector + 0.5 * h * k1)
    k3 = func(vector + 0.5 * h * k2)
    k4 = func(vector + h * k3)
    return vector + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _Recorder:
    """Collects samples and applies the stopping rules after every accepted step."""

    def __init__(self, system: DefaultSystem, cfg: IntegrationConfig, vector: np.ndarray) -> None:
        self._system = system
        self._cfg = cfg
        self._limit = _divergence_limit(system)
        self._steps = 0
        self.times = [0.0]
        self.states = [vector.copy()]
        self.reason = TerminalReason.HORIZON
        self.diagnostic = ""

    def accept(self, t: float, vector: np.ndarray) -> bool:
        """Records the step if due; returns ``True`` when integration must stop."""
        self._steps += 1
        stop = False
        if not np.all(np.isfinite(vector)):
            self.reason = TerminalReason.DIVERGED
            self.diagnostic = f"non-finite state at t={t:.6g}"
            stop = True
        elif np.max(np.abs(vector)) > self._limit:
            self.reason = TerminalReason.DIVERGED
            self.diagnostic = f"state exceeded {self._limit:.6g} at t={t:.6g}"
            stop = True
        elif t >= self._cfg.burn_in and (
            np.max(np.abs(self._system.field(vector))) < self._cfg.convergence_eps
        ):
            self.reason = TerminalReason.CONVERGED
            stop = True
        if stop or self._steps % self._cfg.record_every == 0 or t >= self._cfg.t_max:
            self.times.append(t)
            self.states.append(vector.copy())
        return stop

    def fail(self, t: float, message: str) -> None:
        """Stops the run with a divergence diagnostic."""
        self.reason = TerminalReason.DIVERGED
        self.diagnostic = message
        if self.times[-1] != t:
            self.times.append(t)
            self.states.append(self.states[-1])

    def trajectory(self) -> Trajectory:
        """Builds the recorded trajectory."""
        return Trajectory(
            times=np.array(self.times),
            states=np.array(self.states),
            terminal_reason=self.reason,
            labels=self._system.labels(),
            diagnostic=self.diagnostic,
        )


def _run_fixed(system: DefaultSystem, vector: np.ndarray, recorder: _Recorder,
               cfg: IntegrationConfig) -> None:
    n_steps = int(np.ceil(cfg.t_max / cfg.dt - 1e-9))
    t_prev = 0.0
    for k in range(1, n_steps + 1):
        t = min(k * cfg.dt, cfg.t_max)
        vector = rk4_step(system.field, vector, t - t_prev)
        t_prev = t
        if recorder.accept(t, vector):
            return


def _run_adaptive(system: DefaultSystem, vector: np.ndarray, recorder: _Recorder,
                  cfg: IntegrationConfig) -> None:
    solver = RK45(
        lambda _t, y: system.field(y),
        0.0,
        vector,
        cfg.t_max,
        first_step=min(cfg.dt, cfg.t_max),
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
    )
    while solver.status == "running":
        with np.errstate(over="ignore", invalid="ignore"):
            message = solver.step()
        if solver.status == "failed":
            recorder.fail(solver.t, f"adaptive stepper failed: {message}")
            return
        if recorder.accept(solver.t, solver.y):
            return


def integrate(
    system: DefaultSystem | NetworkSpec,
    s0: SystemState | ReducedState3 | np.ndarray,
    cfg: IntegrationConfig | None = None,
) -> Trajectory:
    """
    Integrates a trajectory from ``s0`` until convergence, divergence or the horizon.

    The trajectory converges when the infinity norm of the vector field drops below
    ``cfg.convergence_eps`` after ``cfg.burn_in``. It diverges when a coordinate is not finite or
    exceeds ``1e6 * (1 + box scale)``.

    :param system: The system, or a network specification.
    :type system: Union[DefaultSystem, NetworkSpec]
    :param s0: The initial state.
    :type s0: Union[SystemState, ReducedState3, np.ndarray]
    :param cfg: The integration options.
    :type cfg: Optional[IntegrationConfig]
    :return: The recorded trajectory.
    :rtype: Trajectory
    :raises IntegrationError: If the initial state is malformed or not finite.
    """
    system = as_system(system)
    cfg = cfg or IntegrationConfig()
    vector = _initial_vector(s0, system.dimension)
    recorder = _Recorder(system, cfg, vector)
    if cfg.method == Method.RK4_FIXED:
        _run_fixed(system, vector, recorder, cfg)
    else:
        _run_adaptive(system, vector, recorder, cfg)
    trajectory = recorder.trajectory()
    if trajectory.terminal_reason == TerminalReason.DIVERGED:
        logger.warning("Trajectory diverged: %s", trajectory.diagnostic)
    logger.debug(
        "Integrated to t=%.6g (%s, %d samples)",
        trajectory.terminal_time,
        trajectory.terminal_reason.value,
        trajectory.n_samples,
    )
    return trajectory


def _integrate_start(
    start: np.ndarray, system: DefaultSystem, cfg: IntegrationConfig
) -> Trajectory:
    return integrate(system, start, cfg)


def integrate_many(
    system: DefaultSystem | NetworkSpec,
    starts: np.ndarray,
    cfg: IntegrationConfig | None = None,
    jobs: int = 1,
) -> list[Trajectory]:
    """
    Integrates one trajectory per row of ``starts``.

    :return: The trajectories, in the order of ``starts``.
    :rtype: list[Trajectory]
    """
    worker = partial(_integrate_start, system=as_system(system), cfg=cfg or IntegrationConfig())
    return map_ordered(worker, list(np.atleast_2d(starts)), jobs)


def sample_box(
    box: InvariantBox,
    n_nodes: int,
    n_weights: int,
    n_samples: int,
    rng: np.random.Generator,
    boundary_fraction: float = 0.5,
) -> np.ndarray:
    """
    Samples points in the box, a ``boundary_fraction`` of them on its faces.

    Boundary points have one randomly chosen coordinate pinned to its lower or upper bound.

    :return: An array with one point per row.
    :rtype: np.ndarray
    """
    upper = box.upper(n_nodes, n_weights)
    points = rng.uniform(-upper, upper, size=(n_samples, upper.size))
    n_boundary = int(round(boundary_fraction * n_samples))
    for row in range(n_boundary):
        axis = rng.integers(upper.size)
        points[row, axis] = upper[axis] * rng.choice([-1.0, 1.0])
    return points


@dataclass
class InvarianceReport:
    """Result of :func:`check_forward_invariance`."""

    n_samples: int
    max_excursion: float
    allowance: float
    violations: int

    @property
    def passed(self) -> bool:
        """``True`` if no trajectory left the box by more than the allowance."""
        return self.violations == 0


def check_forward_invariance(
    system: DefaultSystem | NetworkSpec,
    box: InvariantBox | None = None,
    n_samples: int = 200,
    cfg: IntegrationConfig | None = None,
    seed: int = 0,
    jobs: int = 1,
) -> InvarianceReport:
    """
    Integrates from points on the faces and in the interior of the invariant box and measures how
    far any recorded state leaves it.

    :param system: The system, autonomous.
    :type system: Union[DefaultSystem, NetworkSpec]
    :param box: The box to test, by default the system's own invariant box.
    :type box: Optional[InvariantBox]
    :param n_samples: The number of starting points.
    :type n_samples: int
    :param cfg: The integration options; every step is recorded regardless of ``record_every``.
    :type cfg: Optional[IntegrationConfig]
    :param seed: The sampling seed.
    :type seed: int
    :param jobs: The number of worker processes.
    :type jobs: int
    :return: The invariance report.
    :rtype: InvarianceReport
    """
    system = as_system(system)
    system.require_autonomous()
    box = box or system.invariant_box()
    cfg = _record_all(cfg)
    rng = np.random.default_rng(seed)
    starts = sample_box(box, system.n_nodes, system.n_weights, n_samples, rng)
    allowance = const.INVARIANCE_REL_TOL * box.scale

    excursions = []
    for trajectory in integrate_many(system, starts, cfg, jobs):
        excursions.append(max(box.excursion(state, system.n_nodes) for state in trajectory.states))
    violations = sum(1 for value in excursions if value > allowance)
    if violations:
        logger.warning("%d of %d trajectories left the invariant box", violations, n_samples)
    return InvarianceReport(
        n_samples=n_samples,
        max_excursion=max(excursions, default=0.0),
        allowance=allowance,
        violations=violations,
    )


@dataclass
class AttractivityReport:
    """Result of :func:`check_attractivity`."""

    entry_times: list[float | None]

    @property
    def passed(self) -> bool:
        """``True`` if every trajectory entered the inflated box."""
        return all(t is not None for t in self.entry_times)

    @property
    def max_entry_time(self) -> float | None:
        """The latest entry time, or ``None`` if a trajectory never entered."""
        if not self.passed:
            return None
        return max((t for t in self.entry_times if t is not None), default=0.0)


def check_attractivity(
    system: DefaultSystem | NetworkSpec,
    box: InvariantBox | None = None,
    n_samples: int = 20,
    cfg: IntegrationConfig | None = None,
    seed: int = 0,
    distance: float = 10.0,
) -> AttractivityReport:
    """
    Integrates from points far outside the box and records when each trajectory enters the box
    inflated by 5%.

    Starting points have every coordinate drawn in ``[-distance, distance]`` times its bound, with
    one coordinate pushed beyond twice its bound.

    :return: The entry time of every trajectory, ``None`` for trajectories that never entered.
    :rtype: AttractivityReport
    """
    system = as_system(system)
    system.require_autonomous()
    box = box or system.invariant_box()
    target = box.inflate(const.ATTRACTIVITY_INFLATION)
    cfg = _record_all(cfg)
    rng = np.random.default_rng(seed)
    upper = box.upper(system.n_nodes, system.n_weights)

    entry_times: list[float | None] = []
    for _ in range(n_samples):
        start = rng.uniform(-distance * upper, distance * upper)
        axis = rng.integers(upper.size)
        start[axis] = rng.choice([-1.0, 1.0]) * rng.uniform(2.0, distance) * upper[axis]
        trajectory = integrate(system, start, cfg)
        entry = next(
            (
                float(t)
                for t, state in zip(trajectory.times, trajectory.states)
                if target.contains(state, system.n_nodes)
            ),
            None,
        )
        entry_times.append(entry)
    return AttractivityReport(entry_times=entry_times)


def _record_all(cfg: IntegrationConfig | None) -> IntegrationConfig:
    cfg = cfg or IntegrationConfig()
    return IntegrationConfig(
        method=cfg.method,
        dt=cfg.dt,
        t_max=cfg.t_max,
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
        record_every=1,
        convergence_eps=cfg.convergence_eps,
        burn_in=cfg.burn_in,
    )


@dataclass
class LyapunovSeries:
    """
    Samples of ``V(t) = (x1 - x2)**2 / 2`` along a trajectory of the reduced system.
    """

    times: np.ndarray
    values: np.ndarray
    burn_in: float
    max_increase: float
    trajectory: Trajectory

    @property
    def non_increasing(self) -> bool:
        """``True`` if ``V`` never grew by more than the slack after the burn-in time."""
        return self.max_increase <= const.LYAPUNOV_SLACK

    @property
    def final_value(self) -> float:
        """``V`` at the end of the trajectory."""
        return float(self.values[-1])


def lyapunov_monitor(
    c: float, s0: ReducedState3 | np.ndarray, cfg: IntegrationConfig | None = None
) -> LyapunovSeries:
    """
    Integrates the reduced system and samples the distance ``V`` to the symmetric plane.

    Any ``c`` is accepted; ``V`` is only expected to be monotone for ``c > -16``.

    :param c: The shared learning rate.
    :type c: float
    :param s0: The initial reduced state.
    :type s0: Union[ReducedState3, np.ndarray]
    :param cfg: The integration options.
    :type cfg: Optional[IntegrationConfig]
    :return: The sampled series and its largest increase after the burn-in time.
    :rtype: LyapunovSeries
    """
    cfg = _record_all(cfg)
    trajectory = integrate(Reduced3System(c), s0, cfg)
    values = np.array([dyn.lyapunov_value(state) for state in trajectory.states])
    after = values[trajectory.times >= cfg.burn_in]
    max_increase = float(np.max(np.diff(after), initial=0.0)) if after.size > 1 else 0.0
    return LyapunovSeries(
        times=trajectory.times,
        values=values,
        burn_in=cfg.burn_in,
        max_increase=max_increase,
        trajectory=trajectory,
    )

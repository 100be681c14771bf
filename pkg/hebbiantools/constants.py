from enum import Enum, IntEnum

SCHEMA_VERSION = 1

# Reference value of the critical learning rate of the symmetric minimal motif.
C0_REFERENCE = -123.7215

# Equilibrium search
BOX_INFLATION = 1.2
NEWTON_TOL = 1e-11
NEWTON_MAX_ITERS = 100
NEWTON_MIN_STARTS = 64
NEWTON_STARTS_PER_DIM = 8
BACKTRACK_FACTOR = 0.5
MAX_BACKTRACKS = 30
DEDUP_REL_TOL = 1e-6
MAX_CORNER_STARTS = 1024
# Half-widths of the activation ranges sampled with weights on their nullcline; the sigmoid is
# saturated beyond them.
ACTIVE_X_BOUNDS = (3.0, 8.0)

# Stability
MARGINAL_BAND = 1e-8

# Integration
DEFAULT_DT = 1e-2
DEFAULT_T_MAX = 500.0
DEFAULT_ABS_TOL = 1e-9
DEFAULT_REL_TOL = 1e-9
DEFAULT_CONVERGENCE_EPS = 1e-8
DEFAULT_BURN_IN = 10.0
DIVERGENCE_FACTOR = 1e6
LYAPUNOV_SLACK = 1e-10
INVARIANCE_REL_TOL = 1e-6
ATTRACTIVITY_INFLATION = 1.05

# Symmetric case
F_ENDPOINT_INSET = 1e-9
F_ROOT_XTOL = 1e-12
DEFAULT_F_GRID = 4096
DIAGONAL_ROOT_TOL = 1e-13

# Sweeps
DEFAULT_SWEEP_POINTS = 128
LINK_FRACTION = 0.5
REFINE_TOL = 1e-4

# Network presets
DEFAULT_DECAY_RANGE = (0.5, 1.5)
DEFAULT_C_RANGE = (-2.0, 2.0)
DEFAULT_C_EXCLUSION = 0.1

# Output
FLOAT_FORMAT = ".17g"
TRAJECTORY_HEADER = "# hebbiantools trajectory v1"
DIAGRAM_HEADER = "# hebbiantools diagram v1"


class ExitCode(IntEnum):
    """Process exit codes of the command line interface."""

    OK = 0
    RUNTIME_ANOMALY = 1
    CONFIG_ERROR = 2


class Stability(str, Enum):
    """Stability class of an equilibrium."""

    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


class SymmetryTag(str, Enum):
    """Position of an equilibrium with respect to the symmetric plane ``L``."""

    ON_PLANE_L = "on_plane_L"
    OFF_PLANE = "off_plane"


class TerminalReason(str, Enum):
    """Why a trajectory stopped."""

    CONVERGED = "converged"
    HORIZON = "horizon"
    DIVERGED = "diverged"


class Method(str, Enum):
    """Time stepping schemes."""

    RK4_FIXED = "rk4-fixed"
    RK45_ADAPTIVE = "rk45-adaptive"


class StartStrategy(str, Enum):
    """Sampling strategies for Newton starting points."""

    GRID = "grid"
    UNIFORM_RANDOM = "uniform_random"
    SOBOL = "sobol"


class Certificate(str, Enum):
    """Verdict of the contraction certificate."""

    UNIQUE_GUARANTEED = "unique_guaranteed"
    INCONCLUSIVE = "inconclusive"


class TopologyKind(str, Enum):
    """Moderate-size network presets."""

    RANDOM_MIXED = "random_mixed"
    INTERCONNECTED = "interconnected"

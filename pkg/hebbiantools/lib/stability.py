import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg
from scipy.optimize import brentq

from hebbiantools import constants as const
from hebbiantools.constants import Certificate, Stability
from hebbiantools.core import dynamics as dyn
from hebbiantools.core.box import invariant_box
from hebbiantools.core.network import NetworkSpec, is_bidirectional_motif, single_synapse_motif
from hebbiantools.lib.symmetric import symmetric_diagonal_root

logger = logging.getLogger(__name__)

__all__ = [
    "CertificateResult",
    "SingleSynapseReport",
    "StabilityError",
    "StabilityReport",
    "TransitionEstimate",
    "classify",
    "contraction_certificate",
    "eigen_dense",
    "lambda1",
    "reduced3_eigenvalues_closed_form",
    "single_synapse_eigenvalues_closed_form",
    "single_synapse_root",
    "single_synapse_stability",
    "stability_report",
    "stability_transition_scan",
]


class StabilityError(Exception):
    """Raised when a stability computation fails or receives an unsupported system."""


def _sorted(eigenvalues: np.ndarray) -> np.ndarray:
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    return eigenvalues[order]


def eigen_dense(matrix: np.ndarray) -> np.ndarray:
    """
    All eigenvalues of a dense real matrix.

    LAPACK's Hessenberg/QR solver returns complex pairs as exact conjugates. The result is sorted
    by real part, then imaginary part.

    :param matrix: A finite square matrix.
    :type matrix: np.ndarray
    :return: The complex eigenvalues.
    :rtype: np.ndarray
    :raises StabilityError: If the matrix is not square, not finite, or the QR iteration fails.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StabilityError(f"matrix must be square, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise StabilityError("matrix must be finite")
    try:
        eigenvalues = linalg.eigvals(matrix)
    except linalg.LinAlgError as e:
        raise StabilityError(
            f"eigenvalue iteration did not converge for a {matrix.shape[0]}x{matrix.shape[1]} "
            f"matrix with 1-norm {np.linalg.norm(matrix, 1):.6g}: {e}"
        ) from e
    return _sorted(np.asarray(eigenvalues, dtype=complex))


def classify(eigenvalues: np.ndarray, band: float = const.MARGINAL_BAND) -> Stability:
    """
    Classifies an equilibrium from the eigenvalues of its Jacobian.

    :param eigenvalues: The eigenvalues.
    :type eigenvalues: np.ndarray
    :param band: Leading real parts with absolute value below ``band`` are marginal.
    :type band: float
    :return: The stability class.
    :rtype: Stability
    """
    leading = float(np.max(np.real(eigenvalues)))
    if abs(leading) < band:
        return Stability.MARGINAL
    return Stability.STABLE if leading < 0 else Stability.UNSTABLE


@dataclass
class StabilityReport:
    """Spectrum and classification of a Jacobian."""

    eigenvalues: np.ndarray
    classification: Stability
    leading_real: float
    determinant: float

    def to_dict(self) -> dict[str, Any]:
        """Serializes the report; eigenvalues become ``[re, im]`` pairs."""
        return {
            "eigenvalues": [[float(v.real), float(v.imag)] for v in self.eigenvalues],
            "stability": self.classification.value,
            "leading_real": self.leading_real,
            "determinant": self.determinant,
        }


def stability_report(jac: np.ndarray) -> StabilityReport:
    """
    Builds the :class:`StabilityReport` of a Jacobian.

    :param jac: The Jacobian at an equilibrium.
    :type jac: np.ndarray
    :return: The report.
    :rtype: StabilityReport
    """
    eigenvalues = eigen_dense(jac)
    return StabilityReport(
        eigenvalues=eigenvalues,
        classification=classify(eigenvalues),
        leading_real=float(np.max(eigenvalues.real)),
        determinant=float(linalg.det(jac)),
    )


def lambda1(c: float) -> float:
    """The eigenvalue ``c phi_hat**4 - c phi_hat**3 - 1`` transverse to the symmetric plane."""
    phi = float(dyn.sigmoid(symmetric_diagonal_root(c)))
    return c * phi**4 - c * phi**3 - 1.0


def reduced3_eigenvalues_closed_form(c: float) -> tuple[complex, complex, complex]:
    """
    The eigenvalues of the reduced system's Jacobian at the on-plane equilibrium.

    With ``k = c phi_hat**3 - c phi_hat**4``: ``lambda_1 = -1 - k`` and
    ``lambda_{2,3} = (k - 2)/2 +- sqrt(k (k + 8))/2``. A negative radicand gives an exactly
    conjugate pair.

    :param c: The shared learning rate.
    :type c: float
    :return: ``(lambda_1, lambda_2, lambda_3)``.
    :rtype: tuple[complex, complex, complex]
    """
    phi = float(dyn.sigmoid(symmetric_diagonal_root(c)))
    k = c * phi**3 - c * phi**4
    first = complex(-1.0 - k)
    centre = (k - 2.0) / 2.0
    radicand = k * (k + 8.0)
    if radicand >= 0:
        half_width = math.sqrt(radicand) / 2.0
        return first, complex(centre + half_width), complex(centre - half_width)
    half_width = math.sqrt(-radicand) / 2.0
    return first, complex(centre, half_width), complex(centre, -half_width)


def single_synapse_root(a2: float, b1: float, c1: float) -> float:
    """
    Solves ``4 a2 b1 x = c1 phi(x)`` for the activation of the receiving neuron at the
    equilibrium of the single-synapse motif.

    :return: The unique root, bracketed between ``0`` and ``c1 / (4 a2 b1)``.
    :rtype: float
    """
    if c1 == 0:
        return 0.0
    scale = 4.0 * a2 * b1

    def residual(x: float) -> float:
        return scale * x - c1 * float(dyn.sigmoid(x))

    end = c1 / scale
    root = brentq(residual, min(0.0, end), max(0.0, end), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    slope = scale - c1 * float(dyn.sigmoid_prime(root))
    candidate = root - residual(root) / slope
    return candidate if abs(residual(candidate)) < abs(residual(root)) else root


def single_synapse_eigenvalues_closed_form(
    a1: float, a2: float, b1: float, c1: float
) -> tuple[complex, complex, complex]:
    """
    ``lambda_1 = -a1`` and ``lambda_{2,3} = -(a2 + b1)/2 +- sqrt((a2 - b1)**2 + c1 phi'(x))/2``
    at the equilibrium of the single-synapse motif.
    """
    dphi = float(dyn.sigmoid_prime(single_synapse_root(a2, b1, c1)))
    centre = -(a2 + b1) / 2.0
    radicand = (a2 - b1) ** 2 + c1 * dphi
    if radicand >= 0:
        half_width = math.sqrt(radicand) / 2.0
        return complex(-a1), complex(centre + half_width), complex(centre - half_width)
    half_width = math.sqrt(-radicand) / 2.0
    return complex(-a1), complex(centre, half_width), complex(centre, -half_width)


@dataclass
class SingleSynapseReport(StabilityReport):
    """:class:`StabilityReport` of the single-synapse motif with its closed-form counterparts."""

    x_tilde: float = 0.0
    equilibrium: np.ndarray = field(default_factory=lambda: np.zeros(3))
    jacobian: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    closed_form_eigenvalues: tuple[complex, complex, complex] = (0j, 0j, 0j)
    closed_form_determinant: float = 0.0

    @property
    def exponentially_stable(self) -> bool:
        """``True`` if the determinant is negative and every eigenvalue has negative real part."""
        return self.determinant < 0 and self.leading_real < 0


def single_synapse_stability(a1: float, a2: float, b1: float, c1: float) -> SingleSynapseReport:
    """
    Analyzes the unique equilibrium ``(0, x_tilde, 2 a2 x_tilde)`` of the single-synapse motif.

    The Jacobian is assembled by the general network Jacobian; its determinant equals
    ``-a1 a2 b1 (1 - x_tilde (1 - phi(x_tilde)))``, which is always negative, and every eigenvalue
    has negative real part.

    :param a1: Decay rate of the sending neuron.
    :type a1: float
    :param a2: Decay rate of the receiving neuron.
    :type a2: float
    :param b1: Decay rate of the synapse.
    :type b1: float
    :param c1: Learning rate of the synapse, nonzero.
    :type c1: float
    :return: The report.
    :rtype: SingleSynapseReport
    """
    spec = single_synapse_motif(a1=a1, a2=a2, b1=b1, c1=c1)
    x_tilde = single_synapse_root(a2, b1, c1)
    equilibrium = np.array([0.0, x_tilde, 2.0 * a2 * x_tilde])
    jac = dyn.jacobian(spec, equilibrium)
    base = stability_report(jac)
    phi = float(dyn.sigmoid(x_tilde))
    report = SingleSynapseReport(
        eigenvalues=base.eigenvalues,
        classification=base.classification,
        leading_real=base.leading_real,
        determinant=base.determinant,
        x_tilde=x_tilde,
        equilibrium=equilibrium,
        jacobian=jac,
        closed_form_eigenvalues=single_synapse_eigenvalues_closed_form(a1, a2, b1, c1),
        closed_form_determinant=-a1 * a2 * b1 * (1.0 - x_tilde * (1.0 - phi)),
    )
    if not report.exponentially_stable:
        logger.warning(
            "Single-synapse equilibrium not exponentially stable for a1=%r a2=%r b1=%r c1=%r",
            a1,
            a2,
            b1,
            c1,
        )
    return report


@dataclass
class CertificateResult:
    """
    Outcome of :func:`contraction_certificate`.

    ``activation_bound`` bounds the 1-norm of the activation columns of the fixed-point map's
    Jacobian, ``weight_bound`` the weight columns; the map contracts when both are below one.
    """

    verdict: Certificate
    activation_bound: float
    weight_bound: float
    w_max: float

    @property
    def norm_bound(self) -> float:
        """The bound on the induced 1-norm of the fixed-point map's Jacobian over the box."""
        return max(self.activation_bound, self.weight_bound)

    def to_dict(self) -> dict[str, Any]:
        """Serializes the result."""
        return {
            "verdict": self.verdict.value,
            "activation_bound": self.activation_bound,
            "weight_bound": self.weight_bound,
            "norm_bound": self.norm_bound,
            "w_max": self.w_max,
        }


def contraction_certificate(spec: NetworkSpec) -> CertificateResult:
    """
    Checks whether the fixed-point map of the bidirectional motif contracts in the 1-norm over the
    invariant box, which guarantees a unique equilibrium.

    The certificate holds iff ``a1 > 1``, ``a2 > 1`` and
    ``max(w_max / a1, w_max / a2) + |c1| / b1 + |c2| / b2 < 4``.

    :param spec: A bidirectional motif.
    :type spec: NetworkSpec
    :return: The verdict and the bound pieces.
    :rtype: CertificateResult
    :raises StabilityError: If ``spec`` is not a bidirectional motif.
    """
    if not is_bidirectional_motif(spec):
        raise StabilityError("the contraction certificate applies to the bidirectional motif only")
    spec.require_autonomous()
    a1, a2 = (float(v) for v in spec.a)
    b1, b2 = (float(v) for v in spec.b)
    c1, c2 = (float(v) for v in spec.c)
    w_max = invariant_box(spec).w_bound
    activation_bound = (max(w_max / a1, w_max / a2) + abs(c1) / b1 + abs(c2) / b2) / 4.0
    weight_bound = max(1.0 / a1, 1.0 / a2)
    unique = a1 > 1 and a2 > 1 and activation_bound < 1.0
    return CertificateResult(
        verdict=Certificate.UNIQUE_GUARANTEED if unique else Certificate.INCONCLUSIVE,
        activation_bound=activation_bound,
        weight_bound=weight_bound,
        w_max=w_max,
    )


@dataclass
class TransitionEstimate:
    """Location of the sign change of the transverse eigenvalue found by a grid scan."""

    c_critical: float
    bracket: tuple[float, float]
    grid: np.ndarray
    lambda1_values: np.ndarray


def stability_transition_scan(c_lo: float, c_hi: float, n: int = 64) -> TransitionEstimate:
    """
    Scans the transverse eigenvalue of the on-plane equilibrium over ``[c_lo, c_hi]`` and
    refines its sign change with Brent's method.

    :param c_lo: Lower end of the scan.
    :type c_lo: float
    :param c_hi: Upper end of the scan.
    :type c_hi: float
    :param n: The number of grid points.
    :type n: int
    :return: The estimated critical learning rate.
    :rtype: TransitionEstimate
    :raises StabilityError: If the range contains no sign change.
    """
    if not c_lo < c_hi or n < 2:
        raise StabilityError("need c_lo < c_hi and n >= 2")
    grid = np.linspace(c_lo, c_hi, n)
    values = np.array([lambda1(c) for c in grid])
    changes = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)
    if changes.size == 0:
        raise StabilityError(f"no sign change of lambda_1 in [{c_lo!r}, {c_hi!r}]")
    if changes.size > 1:
        logger.warning("lambda_1 changes sign %d times; refining the first one", changes.size)
    index = int(changes[0])
    lo, hi = float(grid[index]), float(grid[index + 1])
    if values[index] == 0:
        critical = lo
    elif values[index + 1] == 0:
        critical = hi
    else:
        critical = float(brentq(lambda1, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps))
    logger.info("lambda_1 changes sign at c=%.10g", critical)
    return TransitionEstimate(
        c_critical=critical, bracket=(lo, hi), grid=grid, lambda1_values=values
    )

"""
Semi-analytic machinery of the symmetric bidirectional motif.

With ``a = b = 1`` and ``c1 = c2 = c`` the equilibria of the motif are the equilibria of the
reduced system ``(x1, x2, w)``. Eliminating ``x1`` and ``w`` leaves one scalar equation
``f(xi) = 0`` in ``xi = x2`` whose roots enumerate all equilibria; the diagonal root
``x = c * phi(x)**3`` is the equilibrium on the symmetric plane. Its first eigenvalue vanishes at
the critical learning rate ``c0``, expressed through the principal branch of the Lambert W
function.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.optimize import brentq

from hebbiantools import constants as const
from hebbiantools.core import dynamics as dyn
from hebbiantools.core.dynamics import apply_symmetry_s
from hebbiantools.core.network import ReducedState3

logger = logging.getLogger(__name__)

__all__ = [
    "DomainError",
    "PlanarBoundaryReport",
    "SymmetricCaseError",
    "admissible_interval",
    "apply_symmetry_s",
    "beta_c",
    "count_f_roots",
    "critical_c0",
    "critical_eigenvector",
    "critical_xhat0",
    "equilibria_from_f_roots",
    "f_xi",
    "lambda1_of_xhat",
    "lambert_w0",
    "planar_boundary_check",
    "reduced3_characteristic_polynomial",
    "symmetric_diagonal_root",
    "symmetric_equilibrium",
    "symmetric_equilibrium_jacobian",
]

_INV_E = math.exp(-1.0)


class SymmetricCaseError(Exception):
    """Raised when a symmetric-case computation cannot be carried out."""


class DomainError(SymmetricCaseError, ValueError):
    """Raised when an argument lies outside the domain of a function."""


def _polish(
    func: Callable[[float], float],
    derivative: Callable[[float], float],
    x: float,
    tol: float,
    max_iters: int = 8,
) -> float:
    """Newton iterations from a bracketed root, accepted only while the residual decreases."""
    residual = abs(func(x))
    for _ in range(max_iters):
        if residual < tol:
            break
        slope = derivative(x)
        if slope == 0 or not math.isfinite(slope):
            break
        candidate = x - func(x) / slope
        candidate_residual = abs(func(candidate))
        if not candidate_residual < residual:
            break
        x, residual = candidate, candidate_residual
    return x


def symmetric_diagonal_root(c: float) -> float:
    """
    The unique solution of ``x = c * phi(x)**3``, the common coordinate ``x_hat`` of the
    equilibrium on the symmetric plane.

    The root is bracketed in ``[min(0, c), max(0, c)]``, located with Brent's method and polished
    with Newton steps until ``|x - c phi(x)**3| < 1e-13 * max(1, |c|)``.

    :param c: The shared learning rate. ``c = 0`` returns ``0``.
    :type c: float
    :return: ``x_hat``, with the sign of ``c``.
    :rtype: float
    """
    if c == 0:
        return 0.0

    def residual(x: float) -> float:
        return x - c * float(dyn.sigmoid(x)) ** 3

    def slope(x: float) -> float:
        phi = float(dyn.sigmoid(x))
        return 1.0 - 3.0 * c * phi * phi * float(dyn.sigmoid_prime(x))

    root = brentq(residual, min(0.0, c), max(0.0, c), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return _polish(residual, slope, root, const.DIAGONAL_ROOT_TOL * max(1.0, abs(c)))


def symmetric_equilibrium(c: float) -> ReducedState3:
    """
    The equilibrium ``(x_hat, x_hat, c phi(x_hat)**2)`` of the reduced system on the plane.
    """
    x_hat = symmetric_diagonal_root(c)
    phi = float(dyn.sigmoid(x_hat))
    return ReducedState3(x_hat, x_hat, c * phi * phi)


def symmetric_equilibrium_jacobian(c: float) -> np.ndarray:
    """
    The closed-form Jacobian of the reduced system at the on-plane equilibrium.

    With ``phi_hat = phi(x_hat)`` and ``phi_hat' = phi_hat (1 - phi_hat)``, the off-diagonal
    activation entries are ``c phi_hat**2 phi_hat'`` and the weight row is
    ``(c phi_hat phi_hat', c phi_hat phi_hat', -1)``.

    :param c: The shared learning rate.
    :type c: float
    :return: The 3x3 Jacobian.
    :rtype: np.ndarray
    """
    x_hat = symmetric_diagonal_root(c)
    phi = float(dyn.sigmoid(x_hat))
    dphi = phi * (1.0 - phi)
    k = c * phi * phi * dphi
    s = c * phi * dphi
    return np.array([[-1.0, k, phi], [k, -1.0, phi], [s, s, -1.0]])


def _coupling(c: float) -> float:
    """``k = c phi_hat**3 (1 - phi_hat)``, the quantity all eigenvalues at the plane depend on."""
    phi = float(dyn.sigmoid(symmetric_diagonal_root(c)))
    return c * phi**3 * (1.0 - phi)


def reduced3_characteristic_polynomial(c: float) -> np.ndarray:
    """
    Coefficients, highest degree first, of ``det(lambda I - J_hat)``:
    ``lambda**3 + 3 lambda**2 + (3 - 2k - k**2) lambda + (1 + k)(1 - 3k)``.

    :param c: The shared learning rate.
    :type c: float
    :return: The four coefficients.
    :rtype: np.ndarray
    """
    k = _coupling(c)
    return np.array([1.0, 3.0, 3.0 - 2.0 * k - k * k, (1.0 + k) * (1.0 - 3.0 * k)])


def lambda1_of_xhat(x_hat: float) -> float:
    """
    The eigenvalue transverse to the symmetric plane as a function of the diagonal root,
    ``x_hat (phi(x_hat) - 1) - 1``.
    """
    return x_hat * (float(dyn.sigmoid(x_hat)) - 1.0) - 1.0


def beta_c(c: float) -> float:
    """
    The root of ``h(xi) = xi (1 + exp(-xi)) - c``, the finite end of the interval where ``f`` is
    defined.

    ``h`` is strictly increasing, so the root is unique and has the sign of ``c``.

    :param c: The shared learning rate.
    :type c: float
    :return: ``beta_c`` with ``|h(beta_c)| < 1e-12 * max(1, |c|)``.
    :rtype: float
    :raises DomainError: If ``c`` is zero.
    """
    if c == 0:
        raise DomainError("beta undefined for c = 0")

    def h(xi: float) -> float:
        return xi * (1.0 + math.exp(-xi)) - c

    def dh(xi: float) -> float:
        return 1.0 + math.exp(-xi) * (1.0 - xi)

    lower, upper = (0.0, c) if c > 0 else (max(c, -700.0), 0.0)
    root = brentq(h, lower, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return _polish(h, dh, root, 1e-12 * max(1.0, abs(c)))


def admissible_interval(c: float) -> tuple[float, float]:
    """
    The open interval where ``f`` is defined: ``(0, beta_c)`` for ``c > 0`` and ``(beta_c, 0)``
    for ``c < 0``.
    """
    beta = beta_c(c)
    return (0.0, beta) if c > 0 else (beta, 0.0)


def _alpha(c: float, xi: float) -> float:
    return xi * (1.0 + math.exp(-xi)) / c


def f_xi(c: float, xi: float) -> float:
    """
    The scalar equation whose roots enumerate the equilibria of the reduced system.

    ``f(xi) = ln(sqrt(alpha) / (1 - sqrt(alpha))) - c sqrt(alpha) phi(xi)**2`` with
    ``alpha = xi (1 + exp(-xi)) / c``.

    :param c: The shared learning rate, nonzero.
    :type c: float
    :param xi: A point strictly inside :func:`admissible_interval`.
    :type xi: float
    :return: The value of ``f``.
    :rtype: float
    :raises DomainError: If ``xi`` lies outside the admissible interval.
    """
    lower, upper = admissible_interval(c)
    if not lower < xi < upper:
        raise DomainError(f"xi = {xi!r} outside the admissible interval ({lower!r}, {upper!r})")
    return _f_inside(c, xi)


def _f_inside(c: float, xi: float) -> float:
    alpha = _alpha(c, xi)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha = {alpha!r} outside (0, 1) at xi = {xi!r}")
    root_alpha = math.sqrt(alpha)
    phi = float(dyn.sigmoid(xi))
    return math.log(root_alpha / (1.0 - root_alpha)) - c * root_alpha * phi * phi


def count_f_roots(c: float, grid_points: int = const.DEFAULT_F_GRID) -> list[float]:
    """
    Locates every root of :func:`f_xi` on its admissible interval.

    ``f`` is evaluated on a uniform grid whose endpoints are inset by ``1e-9`` of the interval
    length; every sign change is refined with Brent's method to ``1e-12``.

    :param c: The shared learning rate, nonzero.
    :type c: float
    :param grid_points: The number of grid points, at least 1000.
    :type grid_points: int
    :return: The sorted roots.
    :rtype: list[float]
    :raises SymmetricCaseError: If the grid is too coarse.
    """
    if grid_points < 1000:
        raise SymmetricCaseError("grid_points must be >= 1000")
    lower, upper = admissible_interval(c)
    inset = const.F_ENDPOINT_INSET * (upper - lower)
    grid = np.linspace(lower + inset, upper - inset, grid_points)
    values = np.array([_f_inside(c, xi) for xi in grid])

    roots = []
    for index in range(grid_points - 1):
        left, right = values[index], values[index + 1]
        if left == 0.0:
            roots.append(float(grid[index]))
        elif left * right < 0.0:
            roots.append(
                float(
                    brentq(
                        lambda xi: _f_inside(c, xi),
                        grid[index],
                        grid[index + 1],
                        xtol=const.F_ROOT_XTOL,
                    )
                )
            )
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    logger.debug("f has %d root(s) for c=%r", len(roots), c)
    return sorted(roots)


def equilibria_from_f_roots(
    c: float, grid_points: int = const.DEFAULT_F_GRID
) -> list[ReducedState3]:
    """
    Maps every root ``xi`` of ``f`` to the equilibrium
    ``(logit(sqrt(alpha)), xi, c sqrt(alpha) phi(xi))`` of the reduced system.

    :return: One equilibrium per root, in the order of the roots.
    :rtype: list[ReducedState3]
    """
    states = []
    for xi in count_f_roots(c, grid_points):
        root_alpha = math.sqrt(_alpha(c, xi))
        x1 = math.log(root_alpha / (1.0 - root_alpha))
        states.append(ReducedState3(x1, xi, c * root_alpha * float(dyn.sigmoid(xi))))
    return states


def lambert_w0(y: float) -> float:
    """
    The principal branch ``W0`` of the Lambert W function, ``w exp(w) = y`` with ``w >= -1``.

    Halley's iteration starts from the branch-point series near ``-1/e``, from ``log1p(y)`` for
    moderate arguments and from the asymptotic expansion for large ones.

    :param y: The argument, at least ``-1/e``.
    :type y: float
    :return: ``W0(y)``.
    :rtype: float
    :raises DomainError: If ``y < -1/e``.
    """
    if not math.isfinite(y):
        raise DomainError(f"W0 undefined for y = {y!r}")
    distance = y + _INV_E
    if distance < 0:
        if distance > -4 * np.finfo(float).eps:
            return -1.0
        raise DomainError(f"W0 undefined for y = {y!r} < -1/e")
    if y == 0:
        return 0.0
    if distance == 0:
        return -1.0

    if y < -0.25:
        p = math.sqrt(2.0 * (math.e * y + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    elif y < 3.0:
        w = math.log1p(y)
    else:
        l1 = math.log(y)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1

    for _ in range(64):
        ew = math.exp(w)
        residual = w * ew - y
        denominator = ew * (w + 1.0) - (w + 2.0) * residual / (2.0 * w + 2.0)
        if denominator == 0 or not math.isfinite(denominator):
            break
        step = residual / denominator
        w -= step
        if abs(step) <= 4 * np.finfo(float).eps * (1.0 + abs(w)):
            break
    return max(w, -1.0)


def critical_xhat0() -> float:
    """
    The diagonal root at the critical learning rate, ``-W0(1/e) - 1``, which solves
    ``x (phi(x) - 1) = 1``.
    """
    return -lambert_w0(_INV_E) - 1.0


def critical_c0() -> float:
    """
    The critical learning rate ``c0 = x0 (1 + exp(-x0))**3`` with ``x0 = -W0(1/e) - 1``.

    For ``c > c0`` the equilibrium on the symmetric plane is stable; below ``c0`` it is unstable
    and two mirror-image stable equilibria exist.

    :return: ``c0``, approximately ``-123.7215``.
    :rtype: float
    """
    x0 = critical_xhat0()
    return x0 * (1.0 + math.exp(-x0)) ** 3


def critical_eigenvector() -> np.ndarray:
    """
    The unit null vector of the Jacobian at the on-plane equilibrium for ``c = c0``.

    It is proportional to ``(-1, 1, 0)``, transverse to the symmetric plane.

    :return: The eigenvector, normalized with a non-negative second component.
    :rtype: np.ndarray
    """
    eigenvalues, eigenvectors = linalg.eig(symmetric_equilibrium_jacobian(critical_c0()))
    vector = np.real(eigenvectors[:, int(np.argmin(np.abs(eigenvalues)))])
    vector = vector / np.linalg.norm(vector)
    return -vector if vector[1] < 0 else vector


@dataclass
class PlanarBoundaryReport:
    """Sampled behaviour of the planar field on the square ``|x1|, |w| <= |c|``."""

    c: float
    worst_outward: float
    max_divergence: float

    @property
    def inward(self) -> bool:
        """``True`` if the outward normal component is negative at every boundary sample."""
        return self.worst_outward < 0.0

    @property
    def divergence_negative(self) -> bool:
        """``True`` if the divergence is negative at every sample of the square."""
        return self.max_divergence < 0.0


def planar_boundary_check(c: float, n_points: int = 201) -> PlanarBoundaryReport:
    """
    Samples the planar field on the boundary of the square ``|x1|, |w| <= |c|`` and its
    divergence ``-2 + w phi'(x1)`` on a grid covering the square.

    The field points inward everywhere on the boundary. The divergence stays negative when
    ``|c| < 8``, which rules out periodic orbits of the planar system.

    :param c: The shared learning rate, nonzero.
    :type c: float
    :param n_points: Samples per side.
    :type n_points: int
    :return: The largest outward component and the largest divergence.
    :rtype: PlanarBoundaryReport
    :raises DomainError: If ``c`` is zero or ``n_points < 2``.
    """
    if c == 0 or n_points < 2:
        raise DomainError("the planar check needs c != 0 and n_points >= 2")
    r = abs(c)
    t = np.linspace(-r, r, n_points)
    outward = []
    for side in (-1.0, 1.0):
        dx1, _ = dyn.reduced_planar_field(c, np.full_like(t, side * r), t)
        _, dw = dyn.reduced_planar_field(c, t, np.full_like(t, side * r))
        outward += [np.max(side * dx1), np.max(side * dw)]
    x1, w = np.meshgrid(t, t)
    divergence = -2.0 + w * dyn.sigmoid_prime(x1)
    report = PlanarBoundaryReport(
        c=float(c), worst_outward=float(max(outward)), max_divergence=float(np.max(divergence))
    )
    if not report.inward:
        logger.warning("Planar field points outward on the boundary for c=%r", c)
    return report

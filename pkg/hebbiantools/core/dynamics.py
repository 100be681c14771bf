"""
Vector fields and analytic Jacobians of the neuron/synapse systems.

All functions are pure and operate on flat ``np.ndarray`` state vectors. Functions that accept a
state also accept the typed wrappers of :mod:`hebbiantools.core.network`.
"""

import numpy as np
from scipy.special import expit

from hebbiantools.core.network import ModelError, NetworkSpec, ReducedState3, SystemState

__all__ = [
    "apply_symmetry_s",
    "jacobian",
    "lyapunov_derivative",
    "lyapunov_value",
    "reduced3_field",
    "reduced3_jacobian",
    "reduced_planar_field",
    "reduced_planar_jacobian",
    "sigmoid",
    "sigmoid_prime",
    "vector_field",
]


def sigmoid(z: float | np.ndarray) -> float | np.ndarray:
    """
    The logistic sigmoid ``1 / (1 + exp(-z))``.

    Evaluated with ``scipy.special.expit``, which splits on the sign of ``z`` and never overflows.

    :param z: Scalar or array input.
    :type z: Union[float, np.ndarray]
    :return: Values in ``(0, 1)`` (exactly ``1.0`` once ``z`` saturates double precision).
    :rtype: Union[float, np.ndarray]
    """
    return expit(z)


def sigmoid_prime(z: float | np.ndarray) -> float | np.ndarray:
    """
    The derivative of the sigmoid, ``phi(z) * (1 - phi(z))``, with maximum ``1/4`` at ``z = 0``.

    Evaluated as ``phi(z) * phi(-z)`` so that the saturated tails keep their tiny positive values.
    """
    return expit(z) * expit(-z)


def _state_vector(spec: NetworkSpec, s: SystemState | np.ndarray) -> np.ndarray:
    if isinstance(s, SystemState):
        s = s.as_vector()
    vector = np.asarray(s, dtype=float).reshape(-1)
    if vector.size != spec.dimension:
        raise ModelError(
            f"state has {vector.size} entries, expected n + |edges| = {spec.dimension}"
        )
    return vector


def vector_field(spec: NetworkSpec, s: SystemState | np.ndarray) -> np.ndarray:
    """
    The right-hand side of the network equations.

    ``dx_i/dt = -a_i x_i + sum_j w_ij phi(x_j) + u_i`` and
    ``dw_ij/dt = -b_ij w_ij + c_ij phi(x_i) phi(x_j)``.

    :param spec: The network.
    :type spec: NetworkSpec
    :param s: The state, flat or as a ``SystemState``.
    :type s: Union[SystemState, np.ndarray]
    :return: The time derivative, laid out like the state vector.
    :rtype: np.ndarray
    :raises ModelError: If the state dimension does not match ``spec``.
    """
    vector = _state_vector(spec, s)
    x, w = vector[: spec.n], vector[spec.n :]
    post, pre = spec.edges[:, 0], spec.edges[:, 1]
    phi = sigmoid(x)

    dx = -spec.a * x + spec.u
    np.add.at(dx, post, w * phi[pre])
    dw = -spec.b * w + spec.c * phi[post] * phi[pre]
    return np.concatenate([dx, dw])


def jacobian(spec: NetworkSpec, s: SystemState | np.ndarray) -> np.ndarray:
    """
    The dense analytic Jacobian of :func:`vector_field`.

    Contributions of a self-loop ``(i, i)`` to ``d(dw_ii/dt)/dx_i`` are summed.

    :param spec: The network.
    :type spec: NetworkSpec
    :param s: The state.
    :type s: Union[SystemState, np.ndarray]
    :return: The ``(n + |edges|)``-square Jacobian matrix.
    :rtype: np.ndarray
    """
    vector = _state_vector(spec, s)
    n, m = spec.n, spec.n_edges
    x, w = vector[:n], vector[n:]
    post, pre = spec.edges[:, 0], spec.edges[:, 1]
    phi = sigmoid(x)
    dphi = sigmoid_prime(x)
    slots = n + np.arange(m)

    jac = np.zeros((n + m, n + m))
    jac[np.arange(n), np.arange(n)] = -spec.a
    np.add.at(jac, (post, pre), w * dphi[pre])
    jac[post, slots] = phi[pre]
    np.add.at(jac, (slots, post), spec.c * dphi[post] * phi[pre])
    np.add.at(jac, (slots, pre), spec.c * phi[post] * dphi[pre])
    jac[slots, slots] = -spec.b
    return jac


def _reduced_triple(s: ReducedState3 | np.ndarray) -> tuple[float, float, float]:
    if isinstance(s, ReducedState3):
        return s.x1, s.x2, s.w
    x1, x2, w = np.asarray(s, dtype=float).reshape(3)
    return float(x1), float(x2), float(w)


def reduced3_field(c: float, s: ReducedState3 | np.ndarray) -> np.ndarray:
    """
    The three-dimensional reduction of the symmetric bidirectional motif (``a = b = 1``,
    ``c1 = c2 = c``, ``w1 = w2 = w``).

    :param c: The shared learning rate.
    :type c: float
    :param s: The reduced state ``(x1, x2, w)``.
    :type s: Union[ReducedState3, np.ndarray]
    :return: ``(-x1 + w phi(x2), -x2 + w phi(x1), -w + c phi(x1) phi(x2))``.
    :rtype: np.ndarray
    """
    x1, x2, w = _reduced_triple(s)
    phi1, phi2 = sigmoid(x1), sigmoid(x2)
    return np.array([-x1 + w * phi2, -x2 + w * phi1, -w + c * phi1 * phi2])


def reduced3_jacobian(c: float, s: ReducedState3 | np.ndarray) -> np.ndarray:
    """The analytic Jacobian of :func:`reduced3_field`."""
    x1, x2, w = _reduced_triple(s)
    phi1, phi2 = sigmoid(x1), sigmoid(x2)
    dphi1, dphi2 = sigmoid_prime(x1), sigmoid_prime(x2)
    return np.array(
        [
            [-1.0, w * dphi2, phi2],
            [w * dphi1, -1.0, phi1],
            [c * dphi1 * phi2, c * phi1 * dphi2, -1.0],
        ]
    )


def reduced_planar_field(c: float, x1: float, w: float) -> np.ndarray:
    """
    The planar restriction of :func:`reduced3_field` to ``x1 = x2``.

    :return: ``(-x1 + w phi(x1), -w + c phi(x1)**2)``.
    :rtype: np.ndarray
    """
    phi = sigmoid(x1)
    return np.array([-x1 + w * phi, -w + c * phi * phi])


def reduced_planar_jacobian(c: float, x1: float, w: float) -> np.ndarray:
    """
    The analytic Jacobian of :func:`reduced_planar_field`.

    Its trace is ``-2 + w phi'(x1)``.
    """
    phi = sigmoid(x1)
    dphi = sigmoid_prime(x1)
    return np.array([[-1.0 + w * dphi, phi], [2.0 * c * phi * dphi, -1.0]])


def apply_symmetry_s(s: ReducedState3 | np.ndarray) -> ReducedState3:
    """
    The swap map ``S(x1, x2, w) = (x2, x1, w)``, a symmetry of :func:`reduced3_field`.
    """
    x1, x2, w = _reduced_triple(s)
    return ReducedState3(x2, x1, w)


def lyapunov_value(s: ReducedState3 | np.ndarray) -> float:
    """``V = (x1 - x2)**2 / 2``, the squared distance to the symmetric plane."""
    x1, x2, _ = _reduced_triple(s)
    return 0.5 * (x1 - x2) ** 2


def lyapunov_derivative(c: float, s: ReducedState3 | np.ndarray) -> float:
    """
    The derivative of :func:`lyapunov_value` along the reduced flow,
    ``(x1 - x2) * (dx1/dt - dx2/dt)``.
    """
    x1, x2, _ = _reduced_triple(s)
    dx1, dx2, _ = reduced3_field(c, s)
    return float((x1 - x2) * (dx1 - dx2))

"""Closed moment equations: right-hand side, RK4 integration, steady state."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DerivedCoefficients, SystemParams, derive_coefficients, require_below
from .errors import DomainError


@dataclass(frozen=True)
class MomentState:
    """Normally ordered moments ``<alpha>``, ``<alpha^2>`` and ``<alpha* alpha>``."""

    mean_alpha: complex = 0j
    mean_alpha_sq: complex = 0j
    mean_n: float = 0.0


@dataclass(frozen=True)
class MomentSeries:
    times: np.ndarray
    mean_alpha: np.ndarray
    mean_alpha_sq: np.ndarray
    mean_n: np.ndarray
    diverged: bool = False

    def final(self) -> MomentState:
        return MomentState(complex(self.mean_alpha[-1]), complex(self.mean_alpha_sq[-1]),
                           float(self.mean_n[-1]))


@dataclass(frozen=True)
class PropagatorPair:
    """Propagators of the amplitude equation, ``alpha(t) = E+ alpha(0) + E- alpha*(0)``."""

    lambda_minus: float
    lambda_plus: float

    def E_plus(self, t):
        return 0.5 * (np.exp(-self.lambda_minus * np.asarray(t))
                      + np.exp(-self.lambda_plus * np.asarray(t)))

    def E_minus(self, t):
        return 0.5 * (np.exp(-self.lambda_minus * np.asarray(t))
                      - np.exp(-self.lambda_plus * np.asarray(t)))


def propagators(params: SystemParams) -> PropagatorPair:
    c = derive_coefficients(params)
    return PropagatorPair(c.lambda_minus, c.lambda_plus)


def moment_rhs(state: MomentState, coeffs: DerivedCoefficients, epsilon: float) -> MomentState:
    """Time derivative of the moments, returned as a :class:`MomentState`.

    The conjugate moments are ``conj(<alpha>)`` and ``conj(<alpha^2>)``.
    """
    g = coeffs.calB - coeffs.calA
    c = coeffs.calC - coeffs.calD + epsilon
    a, x, n = state.mean_alpha, state.mean_alpha_sq, state.mean_n
    return MomentState(
        -g * a + c * a.conjugate(),
        -2 * g * x + 2 * c * n + epsilon - 2 * coeffs.calD,
        -2 * g * n + c * 2 * x.real + 2 * coeffs.calA,
    )


def default_moment_dt(params: SystemParams) -> float:
    c = derive_coefficients(params)
    return 1e-3 / max(c.lambda_plus, params.kappa, c.calA)


def integrate_moments(params: SystemParams, t_end: float, dt: float = None,
                      initial: MomentState = None, record_every: int = 1) -> MomentSeries:
    """Classical fixed-step RK4 integration of the moment equations.

    The step is shrunk slightly so that an integer number of steps lands on
    ``t_end``.  Above threshold the moments grow exponentially; if they
    overflow the series stops at the last finite step and ``diverged`` is set.
    """
    if dt is None:
        dt = default_moment_dt(params)
    if not dt > 0 or not t_end >= 0:
        raise DomainError("need dt > 0 and t_end >= 0")
    if record_every < 1:
        raise DomainError("record_every must be >= 1")
    coeffs = derive_coefficients(params)
    eps = params.epsilon
    g = coeffs.calB - coeffs.calA
    c = coeffs.calC - coeffs.calD + eps
    src_x = eps - 2 * coeffs.calD
    src_n = 2 * coeffs.calA

    # inlined moment_rhs on plain scalars; the loop dominates the runtime
    def f(a, x, n):
        return (-g * a + c * a.conjugate(),
                -2 * g * x + 2 * c * n + src_x,
                -2 * g * n + 2 * c * x.real + src_n)

    steps = max(1, math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    h = t_end / steps if steps else dt
    s0 = initial or MomentState()
    a, x, n = complex(s0.mean_alpha), complex(s0.mean_alpha_sq), float(s0.mean_n)
    ts, As, Xs, Ns = [0.0], [a], [x], [n]
    diverged = False
    h2, h6 = h / 2, h / 6
    for i in range(1, steps + 1):
        k1a, k1x, k1n = f(a, x, n)
        k2a, k2x, k2n = f(a + h2 * k1a, x + h2 * k1x, n + h2 * k1n)
        k3a, k3x, k3n = f(a + h2 * k2a, x + h2 * k2x, n + h2 * k2n)
        k4a, k4x, k4n = f(a + h * k3a, x + h * k3x, n + h * k3n)
        a_new = a + h6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        x_new = x + h6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        n_new = n + h6 * (k1n + 2 * k2n + 2 * k3n + k4n)
        if not (math.isfinite(n_new) and math.isfinite(abs(x_new)) and math.isfinite(abs(a_new))):
            diverged = True
            break
        a, x, n = a_new, x_new, n_new
        if i % record_every == 0 or i == steps:
            ts.append(i * h)
            As.append(a)
            Xs.append(x)
            Ns.append(n)
    return MomentSeries(np.array(ts), np.array(As), np.array(Xs), np.array(Ns), diverged)


def steady_state_moments(params: SystemParams) -> MomentState:
    """Stationary moments reached from vacuum below threshold."""
    require_below(params, "steady_state_moments")
    c = derive_coefficients(params)
    e = params.epsilon
    slow = (2 * c.calA - 2 * c.calD + e) / (4 * c.lambda_minus)
    fast = (2 * c.calA + 2 * c.calD - e) / (4 * c.lambda_plus)
    return MomentState(0j, complex(slow - fast), slow + fast)

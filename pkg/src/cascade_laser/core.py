"""Physical parameters, composite master-equation coefficients and threshold.

All rates (linear gain, cavity damping, amplifier strength) are plain floats
in one common, otherwise arbitrary inverse-time unit.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, StabilityError


@dataclass(frozen=True)
class MicroscopicParams:
    """Atomic-level inputs that fix the linear gain, pump ratio and drive."""

    g: float
    r_a: float
    gamma: float
    Omega: float
    lambda_pump: float
    mu: float


@dataclass(frozen=True)
class SystemParams:
    """Inputs of the cavity-mode model.

    Parameters
    ----------
    linear_gain : float
        Linear gain coefficient ``A`` (rate, >= 0).
    kappa : float
        Cavity damping constant (rate, > 0).
    beta : float
        Pump ratio ``Omega / gamma`` (>= 0).
    epsilon : float
        Parametric amplifier strength (rate, >= 0).
    squeeze_r : float
        Squeeze parameter of the reservoir (>= 0).
    microscopic : MicroscopicParams, optional
        Atomic-level block the other fields were derived from.
    """

    linear_gain: float
    kappa: float
    beta: float = 0.0
    epsilon: float = 0.0
    squeeze_r: float = 0.0
    microscopic: Optional[MicroscopicParams] = None

    def __post_init__(self):
        for name in ("linear_gain", "kappa", "beta", "epsilon", "squeeze_r"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.kappa <= 0:
            raise DomainError(f"kappa must satisfy kappa > 0, got {self.kappa}")
        if self.linear_gain < 0:
            raise DomainError(f"linear_gain must satisfy A >= 0, got {self.linear_gain}")
        if self.beta < 0:
            raise DomainError(f"beta must satisfy beta >= 0, got {self.beta}")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must satisfy epsilon >= 0, got {self.epsilon}")
        if self.squeeze_r < 0:
            raise DomainError(f"squeeze_r must satisfy r >= 0, got {self.squeeze_r}")
        m = self.microscopic
        if m is not None:
            gain = 2.0 * m.g**2 * m.r_a / m.gamma**2
            if gain != self.linear_gain or m.Omega / m.gamma != self.beta:
                raise DomainError("microscopic block is inconsistent with A or beta")

    # Short aliases matching the usual symbols.
    @property
    def A(self) -> float:
        return self.linear_gain

    @property
    def r(self) -> float:
        return self.squeeze_r

    def replace(self, **changes) -> "SystemParams":
        """Return a copy with some fields changed (drops the microscopic block)."""
        changes.setdefault("microscopic", None)
        return dataclasses.replace(self, **changes)

    def at_threshold(self) -> "SystemParams":
        """Copy of these parameters with ``epsilon`` set to the threshold value."""
        eps = threshold_epsilon(self)
        if eps < 0:
            raise DomainError(
                f"threshold epsilon {eps:.6g} is negative for beta={self.beta}; "
                "no threshold exists with epsilon >= 0")
        return self.replace(epsilon=eps)


def from_microscopic(g, r_a, gamma, Omega, lambda_pump, mu, kappa, r) -> SystemParams:
    """Build :class:`SystemParams` from atomic-level quantities.

    ``A = 2 g**2 r_a / gamma**2``, ``beta = Omega / gamma`` and
    ``epsilon = lambda_pump * mu``.
    """
    if not gamma > 0:
        raise DomainError(f"gamma must satisfy gamma > 0, got {gamma}")
    if not kappa > 0:
        raise DomainError(f"kappa must satisfy kappa > 0, got {kappa}")
    for name, value in (("r_a", r_a), ("Omega", Omega), ("lambda_pump", lambda_pump),
                        ("mu", mu), ("r", r)):
        if value < 0:
            raise DomainError(f"{name} must be >= 0, got {value}")
    micro = MicroscopicParams(g, r_a, gamma, Omega, lambda_pump, mu)
    return SystemParams(
        linear_gain=2.0 * g**2 * r_a / gamma**2,
        kappa=kappa,
        beta=Omega / gamma,
        epsilon=lambda_pump * mu,
        squeeze_r=r,
        microscopic=micro,
    )


@dataclass(frozen=True)
class DerivedCoefficients:
    """Composite master-equation coefficients and decay eigenvalues.

    ``calA`` .. ``calD`` multiply the four dissipators of the cavity master
    equation, ``bigB = (1 + beta**2)(1 + beta**2 / 4)``, ``N`` and ``M`` are
    the squeezed-reservoir moments.  ``lambda_minus`` and ``lambda_plus`` are
    the decay rates of the quadrature variables ``alpha* + alpha`` and
    ``alpha* - alpha``.
    """

    calA: float
    calB: float
    calC: float
    calD: float
    bigB: float
    N: float
    M: float
    lambda_minus: float
    lambda_plus: float
    epsilon_threshold: float

    @property
    def drift_decay(self) -> float:
        """``calB - calA``, the diagonal decay rate of the amplitude."""
        return self.calB - self.calA

    def drift_coupling(self, epsilon: float) -> float:
        """``calC - calD + epsilon``, the amplitude to conjugate coupling."""
        return self.calC - self.calD + epsilon


def _bigB(beta):
    return (1.0 + beta**2) * (1.0 + beta**2 / 4.0)


def reservoir_moments(r):
    """Return ``(N, M) = (sinh(r)**2, sinh(r) cosh(r))``."""
    s = math.sinh(r)
    return s * s, s * math.cosh(r)


def threshold_epsilon(params: SystemParams) -> float:
    """Amplifier strength at which ``lambda_minus`` vanishes.

    The ``epsilon`` field of ``params`` is ignored.
    """
    b = params.beta
    return params.kappa / 2.0 + params.linear_gain * (2 * b - b**3) / (4.0 * _bigB(b))


def derive_coefficients(params: SystemParams) -> DerivedCoefficients:
    """Evaluate the gain/loss coefficients, reservoir moments and eigenvalues."""
    b, k, eps = params.beta, params.kappa, params.epsilon
    B = _bigB(b)
    N, M = reservoir_moments(params.squeeze_r)
    gain = params.linear_gain / (4.0 * B)
    calA = k * N / 2.0 + gain * (1.0 - 1.5 * b + b**2)
    calB = k * (N + 1.0) / 2.0 + gain * (1.0 + 1.5 * b + b**2)
    calC = -k * M / 2.0 + gain * (-1.0 + b / 2.0 + b**2 / 2.0 + b**3 / 2.0)
    calD = -k * M / 2.0 + gain * (-1.0 - b / 2.0 + b**2 / 2.0 - b**3 / 2.0)
    decay = calB - calA
    coupling = calC - calD + eps
    return DerivedCoefficients(
        calA=calA, calB=calB, calC=calC, calD=calD, bigB=B, N=N, M=M,
        lambda_minus=decay - coupling,
        lambda_plus=decay + coupling,
        epsilon_threshold=threshold_epsilon(params),
    )


def reduced_eigenvalues(params: SystemParams):
    """``(lambda_minus, lambda_plus)`` from their simplified closed forms."""
    b, A = params.beta, params.linear_gain
    B = _bigB(b)
    lam_m = params.kappa / 2.0 - params.epsilon + A * (2 * b - b**3) / (4.0 * B)
    lam_p = params.kappa / 2.0 + params.epsilon + A * (4 * b + b**3) / (4.0 * B)
    return lam_m, lam_p


class Stability(enum.Enum):
    BELOW = "below"
    AT = "at"
    ABOVE = "above"


def stability_classify(params: SystemParams, tol: Optional[float] = None) -> Stability:
    """Classify the operating point relative to threshold.

    ``tol`` defaults to ``1e-12 * kappa``.
    """
    if tol is None:
        tol = 1e-12 * params.kappa
    lam_m = derive_coefficients(params).lambda_minus
    if lam_m > tol:
        return Stability.BELOW
    if lam_m < -tol:
        return Stability.ABOVE
    return Stability.AT


def require_below(params: SystemParams, what: str, allow_at: bool = False) -> Stability:
    """Raise :class:`StabilityError` unless ``params`` is a valid operating point."""
    state = stability_classify(params)
    if state is Stability.BELOW or (allow_at and state is Stability.AT):
        return state
    lam_m = derive_coefficients(params).lambda_minus
    raise StabilityError(
        f"{what} requires operation below threshold"
        f"{' or at threshold' if allow_at else ''}; lambda_minus={lam_m:.6g} "
        f"(epsilon={params.epsilon:.6g}, threshold={threshold_epsilon(params):.6g})")

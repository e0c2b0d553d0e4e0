"""Numeric transforms from stationary correlations to spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .analytics import (SpectrumSeries, autocorrelation_cavity, mean_photon_cavity,
                        power_spectrum_cavity, power_spectrum_output)
from .core import SystemParams, derive_coefficients, require_below
from .errors import DomainError


@dataclass(frozen=True)
class CorrelationSeries:
    """Correlation samples on a uniform lag grid starting at zero."""

    tau: np.ndarray
    values: np.ndarray
    se: Optional[np.ndarray] = None

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        if tau.ndim != 1 or tau.size < 5 or tau[0] != 0:
            raise DomainError("tau grid must be 1-D, start at 0 and hold >= 5 points")
        steps = np.diff(tau)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-12 * max(1.0, tau[-1]):
            raise DomainError("tau grid must be strictly increasing and uniform")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @property
    def step(self) -> float:
        return float(self.tau[1] - self.tau[0])


def analytic_correlation(params: SystemParams, n_points: int = 4096,
                         span: float = None) -> CorrelationSeries:
    """Closed-form cavity correlation sampled on ``n_points`` lags.

    The default span is ``20 / lambda_minus``.
    """
    if span is None:
        span = 20.0 / derive_coefficients(params).lambda_minus
    tau = np.linspace(0.0, span, n_points)
    return CorrelationSeries(tau, autocorrelation_cavity(params, tau))


def default_omega_grid(params: SystemParams, n_points: int = 1024) -> np.ndarray:
    """``n_points`` frequencies spanning ``+-10 lambda_plus``."""
    span = 10.0 * derive_coefficients(params).lambda_plus
    return np.linspace(-span, span, n_points)


# one-sided fourth-order first derivatives at the two ends
_FD = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def _transform_weights(tau, omega):
    """Matrix ``W`` with ``W @ f`` the end-corrected trapezoid integral of
    ``f(tau) exp(i omega tau)`` over the sampled window.

    The Euler-Maclaurin ``h^2 / 12`` end terms use finite-difference slopes,
    so the rule stays linear in ``f`` and is accurate to ``O(h^4)``.
    """
    h = tau[1] - tau[0]
    n = tau.size
    phase = np.exp(1j * np.outer(omega, tau))
    W = h * phase
    W[:, 0] *= 0.5
    W[:, -1] *= 0.5
    # -h^2/12 * (g'(b) - g'(a)),  g = f e^{i w tau},  g' = f' e^{..} + i w g
    c = h * h / 12.0
    iw = 1j * omega[:, None]
    W[:, :5] += c * (_FD / h)[None, :] * phase[:, :1]
    W[:, :1] += c * iw * phase[:, :1]
    W[:, -5:] += c * (_FD[::-1] / h)[None, :] * phase[:, -1:]
    W[:, -1:] -= c * iw * phase[:, -1:]
    return W


def _tail_rate(tau, f):
    mag = np.abs(f)
    end = mag[-1]
    if not end > 0:
        raise DomainError("cannot fit a tail to a vanishing correlation")
    above = np.nonzero(mag >= 10 * end)[0]
    if above.size == 0:
        raise DomainError("correlation does not decay over the window; no tail can be fitted")
    start = above[-1]
    if tau.size - start < 3:
        start = max(0, tau.size - 3)
    slope = np.polyfit(tau[start:], np.log(mag[start:]), 1)[0]
    if not slope < 0:
        raise DomainError("correlation does not decay over the window; no tail can be fitted")
    return -slope


def spectrum_from_correlation(corr: CorrelationSeries, omega, tail: str = "fit",
                              decay_tol: float = 1e-10, label: str = "S_numeric") -> SpectrumSeries:
    """``2 Re int_0^inf C(tau) exp(i omega tau) dtau`` by quadrature.

    Parameters
    ----------
    tail : {"fit", "none", "truncate"}
        What to do beyond the last lag.  ``"fit"`` appends an exponential
        fitted over the last decade of decay when the correlation has not
        fallen below ``decay_tol`` of its zero-lag value; ``"none"`` raises in
        that case; ``"truncate"`` ignores the remainder (for noisy Monte
        Carlo input whose window is long compared to the decay time).
    """
    omega = np.asarray(omega, dtype=float)
    w = np.atleast_1d(omega)
    f = corr.values
    if f.ndim != 1:
        raise DomainError("correlation values must be one-dimensional")
    integral = _transform_weights(corr.tau, w) @ f
    decayed = abs(f[-1]) <= decay_tol * abs(f[0])
    if not decayed:
        if tail == "fit":
            lam = _tail_rate(corr.tau, f)
            b = corr.tau[-1]
            integral = integral + f[-1] * np.exp(1j * w * b) / (lam - 1j * w)
        elif tail == "none":
            raise DomainError(
                f"correlation decayed only to {abs(f[-1]) / abs(f[0]):.3g} of its initial "
                f"value (need {decay_tol:g}); enable tail fitting")
        elif tail != "truncate":
            raise DomainError(f"unknown tail mode {tail!r}")
    values = 2 * integral.real
    return SpectrumSeries(omega, values.reshape(omega.shape), label)


def spectrum_from_samples(tau, samples, omega):
    """Transform each column of ``samples`` (lags x trajectories) without a
    tail and return the per-omega mean and standard error."""
    corr = CorrelationSeries(tau, samples[:, 0])  # validates the grid
    W = _transform_weights(corr.tau, np.atleast_1d(np.asarray(omega, float)))
    spectra = 2 * (W @ samples).real
    n = samples.shape[1]
    return spectra.mean(axis=1), spectra.std(axis=1, ddof=1) / math.sqrt(n)


@dataclass(frozen=True)
class ParsevalResult:
    integral: float
    n_bar: float
    gap: float


def parseval_check(params: SystemParams) -> ParsevalResult:
    """Compare ``int S(omega) domega / 2 pi`` with the steady photon number.

    The cavity power spectrum is integrated adaptively on
    ``|omega| <= 1e3 lambda_plus``; beyond that the ``1/omega^2`` tail is
    added analytically.  ``gap`` is relative unless the photon number is 0.
    """
    require_below(params, "parseval_check")
    c = derive_coefficients(params)
    W = 1e3 * c.lambda_plus

    def S(w):
        return float(power_spectrum_cavity(params, w).values)

    pts = sorted({c.lambda_minus, c.lambda_plus, 10 * c.lambda_minus, 10 * c.lambda_plus})
    pts = [p for p in pts if 0 < p < W]
    body, _ = integrate.quad(S, 0.0, W, points=pts, limit=500, epsabs=0.0, epsrel=1e-12)
    tail = W * S(W)
    integral = 2 * (body + tail) / (2 * math.pi)
    n_bar = mean_photon_cavity(params)
    gap = abs(integral - n_bar) / abs(n_bar) if n_bar != 0 else abs(integral - n_bar)
    return ParsevalResult(integral, n_bar, gap)


def output_excess_integral(params: SystemParams) -> float:
    """``int (S_out(omega) - sinh(r)**2) domega / 2 pi`` by adaptive quadrature.

    The flat reservoir floor is removed because it alone makes the integral
    diverge.  The result is recorded for comparison with ``kappa * n``; the
    two differ by the input-output cross terms.
    """
    require_below(params, "output_excess_integral")
    c = derive_coefficients(params)
    floor = math.sinh(params.squeeze_r) ** 2
    W = 1e3 * c.lambda_plus

    def S(w):
        return float(power_spectrum_output(params, w).values) - floor

    pts = [p for p in sorted({c.lambda_minus, c.lambda_plus}) if 0 < p < W]
    body, _ = integrate.quad(S, 0.0, W, points=pts, limit=500, epsabs=0.0, epsrel=1e-12)
    return 2 * (body + W * S(W)) / (2 * math.pi)

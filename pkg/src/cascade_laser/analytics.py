"""Closed-form steady-state, threshold and spectral results.

Every function here evaluates an explicit formula in the physical
parameters.  A few companion functions evaluate the same quantity through
the composite coefficients instead; the tests keep the two routes in
agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .core import (
    Stability,
    SystemParams,
    derive_coefficients,
    require_below,
    stability_classify,
)
from .errors import DomainError, FormulaValidityError, StabilityError


@dataclass(frozen=True)
class QuadraturePair:
    """Variances of the plus (amplitude) and minus (phase) quadratures.

    At threshold the plus quadrature diverges; ``plus`` is then ``inf`` and
    ``plus_divergent`` is set.
    """

    plus: float
    minus: float
    plus_divergent: bool = False

    @property
    def product(self) -> float:
        return self.plus * self.minus


@dataclass(frozen=True)
class SpectrumSeries:
    """Samples of a spectrum on a frequency grid.

    ``divergent`` marks grid points where the spectrum is infinite; the
    corresponding entries of ``values`` hold ``inf``.
    """

    omega: np.ndarray
    values: np.ndarray
    label: str
    divergent: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.divergent is None:
            object.__setattr__(self, "divergent", np.zeros(np.shape(self.values), bool))


def _guard(value: float, equation: str) -> float:
    if not value > 0:
        raise FormulaValidityError(
            f"{equation} produced a non-positive variance {value!r}")
    return value


def _require_transmission(params: SystemParams):
    if params.kappa > 1:
        raise DomainError(
            f"output-mode quantities need 0 < kappa <= 1, got kappa={params.kappa}")


def _shape(p: SystemParams):
    b = p.beta
    return b, p.kappa, p.linear_gain, p.epsilon, p.squeeze_r, (1 + b * b) * (1 + b * b / 4)


# Quadrature variances ------------------------------------------------------

def _cavity_plus(p):
    b, k, A, e, r, B = _shape(p)
    return ((2 * k * B * math.exp(2 * r) + A * (4 + b * b))
            / (2 * (k - 2 * e) * B + A * (2 * b - b**3)))


def _cavity_minus(p):
    b, k, A, e, r, B = _shape(p)
    return ((2 * k * B * math.exp(-2 * r) + 3 * A * b * b)
            / (2 * (k + 2 * e) * B + A * (4 * b + b**3)))


def cavity_minus_at_threshold(params: SystemParams) -> float:
    """Minus-quadrature variance of the cavity mode at threshold."""
    b, k, A, _, r, B = _shape(params)
    return (2 * k * B * math.exp(-2 * r) + 3 * A * b * b) / (4 * k * B + 6 * A * b)


def cavity_variances(params: SystemParams) -> QuadraturePair:
    """Steady-state quadrature variances of the cavity mode."""
    state = require_below(params, "cavity_variances", allow_at=True)
    if state is Stability.AT:
        minus = _guard(cavity_minus_at_threshold(params), "cavity minus variance at threshold")
        return QuadraturePair(math.inf, minus, plus_divergent=True)
    return QuadraturePair(_guard(_cavity_plus(params), "cavity plus variance"),
                          _guard(_cavity_minus(params), "cavity minus variance"))


def _output_plus(p):
    b, k, A, e, r, B = _shape(p)
    frac = ((2 * B * (2 * e + k * math.expm1(2 * r)) + A * (4 - 2 * b + b * b + b**3))
            / (2 * (k - 2 * e) * B + A * (2 * b - b**3)))
    return 1 + k * frac + (1 - k) * math.expm1(2 * r)


def _output_minus(p):
    b, k, A, e, r, B = _shape(p)
    frac = ((2 * B * (2 * e - k * math.expm1(-2 * r)) + A * (4 * b - 3 * b * b + b**3))
            / (2 * (k + 2 * e) * B + A * (4 * b + b**3)))
    return 1 - k * frac + (1 - k) * math.expm1(-2 * r)


def output_minus_at_threshold(params: SystemParams) -> float:
    """Output minus-quadrature variance at threshold.

    Obtained by substituting the threshold amplifier strength into the
    below-threshold expression; the ``kappa`` multiplying ``2 - exp(-2r)``
    is kept.
    """
    b, k, A, _, r, B = _shape(params)
    frac = ((2 * B * k * (2 - math.exp(-2 * r)) + A * (6 * b - 3 * b * b))
            / (4 * k * B + 6 * A * b))
    return 1 - k * frac + (1 - k) * math.expm1(-2 * r)


def printed_output_minus_at_threshold(params: SystemParams) -> float:
    """The threshold output variance as typeset, without the inner ``kappa``.

    Only used to document the misprint; it goes negative for small beta.
    """
    b, k, A, _, r, B = _shape(params)
    frac = ((2 * B * (2 - math.exp(-2 * r)) + A * (6 * b - 3 * b * b))
            / (4 * k * B + 6 * A * b))
    return 1 - k * frac + (1 - k) * math.expm1(-2 * r)


def output_variances(params: SystemParams) -> QuadraturePair:
    """Steady-state quadrature variances of the output mode."""
    _require_transmission(params)
    state = require_below(params, "output_variances", allow_at=True)
    if state is Stability.AT:
        minus = _guard(output_minus_at_threshold(params), "output minus variance at threshold")
        return QuadraturePair(math.inf, minus, plus_divergent=True)
    return QuadraturePair(_guard(_output_plus(params), "output plus variance"),
                          _guard(_output_minus(params), "output minus variance"))


def steady_quadrature_moments(params: SystemParams):
    """``(<alpha_+^2>, <alpha_-^2>)`` at steady state from the coefficients.

    ``alpha_+ = alpha* + alpha`` and ``alpha_- = alpha* - alpha``.
    """
    require_below(params, "steady quadrature moments")
    c = derive_coefficients(params)
    e = params.epsilon
    plus = (e - 2 * c.calD + 2 * c.calA) / c.lambda_minus
    minus = (e - 2 * c.calD - 2 * c.calA) / c.lambda_plus
    return plus, minus


def output_variances_via_moments(params: SystemParams) -> QuadraturePair:
    """Output variances assembled from the steady cavity moments.

    Uses ``1 +- [kappa <alpha_+-^2> + 2 (1 - kappa)(M +- N)]``.
    """
    _require_transmission(params)
    plus_m, minus_m = steady_quadrature_moments(params)
    c = derive_coefficients(params)
    k = params.kappa
    plus = 1 + k * plus_m + 2 * (1 - k) * (c.M + c.N)
    minus = 1 - (k * minus_m + 2 * (1 - k) * (c.M - c.N))
    return QuadraturePair(_guard(plus, "output plus variance (moment route)"),
                          _guard(minus, "output minus variance (moment route)"))


# Squeezing spectrum --------------------------------------------------------

def squeezing_spectrum_output(params: SystemParams, omega):
    """Squeezing spectra ``(S_plus, S_minus)`` of the output mode.

    At threshold ``S_plus`` diverges at ``omega = 0``; that point is flagged.
    """
    state = require_below(params, "squeezing_spectrum_output", allow_at=True)
    w = np.asarray(omega, dtype=float)
    w2 = w * w
    b, k, A, e, r, B = _shape(params)
    fourB = 4 * B
    ep, em = math.exp(2 * r), math.exp(-2 * r)
    divergent = np.zeros(w.shape, bool)
    if state is Stability.AT:
        num_p = k * k + k * A * (4 + b * b) * em / (2 * B)
        with np.errstate(divide="ignore"):
            s_plus = ep * (1 + num_p / w2)
        divergent = w2 == 0
        s_plus = np.where(divergent, np.inf, s_plus)
        num_m = k * k + 3 * k * A * b / B - 3 * k * A * b * b * ep / (2 * B)
        s_minus = em * (1 - num_m / ((k + 3 * A * b / (2 * B)) ** 2 + w2))
    else:
        num_p = 2 * k * (e + A * (-2 * b + b**3) / fourB) + k * A * (4 + b * b) * em / (2 * B)
        lam_m = k / 2 - e + A * (2 * b - b**3) / fourB
        s_plus = ep * (1 + num_p / (lam_m**2 + w2))
        num_m = 2 * k * (e + A * (4 * b + b**3) / fourB) - 3 * k * A * b * b * ep / (2 * B)
        lam_p = k / 2 + e + A * (4 * b + b**3) / fourB
        s_minus = em * (1 - num_m / (lam_p**2 + w2))
    return (SpectrumSeries(w, s_plus, "S_plus_out", divergent),
            SpectrumSeries(w, s_minus, "S_minus_out"))


def squeezing_spectrum_via_coefficients(params: SystemParams, omega):
    """``(S_plus, S_minus)`` evaluated from the coefficients, below threshold."""
    require_below(params, "squeezing_spectrum_via_coefficients")
    c = derive_coefficients(params)
    w2 = np.asarray(omega, dtype=float) ** 2
    k, e = params.kappa, params.epsilon
    mp, mm = c.M + c.N, c.M - c.N
    s_plus = (1 + (2 * k * (e - 2 * c.calD + 2 * c.calA) - 4 * k * mp * c.lambda_minus)
              / (c.lambda_minus**2 + w2) + 2 * mp)
    s_minus = (1 - (2 * k * (e - 2 * c.calD - 2 * c.calA) - 4 * k * mm * c.lambda_plus)
               / (c.lambda_plus**2 + w2) - 2 * mm)
    return s_plus, s_minus


# Photon number -------------------------------------------------------------

def _relax(lam, t):
    # (1 - exp(-2 lam t)) / lam, continuous through lam = 0
    if t is None:
        return 1.0 / lam
    t = np.asarray(t, dtype=float)
    if lam == 0:
        return 2.0 * t
    return -np.expm1(-2.0 * lam * t) / lam


def mean_photon_cavity(params: SystemParams, t=None):
    """Mean photon number of the cavity mode started from vacuum.

    ``t=None`` gives the steady-state value, which needs operation below
    threshold.  Finite times are allowed anywhere, including above
    threshold where the result grows without bound.
    """
    if t is None:
        require_below(params, "steady-state mean photon number")
    elif np.any(np.asarray(t) < 0):
        raise DomainError("time must be >= 0")
    b, k, A, e, r, B = _shape(params)
    lam_m = k / 2 - e + A * (2 * b - b**3) / (4 * B)
    lam_p = k / 2 + e + A * (4 * b + b**3) / (4 * B)
    num_m = (2 * e + k * math.expm1(2 * r)) * B + A * (2 - b + b * b / 2 + b**3 / 2)
    num_p = (2 * e - k * math.expm1(-2 * r)) * B + A * (2 * b - 1.5 * b * b + b**3 / 2)
    n = (num_m * _relax(lam_m, t) - num_p * _relax(lam_p, t)) / (8 * B)
    return float(n) if np.ndim(n) == 0 else n


def printed_mean_photon_cavity(params: SystemParams) -> float:
    """Steady photon number with the misprinted ``kappa (exp(-2r) - 1)`` sign.

    Kept only for the verification report.
    """
    b, k, A, e, r, B = _shape(params)
    t1 = ((2 * e + k * math.expm1(2 * r)) * B + A * (2 - b + b * b / 2 + b**3 / 2)) / (
        4 * B * (k - 2 * e) + 2 * A * (2 * b - b**3))
    t2 = ((2 * e + k * math.expm1(-2 * r)) * B + A * (2 * b - 1.5 * b * b + b**3 / 2)) / (
        4 * B * (k + 2 * e) + 2 * A * (4 * b + b**3))
    return t1 - t2


def mean_photon_output(params: SystemParams, t=None):
    """Mean photon number of the output mode, ``kappa n + (1 - kappa) N``."""
    _require_transmission(params)
    n = mean_photon_cavity(params, t)
    N = math.sinh(params.squeeze_r) ** 2
    return params.kappa * n + (1 - params.kappa) * N


# Correlations and power spectra -------------------------------------------

def correlation_weights(params: SystemParams):
    """Weights ``(w_minus, w_plus)`` of the two decaying exponentials in the
    stationary ``<alpha*(t) alpha(t + tau)>``."""
    require_below(params, "stationary correlation")
    c = derive_coefficients(params)
    e = params.epsilon
    w_minus = (2 * c.calA - 2 * c.calD + e) / (4 * c.lambda_minus)
    w_plus = (2 * c.calA + 2 * c.calD - e) / (4 * c.lambda_plus)
    return w_minus, w_plus


def autocorrelation_cavity(params: SystemParams, tau):
    """Stationary first-order correlation ``<alpha*(t) alpha(t + tau)>``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be >= 0")
    w_minus, w_plus = correlation_weights(params)
    c = derive_coefficients(params)
    return w_minus * np.exp(-c.lambda_minus * tau) + w_plus * np.exp(-c.lambda_plus * tau)


def power_spectrum_cavity(params: SystemParams, omega) -> SpectrumSeries:
    """Cavity power spectrum: two Lorentzians centred at zero frequency."""
    require_below(params, "power_spectrum_cavity")
    w2 = np.asarray(omega, dtype=float) ** 2
    b, k, A, e, r, B = _shape(params)
    eightB = (1 + b * b) * (8 + 2 * b * b)
    fourB = 4 * B
    num_m = k / 4 * math.expm1(2 * r) + e / 2 + A * (4 - 2 * b + b * b + b**3) / eightB
    num_p = k / 4 * math.expm1(-2 * r) - e / 2 + A * (-4 * b + 3 * b * b - b**3) / eightB
    lam_m = k / 2 - e + A * (2 * b - b**3) / fourB
    lam_p = k / 2 + e + A * (4 * b + b**3) / fourB
    values = num_m / (lam_m**2 + w2) + num_p / (lam_p**2 + w2)
    return SpectrumSeries(np.asarray(omega, dtype=float), values, "S_cavity")


def power_spectrum_output(params: SystemParams, omega) -> SpectrumSeries:
    """Output power spectrum: two Lorentzians on a flat ``sinh(r)**2`` floor."""
    _require_transmission(params)
    require_below(params, "power_spectrum_output")
    w2 = np.asarray(omega, dtype=float) ** 2
    b, k, A, e, r, B = _shape(params)
    eightB = (1 + b * b) * (8 + 2 * b * b)
    fourB = 4 * B
    ep, em = math.exp(2 * r), math.exp(-2 * r)
    num_m = k * ((e / 2 - A * (2 * b - b**3) / eightB) * ep + A * (4 + b * b) / eightB)
    num_p = k * (-(e / 2 + A * (4 * b + b**3) / eightB) * em + 3 * A * b * b / eightB)
    lam_m = k / 2 - e + A * (2 * b - b**3) / fourB
    lam_p = k / 2 + e + A * (4 * b + b**3) / fourB
    values = num_m / (lam_m**2 + w2) + num_p / (lam_p**2 + w2) + math.sinh(r) ** 2
    return SpectrumSeries(np.asarray(omega, dtype=float), values, "S_output")


def power_spectrum_output_via_coefficients(params: SystemParams, omega):
    """Output power spectrum from the coefficients.

    The cross term between input noise and the later cavity field carries
    ``(N - M)`` on the fast exponential, and both Lorentzians carry ``kappa``.
    """
    _require_transmission(params)
    require_below(params, "power_spectrum_output_via_coefficients")
    c = derive_coefficients(params)
    w2 = np.asarray(omega, dtype=float) ** 2
    k, e = params.kappa, params.epsilon
    first = k * (c.calA - c.calD + e / 2 - c.lambda_minus * (c.M + c.N))
    second = k * (c.calA + c.calD - e / 2 - c.lambda_plus * (c.N - c.M))
    return first / (c.lambda_minus**2 + w2) + second / (c.lambda_plus**2 + w2) + c.N


# Scans ---------------------------------------------------------------------

def _squeezing_minus_zero(p):
    return float(squeezing_spectrum_output(p, 0.0)[1].values)


QUANTITIES: dict = {
    "cavity_minus": lambda p: cavity_variances(p).minus,
    "cavity_plus": lambda p: cavity_variances(p).plus,
    "output_minus": lambda p: output_variances(p).minus,
    "output_plus": lambda p: output_variances(p).plus,
    "squeezing_minus": _squeezing_minus_zero,
    "mean_photon": lambda p: mean_photon_cavity(p),
    "mean_photon_output": lambda p: mean_photon_output(p),
}


def _resolve_quantity(quantity) -> Callable[[SystemParams], float]:
    if callable(quantity):
        return quantity
    try:
        return QUANTITIES[quantity]
    except KeyError:
        raise DomainError(f"unknown quantity {quantity!r}; choose from {sorted(QUANTITIES)}")


def _golden(f, lo, hi, xtol):
    inv = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - inv * (hi - lo), lo + inv * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > xtol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def minimize_over_beta(quantity, params: SystemParams, beta_range=(0.0, 1.0),
                       n_grid: int = 2001, at_threshold: bool = False,
                       xtol: float = 1e-7):
    """Global minimum of a scalar quantity over the pump ratio.

    A coarse scan on ``n_grid`` points locates the best grid cell, then a
    golden-section search refines it.  Ties resolve to the smallest beta.

    Parameters
    ----------
    quantity : str or callable
        A key of :data:`QUANTITIES` or ``f(params) -> float``.
    params : SystemParams
        Fixed parameters; ``beta`` is overwritten during the scan.
    beta_range : tuple of float
        Closed scan interval ``(lo, hi)`` with ``0 <= lo < hi``.
    at_threshold : bool
        Recompute ``epsilon`` as the threshold value at every beta.

    Returns
    -------
    beta_star, value : float
    """
    lo, hi = map(float, beta_range)
    if not (0 <= lo < hi) or n_grid < 2:
        raise DomainError(f"empty or invalid beta range {beta_range!r}")
    f = _resolve_quantity(quantity)

    def at(beta):
        p = params.replace(beta=float(beta))
        if at_threshold:
            p = p.at_threshold()
        try:
            return float(f(p))
        except StabilityError as exc:
            raise StabilityError(f"quantity undefined at beta={beta:.6g}: {exc}") from exc

    grid = np.linspace(lo, hi, n_grid)
    values = np.array([at(b) for b in grid])
    i = int(np.argmin(values))
    best_b, best_v = grid[i], values[i]
    a, c = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    b_ref, v_ref = _golden(at, a, c, xtol)
    if v_ref < best_v:
        best_b, best_v = b_ref, v_ref
    return float(best_b), float(best_v)


def hwhm_of_spectrum(spectrum: Union[str, Callable, SpectrumSeries],
                     params: Optional[SystemParams] = None,
                     background: Optional[float] = None, rtol: float = 1e-6) -> float:
    """Half width at half maximum of a zero-centred spectral peak.

    ``spectrum`` is ``"cavity"``, ``"output"`` (needs ``params``), a callable
    of ``omega`` or a :class:`SpectrumSeries` (linearly interpolated on its
    non-negative frequencies).  ``background`` is subtracted first; for
    ``"output"`` it defaults to the flat ``sinh(r)**2`` floor.
    """
    if isinstance(spectrum, SpectrumSeries):
        mask = spectrum.omega >= 0
        xs = spectrum.omega[mask]
        ys = spectrum.values[mask]
        order = np.argsort(xs)
        xs, ys = xs[order], ys[order]
        w_max = xs[-1]

        def f(w):
            if w > w_max:
                return ys[-1]
            return float(np.interp(w, xs, ys))
    elif spectrum in ("cavity", "output"):
        if params is None:
            raise DomainError("params required for a named spectrum")
        fn = power_spectrum_cavity if spectrum == "cavity" else power_spectrum_output
        if spectrum == "output" and background is None:
            background = math.sinh(params.squeeze_r) ** 2

        def f(w):
            return float(fn(params, w).values)
        w_max = math.inf
    elif callable(spectrum):
        f = spectrum
        w_max = math.inf
    else:
        raise DomainError(f"unsupported spectrum {spectrum!r}")
    bg = 0.0 if background is None else background

    peak = f(0.0) - bg
    if not (math.isfinite(peak) and peak > 0):
        raise FormulaValidityError(f"spectrum has no finite positive peak at omega=0 ({peak!r})")
    half = peak / 2
    lo, hi = 0.0, 1e-6 * max(1.0, abs(peak))
    while f(hi) - bg > half:
        lo, hi = hi, 2 * hi
        if hi > min(w_max, 1e15):
            raise FormulaValidityError("spectrum does not decay below half maximum")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) - bg > half:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

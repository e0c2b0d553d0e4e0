"""Monte Carlo of the normally ordered Langevin equation in doubled phase space.

The noise force has ``<f f> = (epsilon - 2 calD)`` and ``<f f*> = 2 calA``
(both times a delta function).  With a squeezed reservoir the implied
covariance of the real and imaginary parts of ``f`` is indefinite, so no
single complex field with real Gaussian noise reproduces it.  Instead
``alpha`` and its would-be conjugate ``alpha_c`` evolve as independent
complex variables driven by ``L xi`` where ``L L^T`` equals the symmetric
diffusion matrix ``[[d, e], [e, d]]``.  Averages of analytic functions of
``(alpha, alpha_c)`` reproduce the normally ordered moments.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (DerivedCoefficients, SystemParams, derive_coefficients, require_below,
                   reservoir_moments)
from .errors import DomainError


@dataclass(frozen=True)
class DiffusionSpec:
    """Noise weights of the amplitude equation and their reservoir split."""

    d_ff: float
    d_ffstar: float
    reservoir_ffstar: float
    reservoir_ff: float

    @property
    def gain_ffstar(self) -> float:
        return self.d_ffstar - self.reservoir_ffstar

    @property
    def gain_ff(self) -> float:
        return self.d_ff - self.reservoir_ff

    def matrix(self) -> np.ndarray:
        """Symmetric diffusion matrix in the ``(alpha, alpha_c)`` basis."""
        return np.array([[self.d_ff, self.d_ffstar], [self.d_ffstar, self.d_ff]], complex)


def diffusion_spec(params: SystemParams) -> DiffusionSpec:
    c = derive_coefficients(params)
    return DiffusionSpec(
        d_ff=params.epsilon - 2 * c.calD,
        d_ffstar=2 * c.calA,
        reservoir_ffstar=params.kappa * c.N,
        reservoir_ff=params.kappa * c.M,
    )


def takagi_factor(C) -> np.ndarray:
    """Factor a complex symmetric matrix as ``C = L @ L.T``.

    Uses the real symmetric embedding ``[[X, Y], [Y, -X]]`` of
    ``C = X + iY``: its eigenvectors ``(p, q)`` with non-negative eigenvalue
    ``s`` give Takagi vectors ``u = p + iq`` with ``C conj(u) = s u``.
    """
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DomainError("C must be a square matrix")
    if not np.allclose(C, C.T, rtol=0, atol=1e-14 * max(1.0, np.abs(C).max())):
        raise DomainError("C must be symmetric")
    n = C.shape[0]
    X, Y = C.real, C.imag
    emb = np.block([[X, Y], [Y, -X]])
    vals, vecs = np.linalg.eigh(emb)
    top = slice(n, 2 * n)  # eigh sorts ascending; the n largest are >= 0
    s = np.clip(vals[top], 0.0, None)
    U = vecs[:n, top] + 1j * vecs[n:, top]
    return U * np.sqrt(s)


def build_diffusion_factor(coeffs: DerivedCoefficients, params: SystemParams) -> np.ndarray:
    """Complex 2x2 factor ``L`` with ``L L^T`` equal to the diffusion matrix."""
    C = np.array([[params.epsilon - 2 * coeffs.calD, 2 * coeffs.calA],
                  [2 * coeffs.calA, params.epsilon - 2 * coeffs.calD]], complex)
    return takagi_factor(C)


@dataclass(frozen=True)
class Representability:
    field_x_variance: float
    field_y_variance: float
    reservoir_x_variance: float
    reservoir_y_variance: float

    @property
    def representable(self) -> bool:
        return min(self.field_x_variance, self.field_y_variance,
                   self.reservoir_x_variance, self.reservoir_y_variance) >= 0


def classical_representability(params: SystemParams) -> Representability:
    """Component variances of ``f = x + iy`` and of the reservoir force.

    A single-field simulation with real Gaussian noise is possible only if
    all four are non-negative.
    """
    c = derive_coefficients(params)
    e, k = params.epsilon, params.kappa
    return Representability(
        field_x_variance=(2 * c.calA + e - 2 * c.calD) / 2,
        field_y_variance=(2 * c.calA - e + 2 * c.calD) / 2,
        reservoir_x_variance=k * (c.N + c.M) / 2,
        reservoir_y_variance=k * (c.N - c.M) / 2,
    )


@dataclass(frozen=True)
class EnsembleStats:
    """Ensemble means of ``alpha``, ``alpha^2``, ``alpha_c alpha`` and ``alpha_c^2``.

    Standard errors of complex estimates are stored as complex numbers whose
    real and imaginary parts are the standard errors of the real and
    imaginary parts.
    """

    times: np.ndarray
    mean_alpha: np.ndarray
    mean_alpha_sq: np.ndarray
    mean_cross: np.ndarray
    mean_conj_sq: np.ndarray
    se_alpha: np.ndarray
    se_alpha_sq: np.ndarray
    se_cross: np.ndarray
    se_conj_sq: np.ndarray
    se_quad_plus: np.ndarray
    se_quad_minus: np.ndarray
    n_traj: int
    seed: int
    dt: float

    def quadrature_moments(self):
        """``<(alpha_c + alpha)^2>`` and ``<(alpha_c - alpha)^2>`` at each time.

        Standard errors are in ``se_quad_plus`` and ``se_quad_minus``.
        """
        base = self.mean_alpha_sq + self.mean_conj_sq
        return base + 2 * self.mean_cross, base - 2 * self.mean_cross


def output_variances_from_ensemble(stats: EnsembleStats, params: SystemParams, index: int = -1):
    """Output quadrature variances from cavity ensemble moments.

    The reservoir is not sampled; its contribution enters through the
    analytic input correlations, ``1 +- [kappa <alpha_+-^2> + 2 (1 - kappa)(M +- N)]``.

    Returns
    -------
    plus, minus, se_plus, se_minus : float
    """
    if params.kappa > 1:
        raise DomainError(f"output-mode quantities need 0 < kappa <= 1, got kappa={params.kappa}")
    N, M = reservoir_moments(params.squeeze_r)
    k = params.kappa
    qp, qm = stats.quadrature_moments()
    plus = 1 + k * qp[index].real + 2 * (1 - k) * (M + N)
    minus = 1 - (k * qm[index].real + 2 * (1 - k) * (M - N))
    return plus, minus, k * stats.se_quad_plus[index], k * stats.se_quad_minus[index]


def default_mc_dt(params: SystemParams) -> float:
    return 1e-3 / derive_coefficients(params).lambda_plus


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Independent random stream for one trajectory."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _se(samples):
    n = samples.shape[-1]
    sr = samples.real.std(axis=-1, ddof=1) / math.sqrt(n)
    si = samples.imag.std(axis=-1, ddof=1) / math.sqrt(n)
    return sr + 1j * si


def _blocks(n_traj, block_size):
    return [(i, min(i + block_size, n_traj)) for i in range(0, n_traj, block_size)]


def _run_blocks(fn, blocks, n_workers):
    if n_workers <= 1:
        for blk in blocks:
            fn(blk)
    else:
        with ThreadPoolExecutor(n_workers) as pool:
            list(pool.map(fn, blocks))


class _Stepper:
    """Euler-Maruyama stepping for a block of trajectories."""

    def __init__(self, params, dt, seed, lo, hi, chunk):
        c = derive_coefficients(params)
        self.g = c.calB - c.calA
        self.c = c.drift_coupling(params.epsilon)
        self.noise_t = build_diffusion_factor(c, params).T * math.sqrt(dt)
        self.dt = dt
        self.gens = [trajectory_rng(seed, i) for i in range(lo, hi)]
        self.chunk = chunk
        self._buf = None
        self._pos = chunk

    def _noise(self):
        if self._pos == self.chunk:
            xi = np.stack([g.standard_normal((self.chunk, 2)) for g in self.gens], axis=1)
            self._buf = xi @ self.noise_t
            self._pos = 0
        out = self._buf[self._pos]
        self._pos += 1
        return out

    def step(self, a, ac):
        noise = self._noise()
        h = self.dt
        a_new = a + (-self.g * a + self.c * ac) * h + noise[:, 0]
        ac_new = ac + (-self.g * ac + self.c * a) * h + noise[:, 1]
        return a_new, ac_new


def simulate_ensemble(params: SystemParams, n_traj: int, t_end: float, dt: float = None,
                      seed: int = 0, alpha0: complex = 0j, n_records: int = 100,
                      block_size: int = 4096, n_workers: int = 1,
                      chunk: int = 256) -> EnsembleStats:
    """Euler-Maruyama ensemble of doubled-phase-space trajectories.

    Each trajectory draws its noise from its own stream keyed by
    ``(seed, trajectory index)`` and the final reduction runs over an array
    ordered by trajectory index, so the result does not depend on
    ``block_size``, ``n_workers`` or ``chunk``.

    Parameters
    ----------
    alpha0 : complex
        Initial amplitude; ``alpha_c`` starts at its conjugate.
    n_records : int
        Number of evenly spaced recorded time points after ``t = 0`` (capped
        at the number of steps).
    """
    require_below(params, "simulate_ensemble", allow_at=True)
    if n_traj < 2:
        raise DomainError("n_traj must be >= 2")
    if dt is None:
        dt = default_mc_dt(params)
    if not dt > 0 or not t_end > 0:
        raise DomainError("need dt > 0 and t_end > 0")
    steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / steps
    n_records = max(1, min(n_records, steps))
    rec_steps = sorted({round(k * steps / n_records) for k in range(n_records + 1)})
    n_rec = len(rec_steps)
    rec_index = {s: j for j, s in enumerate(rec_steps)}
    a_samples = np.empty((n_rec, n_traj), complex)
    ac_samples = np.empty((n_rec, n_traj), complex)

    def run(block):
        lo, hi = block
        st = _Stepper(params, h, seed, lo, hi, chunk)
        a = np.full(hi - lo, complex(alpha0))
        ac = np.full(hi - lo, complex(alpha0).conjugate())
        a_samples[0, lo:hi] = a
        ac_samples[0, lo:hi] = ac
        for i in range(1, steps + 1):
            a, ac = st.step(a, ac)
            j = rec_index.get(i)
            if j is not None:
                a_samples[j, lo:hi] = a
                ac_samples[j, lo:hi] = ac

    _run_blocks(run, _blocks(n_traj, block_size), n_workers)
    sq = a_samples * a_samples
    cross = ac_samples * a_samples
    csq = ac_samples * ac_samples
    quad_plus = (ac_samples + a_samples) ** 2
    quad_minus = (ac_samples - a_samples) ** 2
    return EnsembleStats(
        times=np.array(rec_steps, float) * h,
        mean_alpha=a_samples.mean(axis=-1), mean_alpha_sq=sq.mean(axis=-1),
        mean_cross=cross.mean(axis=-1), mean_conj_sq=csq.mean(axis=-1),
        se_alpha=_se(a_samples), se_alpha_sq=_se(sq), se_cross=_se(cross),
        se_conj_sq=_se(csq), se_quad_plus=_se(quad_plus).real,
        se_quad_minus=_se(quad_minus).real, n_traj=n_traj, seed=seed, dt=h,
    )


def em_expected_moments(params: SystemParams, t_end: float, dt: float):
    """Exact ensemble second moments of the Euler-Maruyama scheme from vacuum.

    Propagates ``S = E[y y^T]`` for ``y = (alpha, alpha_c)`` through
    ``S <- P S P^T + C dt`` with ``P = I + J dt``.  No sampling is involved,
    so the discretisation bias of the sampler can be measured exactly.

    Returns
    -------
    (<alpha^2>, <alpha_c alpha>) at ``t_end``.
    """
    c = derive_coefficients(params)
    g, cp = c.calB - c.calA, c.drift_coupling(params.epsilon)
    steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / steps
    P = np.eye(2) + h * np.array([[-g, cp], [cp, -g]])
    C = diffusion_spec(params).matrix().real * h
    S = np.zeros((2, 2))
    for _ in range(steps):
        S = P @ S @ P.T + C
    return S[0, 0], S[0, 1]


@dataclass(frozen=True)
class CorrelationEstimate:
    """Monte Carlo estimate of ``<alpha_c(t) alpha(t + tau)>`` at stationarity.

    ``per_trajectory`` has shape ``(n_tau, n_traj)`` (lags by trajectories)
    and holds each trajectory's time-averaged estimate, so linear
    post-processing such as a Fourier transform can be applied before
    averaging to obtain consistent standard errors.
    """

    tau: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    per_trajectory: np.ndarray
    n_traj: int


def two_time_correlation_mc(params: SystemParams, n_traj: int, tau_max: float,
                            n_tau: int = 200, t_burn: float = None, n_ref: int = 20,
                            ref_spacing: float = None, dt: float = None, seed: int = 0,
                            block_size: int = 4096, n_workers: int = 1,
                            chunk: int = 256) -> CorrelationEstimate:
    """Stationary two-time correlation by time and ensemble averaging.

    After a burn-in of ``t_burn`` (at least ``10 / lambda_minus``), ``n_ref``
    reference times spaced by ``ref_spacing`` are taken from every
    trajectory and ``alpha_c(t_k) alpha(t_k + tau_j)`` is averaged over
    ``k``.  ``tau`` runs over ``n_tau`` points from 0 to ``tau_max``; the
    step ``dt`` is shrunk so that the tau spacing is a whole number of steps.
    """
    require_below(params, "two_time_correlation_mc")
    c = derive_coefficients(params)
    min_burn = 10.0 / c.lambda_minus
    if t_burn is None:
        t_burn = min_burn
    if t_burn < min_burn * (1 - 1e-12):
        raise DomainError(f"burn-in {t_burn:.6g} shorter than 10/lambda_minus = {min_burn:.6g}")
    if n_traj < 2 or n_tau < 2 or n_ref < 1:
        raise DomainError("need n_traj >= 2, n_tau >= 2 and n_ref >= 1")
    if dt is None:
        dt = default_mc_dt(params)
    dtau = tau_max / (n_tau - 1)
    sub = max(1, math.ceil(dtau / dt - 1e-9))
    h = dtau / sub
    if ref_spacing is None:
        ref_spacing = 1.0 / c.lambda_minus
    ref_stride = max(1, round(ref_spacing / dtau))
    burn_steps = math.ceil(t_burn / h - 1e-9)
    n_store = (n_ref - 1) * ref_stride + n_tau
    per_traj = np.empty((n_tau, n_traj), complex)

    def run(block):
        lo, hi = block
        st = _Stepper(params, h, seed, lo, hi, chunk)
        a = np.zeros(hi - lo, complex)
        ac = np.zeros(hi - lo, complex)
        for _ in range(burn_steps):
            a, ac = st.step(a, ac)
        hist_a = np.empty((n_store, hi - lo), complex)
        hist_ac = np.empty((n_store, hi - lo), complex)
        hist_a[0], hist_ac[0] = a, ac
        for j in range(1, n_store):
            for _ in range(sub):
                a, ac = st.step(a, ac)
            hist_a[j], hist_ac[j] = a, ac
        acc = np.zeros((n_tau, hi - lo), complex)
        for k in range(n_ref):
            start = k * ref_stride
            acc += hist_ac[start] * hist_a[start:start + n_tau]
        per_traj[:, lo:hi] = acc / n_ref

    _run_blocks(run, _blocks(n_traj, block_size), n_workers)
    return CorrelationEstimate(
        tau=np.arange(n_tau) * dtau, mean=per_traj.mean(axis=-1), se=_se(per_traj),
        per_trajectory=per_traj, n_traj=n_traj)

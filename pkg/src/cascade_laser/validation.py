"""Cross-checks between the closed forms and the three numerical oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytics
from .errors import TruncationError
from .core import SystemParams, derive_coefficients, threshold_epsilon
from .fock import fock_evolve
from .langevin import simulate_ensemble
from .moments import integrate_moments, steady_state_moments


def random_parameter_sets(n: int, seed: int = 2024, max_photons: float = 4.0,
                          min_lambda: float = 0.2, max_ratio: float = 4.0):
    """Reproducible below-threshold parameter sets with modest photon number.

    Sets are drawn from kappa in [0.5, 1], A in [0, 5], beta in [0, 1.2],
    r in [0, 0.6] and epsilon in [0, 0.8 eps_th], then kept only if the
    steady photon number is below ``max_photons``, ``lambda_minus`` is at
    least ``min_lambda`` and ``lambda_plus / lambda_minus <= max_ratio``.
    The last two bounds keep every oracle's runtime short.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        kappa = rng.uniform(0.5, 1.0)
        A = rng.uniform(0.0, 5.0)
        beta = rng.uniform(0.0, 1.2)
        r = rng.uniform(0.0, 0.6)
        base = SystemParams(A, kappa, beta, 0.0, r)
        eps_th = threshold_epsilon(base)
        if eps_th <= 0:
            continue
        p = base.replace(epsilon=rng.uniform(0.0, 0.8 * eps_th))
        c = derive_coefficients(p)
        if c.lambda_minus < min_lambda or c.lambda_plus / c.lambda_minus > max_ratio:
            continue
        if analytics.mean_photon_cavity(p) >= max_photons:
            continue
        out.append(p)
    return out


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


@dataclass
class OracleComparison:
    params: SystemParams
    closed_n: float
    closed_x: float
    ode_n: float
    ode_x: float
    fock_n: float
    fock_x: float
    mc_n: float
    mc_x: float
    mc_n_se: float
    mc_x_se: float

    @property
    def ode_error(self) -> float:
        return max(_rel(self.ode_n, self.closed_n), _rel(self.ode_x, self.closed_x))

    @property
    def fock_error(self) -> float:
        return max(_rel(self.fock_n, self.closed_n), _rel(self.fock_x, self.closed_x))

    @property
    def mc_sigmas(self) -> float:
        """Largest deviation of the MC moments from the closed form, in SEs."""
        dn = abs(self.mc_n - self.closed_n) / self.mc_n_se if self.mc_n_se > 0 else 0.0
        dx = abs(self.mc_x - self.closed_x) / self.mc_x_se if self.mc_x_se > 0 else 0.0
        return max(dn, dx)


def compare_oracles(params: SystemParams, n_traj: int = 10_000, seed: int = 0,
                    mc_dt_factor: float = 0.01, run_fock: bool = True,
                    run_mc: bool = True) -> OracleComparison:
    """Steady ``<alpha* alpha>`` and ``<alpha^2>`` from every route.

    The ODE runs to ``50 / lambda_minus`` with its default step, the Fock
    evolution to ``10 / lambda_minus`` (growing ``n_max`` until the top level
    is empty) and the Monte Carlo to
    ``20 / lambda_minus`` with ``dt = mc_dt_factor / lambda_plus``.
    """
    c = derive_coefficients(params)
    closed = steady_state_moments(params)
    ode = integrate_moments(params, 50.0 / c.lambda_minus, record_every=10**9).final()
    fock_n = fock_x = math.nan
    if run_fock:
        n_max = None
        while True:
            try:
                fk = fock_evolve(params, n_max=n_max, t_end=10.0 / c.lambda_minus,
                                 record_every=10**9)
                break
            except TruncationError as exc:
                n_max = exc.required_n_max
        fock_n, fock_x = float(fk.mean_n[-1]), float(fk.mean_a2[-1].real)
    mc_n = mc_x = mc_n_se = mc_x_se = math.nan
    if run_mc:
        st = simulate_ensemble(params, n_traj, 20.0 / c.lambda_minus,
                               dt=mc_dt_factor / c.lambda_plus, seed=seed, n_records=1,
                               block_size=16384)
        mc_n, mc_n_se = float(st.mean_cross[-1].real), float(st.se_cross[-1].real)
        mc_x, mc_x_se = float(st.mean_alpha_sq[-1].real), float(st.se_alpha_sq[-1].real)
    return OracleComparison(params, closed.mean_n, closed.mean_alpha_sq.real,
                            ode.mean_n, ode.mean_alpha_sq.real, fock_n, fock_x,
                            mc_n, mc_x, mc_n_se, mc_x_se)


# Reference operating points used by the report and the acceptance tests.
FIG_KAPPA = 0.8
FIG_GAIN = 100.0
FIG_R = 1.0


def reported_minima():
    """Minima of the four minus-quadrature variances over beta in [0, 1]."""
    base = SystemParams(FIG_GAIN, FIG_KAPPA, 0.0, 0.0, FIG_R)
    return {
        "cavity_threshold": analytics.minimize_over_beta("cavity_minus", base, at_threshold=True),
        "cavity_no_amplifier": analytics.minimize_over_beta("cavity_minus", base),
        "output_threshold": analytics.minimize_over_beta("output_minus", base, at_threshold=True),
        "output_no_amplifier": analytics.minimize_over_beta("output_minus", base),
    }


def halfwidths(epsilons=(0.2, 0.3)):
    """Cavity power-spectrum HWHM at A=100, beta=0.01, r=1, kappa=0.8."""
    return {e: analytics.hwhm_of_spectrum("cavity", SystemParams(100.0, 0.8, 0.01, e, 1.0))
            for e in epsilons}


# Convergence fixtures ------------------------------------------------------

CONVERGENCE_PARAMS = SystemParams(1.0, 1.0, 0.5, 0.1, 0.3)


def rk4_order(params: SystemParams = CONVERGENCE_PARAMS, t_end: float = 4.0,
              steps=(0.2, 0.1, 0.05)):
    """Observed order of the moment integrator against the exact transient.

    Returns the errors of ``<alpha* alpha>(t_end)`` and the base-2 log ratios
    of consecutive errors.
    """
    exact = float(analytics.mean_photon_cavity(params, t_end))
    errors = [abs(integrate_moments(params, t_end, dt, record_every=10**9).final().mean_n - exact)
              for dt in steps]
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]
    return errors, orders


def em_bias_ratios(params: SystemParams = CONVERGENCE_PARAMS, steps=(0.2, 0.1, 0.05)):
    """Euler-Maruyama bias of the stationary ``<alpha_c alpha>`` at each step.

    The bias is computed from the exact second-moment recursion of the
    scheme at ``t = 20 / lambda_minus``, so it carries no sampling noise.
    Returns the biases and the ratios of consecutive biases.
    """
    from .langevin import em_expected_moments
    c = derive_coefficients(params)
    target = steady_state_moments(params).mean_n
    t_end = 20.0 / c.lambda_minus
    biases = [em_expected_moments(params, t_end, dt)[1] - target for dt in steps]
    return biases, [biases[i] / biases[i + 1] for i in range(len(biases) - 1)]

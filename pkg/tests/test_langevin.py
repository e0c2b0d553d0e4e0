import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascade_laser import (
    SystemParams,
    derive_coefficients,
    output_variances,
    simulate_ensemble,
    steady_state_moments,
    two_time_correlation_mc,
)
from cascade_laser.analytics import autocorrelation_cavity, steady_quadrature_moments
from cascade_laser.errors import DomainError, StabilityError
from cascade_laser.langevin import (
    build_diffusion_factor,
    classical_representability,
    diffusion_spec,
    em_expected_moments,
    output_variances_from_ensemble,
    takagi_factor,
    trajectory_rng,
)
from cascade_laser.validation import em_bias_ratios

from conftest import below_threshold

THERMAL = SystemParams(4.0, 1.0)  # beta = r = epsilon = 0, n = 2
SQUEEZED = SystemParams(1.0, 0.8, 0.5, 0.1, 0.5)


def within(est, se, target, k=4.0):
    return abs(est - target) <= k * se


# diffusion and its factorisation

@given(below_threshold())
def test_diffusion_decomposition(p):
    d = diffusion_spec(p)
    c = derive_coefficients(p)
    assert d.reservoir_ffstar + d.gain_ffstar == d.d_ffstar == 2 * c.calA
    assert d.reservoir_ff + d.gain_ff == pytest.approx(d.d_ff, abs=1e-12 * (1 + abs(d.d_ff)))
    k = p.kappa
    assert d.reservoir_ff**2 == pytest.approx(d.reservoir_ffstar * k * (c.N + 1), rel=1e-12,
                                              abs=1e-300)


def test_factor_rank_one():
    L = build_diffusion_factor(derive_coefficients(THERMAL), THERMAL)
    assert np.allclose(L @ L.T, [[2, 2], [2, 2]], atol=1e-14)


def test_factor_zero():
    p = SystemParams(0.0, 1.0)
    assert np.all(build_diffusion_factor(derive_coefficients(p), p) == 0)


def test_factor_figure_point():
    p = SystemParams(100.0, 0.8, 0.022, 0.5, 1.0)
    C = diffusion_spec(p).matrix()
    L = build_diffusion_factor(derive_coefficients(p), p)
    assert np.abs(L @ L.T - C).max() <= 1e-12 * np.abs(C).max()


def test_factor_indefinite_needs_complex_entries():
    C = np.array([[1.0, 3.0], [3.0, 1.0]])  # eigenvalues 4 and -2
    L = takagi_factor(C)
    assert np.abs(L.imag).max() > 0
    assert np.abs(L @ L.T - C).max() <= 1e-12 * 3


@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6))
def test_takagi_reconstructs(v):
    a = complex(v[0], v[1])
    b = complex(v[2], v[3])
    d = complex(v[4], v[5])
    C = np.array([[a, b], [b, d]])
    L = takagi_factor(C)
    assert np.abs(L @ L.T - C).max() <= 1e-12 * max(1.0, np.abs(C).max())


def test_takagi_rejects_asymmetric():
    with pytest.raises(DomainError):
        takagi_factor(np.array([[1, 2], [0, 1]]))


def test_representability():
    assert classical_representability(SystemParams(3.0, 1.0)).representable
    rep = classical_representability(SystemParams(10.0, 0.8, 0.3, 0.0, 1.0))
    assert rep.reservoir_y_variance == pytest.approx(-0.17293, abs=1e-5)
    assert not rep.representable
    z = classical_representability(SystemParams(0.0, 1.0))
    assert z.representable and z.field_x_variance == 0 == z.reservoir_y_variance


# ensemble simulation

def test_deterministic_decay():
    st_ = simulate_ensemble(SystemParams(0.0, 1.0), 4, 2.0, dt=1e-4, alpha0=1.0, n_records=4)
    assert np.allclose(st_.mean_alpha, np.exp(-st_.times / 2), rtol=1e-4, atol=0)
    assert np.all(st_.se_alpha == 0)


def test_thermal_photon_number():
    st_ = simulate_ensemble(THERMAL, 10_000, 20.0, dt=0.01, seed=3, n_records=1)
    assert within(st_.mean_cross[-1].real, st_.se_cross[-1].real, 2.0)


def test_repeat_runs_identical():
    a = simulate_ensemble(SQUEEZED, 300, 2.0, dt=0.01, seed=11, n_records=5)
    b = simulate_ensemble(SQUEEZED, 300, 2.0, dt=0.01, seed=11, n_records=5)
    for name in ("mean_alpha_sq", "mean_cross", "se_cross", "times"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_scheduling_independence():
    ref = simulate_ensemble(SQUEEZED, 500, 1.0, dt=0.01, seed=5, n_records=3)
    for kw in (dict(block_size=64), dict(block_size=128, n_workers=3), dict(chunk=7)):
        other = simulate_ensemble(SQUEEZED, 500, 1.0, dt=0.01, seed=5, n_records=3, **kw)
        assert np.array_equal(ref.mean_cross, other.mean_cross), kw
        assert np.array_equal(ref.se_alpha_sq, other.se_alpha_sq), kw


def test_trajectory_streams_differ():
    assert trajectory_rng(1, 0).standard_normal() != trajectory_rng(1, 1).standard_normal()


def test_standard_error_scaling():
    small = simulate_ensemble(SQUEEZED, 1000, 10.0, dt=0.02, seed=1, n_records=1)
    large = simulate_ensemble(SQUEEZED, 4000, 10.0, dt=0.02, seed=2, n_records=1)
    ratio = small.se_cross[-1].real / large.se_cross[-1].real
    assert 1.0 <= ratio <= 4.0


def test_quadrature_moments_include_nonclassical_sign():
    # with alpha_- = alpha* - alpha any classical field has <alpha_-^2> <= 0;
    # squeezing makes it positive and the doubled phase space must follow
    p = SystemParams(1.0, 0.8, 0.3, 0.05, 1.0)
    plus_ref, minus_ref = steady_quadrature_moments(p)
    assert minus_ref > 0
    c = derive_coefficients(p)
    st_ = simulate_ensemble(p, 10_000, 20 / c.lambda_minus, dt=0.01 / c.lambda_plus, seed=9,
                            n_records=1)
    plus, minus = st_.quadrature_moments()
    assert within(plus[-1].real, st_.se_quad_plus[-1], plus_ref)
    assert within(minus[-1].real, st_.se_quad_minus[-1], minus_ref)
    assert minus[-1].real > 0


def test_output_variances_from_ensemble():
    c = derive_coefficients(SQUEEZED)
    st_ = simulate_ensemble(SQUEEZED, 10_000, 20 / c.lambda_minus, dt=0.01 / c.lambda_plus,
                            seed=4, n_records=1)
    plus, minus, se_p, se_m = output_variances_from_ensemble(st_, SQUEEZED)
    ref = output_variances(SQUEEZED)
    assert within(plus, se_p, ref.plus) and within(minus, se_m, ref.minus)


def test_rejects_above_threshold_and_tiny_ensembles():
    with pytest.raises(StabilityError):
        simulate_ensemble(SystemParams(4.0, 1.0, epsilon=2.0), 10, 1.0)
    with pytest.raises(DomainError):
        simulate_ensemble(THERMAL, 1, 1.0)


def test_weak_order_fixture():
    biases, ratios = em_bias_ratios()
    assert all(1.8 <= r <= 2.2 for r in ratios), ratios


def test_sampler_matches_exact_scheme_moments():
    # a coarse step biases the sampler; the exact recursion predicts by how much
    p = SQUEEZED
    c = derive_coefficients(p)
    t_end, dt = 20 / c.lambda_minus, 0.25
    _, n_em = em_expected_moments(p, t_end, dt)
    st_ = simulate_ensemble(p, 20_000, t_end, dt=dt, seed=8, n_records=1)
    assert within(st_.mean_cross[-1].real, st_.se_cross[-1].real, n_em)


# two-time correlation

def test_two_time_correlation_thermal():
    est = two_time_correlation_mc(THERMAL, 2000, tau_max=20.0, n_tau=101, dt=0.01, seed=2)
    j2 = int(np.argmin(np.abs(est.tau - 2.0)))
    assert est.tau[j2] == pytest.approx(2.0)
    assert within(est.mean[j2].real, est.se[j2].real, 2.0 * math.exp(-1))
    assert within(est.mean[0].real, est.se[0].real, steady_state_moments(THERMAL).mean_n)
    assert within(est.mean[-1].real, est.se[-1].real, 0.0)
    assert est.per_trajectory.shape == (101, 2000)
    ref = autocorrelation_cavity(THERMAL, est.tau)
    z = np.abs(est.mean.real - ref) / est.se.real
    assert np.mean(z < 4) > 0.95


def test_two_time_requires_burn_in():
    with pytest.raises(DomainError):
        two_time_correlation_mc(THERMAL, 10, 1.0, t_burn=1.0)

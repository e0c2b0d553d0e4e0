import numpy as np
import pytest
from hypothesis import given

from cascade_laser import SystemParams, derive_coefficients, steady_state_moments
from cascade_laser.analytics import steady_quadrature_moments
from cascade_laser.errors import StabilityError
from cascade_laser.moments import (
    MomentState,
    integrate_moments,
    moment_rhs,
    propagators,
)
from cascade_laser.validation import rk4_order

from conftest import below_threshold, rel


def rhs_at(state, p):
    return moment_rhs(state, derive_coefficients(p), p.epsilon)


def test_rhs_from_vacuum():
    d = rhs_at(MomentState(), SystemParams(4.0, 1.0))
    assert d.mean_alpha_sq == 2.0 and d.mean_n == 2.0 and d.mean_alpha == 0


def test_rhs_vacuum_fixed_point():
    d = rhs_at(MomentState(), SystemParams(0.0, 0.7, 0.3))
    assert (d.mean_alpha, d.mean_alpha_sq, d.mean_n) == (0, 0, 0)


@given(below_threshold())
def test_rhs_vanishes_at_steady_state(p):
    d = rhs_at(steady_state_moments(p), p)
    s = steady_state_moments(p)
    scale = max(1.0, abs(s.mean_n)) * (derive_coefficients(p).lambda_plus + p.kappa)
    assert abs(d.mean_n) <= 1e-12 * scale and abs(d.mean_alpha_sq) <= 1e-12 * scale


def test_integration_reaches_corrected_photon_number():
    p = SystemParams(25.0, 0.8, 0.1, 0.3, 1.0)
    final = integrate_moments(p, 50 / 0.8, record_every=1000).final()
    assert final.mean_n == pytest.approx(4.733542854, abs=1e-6)


def test_integration_of_vacuum_is_zero():
    s = integrate_moments(SystemParams(0.0, 1.0, 0.4), 3.0, dt=0.01)
    assert np.all(s.mean_n == 0) and np.all(s.mean_alpha_sq == 0)


@given(below_threshold())
def test_first_step_growth(p):
    c = derive_coefficients(p)
    dt = 1e-4 / max(c.lambda_plus, p.kappa, c.calA, 1.0)
    n1 = integrate_moments(p, dt, dt).mean_n[-1]
    assert abs(n1 - 2 * c.calA * dt) <= 10 * (c.lambda_plus + c.calA + 1.0) ** 2 * dt**2


def test_steady_points():
    s = steady_state_moments(SystemParams(4.0, 1.0))
    assert s.mean_n == pytest.approx(2.0) and s.mean_alpha_sq == pytest.approx(2.0)
    z = steady_state_moments(SystemParams(0.0, 1.0))
    assert (z.mean_n, z.mean_alpha_sq) == (0.0, 0.0)


def test_steady_above_threshold_errors():
    with pytest.raises(StabilityError):
        steady_state_moments(SystemParams(4.0, 1.0, epsilon=1.0))


def test_above_threshold_transient_diverges():
    p = SystemParams(4.0, 1.0, 0.0, 3.0, 0.0)
    s = integrate_moments(p, 300.0, dt=0.01)
    assert s.diverged and np.isfinite(s.mean_n).all()


@given(below_threshold())
def test_quadrature_moments_reconstruct(p):
    s = steady_state_moments(p)
    x = s.mean_alpha_sq.real
    plus, minus = steady_quadrature_moments(p)
    assert rel(2 * x + 2 * s.mean_n, plus) < 1e-10 or abs(2 * x + 2 * s.mean_n - plus) < 1e-12
    assert abs(2 * x - 2 * s.mean_n - minus) <= 1e-10 * max(1.0, abs(minus), s.mean_n)


@given(below_threshold())
def test_vacuum_mean_stays_zero_and_cauchy_schwarz(p):
    c = derive_coefficients(p)
    s = integrate_moments(p, 3.0 / c.lambda_minus, dt=0.05 / c.lambda_plus, record_every=20)
    assert np.all(s.mean_alpha == 0)
    assert np.all(s.mean_n >= np.abs(s.mean_alpha) ** 2 - 1e-9)


def test_coherent_initial_amplitude_follows_propagators():
    p = SystemParams(2.0, 1.0, 0.3, 0.2, 0.4)
    a0 = 0.7 + 0.2j
    t = 3.0
    s = integrate_moments(p, t, dt=1e-3, initial=MomentState(a0, a0 * a0, abs(a0) ** 2))
    pr = propagators(p)
    expect = pr.E_plus(t) * a0 + pr.E_minus(t) * a0.conjugate()
    assert abs(s.mean_alpha[-1] - expect) < 1e-10


@given(below_threshold())
def test_propagator_identities(p):
    pr = propagators(p)
    assert pr.E_plus(0.0) == 1.0 and pr.E_minus(0.0) == 0.0
    t = 1.3
    assert pr.E_plus(t) + pr.E_minus(t) == pytest.approx(np.exp(-pr.lambda_minus * t), rel=1e-12)


def test_rk4_order_fixture():
    errors, orders = rk4_order()
    assert all(3.7 <= o <= 4.3 for o in orders), orders

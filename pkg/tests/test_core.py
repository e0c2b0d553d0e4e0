import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascade_laser import (
    DomainError,
    Stability,
    SystemParams,
    derive_coefficients,
    from_microscopic,
    reduced_eigenvalues,
    stability_classify,
    threshold_epsilon,
)
from cascade_laser.core import require_below
from cascade_laser.errors import StabilityError

from conftest import below_threshold


def test_microscopic_simple():
    p = from_microscopic(g=1, r_a=2, gamma=1, Omega=0, lambda_pump=0, mu=1, kappa=1, r=0)
    assert (p.A, p.beta, p.epsilon) == (4.0, 0.0, 0.0)


def test_microscopic_zero_coupling():
    p = from_microscopic(g=0, r_a=7.0, gamma=1, Omega=0.3, lambda_pump=0, mu=1, kappa=1, r=0.5)
    assert p.A == 0.0


def test_microscopic_figure_point():
    p = from_microscopic(g=2, r_a=12.5, gamma=1, Omega=0.022, lambda_pump=0.3, mu=5,
                         kappa=0.8, r=1)
    assert p.A == pytest.approx(100.0, abs=1e-12)
    assert p.beta == pytest.approx(0.022, abs=1e-15)
    assert p.epsilon == pytest.approx(1.5, abs=1e-12)
    assert p.microscopic is not None


@pytest.mark.parametrize("kw", [dict(kappa=0.0), dict(kappa=-1.0), dict(linear_gain=-1.0),
                                dict(beta=-0.1), dict(epsilon=-0.1), dict(squeeze_r=-1.0),
                                dict(kappa=math.nan)])
def test_params_validation(kw):
    base = dict(linear_gain=1.0, kappa=1.0, beta=0.1, epsilon=0.0, squeeze_r=0.0)
    base.update(kw)
    with pytest.raises(DomainError):
        SystemParams(**base)


def test_replace_drops_microscopic():
    p = from_microscopic(1, 2, 1, 0, 0, 1, 1, 0)
    q = p.replace(beta=0.5)
    assert q.microscopic is None and q.beta == 0.5


def test_coefficients_trivial_point():
    c = derive_coefficients(SystemParams(4.0, 1.0))
    assert (c.calA, c.calB, c.calC, c.calD) == (1.0, 1.5, -1.0, -1.0)
    assert c.bigB == 1.0 and c.N == 0.0 and c.M == 0.0
    assert c.lambda_minus == 0.5 and c.lambda_plus == 0.5


def test_reservoir_moments_r1():
    c = derive_coefficients(SystemParams(0.0, 1.0, squeeze_r=1.0))
    assert c.N == pytest.approx(1.381098, abs=5e-7)
    assert c.M == pytest.approx(1.813430, abs=5e-7)


def test_threshold_values():
    assert threshold_epsilon(SystemParams(100.0, 0.8)) == 0.4
    assert threshold_epsilon(SystemParams(100.0, 0.8, math.sqrt(2))) == pytest.approx(0.4, abs=1e-13)
    assert threshold_epsilon(SystemParams(100.0, 0.8, 0.022)) == pytest.approx(1.499069, abs=5e-7)


def test_lambda_minus_vanishes_at_threshold():
    p = SystemParams(100.0, 0.8, 0.022, 0.0, 1.0).at_threshold()
    assert abs(derive_coefficients(p).lambda_minus) < 1e-12


def test_stability_classes():
    assert stability_classify(SystemParams(0.0, 1.0)) is Stability.BELOW
    p = SystemParams(100.0, 0.8, 0.022, 0.0, 1.0)
    assert stability_classify(p.at_threshold()) is Stability.AT
    above = p.replace(epsilon=threshold_epsilon(p) + 0.08)
    assert stability_classify(above) is Stability.ABOVE
    with pytest.raises(StabilityError):
        require_below(above, "test")


def test_at_threshold_needs_nonnegative_epsilon():
    with pytest.raises(DomainError):
        SystemParams(100.0, 0.1, 1.9).at_threshold()


@given(st.floats(0.0, 5.0))
def test_reservoir_identity(r):
    c = derive_coefficients(SystemParams(0.0, 1.0, squeeze_r=r))
    assert c.M**2 == pytest.approx(c.N * (c.N + 1), rel=1e-12, abs=1e-300)


@given(below_threshold())
def test_eigenvalue_routes_agree(p):
    c = derive_coefficients(p)
    lm, lp = reduced_eigenvalues(p)
    # relative to the largest rate in play; lambda_minus itself may be tiny
    scale = p.kappa + p.epsilon + p.A
    assert abs(c.lambda_minus - lm) <= 1e-12 * scale
    assert abs(c.lambda_plus - lp) <= 1e-12 * scale
    assert c.bigB >= 1.0


@given(below_threshold(), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_lambda_minus_affine_decreasing(p, e1, e2):
    l1 = derive_coefficients(p.replace(epsilon=e1)).lambda_minus
    l2 = derive_coefficients(p.replace(epsilon=e2)).lambda_minus
    scale = p.kappa + p.A + 3.0
    assert (l1 - l2) == pytest.approx(e2 - e1, abs=1e-12 * scale)
    eth = threshold_epsilon(p)
    assert abs(reduced_eigenvalues(p.replace(epsilon=max(eth, 0)))[0]) <= 1e-12 * scale or eth < 0


@given(below_threshold())
def test_coefficients_pure(p):
    assert derive_coefficients(p) == derive_coefficients(p)

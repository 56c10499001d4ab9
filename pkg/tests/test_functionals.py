import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import positive
from funcbregman import (
    DomainViolationError,
    PointwiseSpec,
    gateaux_fd,
    integrate,
    lp_norm,
    make_interval_grid,
    phi_from_pointwise,
    phi_neg_entropy,
    phi_squared_bias,
    phi_total_squared,
)
from funcbregman.bregman import divergence
from funcbregman.functionals import InvalidArgumentError, default_fd_step, square_spec, xlogx_spec

UNIT = make_interval_grid(0, 1, 32)
SHIPPED = [phi_total_squared, phi_squared_bias, phi_neg_entropy]


def test_total_squared_examples():
    phi = phi_total_squared()
    one = UNIT.constant(1.0)
    assert phi(one) == pytest.approx(1.0, rel=1e-15)
    assert phi.first_variation(one, one) == pytest.approx(2.0, rel=1e-15)
    assert phi.second_variation(one, one, one) == pytest.approx(2.0, rel=1e-15)


def test_squared_bias_examples():
    phi = phi_squared_bias()
    assert phi(UNIT.constant(2.0)) == pytest.approx(4.0, rel=1e-15)
    assert phi.first_variation(UNIT.constant(1.0), UNIT.constant(3.0)) == pytest.approx(6.0, rel=1e-15)
    one = UNIT.constant(1.0)
    assert phi.second_variation(one, one, one) == pytest.approx(2.0, rel=1e-15)


def test_neg_entropy_examples():
    phi = phi_neg_entropy()
    assert phi(UNIT.constant(1.0)) == 0.0
    assert phi(UNIT.constant(math.e)) == pytest.approx(math.e, rel=1e-14)
    assert phi.first_variation(UNIT.constant(1.0), UNIT.constant(1.0)) == pytest.approx(1.0, rel=1e-15)


def test_neg_entropy_zero_handling():
    phi = phi_neg_entropy()
    g = UNIT.function(np.r_[np.zeros(16), np.ones(16)])
    assert phi(g) == 0.0
    with pytest.raises(DomainViolationError):
        phi.first_variation_coeff(g)
    with pytest.raises(DomainViolationError):
        phi.second_variation(g, g, g)


def test_gateaux_fd_examples():
    one = UNIT.constant(1.0)
    assert gateaux_fd(phi_total_squared(), one, one, 1e-5) == pytest.approx(2.0, abs=1e-8)
    assert gateaux_fd(phi_squared_bias(), one, UNIT.constant(3.0), 1e-5) == pytest.approx(6.0, abs=1e-7)
    for make in SHIPPED:
        assert gateaux_fd(make(), one, UNIT.constant(0.0), 1e-5) == 0.0


def test_gateaux_fd_guard():
    g = UNIT.constant(1e-7)
    with pytest.raises(DomainViolationError):
        gateaux_fd(phi_neg_entropy(), g, UNIT.constant(-1.0), 1e-5)
    with pytest.raises(InvalidArgumentError):
        gateaux_fd(phi_total_squared(), g, g, 0.0)


@pytest.mark.parametrize("make", SHIPPED)
def test_first_variation_matches_finite_differences(make, rng):
    phi = make()
    for _ in range(50):
        g = positive(UNIT, rng, 0.5, 2.0)
        a = UNIT.function(rng.uniform(-1, 1, len(UNIT)))
        analytic = phi.first_variation(g, a)
        fd = gateaux_fd(phi, g, a, default_fd_step(g))
        assert abs(fd - analytic) <= 1e-6 * (1 + abs(analytic))


@pytest.mark.parametrize("make", SHIPPED)
def test_second_variation_is_variation_of_first(make, rng):
    phi = make()
    g = positive(UNIT, rng, 0.5, 2.0)
    a = UNIT.function(rng.uniform(-1, 1, len(UNIT)))
    b = UNIT.function(rng.uniform(-1, 1, len(UNIT)))
    exact = phi.second_variation(g, b, a)
    errs = []
    for t in (1e-2, 5e-3, 2.5e-3):
        fd = (phi.first_variation(g + t * b, a) - phi.first_variation(g, a)) / t
        errs.append(abs(fd - exact))
    # O(t): zero for the quadratic functionals, halving for entropy
    if errs[0] > 1e-12:
        assert errs[1] / errs[0] == pytest.approx(0.5, abs=0.05)
        assert errs[2] / errs[1] == pytest.approx(0.5, abs=0.05)
    else:
        assert max(errs) < 1e-10


@pytest.mark.parametrize("make", SHIPPED)
def test_second_variation_symmetric(make, rng):
    phi = make()
    for _ in range(20):
        g = positive(UNIT, rng)
        a = UNIT.function(rng.normal(size=len(UNIT)))
        b = UNIT.function(rng.normal(size=len(UNIT)))
        assert phi.second_variation(g, a, b) == pytest.approx(phi.second_variation(g, b, a), rel=1e-12, abs=1e-15)


def test_strong_positivity(rng):
    tsd, bias, ent = phi_total_squared(), phi_squared_bias(), phi_neg_entropy()
    for _ in range(50):
        g = positive(UNIT, rng)
        signed = UNIT.function(rng.normal(size=len(UNIT)))
        nonneg = positive(UNIT, rng, 0.0, 1.0)
        l2sq = lp_norm(UNIT, signed, 2) ** 2
        assert tsd.second_variation(g, signed, signed) >= 2 * l2sq * (1 - 1e-12)
        assert bias.second_variation(g, nonneg, nonneg) >= 2 * lp_norm(UNIT, nonneg, 1) ** 2 * (1 - 1e-12)
        bound = l2sq / float(np.max(g.values))
        assert ent.second_variation(g, signed, signed) >= bound * (1 - 1e-12)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 32, elements=st.floats(1e-3, 10.0)),
       arrays(np.float64, 32, elements=st.floats(1e-3, 10.0)))
def test_value_is_midpoint_convex(f, g):
    F, G = UNIT.function(f), UNIT.function(g)
    for make in SHIPPED:
        phi = make()
        assert phi(0.5 * (F + G)) <= 0.5 * (phi(F) + phi(G)) + 1e-12 * (1 + abs(phi(F)) + abs(phi(G)))


@pytest.mark.parametrize("make", SHIPPED)
def test_first_variation_linear_in_direction(make, rng):
    phi = make()
    g = positive(UNIT, rng)
    a = UNIT.function(rng.normal(size=len(UNIT)))
    b = UNIT.function(rng.normal(size=len(UNIT)))
    alpha = 1.7
    lhs = phi.first_variation(g, alpha * a + b)
    rhs = alpha * phi.first_variation(g, a) + phi.first_variation(g, b)
    assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-13)


def test_pointwise_square_matches_total_squared(rng):
    native, built = phi_total_squared(), phi_from_pointwise(square_spec())
    assert built(UNIT.constant(1.0)) == pytest.approx(1.0, rel=1e-15)
    for _ in range(20):
        f, g = positive(UNIT, rng), positive(UNIT, rng)
        assert divergence(built, f, g).value == pytest.approx(divergence(native, f, g).value, rel=1e-10)


def test_pointwise_xlogx_matches_entropy(rng):
    native, built = phi_neg_entropy(), phi_from_pointwise(xlogx_spec())
    for _ in range(20):
        f, g = positive(UNIT, rng), positive(UNIT, rng)
        assert divergence(built, f, g).value == pytest.approx(divergence(native, f, g).value, rel=1e-8)


def test_pointwise_second_variation_close_to_analytic(rng):
    built, native = phi_from_pointwise(xlogx_spec()), phi_neg_entropy()
    g = positive(UNIT, rng)
    a, b = positive(UNIT, rng), positive(UNIT, rng)
    assert built.second_variation(g, b, a) == pytest.approx(native.second_variation(g, b, a), rel=1e-7)


def test_pointwise_odd_extension():
    built = phi_from_pointwise(square_spec())
    # s̃(x) = -s(-x) + 2 s(0) = -x² for x < 0
    assert built(UNIT.constant(-2.0)) == pytest.approx(-4.0, rel=1e-15)


def test_pointwise_nan_is_domain_violation():
    spec = PointwiseSpec(lambda x: x * np.log(x), lambda x: 1 + np.log(x), 0.0, -math.inf)
    built = phi_from_pointwise(spec)
    with pytest.raises(DomainViolationError):
        built.first_variation_coeff(UNIT.constant(0.0))
    # NaN beyond the convexity probe's range
    nan_spec = PointwiseSpec(lambda x: np.where(x > 50, np.nan, x * x), lambda x: 2 * x, 0.0, 0.0)
    with pytest.raises(DomainViolationError):
        phi_from_pointwise(nan_spec)(UNIT.constant(60.0))


def test_pointwise_rejects_concave_s():
    with pytest.raises(InvalidArgumentError):
        phi_from_pointwise(PointwiseSpec(lambda x: -x * x, lambda x: -2 * x, 0.0, 0.0))

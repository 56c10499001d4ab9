import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import positive
from funcbregman import (
    DegenerateInputError,
    DomainViolationError,
    GridFunction,
    IncompatibleSpaceError,
    InvalidArgumentError,
    affine_shift,
    check_dirac_equivalence,
    divergence,
    integrate,
    legendre_pair_entropy,
    legendre_pair_tsd,
    linear_combination,
    lp_norm,
    make_interval_grid,
    phi_from_pointwise,
    phi_neg_entropy,
    phi_squared_bias,
    phi_total_squared,
    pythagorean_residual,
    separation_hyperplane,
    vector_bregman,
)
from funcbregman.functionals import square_spec, xlogx_spec
from funcbregman.verify import equidistant_point

UNIT = make_interval_grid(0, 1, 64)
SHIPPED = [phi_total_squared, phi_squared_bias, phi_neg_entropy]


def sq(v):
    return float(v @ v)


def grad_sq(v):
    return 2 * v


def xlogx(v):
    return float(np.sum(v * np.log(v)))


def grad_xlogx(v):
    return 1 + np.log(v)


def test_divergence_examples():
    d = divergence(phi_total_squared(), UNIT.constant(1.5), UNIT.constant(0.5))
    assert d.value == pytest.approx(1.0, rel=1e-14)
    f = UNIT.function(4 * UNIT.nodes)  # ∫f = 2
    assert divergence(phi_squared_bias(), f, UNIT.constant(1.0)).value == pytest.approx(1.0, rel=1e-13)
    d = divergence(phi_neg_entropy(), UNIT.constant(2.0), UNIT.constant(1.0))
    assert d.value == pytest.approx(2 * math.log(2) - 1, rel=1e-13)
    for make in SHIPPED:
        g = UNIT.constant(0.7)
        assert abs(divergence(make(), g, g).value) <= 1e-12


def test_report_is_consistent():
    d = divergence(phi_neg_entropy(), UNIT.constant(2.0), UNIT.constant(1.0))
    assert d.value == d.phi_f - d.phi_g - d.first_variation_term
    assert not d.infinite
    assert set(d.as_dict()) == {"value", "phi_f", "phi_g", "first_variation_term", "infinite"}


@pytest.mark.parametrize("make,closed", [
    (phi_total_squared, lambda s, f, g: integrate(s, (f - g) * (f - g))),
    (phi_squared_bias, lambda s, f, g: integrate(s, f - g) ** 2),
    (phi_neg_entropy, lambda s, f, g: integrate(s, f * (f / g).map(np.log) - f + g)),
])
def test_closed_forms(make, closed, rng):
    for _ in range(20):
        f, g = positive(UNIT, rng), positive(UNIT, rng)
        assert divergence(make(), f, g).value == pytest.approx(closed(UNIT, f, g), rel=1e-10, abs=1e-13)


def test_entropy_support():
    phi = phi_neg_entropy()
    g = UNIT.function(np.r_[np.zeros(32), np.ones(32)])
    f = UNIT.function(np.r_[np.zeros(32), 2 * np.ones(32)])
    # only the second half contributes: 0.5 (2 ln 2 - 1)
    assert divergence(phi, f, g).value == pytest.approx(0.5 * (2 * math.log(2) - 1), rel=1e-13)
    bad = divergence(phi, UNIT.constant(1.0), g)
    assert bad.infinite and bad.value == math.inf


def test_divergence_errors():
    other = make_interval_grid(0, 2, 64)
    with pytest.raises(IncompatibleSpaceError):
        divergence(phi_total_squared(), UNIT.constant(1.0), other.constant(1.0))
    with pytest.raises(DomainViolationError):
        divergence(phi_total_squared(), UNIT.constant(-1.0), UNIT.constant(1.0))
    with pytest.raises(DomainViolationError):
        divergence(phi_neg_entropy(), UNIT.constant(1.0), UNIT.constant(-1.0))


def test_vector_bregman_examples():
    assert vector_bregman(grad_sq, sq, [1, 2], [0, 0]) == 5.0
    assert vector_bregman(grad_sq, sq, [1, 2], [1, 2]) == 0.0
    assert vector_bregman(grad_xlogx, xlogx, [1, 1], [2, 2]) == pytest.approx(2 - 2 * math.log(2), rel=1e-14)
    assert 2 - 2 * math.log(2) == pytest.approx(0.6137056, abs=1e-7)
    with pytest.raises(InvalidArgumentError):
        vector_bregman(grad_sq, sq, [1, 2], [1, 2, 3])


def test_dirac_equivalence(rng):
    for _ in range(20):
        pts = rng.permutation(np.linspace(-3, 3, 7))[:3]
        x, y = rng.normal(size=3), rng.normal(size=3)
        assert check_dirac_equivalence(sq, grad_sq, pts, x, y) <= 1e-12
        x, y = rng.uniform(0.1, 3, 3), rng.uniform(0.1, 3, 3)
        assert check_dirac_equivalence(xlogx, grad_xlogx, pts, x, y) <= 1e-10
    assert check_dirac_equivalence(sq, grad_sq, [0, 1, 2], [1, 2, 3], [1, 2, 3]) == 0.0


def test_dirac_equivalence_order_sensitive_phi(rng):
    # a non-symmetric φ̃ exposes any node/caller ordering mix-up
    w = np.array([1.0, 2.0, 5.0])

    def phi(v):
        return float(np.sum(w * v * v))

    def grad(v):
        return 2 * w * v

    pts = [2.0, -1.0, 0.5]
    x, y = rng.normal(size=3), rng.normal(size=3)
    assert check_dirac_equivalence(phi, grad, pts, x, y) <= 1e-12


@pytest.mark.parametrize("make,tol", [(phi_total_squared, 1e-10), (phi_neg_entropy, 1e-9),
                                      (phi_squared_bias, 1e-10)])
def test_pythagorean(make, tol, rng):
    phi = make()
    for _ in range(10):
        f, g, h = (positive(UNIT, rng) for _ in range(3))
        lhs, rhs = pythagorean_residual(phi, f, g, h)
        assert abs(lhs - rhs) <= tol
    g = UNIT.constant(1.3)
    assert pythagorean_residual(phi, g, g, g) == (0.0, 0.0)


def test_hyperplane_tsd(rng):
    phi = phi_total_squared()
    for _ in range(10):
        g1, g2 = positive(UNIT, rng), positive(UNIT, rng)
        coeff, c = separation_hyperplane(phi, g1, g2)
        f = equidistant_point(phi, g1, g2, rng)
        assert divergence(phi, f, g1).value == pytest.approx(divergence(phi, f, g2).value, abs=1e-12)
        assert abs(integrate(UNIT, coeff * f) - c) <= 1e-9
        mid = 0.5 * (g1 + g2)
        assert abs(integrate(UNIT, coeff * mid) - c) <= 1e-12


def test_hyperplane_bias_by_scaling(rng):
    phi = phi_squared_bias()
    for _ in range(10):
        g1, g2 = positive(UNIT, rng), positive(UNIT, rng)
        f = positive(UNIT, rng)
        target = 0.5 * (integrate(UNIT, g1) + integrate(UNIT, g2))
        f = (target / integrate(UNIT, f)) * f
        coeff, c = separation_hyperplane(phi, g1, g2)
        assert abs(integrate(UNIT, coeff * f) - c) <= 1e-9


def test_hyperplane_entropy(rng):
    phi = phi_neg_entropy()
    g1, g2 = positive(UNIT, rng), positive(UNIT, rng)
    coeff, c = separation_hyperplane(phi, g1, g2)
    f = equidistant_point(phi, g1, g2, rng)
    assert abs(integrate(UNIT, coeff * f) - c) <= 1e-9


def test_hyperplane_degenerate():
    g = UNIT.constant(1.0)
    with pytest.raises(DegenerateInputError):
        separation_hyperplane(phi_total_squared(), g, g)


@pytest.mark.parametrize("pair,phi,tol", [(legendre_pair_tsd, phi_total_squared, 1e-10),
                                          (legendre_pair_entropy, phi_neg_entropy, 1e-8)])
def test_legendre_duality(pair, phi, tol, rng):
    p, ph = pair(), phi()
    for _ in range(20):
        f, g = positive(UNIT, rng), positive(UNIT, rng)
        assert abs(divergence(ph, f, g).value - p.dual_divergence(f, g)) <= tol
        # φ[g] = -ψ[G] + ∫ g G dν
        G = p.transform(g)
        assert ph(g) == pytest.approx(-p.psi(G) + integrate(UNIT, g * G), rel=1e-10)
    g = positive(UNIT, rng)
    assert p.dual_divergence(g, g) == 0.0


def test_entropy_transform_rejects_zero():
    with pytest.raises(DomainViolationError):
        legendre_pair_entropy().transform(UNIT.constant(0.0))


@pytest.mark.parametrize("make", SHIPPED)
def test_nonnegativity(make, rng):
    phi = make()
    for _ in range(200):
        f, g = positive(UNIT, rng, 0.0, 3.0), positive(UNIT, rng, 1e-3, 3.0)
        d = divergence(phi, f, g)
        assert d.value >= -1e-10 * (1 + abs(d.phi_f) + abs(d.phi_g))


@pytest.mark.parametrize("make", [phi_total_squared, phi_neg_entropy])
def test_zero_only_at_equality(make, rng):
    phi = make()
    for _ in range(200):
        f, g = positive(UNIT, rng), positive(UNIT, rng)
        if np.max(np.abs((f - g).values)) >= 0.01:
            assert divergence(phi, f, g).value >= 1e-8


def test_squared_bias_vanishes_on_equal_mass():
    # squared bias only sees ∫(f - g); distinct functions of equal mass are at distance 0
    f = UNIT.function(2 * UNIT.nodes)
    g = UNIT.constant(1.0)
    assert abs(divergence(phi_squared_bias(), f, g).value) <= 1e-15


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 64, elements=st.floats(0.05, 5.0)),
       arrays(np.float64, 64, elements=st.floats(0.05, 5.0)),
       arrays(np.float64, 64, elements=st.floats(0.05, 5.0)))
def test_convex_in_first_argument(a, b, c):
    f1, f2, g = UNIT.function(a), UNIT.function(b), UNIT.function(c)
    for make in SHIPPED:
        phi = make()
        mid = divergence(phi, 0.5 * (f1 + f2), g).value
        avg = 0.5 * (divergence(phi, f1, g).value + divergence(phi, f2, g).value)
        assert mid <= avg + 1e-10


def test_linearity_in_phi(rng):
    tsd, bias = phi_total_squared(), phi_squared_bias()
    for c1, c2 in ((1.0, 1.0), (0.3, 4.2), (7.5, 0.01)):
        combo = linear_combination([(c1, tsd), (c2, bias)])
        for _ in range(20):
            f, g = positive(UNIT, rng), positive(UNIT, rng)
            expect = c1 * divergence(tsd, f, g).value + c2 * divergence(bias, f, g).value
            assert divergence(combo, f, g).value == pytest.approx(expect, rel=1e-12)


def test_linear_combination_rejects_nonpositive():
    with pytest.raises(InvalidArgumentError):
        linear_combination([(0.0, phi_total_squared())])


@pytest.mark.parametrize("make", SHIPPED)
def test_affine_equivalence(make, rng):
    phi = make()
    w = UNIT.function(rng.normal(size=64))
    shifted = affine_shift(phi, w, -3.1)
    for _ in range(20):
        f, g = positive(UNIT, rng), positive(UNIT, rng)
        assert divergence(shifted, f, g).value == pytest.approx(divergence(phi, f, g).value, rel=1e-12)


def test_squared_bias_l1_bound(rng):
    phi = phi_squared_bias()
    for _ in range(200):
        f, g = positive(UNIT, rng, 0.0, 2.0), positive(UNIT, rng, 0.0, 2.0)
        assert divergence(phi, f, g).value <= lp_norm(UNIT, f - g, 1) ** 2 + 1e-12


@pytest.mark.parametrize("spec,s,sp", [
    (square_spec, lambda x: x * x, lambda x: 2 * x),
    (xlogx_spec, lambda x: x * np.log(x), lambda x: 1 + np.log(x)),
])
def test_pointwise_forward_equivalence(spec, s, sp, rng):
    phi = phi_from_pointwise(spec())
    for _ in range(20):
        f, g = positive(UNIT, rng), positive(UNIT, rng)
        direct = integrate(UNIT, GridFunction(UNIT, s(f.values) - s(g.values) - sp(g.values) * (f.values - g.values)))
        assert divergence(phi, f, g).value == pytest.approx(direct, rel=1e-10)

"""Convex functionals on grid functions, with their first and second variations.

The first variation is carried as an integrand coefficient ``c_g`` so that
``δφ[g; a] = ∫ c_g · a dν``. The second variation is a trilinear evaluator
``second_variation(g, b, a) = δ²φ[g; b, a]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainViolationError, InvalidArgumentError
from .measure import GridFunction, integrate, lp_norm

DEFAULT_FD_STEP = 1e-5


def _always(g: GridFunction) -> bool:
    return True


@dataclass(frozen=True)
class FunctionalPhi:
    """A strictly convex functional bundled with its analytic variations.

    ``domain_guard`` tells whether the variations may be evaluated at ``g``.
    ``nonnegative_domain`` marks functionals whose divergence is only defined
    between nonnegative functions; conjugate functionals act on signed ones.
    ``support_aware`` functionals (relative entropy) have their divergence
    computed on the support of the second argument. When known,
    ``second_variation_coeff(g, b)`` returns ``k`` with
    ``δ²φ[g; b, a] = ∫ k a dν``.
    """

    name: str
    value: Callable[[GridFunction], float]
    first_variation_coeff: Callable[[GridFunction], GridFunction]
    second_variation: Callable[[GridFunction, GridFunction, GridFunction], float]
    domain_guard: Callable[[GridFunction], bool] = field(default=_always)
    nonnegative_domain: bool = True
    support_aware: bool = False
    second_variation_coeff: Callable[[GridFunction, GridFunction], GridFunction] | None = None

    def __call__(self, g: GridFunction) -> float:
        return self.value(g)

    def guard(self, g: GridFunction, what="argument") -> None:
        if not self.domain_guard(g):
            raise DomainViolationError(f"{what} is outside the domain of {self.name}")

    def first_variation(self, g: GridFunction, a: GridFunction) -> float:
        """δφ[g; a] as ∫ c_g · a dν."""
        return integrate(g.space, self.first_variation_coeff(g) * a)


def phi_total_squared() -> FunctionalPhi:
    """``φ[g] = ∫ g² dν``; its divergence is the squared L² distance."""
    return FunctionalPhi(
        name="total_squared",
        value=lambda g: integrate(g.space, g * g),
        first_variation_coeff=lambda g: 2.0 * g,
        second_variation=lambda g, b, a: 2.0 * integrate(g.space, a * b),
        second_variation_coeff=lambda g, b: 2.0 * b,
    )


def phi_squared_bias() -> FunctionalPhi:
    """``φ[g] = (∫ g dν)²``; its divergence is ``(∫ (f - g) dν)²``."""

    def coeff(g):
        return g.space.constant(2.0 * integrate(g.space, g))

    return FunctionalPhi(
        name="squared_bias",
        value=lambda g: integrate(g.space, g) ** 2,
        first_variation_coeff=coeff,
        second_variation=lambda g, b, a: 2.0 * integrate(g.space, a) * integrate(g.space, b),
        second_variation_coeff=lambda g, b: g.space.constant(2.0 * integrate(g.space, b)),
    )


def _xlogx(v: np.ndarray) -> np.ndarray:
    if np.any(v < 0):
        raise DomainViolationError("g ln g needs g >= 0")
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = v[pos] * np.log(v[pos])
    return out


def _strictly_positive(g: GridFunction) -> bool:
    return bool(np.all(g.values > 0))


def phi_neg_entropy() -> FunctionalPhi:
    """``φ[g] = ∫ g ln g dν`` with ``0 ln 0 = 0``.

    Variations need ``g > 0`` at every node; the value alone accepts zeros.
    """

    def coeff(g):
        if not _strictly_positive(g):
            raise DomainViolationError("1 + ln g is undefined where g = 0")
        return g.map(lambda v: 1.0 + np.log(v))

    def second_coeff(g, b):
        if not _strictly_positive(g):
            raise DomainViolationError("∫ ab/g dν is undefined where g = 0")
        return b.map(lambda v: v / g.values)

    def second(g, b, a):
        return integrate(g.space, a * second_coeff(g, b))

    return FunctionalPhi(
        name="neg_entropy",
        value=lambda g: float(np.dot(g.space.weights, _xlogx(g.values))),
        first_variation_coeff=coeff,
        second_variation=second,
        domain_guard=_strictly_positive,
        support_aware=True,
        second_variation_coeff=second_coeff,
    )


@dataclass(frozen=True)
class PointwiseSpec:
    """Scalar strictly convex ``s`` on ``(0, ∞)`` and its derivative.

    ``s`` and ``s_prime`` must accept numpy arrays. The limits at zero are
    used to extend ``s`` to the closed half-line and, by odd reflection, to
    negative arguments.
    """

    s: Callable[[np.ndarray], np.ndarray]
    s_prime: Callable[[np.ndarray], np.ndarray]
    limit_at_zero: float
    limit_prime_at_zero: float

    def check_convexity(self, rng=None, probes=256, tol=1e-12, scale=10.0) -> bool:
        rng = np.random.default_rng(0) if rng is None else rng
        x = rng.uniform(1e-6, scale, probes)
        y = rng.uniform(1e-6, scale, probes)
        mid = self.s(0.5 * (x + y))
        ends = 0.5 * (self.s(x) + self.s(y))
        return bool(np.all(mid <= ends + tol * (1.0 + np.abs(ends))))


def square_spec() -> PointwiseSpec:
    return PointwiseSpec(lambda x: x * x, lambda x: 2.0 * x, 0.0, 0.0)


def xlogx_spec() -> PointwiseSpec:
    return PointwiseSpec(
        s=lambda x: x * np.log(x),
        s_prime=lambda x: 1.0 + np.log(x),
        limit_at_zero=0.0,
        limit_prime_at_zero=-math.inf,
    )


def phi_from_pointwise(spec: PointwiseSpec, fd_step=DEFAULT_FD_STEP) -> FunctionalPhi:
    """Functional ``φ[f] = ∫ s̃(f) dν`` whose divergence is the pointwise one.

    ``s̃`` equals ``s`` on ``(0, ∞)``, its limit at 0, and ``-s(-x) + 2 s(0)``
    for negative ``x``. The second variation is a central difference of the
    first variation.
    """
    if not spec.check_convexity():
        raise InvalidArgumentError("pointwise s failed the midpoint convexity probe")
    s0 = spec.limit_at_zero
    sp0 = spec.limit_prime_at_zero

    def _checked(out, what):
        if np.any(np.isnan(out)):
            raise DomainViolationError(f"{what} returned NaN on the function's range")
        return out

    def s_ext(v):
        out = np.full_like(v, s0)
        pos, neg = v > 0, v < 0
        if pos.any():
            out[pos] = spec.s(v[pos])
        if neg.any():
            out[neg] = -spec.s(-v[neg]) + 2.0 * s0
        return _checked(out, "s")

    def sp_ext(v):
        out = np.full_like(v, sp0)
        pos, neg = v > 0, v < 0
        if pos.any():
            out[pos] = spec.s_prime(v[pos])
        if neg.any():
            out[neg] = spec.s_prime(-v[neg])
        out = _checked(out, "s'")
        if not np.all(np.isfinite(out)):
            raise DomainViolationError("s' is infinite on the function's range")
        return out

    def coeff(g):
        return g.map(sp_ext)

    def second(g, b, a):
        bnorm = lp_norm(g.space, b, math.inf)
        if bnorm == 0:
            return 0.0
        t = fd_step * (lp_norm(g.space, g, math.inf) + 1.0) / bnorm
        up = integrate(g.space, coeff(g + t * b) * a)
        down = integrate(g.space, coeff(g - t * b) * a)
        return (up - down) / (2.0 * t)

    def guard(g):
        try:
            return bool(np.all(np.isfinite(sp_ext(g.values))))
        except DomainViolationError:
            return False

    return FunctionalPhi(
        name="pointwise",
        value=lambda g: float(np.dot(g.space.weights, s_ext(g.values))),
        first_variation_coeff=coeff,
        second_variation=second,
        domain_guard=guard,
    )


def phi_from_vector(phi_tilde, grad_phi, fd_step=DEFAULT_FD_STEP) -> FunctionalPhi:
    """Functional on a Dirac-sum space evaluating ``φ̃`` at the node values.

    Node ``i`` carries mass ``m_i > 0``, so the first-variation coefficient is
    ``∇φ̃ / m``. ``φ̃`` and ``∇φ̃`` see values in node order.
    """

    def coeff(g):
        w = g.space.weights
        if np.any(w <= 0):
            raise DomainViolationError("vector functionals need positive point masses")
        return GridFunction(g.space, np.asarray(grad_phi(g.values), dtype=float) / w)

    def second(g, b, a):
        bnorm = float(np.max(np.abs(b.values)))
        if bnorm == 0:
            return 0.0
        t = fd_step * (float(np.max(np.abs(g.values))) + 1.0) / bnorm
        ga = np.asarray(grad_phi(g.values + t * b.values), dtype=float)
        gb = np.asarray(grad_phi(g.values - t * b.values), dtype=float)
        return float(np.dot(ga - gb, a.values)) / (2.0 * t)

    return FunctionalPhi(
        name="vector",
        value=lambda g: float(phi_tilde(g.values)),
        first_variation_coeff=coeff,
        second_variation=second,
        nonnegative_domain=False,
    )


def linear_combination(terms, name=None) -> FunctionalPhi:
    """``Σ c_k φ_k`` for ``terms = [(c_k, φ_k), ...]`` with ``c_k > 0``."""
    terms = [(float(c), phi) for c, phi in terms]
    if not terms or any(c <= 0 for c, _ in terms):
        raise InvalidArgumentError("linear combination needs positive coefficients")

    def coeff(g):
        out = g.space.constant(0.0)
        for c, phi in terms:
            out = out + c * phi.first_variation_coeff(g)
        return out

    second_coeff = None
    if all(phi.second_variation_coeff is not None for _, phi in terms):
        def second_coeff(g, b):
            out = g.space.constant(0.0)
            for c, phi in terms:
                out = out + c * phi.second_variation_coeff(g, b)
            return out

    return FunctionalPhi(
        name=name or "+".join(f"{c:g}*{phi.name}" for c, phi in terms),
        value=lambda g: sum(c * phi.value(g) for c, phi in terms),
        first_variation_coeff=coeff,
        second_variation=lambda g, b, a: sum(
            c * phi.second_variation(g, b, a) for c, phi in terms),
        domain_guard=lambda g: all(phi.domain_guard(g) for _, phi in terms),
        nonnegative_domain=any(phi.nonnegative_domain for _, phi in terms),
        support_aware=any(phi.support_aware for _, phi in terms),
        second_variation_coeff=second_coeff,
    )


def affine_shift(phi: FunctionalPhi, w: GridFunction, c: float) -> FunctionalPhi:
    """``φ[f] + ∫ w f dν + c``: same divergence as ``φ``."""
    c = float(c)
    return FunctionalPhi(
        name=f"{phi.name}+affine",
        value=lambda g: phi.value(g) + integrate(g.space, w * g) + c,
        first_variation_coeff=lambda g: phi.first_variation_coeff(g) + w,
        second_variation=phi.second_variation,
        domain_guard=phi.domain_guard,
        nonnegative_domain=phi.nonnegative_domain,
        support_aware=phi.support_aware,
        second_variation_coeff=phi.second_variation_coeff,
    )


def gateaux_fd(phi: FunctionalPhi, g: GridFunction, a: GridFunction, step=DEFAULT_FD_STEP) -> float:
    """Central-difference directional derivative of ``φ`` at ``g`` along ``a``.

    Independent of ``first_variation_coeff``: only ``φ``'s value is used.
    """
    if not step > 0:
        raise InvalidArgumentError("step must be positive")
    if not np.any(a.values):
        return 0.0
    up, down = g + step * a, g - step * a
    for h, what in ((g, "g"), (up, "g + step·a"), (down, "g - step·a")):
        phi.guard(h, what)
    return (phi.value(up) - phi.value(down)) / (2.0 * step)


def default_fd_step(g: GridFunction) -> float:
    return DEFAULT_FD_STEP * (float(np.max(np.abs(g.values))) + 1.0)


SHIPPED = {
    "tsd": phi_total_squared,
    "bias": phi_squared_bias,
    "entropy": phi_neg_entropy,
}

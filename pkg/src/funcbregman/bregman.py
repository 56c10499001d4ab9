"""The functional Bregman divergence and executable versions of its properties."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateInputError,
    DomainViolationError,
    IncompatibleSpaceError,
    InvalidArgumentError,
)
from .functionals import FunctionalPhi, phi_from_vector
from .measure import GridFunction, integrate, make_dirac


@dataclass(frozen=True)
class DivergenceReport:
    value: float
    phi_f: float
    phi_g: float
    first_variation_term: float

    @property
    def infinite(self) -> bool:
        return math.isinf(self.value)

    def as_dict(self):
        return {
            "value": self.value,
            "phi_f": self.phi_f,
            "phi_g": self.phi_g,
            "first_variation_term": self.first_variation_term,
            "infinite": self.infinite,
        }


def _support_restricted(f, g):
    """Move ``f`` and ``g`` onto the support of ``g``.

    Returns ``None`` when ``f`` has mass where ``g`` has none.
    """
    zero = g.values == 0
    if not zero.any():
        return f, g
    if np.any(f.values[zero] > 0):
        return None
    sub = g.space.restrict(~zero)
    return GridFunction(sub, f.values[~zero]), GridFunction(sub, g.values[~zero])


def divergence(phi: FunctionalPhi, f: GridFunction, g: GridFunction) -> DivergenceReport:
    """``d_φ[f, g] = φ[f] - φ[g] - δφ[g; f - g]``.

    For support-aware functionals (relative entropy) nodes where ``g = 0`` and
    ``f = 0`` are dropped; if ``f > 0`` somewhere ``g = 0`` the divergence is
    reported as ``+inf``.
    """
    if not f.space.same_as(g.space):
        raise IncompatibleSpaceError("f and g live on different spaces")
    if phi.nonnegative_domain:
        f.require_nonnegative("f")
        g.require_nonnegative("g")
    if phi.support_aware:
        restricted = _support_restricted(f, g)
        if restricted is None:
            return DivergenceReport(math.inf, phi.value(f), phi.value(g), -math.inf)
        f, g = restricted
    phi.guard(g, "g")
    phi_f = phi.value(f)
    phi_g = phi.value(g)
    term = phi.first_variation(g, f - g)
    return DivergenceReport(phi_f - phi_g - term, phi_f, phi_g, term)


def vector_bregman(grad_phi, phi_tilde, x, y) -> float:
    """Standard Bregman divergence ``φ̃(x) - φ̃(y) - ∇φ̃(y)ᵀ(x - y)`` on ℝⁿ."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InvalidArgumentError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(phi_tilde(x) - phi_tilde(y) - np.dot(grad_phi(y), x - y))


def check_dirac_equivalence(phi_tilde, grad_phi, points, f_values, g_values) -> float:
    """Max abs gap between the functional divergence on ``Σ δ_{c_i}`` and
    the vector divergence of the corresponding value vectors.

    ``φ̃`` and ``∇φ̃`` see coordinates in the order ``points`` were given.
    """
    points = np.asarray(points, dtype=np.float64)
    f_values = np.asarray(f_values, dtype=np.float64)
    g_values = np.asarray(g_values, dtype=np.float64)
    if not (points.shape == f_values.shape == g_values.shape):
        raise InvalidArgumentError("points, f and g must have the same length")
    space = make_dirac(points)
    order = np.argsort(points, kind="stable")
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.size)

    # the space stores nodes sorted; map node-ordered values back to caller order
    def phi_nodes(v):
        return phi_tilde(v[inverse])

    def grad_nodes(v):
        return np.asarray(grad_phi(v[inverse]))[order]

    phi = phi_from_vector(phi_nodes, grad_nodes)
    f = GridFunction(space, f_values[order])
    g = GridFunction(space, g_values[order])
    functional = divergence(phi, f, g).value
    vector = vector_bregman(grad_phi, phi_tilde, f_values, g_values)
    return abs(functional - vector)


def pythagorean_residual(phi, f, g, h) -> tuple[float, float]:
    """Both sides of ``d[f,h] = d[f,g] + d[g,h] + δφ[g;f-g] - δφ[h;f-g]``."""
    for fn, what in ((g, "g"), (h, "h")):
        phi.guard(fn, what)
    lhs = divergence(phi, f, h).value
    diff = f - g
    rhs = (divergence(phi, f, g).value + divergence(phi, g, h).value
           + phi.first_variation(g, diff) - phi.first_variation(h, diff))
    return lhs, rhs


def separation_hyperplane(phi, g1, g2) -> tuple[GridFunction, float]:
    """Hyperplane ``L f = c`` holding every ``f`` equidistant from ``g1`` and ``g2``.

    ``L f = ∫ coeff · f dν``.
    """
    if not g1.space.same_as(g2.space):
        raise IncompatibleSpaceError("g1 and g2 live on different spaces")
    if np.array_equal(g1.values, g2.values):
        raise DegenerateInputError("g1 and g2 coincide; every f is equidistant")
    phi.guard(g1, "g1")
    phi.guard(g2, "g2")
    coeff = phi.first_variation_coeff(g2) - phi.first_variation_coeff(g1)
    c = (phi.value(g1) - phi.value(g2)
         - phi.first_variation(g1, g1) + phi.first_variation(g2, g2))
    return coeff, c


@dataclass(frozen=True)
class LegendrePair:
    """Conjugate pair: ``transform`` maps g to G, ``psi`` is the conjugate functional."""

    transform: Callable[[GridFunction], GridFunction]
    psi: FunctionalPhi

    def dual_divergence(self, f, g) -> float:
        """``d_ψ[G, F]``, which should equal ``d_φ[f, g]``."""
        return divergence(self.psi, self.transform(g), self.transform(f)).value


def legendre_pair_tsd() -> LegendrePair:
    psi = FunctionalPhi(
        name="tsd_conjugate",
        value=lambda G: 0.25 * integrate(G.space, G * G),
        first_variation_coeff=lambda G: 0.5 * G,
        second_variation=lambda G, b, a: 0.5 * integrate(G.space, a * b),
        nonnegative_domain=False,
    )
    return LegendrePair(transform=lambda g: 2.0 * g, psi=psi)


def legendre_pair_entropy() -> LegendrePair:
    def transform(g):
        if not np.all(g.values > 0):
            raise DomainViolationError("entropy Legendre transform needs g > 0")
        return g.map(lambda v: 1.0 + np.log(v))

    def exp_shifted(G):
        return G.map(lambda v: np.exp(v - 1.0))

    psi = FunctionalPhi(
        name="entropy_conjugate",
        value=lambda G: integrate(G.space, exp_shifted(G)),
        first_variation_coeff=exp_shifted,
        second_variation=lambda G, b, a: integrate(G.space, exp_shifted(G) * a * b),
        nonnegative_domain=False,
    )
    return LegendrePair(transform=transform, psi=psi)

"""The mean of a finite function ensemble minimises expected Bregman divergence.

Everything here is numerical witness rather than proof: the objective
``J(g) = Σ p_i d_φ[f_i, g]`` is evaluated at the ensemble mean, at random
perturbations of it, and along a projected gradient descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bregman import divergence
from .errors import DomainViolationError, InvalidArgumentError, NumericFailureError
from .functionals import FunctionalPhi
from .measure import GridFunction

ENTROPY_FLOOR = 1e-9
ARMIJO_C = 1e-4


@dataclass(frozen=True)
class Ensemble:
    members: tuple
    probs: np.ndarray

    def __init__(self, members: Sequence[GridFunction], probs: Sequence[float] | None = None):
        members = tuple(members)
        if not members:
            raise InvalidArgumentError("ensemble needs at least one member")
        if probs is None:
            probs = np.full(len(members), 1.0 / len(members))
        probs = np.asarray(probs, dtype=np.float64)
        if probs.shape != (len(members),):
            raise InvalidArgumentError("one probability per member")
        if np.any(probs <= 0):
            raise InvalidArgumentError("probabilities must be positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise InvalidArgumentError(f"probabilities sum to {probs.sum()!r}, not 1")
        space = members[0].space
        for m in members:
            if not m.space.same_as(space):
                raise InvalidArgumentError("members must share one measure space")
            m.require_nonnegative("ensemble member")
        probs.setflags(write=False)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "probs", probs)

    @property
    def space(self):
        return self.members[0].space


@dataclass(frozen=True)
class MinimizerReport:
    mean_objective: float
    min_perturbed_objective: float
    passed: bool
    trials: int


def ensemble_mean(e: Ensemble) -> GridFunction:
    values = np.zeros(len(e.space))
    for p, f in zip(e.probs, e.members):
        values += p * f.values
    return GridFunction(e.space, values)


def expected_divergence(phi: FunctionalPhi, e: Ensemble, g: GridFunction) -> float:
    # fixed index order keeps the sum bit-reproducible
    total = 0.0
    for p, f in zip(e.probs, e.members):
        total += p * divergence(phi, f, g).value
    return total


def verify_mean_minimizer(phi: FunctionalPhi, e: Ensemble, trials=100, eps=1e-2,
                          rng=None, tol=1e-12) -> MinimizerReport:
    """Compare ``J`` at the ensemble mean with ``J`` at ``trials`` perturbations."""
    rng = np.random.default_rng(0) if rng is None else rng
    mean = ensemble_mean(e)
    if not phi.domain_guard(mean):
        raise DomainViolationError(f"ensemble mean is outside the domain of {phi.name}")
    j_mean = expected_divergence(phi, e, mean)
    best = math.inf
    for _ in range(trials):
        eta = rng.uniform(-1.0, 1.0, len(mean.space))
        eta /= np.max(np.abs(eta))
        g = GridFunction(mean.space, mean.values + eps * eta)
        if not (g.is_nonnegative() and phi.domain_guard(g)):
            # offending nodes go to half the mean instead
            eta = np.where(g.values <= 0, -0.5 * mean.values / eps, eta)
            g = GridFunction(mean.space, mean.values + eps * eta)
        best = min(best, expected_divergence(phi, e, g))
    return MinimizerReport(j_mean, best, bool(j_mean <= best + tol), trials)


def _gradient_coeff(phi, g, mean):
    """Coefficient ``c`` with ``δJ[g; a] = ∫ c a dν``.

    ``δJ[g; a] = -δ²φ[g; f̄ - g, a]`` because the second variation is linear
    in its first direction.
    """
    b = mean - g
    if phi.second_variation_coeff is not None:
        return -phi.second_variation_coeff(g, b)
    w = g.space.weights
    out = np.empty(len(g.space))
    for j in range(out.size):
        e_j = np.zeros(out.size)
        e_j[j] = 1.0
        out[j] = -phi.second_variation(g, b, GridFunction(g.space, e_j)) / w[j]
    return GridFunction(g.space, out)


def descend_to_minimizer(phi: FunctionalPhi, e: Ensemble, init: GridFunction,
                         max_iters=20000, tol=1e-12) -> GridFunction:
    """Projected gradient descent on ``J`` with Armijo backtracking.

    Steps follow the L²(ν) gradient and are projected onto ``g >= 0``
    (``g >= 1e-9`` for functionals needing strict positivity).
    """
    phi.guard(init, "init")
    floor = ENTROPY_FLOOR if not phi.domain_guard(init.space.constant(0.0)) else 0.0
    mean = ensemble_mean(e)
    w = init.space.weights
    g = init
    j = expected_divergence(phi, e, g)
    increases = 0
    for _ in range(max_iters):
        grad = _gradient_coeff(phi, g, mean)
        t = 1.0
        while True:
            cand = GridFunction(g.space, np.maximum(g.values - t * grad.values, floor))
            j_cand = expected_divergence(phi, e, cand)
            if math.isnan(j_cand):
                raise NumericFailureError("objective became NaN", {"step": t})
            decrease = float(np.dot(w, grad.values * (cand.values - g.values)))
            if j_cand <= j + ARMIJO_C * decrease:
                break
            t *= 0.5
            if t < 1e-20:
                return g
        increases = increases + 1 if j_cand > j else 0
        if increases >= 10:
            raise NumericFailureError("objective increased on 10 consecutive steps",
                                      {"objective": j_cand})
        step = float(np.max(np.abs(cand.values - g.values)))
        g, j = cand, j_cand
        if step < tol:
            return g
    return g

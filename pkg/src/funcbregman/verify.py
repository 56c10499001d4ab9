"""Self-check suites run by ``funcbregman verify``.

Each suite returns a list of :class:`Check` results; the CLI prints them and
exits nonzero if any failed. Sample counts are smaller than the test suite's
so the command stays interactive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainc

from . import bregman as br
from . import expectation as ex
from . import functionals as fn
from . import uniform_case as uc
from .measure import GridFunction, integrate, lp_norm, make_interval_grid


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def random_positive(space, rng, low=0.2, high=2.0) -> GridFunction:
    return GridFunction(space, rng.uniform(low, high, len(space)))


def equidistant_point(phi, g1, g2, rng, mix=0.1):
    """Some ``f`` with ``d[f, g1] = d[f, g2]``, found by root-finding on a segment."""
    r = random_positive(g1.space, rng)
    u = (1 - mix) * g1 + mix * r
    v = (1 - mix) * g2 + mix * r

    def gap(lam, a, b):
        f = (1 - lam) * a + lam * b
        return br.divergence(phi, f, g1).value - br.divergence(phi, f, g2).value

    if gap(0.0, u, v) * gap(1.0, u, v) > 0:
        u, v = g1, g2
    lam = brentq(gap, 0.0, 1.0, args=(u, v), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return (1 - lam) * u + lam * v


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def property_suite(pairs=50, seed=1, cells=64) -> list[Check]:
    rng = np.random.default_rng(seed)
    space = make_interval_grid(0.0, 1.0, cells)
    phis = {name: make() for name, make in fn.SHIPPED.items()}
    out = []
    for name, phi in phis.items():
        worst = {"nonneg": 0.0, "identity": 0.0, "convex": 0.0, "pyth": 0.0, "plane": 0.0}
        for _ in range(pairs):
            f, g, h = (random_positive(space, rng) for _ in range(3))
            d = br.divergence(phi, f, g)
            scale = 1.0 + abs(d.phi_f) + abs(d.phi_g)
            worst["nonneg"] = max(worst["nonneg"], -d.value / scale)
            worst["identity"] = max(worst["identity"], abs(br.divergence(phi, f, f).value))
            f2 = random_positive(space, rng)
            mid = br.divergence(phi, 0.5 * (f + f2), g).value
            avg = 0.5 * (d.value + br.divergence(phi, f2, g).value)
            worst["convex"] = max(worst["convex"], mid - avg)
            lhs, rhs = br.pythagorean_residual(phi, f, g, h)
            worst["pyth"] = max(worst["pyth"], abs(lhs - rhs))
            coeff, c = br.separation_hyperplane(phi, g, h)
            fe = equidistant_point(phi, g, h, rng)
            worst["plane"] = max(worst["plane"], abs(integrate(space, coeff * fe) - c))
        out += [
            Check(f"{name}: non-negativity", worst["nonneg"] <= 1e-10, f"worst {worst['nonneg']:.2e}"),
            Check(f"{name}: d(f,f) = 0", worst["identity"] <= 1e-12, f"worst {worst['identity']:.2e}"),
            Check(f"{name}: convex in f", worst["convex"] <= 1e-10, f"worst {worst['convex']:.2e}"),
            Check(f"{name}: Pythagorean identity", worst["pyth"] <= 1e-9, f"worst {worst['pyth']:.2e}"),
            Check(f"{name}: separating hyperplane", worst["plane"] <= 1e-9, f"worst {worst['plane']:.2e}"),
        ]
    combo = fn.linear_combination([(1.7, phis["tsd"]), (0.3, phis["bias"])])
    w = GridFunction(space, rng.normal(size=cells))
    shifted = fn.affine_shift(phis["tsd"], w, 0.7)
    lin = aff = 0.0
    for _ in range(pairs):
        f, g = random_positive(space, rng), random_positive(space, rng)
        expect = 1.7 * br.divergence(phis["tsd"], f, g).value + 0.3 * br.divergence(phis["bias"], f, g).value
        lin = max(lin, _rel(br.divergence(combo, f, g).value, expect))
        aff = max(aff, _rel(br.divergence(shifted, f, g).value, br.divergence(phis["tsd"], f, g).value))
    out.append(Check("linearity in phi", lin <= 1e-12, f"worst rel {lin:.2e}"))
    out.append(Check("affine-shift equivalence", aff <= 1e-12, f"worst rel {aff:.2e}"))
    for label, pair, phi, tol in (("tsd", br.legendre_pair_tsd(), phis["tsd"], 1e-10),
                                  ("entropy", br.legendre_pair_entropy(), phis["entropy"], 1e-8)):
        worst = 0.0
        for _ in range(pairs):
            f, g = random_positive(space, rng), random_positive(space, rng)
            worst = max(worst, _rel(br.divergence(phi, f, g).value, pair.dual_divergence(f, g)))
        out.append(Check(f"{label}: dual divergence", worst <= tol, f"worst rel {worst:.2e}"))
    gap = 0.0
    for _ in range(pairs):
        pts = rng.choice(np.linspace(-5, 5, 1001), size=4, replace=False)
        x, y = rng.uniform(0.1, 3, 4), rng.uniform(0.1, 3, 4)
        gap = max(gap, br.check_dirac_equivalence(lambda v: float(v @ v), lambda v: 2 * v, pts, x, y))
        gap = max(gap, br.check_dirac_equivalence(
            lambda v: float(np.sum(v * np.log(v))), lambda v: 1 + np.log(v), pts, x, y))
    out.append(Check("Dirac measure reduces to vector Bregman", gap <= 1e-10, f"worst {gap:.2e}"))
    return out


def theorem_suite(seed=2, cells=64, members=5, trials=100) -> list[Check]:
    rng = np.random.default_rng(seed)
    space = make_interval_grid(0.0, 1.0, cells)
    out = []
    for name, make in fn.SHIPPED.items():
        phi = make()
        ens = ex.Ensemble([random_positive(space, rng) for _ in range(members)],
                          rng.dirichlet(np.ones(members)))
        rep = ex.verify_mean_minimizer(phi, ens, trials=trials, eps=1e-2, rng=rng)
        out.append(Check(f"{name}: mean beats {trials} perturbations", rep.passed,
                         f"J(mean)={rep.mean_objective:.6g} min J(perturbed)={rep.min_perturbed_objective:.6g}"))
        mean = ex.ensemble_mean(ens)
        j_mean = ex.expected_divergence(phi, ens, mean)
        result = ex.descend_to_minimizer(phi, ens, space.constant(1.0))
        j_final = ex.expected_divergence(phi, ens, result)
        out.append(Check(f"{name}: descent reaches the minimum value",
                         j_final - j_mean <= 1e-8, f"J gap {j_final - j_mean:.2e}"))
        if name != "bias":
            # squared bias has a whole hyperplane of minimisers; only the value is unique
            dist = lp_norm(space, result - mean, 1)
            out.append(Check(f"{name}: descent lands on the mean", dist <= 1e-3, f"L1 {dist:.2e}"))
    return out


def case_study_suite(seed=3) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    worst = 0.0
    for n in (1, 2, 5, 10, 50):
        s = uc.Sample(rng.uniform(0.1, 1.0, n))
        for metric in uc.Metric:
            b = uc.minimize_scale(lambda v: uc.restricted_objective(v, s, metric), s.x_max)
            worst = max(worst, _rel(b, uc.bayes_uniform_restricted(s, metric).scale))
        d = uc.bayes_unrestricted(s)
        a = uc.minimize_scale(lambda v: uc.projection_objective(v, d), s.x_max)
        worst = max(worst, _rel(a, uc.project_to_uniform(d).scale))
    out.append(Check("numeric minimisers match closed-form scales", worst <= 1e-6, f"worst rel {worst:.2e}"))
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 60))
        s = uc.Sample(rng.uniform(0.1, 1.0, n))
        b = rng.uniform(0.3, 3.0) * s.x_max
        worst = max(worst, abs(uc.restricted_objective(b, s, "lebesgue")
                               / uc.restricted_objective_quadrature(b, s, "lebesgue") - 1))
    out.append(Check("Lebesgue objective closed form vs quadrature", worst <= 1e-8, f"worst rel {worst:.2e}"))
    worst = 0.0
    for n in (1, 5, 50):
        for t2 in (1.0, 3.0, 100.0):
            s = uc.Sample(rng.uniform(0.1, 1.0, n))
            c = 1.0 / s.x_max
            # ratio of regularised lower incomplete gammas times Γ(k-1)/Γ(k) t2^{-1}
            oracle = gammainc(n, c / t2) / (gammainc(n + 1.0, c / t2) * t2 * n)
            worst = max(worst, abs(uc.bayes_parameter(s, uc.GammaPrior(1.0, t2)) / oracle - 1))
    out.append(Check("posterior mean vs incomplete-gamma ratio", worst <= 1e-8, f"worst rel {worst:.2e}"))
    big = uc.bayes_parameter(uc.Sample(rng.uniform(0, 1, 1000) + 1e-12), uc.GammaPrior(1.0, 1.0))
    out.append(Check("posterior mean finite at n = 1000", math.isfinite(big), f"theta={big:.10g}"))
    return out


SUITES = {
    "properties": property_suite,
    "theorem": theorem_suite,
    "case-study": case_study_suite,
}

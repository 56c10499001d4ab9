"""Estimating a scaled uniform density ``U[0, θ]`` from i.i.d. samples.

Four estimators are provided: the maximum-likelihood scale, the posterior
mean of θ under a gamma-type prior, the best uniform density under expected
total squared error (Fisher or Lebesgue differential element on the family),
and the unrestricted posterior-mean density. Errors are total squared
differences against a reference ``U[0, θ]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy.optimize import minimize_scalar

from .errors import InvalidArgumentError, NumericFailureError

QUAD_EPSREL = 1e-13
QUAD_LIMIT = 400
TAIL_RATIO = 1e-16
MIN_XATOL = 1e-10


class Metric(enum.Enum):
    FISHER = "fisher"
    LEBESGUE = "lebesgue"

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidArgumentError(f"unknown metric {value!r}") from None


@dataclass(frozen=True, eq=False)
class Sample:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64).reshape(-1)
        if pts.size == 0:
            raise InvalidArgumentError("sample is empty")
        if not np.all(np.isfinite(pts)) or np.any(pts <= 0):
            raise InvalidArgumentError("sample points must be finite and positive")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return int(self.points.size)

    @property
    def x_max(self) -> float:
        return float(self.points.max())


@dataclass(frozen=True)
class UniformDensity:
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidArgumentError(f"scale must be positive, got {self.scale}")

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where((x >= 0) & (x <= self.scale), 1.0 / self.scale, 0.0)


@dataclass(frozen=True)
class UnrestrictedDensity:
    """``g*(x) = n X^n / ((n+1) max(x, X)^{n+1})`` for ``x >= 0``."""

    n: int
    x_max: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"n must be a positive integer, got {self.n}")
        if not self.x_max > 0:
            raise InvalidArgumentError("x_max must be positive")

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        n, X = self.n, self.x_max
        ratio = X / np.maximum(x, X)
        out = n / ((n + 1) * X) * ratio ** (n + 1)
        return np.where(x >= 0, out, 0.0)

    def cdf(self, x):
        """Mass on ``[0, x]``."""
        n, X = self.n, self.x_max
        x = np.asarray(x, dtype=np.float64)
        inside = np.clip(x, 0.0, X) * n / ((n + 1) * X)
        tail = 1.0 - (X / np.maximum(x, X)) ** n / (n + 1)
        return np.where(x <= X, inside, tail)

    def squared_l2(self) -> float:
        """``∫ g*² dx``."""
        n = self.n
        return 2.0 * n * n / ((n + 1) * (2 * n + 1) * self.x_max)


@dataclass(frozen=True)
class GammaPrior:
    t1: float
    t2: float

    def __post_init__(self):
        if not (self.t1 > 0 and self.t2 > 0):
            raise InvalidArgumentError(f"prior parameters must be positive: {self}")


def mle(s: Sample) -> UniformDensity:
    return UniformDensity(s.x_max)


def _log_truncated_gamma_integral(k, c, t2):
    """``log ∫_0^c u^{k-1} e^{-u/t2} du`` by adaptive quadrature.

    The integrand is rescaled by its maximum on ``[0, c]`` before
    exponentiating, so large ``k`` neither overflows nor underflows.
    """
    if not k > 0:
        raise InvalidArgumentError(f"integral diverges for exponent k={k}")
    if k < 1:
        # integrable singularity at 0: let QAWS handle u^{k-1}
        val, err, *rest = sp_integrate.quad(
            lambda u: math.exp(-u / t2), 0.0, c, weight="alg", wvar=(k - 1.0, 0.0),
            epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, full_output=1)
        _check_quad(val, err, rest, k=k, c=c, t2=t2)
        return math.log(val)
    peak = min(c, (k - 1.0) * t2)
    log_peak = (k - 1.0) * math.log(peak) - peak / t2 if peak > 0 else 0.0

    def scaled(u):
        if u <= 0.0:
            return 1.0 if k == 1 else 0.0
        return math.exp((k - 1.0) * math.log(u) - u / t2 - log_peak)

    # the mass sits within a few widths of the peak; split there
    width = math.sqrt(k) * t2 if peak < c else c / k
    points = sorted({p for p in (peak - 8 * width, peak, peak - 40 * width)
                     if 0.0 < p < c})
    val, err, *rest = sp_integrate.quad(
        scaled, 0.0, c, points=points or None, epsabs=0.0,
        epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, full_output=1)
    _check_quad(val, err, rest, k=k, c=c, t2=t2)
    return log_peak + math.log(val)


def _check_quad(val, err, rest, **context):
    info = rest[0] if rest else {}
    if len(rest) >= 2 and rest[1] and "roundoff" not in str(rest[1]):
        raise NumericFailureError(
            f"quadrature did not converge: {rest[1]}",
            {"value": val, "abserr": err, "neval": info.get("neval"), **context})
    if not (val > 0 and math.isfinite(val)):
        raise NumericFailureError(
            "quadrature returned a non-positive or non-finite value",
            {"value": val, "abserr": err, **context})


def bayes_parameter(s: Sample, prior: GammaPrior) -> float:
    """Posterior mean of θ with likelihood ``θ^{-n}`` on ``θ >= X_max``.

    Both integrals of the ratio are mapped by ``u = 1/θ`` onto
    ``∫_0^{1/X_max} u^{k-1} e^{-u/t2} du`` with ``k = n + t1 - 1`` (numerator)
    and ``k = n + t1`` (denominator).
    """
    n, X = s.n, s.x_max
    c = 1.0 / X
    log_num = _log_truncated_gamma_integral(n + prior.t1 - 1.0, c, prior.t2)
    log_den = _log_truncated_gamma_integral(n + prior.t1, c, prior.t2)
    theta = math.exp(log_num - log_den)
    if not (math.isfinite(theta) and theta > X):
        raise NumericFailureError(
            "posterior mean fell outside [X_max, inf)",
            {"theta": theta, "x_max": X, "n": n, "t1": prior.t1, "t2": prior.t2})
    return theta


def restricted_exponent(n: int, metric) -> float:
    """``m`` with restricted scale ``2^{1/m} X_max``: ``n`` (Fisher) or ``n + 1/2``."""
    return n if Metric.parse(metric) is Metric.FISHER else n + 0.5


def bayes_uniform_restricted(s: Sample, metric=Metric.FISHER) -> UniformDensity:
    m = restricted_exponent(s.n, metric)
    return UniformDensity(2.0 ** (1.0 / m) * s.x_max)


def _restricted_closed_form_scaled(r, m):
    """``∫_1^∞ |r - a| / r · a^{-(m+2)} da``: the objective in units of ``X_max``."""
    if r >= 1.0:
        return 2.0 / (m * (m + 1.0) * r ** (m + 1.0)) - 1.0 / (m * r) + 1.0 / (m + 1.0)
    # every a lies above r
    return 1.0 / (m * r) - 1.0 / (m + 1.0)


def _restricted_quadrature_scaled(r, p):
    """``∫_1^∞ |r - a| / (a r) · a^{-p} da`` by quadrature plus an analytic tail."""

    def integrand(a):
        return abs(r - a) / (a * r) * a ** (-p)

    upper = max(r, 1.0) * TAIL_RATIO ** (-1.0 / (p - 1.0))
    pieces = [1.0, r, upper] if 1.0 < r < upper else [1.0, upper]
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        # integrate in log a; the integrand decays geometrically there
        val, err, *rest = sp_integrate.quad(
            lambda t: integrand(math.exp(t)) * math.exp(t), math.log(lo), math.log(hi),
            epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, full_output=1)
        if len(rest) >= 2 and rest[1] and "roundoff" not in str(rest[1]):
            raise NumericFailureError(f"quadrature did not converge: {rest[1]}",
                                      {"r": r, "p": p, "lo": lo, "hi": hi})
        total += val
    # ∫_A^∞ (a - r)/(a r) a^{-p} da, valid because A > r
    tail = upper ** (1.0 - p) / ((p - 1.0) * r) - upper ** (-p) / p
    return total + tail


def restricted_objective(b: float, s: Sample, metric=Metric.LEBESGUE) -> float:
    """Expected total squared error of ``U[0, b]`` under the likelihood.

    ``∫_{X_max}^∞ |b - a|/(ab) · a^{-n} · w(a) da`` with ``w(a) = a^{-3/2}``
    (Lebesgue arc element, closed form) or ``w(a) = 1/a`` (Fisher element,
    quadrature).
    """
    if not b > 0:
        raise InvalidArgumentError(f"b must be positive, got {b}")
    metric = Metric.parse(metric)
    X = s.x_max
    if metric is Metric.LEBESGUE:
        m = s.n + 0.5
        return X ** (-(m + 1.0)) * _restricted_closed_form_scaled(b / X, m)
    p = s.n + 1.0
    return X ** (-p) * _restricted_quadrature_scaled(b / X, p)


def restricted_objective_quadrature(b: float, s: Sample, metric=Metric.LEBESGUE) -> float:
    """Same integral as :func:`restricted_objective`, always by quadrature."""
    if not b > 0:
        raise InvalidArgumentError(f"b must be positive, got {b}")
    p = s.n + (1.5 if Metric.parse(metric) is Metric.LEBESGUE else 1.0)
    return s.x_max ** (-p) * _restricted_quadrature_scaled(b / s.x_max, p)


def minimize_scale(objective, x_max: float, xatol=MIN_XATOL) -> float:
    """Minimise a scalar objective of the scale over ``[x_max, 10 x_max]``.

    Uses scipy's bounded Brent search (golden section with parabolic steps).
    """
    res = minimize_scalar(objective, bounds=(x_max, 10.0 * x_max), method="bounded",
                          options={"xatol": xatol, "maxiter": 2000})
    if not res.success:
        raise NumericFailureError(f"scale minimisation failed: {res.message}",
                                  {"x": res.x, "fun": res.fun})
    return float(res.x)


def fisher_information(a: float) -> float:
    if not a > 0:
        raise InvalidArgumentError(f"a must be positive, got {a}")
    return 1.0 / (a * a)


def bayes_unrestricted(s: Sample) -> UnrestrictedDensity:
    return UnrestrictedDensity(s.n, s.x_max)


def project_to_uniform(d: UnrestrictedDensity) -> UniformDensity:
    """Closest uniform density to ``g*`` in total squared error."""
    return UniformDensity(2.0 ** (1.0 / d.n) * d.x_max)


def projection_objective(a: float, d: UnrestrictedDensity) -> float:
    """``∫_0^∞ (1_{[0,a]}/a - g*)² dx`` by piecewise quadrature.

    Breakpoints sit at ``a`` and ``X_max``; beyond both the integrand is the
    pure power law ``g*²``, whose tail is added in closed form.
    """
    if not a > 0:
        raise InvalidArgumentError(f"a must be positive, got {a}")
    lo, hi = sorted((a, d.x_max))

    def integrand(x):
        h = 1.0 / a if x <= a else 0.0
        return (h - float(d.pdf(x))) ** 2

    total = 0.0
    for u, v in ((0.0, lo), (lo, hi)):
        if v > u:
            total += sp_integrate.quad(integrand, u, v, epsabs=0.0,
                                       epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)[0]
    n, X = d.n, d.x_max
    coef = (n * X ** n / (n + 1)) ** 2
    total += coef * hi ** (-(2 * n + 1)) / (2 * n + 1)
    return total


def uniform_sq_error(b: float, theta: float) -> float:
    """``∫ (1_{[0,b]}/b - 1_{[0,θ]}/θ)² dx = |b - θ| / (bθ)``."""
    if not (b > 0 and theta > 0):
        raise InvalidArgumentError("scales must be positive")
    return abs(b - theta) / (b * theta)


def unrestricted_sq_error(d: UnrestrictedDensity, theta: float) -> float:
    """``∫ (g* - 1_{[0,θ]}/θ)² dx`` in closed form.

    Expands to ``∫ g*² - 2 G(θ)/θ + 1/θ`` with ``G`` the cdf of ``g*``.
    """
    if not theta > 0:
        raise InvalidArgumentError("theta must be positive")
    err = d.squared_l2() - 2.0 * float(d.cdf(theta)) / theta + 1.0 / theta
    return max(err, 0.0)

"""Discrete measure spaces and nonnegative functions sampled on them.

A :class:`MeasureSpace` is a finite set of nodes with a weight per node.
Interval grids use midpoint-rule weights; Dirac sums carry point masses.
Either way ``integrate`` is a weighted sum, so everything downstream is
agnostic to which kind of measure it is handed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainViolationError,
    IncompatibleSpaceError,
    InvalidArgumentError,
    InvalidDomainError,
)


class SpaceKind(enum.Enum):
    INTERVAL_QUADRATURE = "interval"
    DIRAC_SUM = "dirac"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    kind: SpaceKind
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = _frozen(self.nodes).reshape(-1)
        weights = _frozen(self.weights).reshape(-1)
        if nodes.size == 0:
            raise InvalidArgumentError("a measure space needs at least one node")
        if nodes.shape != weights.shape:
            raise InvalidArgumentError(
                f"{nodes.size} nodes but {weights.size} weights")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidArgumentError("nodes must be strictly increasing")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InvalidArgumentError("weights must be finite and nonnegative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def same_as(self, other: "MeasureSpace") -> bool:
        if self is other:
            return True
        return (self.kind == other.kind
                and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.weights, other.weights))

    def restrict(self, mask) -> "MeasureSpace":
        """Sub-space made of the nodes selected by a boolean ``mask``."""
        mask = np.asarray(mask, dtype=bool)
        return MeasureSpace(self.kind, self.nodes[mask], self.weights[mask])

    def function(self, values) -> "GridFunction":
        return GridFunction(self, values)

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Evaluate a vectorised callable at the nodes."""
        return GridFunction(self, np.broadcast_to(fn(self.nodes), self.nodes.shape))

    def constant(self, c: float) -> "GridFunction":
        return GridFunction(self, np.full(self.nodes.shape, float(c)))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values at the nodes of a :class:`MeasureSpace`.

    Values may be signed; use :meth:`require_nonnegative` where membership in
    the nonnegative cone matters. Supports ``+``, ``-`` and scalar ``*``/``/``
    with another function on the same space.
    """

    space: MeasureSpace
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _frozen(self.values).reshape(-1)
        if values.size != len(self.space):
            raise InvalidArgumentError(
                f"expected {len(self.space)} values, got {values.size}")
        object.__setattr__(self, "values", values)

    def _check(self, other: "GridFunction"):
        if not self.space.same_as(other.space):
            raise IncompatibleSpaceError("grid functions live on different spaces")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.space, self.values + other.values)
        return GridFunction(self.space, self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.space, self.values - other.values)
        return GridFunction(self.space, self.values - float(other))

    def __rsub__(self, other):
        return GridFunction(self.space, float(other) - self.values)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.space, self.values * other.values)
        return GridFunction(self.space, self.values * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.space, self.values / other.values)
        return GridFunction(self.space, self.values / float(other))

    def __neg__(self):
        return GridFunction(self.space, -self.values)

    def map(self, fn) -> "GridFunction":
        return GridFunction(self.space, fn(self.values))

    def allclose(self, other: "GridFunction", atol=0.0, rtol=0.0) -> bool:
        self._check(other)
        return bool(np.allclose(self.values, other.values, atol=atol, rtol=rtol))

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def require_nonnegative(self, what="function") -> "GridFunction":
        if not self.is_nonnegative():
            raise DomainViolationError(f"{what} must be nonnegative at every node")
        return self


def make_interval_grid(a: float, b: float, cells: int) -> MeasureSpace:
    """Midpoint-rule grid with ``cells`` equal cells on ``[a, b]``."""
    if int(cells) != cells or cells < 1:
        raise InvalidArgumentError(f"cells must be a positive integer, got {cells!r}")
    if not a < b:
        raise InvalidDomainError(f"need a < b, got a={a}, b={b}")
    cells = int(cells)
    h = (b - a) / cells
    nodes = a + (np.arange(cells) + 0.5) * h
    return MeasureSpace(SpaceKind.INTERVAL_QUADRATURE, nodes, np.full(cells, h))


def make_dirac(points: Sequence[float], masses: Sequence[float] | None = None) -> MeasureSpace:
    """Sum of point masses at ``points`` (unit masses by default).

    Points need not be given in order; they are sorted together with their
    masses.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1)
    if masses is None:
        masses = np.ones_like(points)
    masses = np.asarray(masses, dtype=np.float64).reshape(-1)
    if masses.shape != points.shape:
        raise InvalidArgumentError("points and masses differ in length")
    if np.unique(points).size != points.size:
        raise InvalidArgumentError("Dirac points must be distinct")
    order = np.argsort(points, kind="stable")
    return MeasureSpace(SpaceKind.DIRAC_SUM, points[order], masses[order])


def integrate(space: MeasureSpace, f: GridFunction) -> float:
    if not space.same_as(f.space):
        raise IncompatibleSpaceError("function is not defined on this space")
    return float(np.dot(space.weights, f.values))


def lp_norm(space: MeasureSpace, f: GridFunction, p: float = 2.0) -> float:
    if not space.same_as(f.space):
        raise IncompatibleSpaceError("function is not defined on this space")
    if np.isnan(p) or p < 1:
        raise InvalidArgumentError(f"p must be >= 1 or inf, got {p}")
    absf = np.abs(f.values)
    if np.isinf(p):
        return float(np.max(absf))
    if p == 1:
        return float(np.dot(space.weights, absf))
    if p == 2:
        return float(np.sqrt(np.dot(space.weights, absf * absf)))
    return float(np.dot(space.weights, absf ** p) ** (1.0 / p))

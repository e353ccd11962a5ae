"""Convex bodies (balls, horoballs, tubes), their distances and closest-point maps."""

from __future__ import annotations
from abc import ABC, abstractmethod
from dataclasses import dataclass
import math
from typing import Final
from typing_extensions import override

from scipy.optimize import minimize_scalar

from hypcount.errors import (
    ClassificationError,
    ContainmentError,
    DimensionMismatchError,
    ParameterError,
    UndefinedProjectionError,
)
from hypcount.geometry.hypgeom import (
    busemann_cocycle,
    dist,
    dist_point_to_line,
    foot_of_perpendicular,
    line_through,
    point_along,
)
from hypcount.geometry.points import GeodesicLine, HPoint
from hypcount.moebius import (
    MobiusMap,
    apply,
    axis,
    classify,
    complex_translation_length,
    standardizing_map,
)
from hypcount.types import BodyKind, Dimension, IsometryKind

__all__ = [
    "Ball",
    "ConvexBody",
    "Horoball",
    "Tube",
    "body_distance",
    "closest_point_on_body",
    "common_perpendicular",
    "cusp_horoball",
    "margulis_tube",
    "to_infinity",
]

_GOLDEN_XTOL: Final[float] = 1e-11


def _point_key(p: HPoint) -> tuple[float, ...]:
    if p.z is None:
        return (1.0, 0.0, 0.0, 0.0)
    return (0.0, p.z.real, p.z.imag, -1.0 if p.h is None else p.h)


def to_infinity(xi: HPoint) -> MobiusMap:
    """A map sending the boundary point ``xi`` to ∞ (the identity when ``xi`` is ∞)."""
    if xi.z is None:
        return MobiusMap.identity(dim=xi.dim)
    return MobiusMap(0, -1, 1, -xi.z, dim=xi.dim)


class ConvexBody(ABC):
    """A closed convex subset of H² or H³ with a closed-form geometry."""

    kind: BodyKind

    @property
    @abstractmethod
    def dim(self) -> Dimension: ...

    @abstractmethod
    def translate(self, g: MobiusMap) -> ConvexBody:
        """The image of the body under ``g``."""

    @abstractmethod
    def contains(self, x: HPoint, *, tol: float = 0.0) -> bool:
        """Whether ``x`` lies in the closed body (for boundary points: in its closure)."""

    @abstractmethod
    def isclose(self, other: ConvexBody, *, tol: float = 1e-8) -> bool: ...

    @abstractmethod
    def sort_key(self) -> tuple[float, ...]: ...


@dataclass(frozen=True)
class Ball(ConvexBody):
    center: HPoint
    radius: float
    kind = BodyKind.BALL

    def __post_init__(self) -> None:
        if not self.center.is_interior:
            raise ParameterError("The center of a ball must be an interior point.")
        if not self.radius > 0:
            raise ParameterError(f"Ball radius must be positive, got {self.radius}.")

    @property
    @override
    def dim(self) -> Dimension:
        return self.center.dim

    @override
    def translate(self, g: MobiusMap) -> Ball:
        return Ball(apply(g, self.center), self.radius)

    @override
    def contains(self, x: HPoint, *, tol: float = 0.0) -> bool:
        return x.is_interior and dist(self.center, x) <= self.radius + tol

    @override
    def isclose(self, other: ConvexBody, *, tol: float = 1e-8) -> bool:
        return (
            isinstance(other, Ball)
            and abs(self.radius - other.radius) <= tol
            and dist(self.center, other.center) <= tol
        )

    @override
    def sort_key(self) -> tuple[float, ...]:
        return (0.0, *_point_key(self.center), self.radius)


@dataclass(frozen=True)
class Horoball(ConvexBody):
    """A horoball based at ``base``.

    ``size`` is the Euclidean diameter for a finite base and the height of the bounding
    horizontal plane when the base is ∞.
    """

    base: HPoint
    size: float
    kind = BodyKind.HOROBALL

    def __post_init__(self) -> None:
        if not self.base.is_boundary:
            raise ParameterError("A horoball is based at a boundary point.")
        if not (self.size > 0 and math.isfinite(self.size)):
            raise ParameterError(f"Horoball size must be positive, got {self.size}.")

    @property
    @override
    def dim(self) -> Dimension:
        return self.base.dim

    def top(self) -> HPoint:
        """A point of the bounding horosphere."""
        if self.base.z is None:
            return HPoint.interior(0, self.size, dim=self.dim)
        return HPoint.interior(self.base.z, self.size, dim=self.dim)

    def height_at_infinity(self) -> float:
        """Height of the horosphere after sending the base to ∞ with :func:`to_infinity`."""
        return self.size if self.base.is_infinity else 1.0 / self.size

    @override
    def translate(self, g: MobiusMap) -> Horoball:
        base = apply(g, self.base)
        top = apply(g, self.top())
        if base.z is None:
            return Horoball(base, top.height)
        size = (abs(top.horizontal - base.z) ** 2 + top.height**2) / top.height
        return Horoball(base, size)

    @override
    def contains(self, x: HPoint, *, tol: float = 0.0) -> bool:
        if x.is_boundary:
            return x.isclose(self.base)
        if self.base.z is None:
            return x.height >= self.size - tol
        return (abs(x.horizontal - self.base.z) ** 2 + x.height**2) / x.height <= self.size + tol

    @override
    def isclose(self, other: ConvexBody, *, tol: float = 1e-8) -> bool:
        return (
            isinstance(other, Horoball)
            and self.base.isclose(other.base, tol=tol)
            and abs(self.size - other.size) <= tol * max(1.0, self.size)
        )

    @override
    def sort_key(self) -> tuple[float, ...]:
        return (1.0, *_point_key(self.base), self.size)


@dataclass(frozen=True)
class Tube(ConvexBody):
    """The closed ``radius``-neighbourhood of a geodesic (the geodesic itself for radius 0)."""

    axis: GeodesicLine
    radius: float = 0.0
    kind = BodyKind.TUBE

    def __post_init__(self) -> None:
        if not (self.radius >= 0 and math.isfinite(self.radius)):
            raise ParameterError(f"Tube radius must be nonnegative, got {self.radius}.")

    @property
    @override
    def dim(self) -> Dimension:
        return self.axis.dim

    @override
    def translate(self, g: MobiusMap) -> Tube:
        return Tube(GeodesicLine(apply(g, self.axis.start), apply(g, self.axis.end)), self.radius)

    @override
    def contains(self, x: HPoint, *, tol: float = 0.0) -> bool:
        if x.is_boundary:
            return self.axis.has_endpoint(x)
        return dist_point_to_line(x, self.axis) <= self.radius + tol

    @override
    def isclose(self, other: ConvexBody, *, tol: float = 1e-8) -> bool:
        if not (isinstance(other, Tube) and abs(self.radius - other.radius) <= tol):
            return False
        # the axis is an unoriented set
        return (
            self.axis.start.isclose(other.axis.start, tol=tol)
            and self.axis.end.isclose(other.axis.end, tol=tol)
        ) or (
            self.axis.start.isclose(other.axis.end, tol=tol)
            and self.axis.end.isclose(other.axis.start, tol=tol)
        )

    @override
    def sort_key(self) -> tuple[float, ...]:
        first, second = sorted((_point_key(self.axis.start), _point_key(self.axis.end)))
        return (2.0, *first, *second, self.radius)


def _horoball_pair(a: Horoball, b: Horoball) -> float:
    if a.base.isclose(b.base):
        return -math.inf
    if a.base.z is None:
        return math.log(a.size / b.size)
    if b.base.z is None:
        return math.log(b.size / a.size)
    return 2.0 * math.log(abs(a.base.z - b.base.z) / math.sqrt(a.size * b.size))


def _horoball_tube(h: Horoball, t: Tube) -> float:
    if t.axis.has_endpoint(h.base):
        return -math.inf
    frame = to_infinity(h.base)
    u = apply(frame, t.axis.start).horizontal
    v = apply(frame, t.axis.end).horizontal
    return math.log(h.height_at_infinity() / (abs(u - v) / 2.0)) - t.radius


def _axis_gap(first: GeodesicLine, second: GeodesicLine) -> tuple[float, HPoint]:
    """Distance between two geodesics without common endpoints and the point of ``first``
    closest to ``second``.

    Golden-section search along ``first`` (sent to the vertical axis) with the exact
    point-to-line distance to ``second`` as the inner minimiser.
    """
    frame = standardizing_map(first)
    image = GeodesicLine(apply(frame, second.start), apply(frame, second.end))
    radii = sorted((abs(image.start.horizontal), abs(image.end.horizontal)))
    lo, hi = math.log(radii[0]), math.log(radii[1])
    if hi - lo < 1e-3:
        lo, hi = lo - 0.5, hi + 0.5
    dim = first.dim

    def _objective(s: float) -> float:
        return dist_point_to_line(HPoint.interior(0, math.exp(s), dim=dim), image)

    result = minimize_scalar(
        _objective, bracket=(lo, hi), method="golden", options={"xtol": _GOLDEN_XTOL}
    )
    height = math.exp(float(result.x))
    point = apply(frame.inverse(), HPoint.interior(0, height, dim=dim))
    return float(result.fun), point


def _tube_pair(a: Tube, b: Tube) -> float:
    if a.axis.has_endpoint(b.axis.start) or a.axis.has_endpoint(b.axis.end):
        return -math.inf
    gap, _ = _axis_gap(a.axis, b.axis)
    return gap - a.radius - b.radius


def body_distance(a: ConvexBody, b: ConvexBody) -> float:
    """Signed distance between two convex bodies, i.e. the length of their common perpendicular.

    Nonpositive values indicate overlap; bodies sharing an ideal point give ``-inf``. The
    arguments are put in a canonical order first, so the function is exactly symmetric.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError("Bodies live in spaces of different dimension.")
    if b.sort_key() < a.sort_key():
        a, b = b, a
    if isinstance(a, Ball):
        if isinstance(b, Ball):
            return dist(a.center, b.center) - a.radius - b.radius
        if isinstance(b, Horoball):
            return busemann_cocycle(b.base, a.center, b.top()) - a.radius
        if isinstance(b, Tube):
            return dist_point_to_line(a.center, b.axis) - a.radius - b.radius
    elif isinstance(a, Horoball):
        if isinstance(b, Horoball):
            return _horoball_pair(a, b)
        if isinstance(b, Tube):
            return _horoball_tube(a, b)
    elif isinstance(a, Tube) and isinstance(b, Tube):
        return _tube_pair(a, b)
    raise TypeError(f"Unsupported body pair: {type(a).__name__}, {type(b).__name__}.")


def closest_point_on_body(body: ConvexBody, target: HPoint) -> HPoint:
    """The nearest-point projection onto ``body`` of an interior or boundary ``target``.

    :raises ContainmentError: If an interior target lies in the closed body.
    :raises UndefinedProjectionError: If a boundary target is an ideal point of the body.
    """
    if target.dim != body.dim:
        raise DimensionMismatchError("Body and target live in spaces of different dimension.")
    if isinstance(body, Ball):
        if target.is_interior and dist(body.center, target) <= body.radius:
            raise ContainmentError(f"{target} lies inside the ball about {body.center}.")
        return point_along(line_through(body.center, target), body.center, body.radius)
    if isinstance(body, Horoball):
        if target.is_boundary and target.isclose(body.base):
            raise UndefinedProjectionError(f"{target} is the base of the horoball.")
        frame = to_infinity(body.base)
        image = apply(frame, target)
        height = body.height_at_infinity()
        if image.is_interior and image.height >= height:
            raise ContainmentError(f"{target} lies inside the horoball based at {body.base}.")
        return apply(frame.inverse(), HPoint.interior(image.horizontal, height, dim=body.dim))
    if isinstance(body, Tube):
        if target.is_boundary and body.axis.has_endpoint(target):
            raise UndefinedProjectionError(f"{target} is an endpoint of the tube axis.")
        if target.is_interior and dist_point_to_line(target, body.axis) <= body.radius:
            raise ContainmentError(f"{target} lies inside the tube about {body.axis}.")
        foot = foot_of_perpendicular(body.axis, target)
        if body.radius == 0:
            return foot
        return point_along(line_through(foot, target), foot, body.radius)
    raise TypeError(f"Unsupported body type: {type(body).__name__}.")


def _core_anchor(body: ConvexBody, other: ConvexBody) -> HPoint:
    """The point of the core (center, base or axis) of ``body`` nearest to ``other``."""
    if isinstance(body, Ball):
        return body.center
    if isinstance(body, Horoball):
        return body.base
    assert isinstance(body, Tube)
    if isinstance(other, Ball):
        return foot_of_perpendicular(body.axis, other.center)
    if isinstance(other, Horoball):
        return foot_of_perpendicular(body.axis, other.base)
    assert isinstance(other, Tube)
    return _axis_gap(body.axis, other.axis)[1]


def common_perpendicular(a: ConvexBody, b: ConvexBody) -> tuple[HPoint, HPoint]:
    """Feet ``(p⁻, p⁺)`` on ``∂a`` and ``∂b`` of the orthogeodesic between disjoint bodies.

    :raises ContainmentError: If the bodies overlap.
    """
    gap = body_distance(a, b)
    if gap <= 0:
        raise ContainmentError(f"Bodies overlap (signed distance {gap:.6g}).")
    foot_a = closest_point_on_body(a, _core_anchor(b, a))
    return foot_a, closest_point_on_body(b, foot_a)


def margulis_tube(g: MobiusMap, epsilon: float) -> Tube | None:
    """The component ``{p : d(p, g·p) ≤ ε}`` of the thin part about the axis of a loxodromic.

    :returns: ``None`` when ``ε`` is below the translation length.
    """
    if epsilon <= 0:
        raise ParameterError(f"Margulis constant must be positive, got {epsilon}.")
    line = axis(g)
    complex_length = complex_translation_length(g)
    tau = complex_length.real
    theta = complex_length.imag if g.dim == 3 else 0.0
    if epsilon < tau:
        return None
    # cosh d(p, g p) = cosh τ cosh² r - cos θ sinh² r at distance r from the axis
    ratio = (math.cosh(epsilon) - math.cos(theta)) / (math.cosh(tau) - math.cos(theta))
    return Tube(line, math.acosh(math.sqrt(max(ratio, 1.0))))


def cusp_horoball(g: MobiusMap, epsilon: float) -> Horoball:
    """The horoball ``{p : d(p, g·p) ≤ ε}`` about the fixed point of a parabolic."""
    if epsilon <= 0:
        raise ParameterError(f"Margulis constant must be positive, got {epsilon}.")
    kind = classify(g).kind
    if kind is not IsometryKind.PARABOLIC:
        raise ClassificationError(f"Cusp neighbourhoods need a parabolic, got {kind}.")
    a, _, c, d = g.entries
    if abs(c) <= 1e-14 * max(abs(a), 1.0):
        fixed = HPoint.infinity(dim=g.dim)
    else:
        fixed = HPoint.boundary((a - d) / (2 * c), dim=g.dim)
    frame = to_infinity(fixed)
    conjugate = frame @ g @ frame.inverse()
    shift = abs(conjugate.b / conjugate.d)
    height = shift / (2.0 * math.sinh(epsilon / 2.0))
    return Horoball(HPoint.infinity(dim=g.dim), height).translate(frame.inverse())

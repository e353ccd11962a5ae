"""Distances, Busemann cocycles, Gromov products and geodesics in H² and H³."""

from __future__ import annotations
from dataclasses import dataclass, replace
import math
from typing import Final

import numpy as np

from hypcount.errors import ParameterError, UndefinedProjectionError
from hypcount.geometry.points import GeodesicLine, HPoint, check_dims
from hypcount.moebius import apply, basepoint_frame, standardizing_map
from hypcount.types import NDArrayB, NDArrayC, NDArrayF

__all__ = [
    "OrientedVector",
    "busemann_array",
    "busemann_cocycle",
    "dist",
    "dist_point_to_line",
    "foot_of_perpendicular",
    "gromov_product",
    "line_through",
    "point_along",
]

_AXIS_TOL: Final[float] = 1e-14


def _require_interior(*points: HPoint) -> None:
    for point in points:
        if not point.is_interior:
            raise ParameterError(f"Expected an interior point, got boundary point {point}.")


def dist(x: HPoint, y: HPoint) -> float:
    """Hyperbolic distance between interior points.

    ``cosh d = 1 + (|Δz|² + Δh²) / (2 h_x h_y)``, evaluated through ``sinh(d/2)``.
    """
    check_dims(x, y)
    _require_interior(x, y)
    chord = math.hypot(abs(x.horizontal - y.horizontal), x.height - y.height)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(x.height * y.height)))


def busemann_cocycle(xi: HPoint, x: HPoint, y: HPoint) -> float:
    """``β_ξ(x, y) = lim_t d(ρ(t), x) - d(ρ(t), y)`` along any ray ``ρ`` converging to ``ξ``."""
    check_dims(xi, x, y)
    if not xi.is_boundary:
        raise ParameterError(f"Busemann cocycles are based at boundary points, got {xi}.")
    _require_interior(x, y)
    if xi.z is None:
        return math.log(y.height / x.height)
    num = y.height * (abs(x.horizontal - xi.z) ** 2 + x.height**2)
    den = x.height * (abs(y.horizontal - xi.z) ** 2 + y.height**2)
    return math.log(num / den)


def busemann_array(xi: NDArrayC, at_infinity: NDArrayB, x: HPoint, y: HPoint) -> NDArrayF:
    """Vectorised :func:`busemann_cocycle` over boundary points ``xi`` (entries flagged in
    ``at_infinity`` stand for ∞ and their ``xi`` value is ignored)."""
    check_dims(x, y)
    _require_interior(x, y)
    finite = np.log(
        (y.height * (np.abs(x.horizontal - xi) ** 2 + x.height**2))
        / (x.height * (np.abs(y.horizontal - xi) ** 2 + y.height**2))
    )
    return np.where(at_infinity, math.log(y.height / x.height), finite)


def dist_point_to_line(x: HPoint, line: GeodesicLine) -> float:
    check_dims(x, line)
    _require_interior(x)
    image = apply(standardizing_map(line), x)
    return math.asinh(abs(image.horizontal) / image.height)


def point_along(line: GeodesicLine, p: HPoint, t: float) -> HPoint:
    """The point of ``line`` at signed distance ``t`` (positive towards ``line.end``) from the foot
    of the perpendicular dropped from ``p``.

    :raises UndefinedProjectionError: If ``p`` is an endpoint of the line.
    """
    check_dims(p, line)
    frame = standardizing_map(line)
    image = apply(frame, p)
    if image.z is None:
        raise UndefinedProjectionError(f"{p} is an endpoint of {line}.")
    height = math.hypot(abs(image.z), image.h or 0.0)
    if height == 0.0:
        raise UndefinedProjectionError(f"{p} is an endpoint of {line}.")
    return apply(frame.inverse(), HPoint.interior(0, height * math.exp(t), dim=line.dim))


def foot_of_perpendicular(line: GeodesicLine, p: HPoint) -> HPoint:
    return point_along(line, p, 0.0)


def line_through(x: HPoint, y: HPoint) -> GeodesicLine:
    """The geodesic through the interior point ``x`` and ``y``, oriented from ``x`` to ``y``.

    ``y`` may be interior or a boundary point.
    """
    dim = check_dims(x, y)
    _require_interior(x)
    frame = basepoint_frame(x)
    target = apply(frame.inverse(), y)
    zero, infinity = HPoint.boundary(0, dim=dim), HPoint.infinity(dim=dim)
    if target.z is None:
        line = GeodesicLine(zero, infinity)
    else:
        r = abs(target.z)
        k = target.h or 0.0
        if r <= _AXIS_TOL * max(1.0, k):
            if target.is_interior and k == 1.0:
                raise ParameterError("A geodesic needs two distinct points.")
            line = GeodesicLine(zero, infinity) if k > 1.0 else GeodesicLine(infinity, zero)
        else:
            # the geodesic is the half-circle through j and the target in their vertical plane
            u = target.z / r
            centre = (r * r + k * k - 1.0) / (2.0 * r)
            radius = math.hypot(centre, 1.0)
            line = GeodesicLine(
                HPoint.boundary(u * (centre - radius), dim=dim),
                HPoint.boundary(u * (centre + radius), dim=dim),
            )
    return GeodesicLine(apply(frame, line.start), apply(frame, line.end))


def gromov_product(line: GeodesicLine, basepoint: HPoint, *, y: HPoint | None = None) -> float:
    """``(v₋|v₊)_{x₀} = ½(β_{v₋}(x₀, y) + β_{v₊}(x₀, y))`` for ``y`` on the line.

    The value does not depend on ``y`` (the foot of the perpendicular by default), is nonnegative
    and equals ``log cosh d(x₀, line)``.
    """
    check_dims(line, basepoint)
    _require_interior(basepoint)
    if y is None:
        y = foot_of_perpendicular(line, basepoint)
    return 0.5 * (
        busemann_cocycle(line.start, basepoint, y) + busemann_cocycle(line.end, basepoint, y)
    )


@dataclass(frozen=True)
class OrientedVector:
    """A unit tangent vector to ``line``, located by its signed arclength from the foot of the
    perpendicular dropped from ``reference``."""

    line: GeodesicLine
    basetime: float
    reference: HPoint

    def __post_init__(self) -> None:
        check_dims(self.line, self.reference)
        _require_interior(self.reference)

    def base_point(self) -> HPoint:
        return point_along(self.line, self.reference, self.basetime)

    def flow(self, t: float) -> OrientedVector:
        """The image under the geodesic flow for time ``t``."""
        return replace(self, basetime=self.basetime + t)

    def hopf_time(self, basepoint: HPoint) -> float:
        """Time coordinate of the Hopf parametrisation: ``β_{v₊}(x₀, π(v))``."""
        return busemann_cocycle(self.line.end, basepoint, self.base_point())

    def reversed(self) -> OrientedVector:
        return OrientedVector(self.line.reversed(), -self.basetime, self.reference)

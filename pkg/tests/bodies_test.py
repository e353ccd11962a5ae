"""Test body distances, projections, common perpendiculars and thin-part neighbourhoods."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from hypcount.errors import (
    ClassificationError,
    ContainmentError,
    DimensionMismatchError,
    ParameterError,
    UndefinedProjectionError,
)
from hypcount.geometry.bodies import (
    Ball,
    ConvexBody,
    Horoball,
    Tube,
    body_distance,
    closest_point_on_body,
    common_perpendicular,
    cusp_horoball,
    margulis_tube,
)
from hypcount.geometry.hypgeom import dist, dist_point_to_line
from hypcount.geometry.points import GeodesicLine, HPoint
from hypcount.moebius import MobiusMap, apply, displacement_at

INF2 = HPoint.infinity(dim=2)


def pt(z: complex | float, h: float) -> HPoint:
    return HPoint.interior(z, h, dim=2)


def line(a: float | None, b: float | None) -> GeodesicLine:
    def end(x: float | None) -> HPoint:
        return INF2 if x is None else HPoint.boundary(x)

    return GeodesicLine(end(a), end(b))


def random_map(rng: np.random.Generator) -> MobiusMap:
    a, b, c = rng.normal(size=3)
    a = a if abs(a) > 0.2 else 0.2
    return MobiusMap(a, b, c, (1 + b * c) / a, dim=2)


def sorted_endpoints(rng: np.random.Generator) -> np.ndarray:
    while True:
        xs = np.sort(rng.uniform(-5.0, 5.0, size=4))
        if np.min(np.diff(xs)) > 0.1:
            return xs


def semicircle_gap(u: float, v: float) -> float:
    """Distance from the vertical axis to the geodesic with endpoints ``u``, ``v`` of one sign."""
    lo, hi = sorted((abs(u), abs(v)))
    return math.acosh((hi + lo) / (hi - lo))


def brute_force_gap(u: float, v: float) -> float:
    """Minimise the distance between points of the vertical axis and of the semicircle (u, v)."""
    center, radius = (u + v) / 2, abs(v - u) / 2
    lo, hi = sorted((abs(u), abs(v)))

    def _pairwise(s: np.ndarray, theta: np.ndarray) -> np.ndarray:
        h1 = np.exp(s)
        x2, h2 = center + radius * np.cos(theta), radius * np.sin(theta)
        return np.arccosh(1 + (x2**2 + (h1 - h2) ** 2) / (2 * h1 * h2))

    s, theta = np.meshgrid(
        np.linspace(math.log(lo) - 1, math.log(hi) + 1, 400), np.linspace(0.01, math.pi - 0.01, 400)
    )
    values = _pairwise(s, theta)
    start = np.unravel_index(np.argmin(values), values.shape)
    result = minimize(
        lambda p: float(_pairwise(np.array(p[0]), np.array(p[1]))),
        x0=[s[start], theta[start]],
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 5000},
    )
    return float(result.fun)


def test_distance_examples() -> None:
    assert body_distance(Ball(pt(0, 1), 1.0), Ball(pt(0, math.exp(3)), 1.0)) == pytest.approx(1.0)
    horoballs = Horoball(HPoint.boundary(0.0), 0.5), Horoball(HPoint.boundary(1.0), 0.5)
    assert body_distance(*horoballs) == pytest.approx(2 * math.log(2), abs=1e-12)
    at_infinity = Horoball(INF2, 1.0), Horoball(HPoint.boundary(0.0), 0.25)
    assert body_distance(*at_infinity) == pytest.approx(math.log(4), abs=1e-12)
    # the horosphere at height 2 above the unit semicircle
    assert body_distance(Horoball(INF2, 2.0), Tube(line(-1.0, 1.0))) == pytest.approx(math.log(2))
    assert body_distance(Ball(pt(1, 1), 0.25), Tube(line(0.0, None), 0.5)) == pytest.approx(
        math.asinh(1.0) - 0.75
    )


def test_shared_ideal_points() -> None:
    zero = HPoint.boundary(0.0)
    assert body_distance(Horoball(zero, 1.0), Horoball(zero, 0.1)) == -math.inf
    assert body_distance(Horoball(zero, 1.0), Tube(line(0.0, None))) == -math.inf
    assert body_distance(Tube(line(0.0, 1.0)), Tube(line(1.0, 2.0), 0.3)) == -math.inf


def test_body_validation() -> None:
    with pytest.raises(ParameterError):
        Ball(pt(0, 1), 0.0)
    with pytest.raises(ParameterError):
        Ball(HPoint.boundary(0.0), 1.0)
    with pytest.raises(ParameterError):
        Horoball(pt(0, 1), 1.0)
    with pytest.raises(ParameterError):
        Tube(line(0.0, None), -1.0)
    with pytest.raises(DimensionMismatchError):
        body_distance(Ball(pt(0, 1), 1.0), Ball(HPoint.interior(0, 1, dim=3), 1.0))


def test_symmetry_and_invariance(generator: np.random.Generator) -> None:
    bodies: list[ConvexBody] = [
        Ball(pt(0.3, 1.2), 0.2),
        Horoball(HPoint.boundary(2.0), 0.3),
        Horoball(INF2, 5.0),
        Tube(line(-3.0, -2.0), 0.1),
        Tube(line(4.0, 6.0)),
    ]
    for i, a in enumerate(bodies):
        for b in bodies[i + 1 :]:
            assert body_distance(a, b) == body_distance(b, a)
            expected = body_distance(a, b)
            for _ in range(5):
                g = random_map(generator)
                moved = body_distance(a.translate(g), b.translate(g))
                assert moved == pytest.approx(expected, abs=1e-7)


def test_projections() -> None:
    horoball = Horoball(INF2, 1.0)
    assert closest_point_on_body(horoball, pt(0, 0.5)).isclose(pt(0, 1))
    assert closest_point_on_body(Tube(line(0.0, None)), pt(1, 1)).isclose(pt(0, math.sqrt(2)))
    ball = Ball(pt(0, 1), 1.0)
    assert closest_point_on_body(ball, pt(0, math.exp(3))).isclose(pt(0, math.e))
    projected = closest_point_on_body(Tube(line(0.0, None), 0.5), pt(3, 1))
    assert dist_point_to_line(projected, line(0.0, None)) == pytest.approx(0.5)


def test_projection_errors() -> None:
    with pytest.raises(ContainmentError):
        closest_point_on_body(Ball(pt(0, 1), 1.0), pt(0, 1.5))
    with pytest.raises(ContainmentError):
        closest_point_on_body(Horoball(INF2, 1.0), pt(4, 2))
    with pytest.raises(ContainmentError):
        closest_point_on_body(Tube(line(0.0, None), 1.0), pt(0.1, 1))
    with pytest.raises(UndefinedProjectionError):
        closest_point_on_body(Horoball(INF2, 1.0), INF2)
    with pytest.raises(UndefinedProjectionError):
        closest_point_on_body(Tube(line(0.0, None)), HPoint.boundary(0.0))


def test_common_perpendicular() -> None:
    a, b = Ball(pt(0, 1), 1.0), Ball(pt(0, math.exp(3)), 1.0)
    foot_a, foot_b = common_perpendicular(a, b)
    assert foot_a.isclose(pt(0, math.e))
    assert foot_b.isclose(pt(0, math.exp(2)))
    tubes = Tube(line(-1.0, 1.0)), Tube(line(-5.0, 5.0))
    first, second = common_perpendicular(*tubes)
    assert dist(first, second) == pytest.approx(body_distance(*tubes), abs=1e-8)
    with pytest.raises(ContainmentError):
        common_perpendicular(Ball(pt(0, 1), 1.0), Ball(pt(0, 2), 1.0))


def test_tube_distance_closed_form(generator: np.random.Generator) -> None:
    for _ in range(20):
        x1, x2, x3, x4 = sorted_endpoints(generator)
        first, second = line(x1, x2), line(x3, x4)
        # z -> (z - x1) / (x2 - z) sends the first geodesic to the vertical axis
        frame = MobiusMap(1, -x1, -1, x2, dim=2)
        u, v = (apply(frame, end).horizontal.real for end in second.endpoints)
        expected = semicircle_gap(u, v)
        assert body_distance(Tube(first), Tube(second)) == pytest.approx(expected, abs=1e-8)
        assert body_distance(Tube(first, 0.1), Tube(second, 0.2)) == pytest.approx(
            expected - 0.3, abs=1e-8
        )


def test_tube_distance_brute_force(generator: np.random.Generator) -> None:
    for _ in range(5):
        x1, x2, x3, x4 = sorted_endpoints(generator)
        frame = MobiusMap(1, -x1, -1, x2, dim=2)
        u, v = (apply(frame, HPoint.boundary(x)).horizontal.real for x in (x3, x4))
        computed = body_distance(Tube(line(x1, x2)), Tube(line(x3, x4)))
        assert computed == pytest.approx(brute_force_gap(u, v), abs=1e-6)


def test_margulis_tube() -> None:
    g = MobiusMap.loxodromic(HPoint.boundary(0.0), INF2, 1.0)
    assert margulis_tube(g, 0.5) is None
    tube = margulis_tube(g, 2.0)
    assert tube is not None
    assert tube.axis.has_endpoint(INF2) and tube.axis.has_endpoint(HPoint.boundary(0.0))
    on_boundary = pt(math.sinh(tube.radius), 1.0)
    assert displacement_at(g, on_boundary) == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(ParameterError):
        margulis_tube(g, 0.0)


def test_margulis_tube_with_rotation() -> None:
    zero, inf = HPoint.boundary(0.0, dim=3), HPoint.infinity(dim=3)
    g = MobiusMap.loxodromic(zero, inf, 0.5, rotation=1.0)
    tube = margulis_tube(g, 1.5)
    assert tube is not None
    on_boundary = HPoint.interior(math.sinh(tube.radius), 1.0, dim=3)
    assert displacement_at(g, on_boundary) == pytest.approx(1.5, abs=1e-9)


def test_cusp_horoball() -> None:
    g = MobiusMap.from_matrix([[1, 1], [0, 1]], dim=2)
    horoball = cusp_horoball(g, 1.0)
    assert horoball.base.is_infinity
    assert horoball.size == pytest.approx(1 / (2 * math.sinh(0.5)))
    assert displacement_at(g, horoball.top()) == pytest.approx(1.0, abs=1e-12)
    finite = cusp_horoball(MobiusMap.from_matrix([[1, 0], [1, 1]], dim=2), 1.0)
    assert finite.base.isclose(HPoint.boundary(0.0))
    with pytest.raises(ClassificationError):
        cusp_horoball(MobiusMap.from_matrix([[2, 0], [0, 0.5]], dim=2), 1.0)

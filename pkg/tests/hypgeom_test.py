"""Test distances, Busemann cocycles, Gromov products and geodesics."""

import math

import numpy as np
import pytest

from hypcount.errors import DimensionMismatchError, ParameterError
from hypcount.geometry.hypgeom import (
    OrientedVector,
    busemann_array,
    busemann_cocycle,
    dist,
    dist_point_to_line,
    foot_of_perpendicular,
    gromov_product,
    line_through,
    point_along,
)
from hypcount.geometry.points import GeodesicLine, HPoint, parse_complex
from hypcount.moebius import MobiusMap, apply
from hypcount.types import Dimension

INF2 = HPoint.infinity(dim=2)


def pt(z: complex | float, h: float, dim: Dimension = 2) -> HPoint:
    return HPoint.interior(z, h, dim=dim)


def random_point(rng: np.random.Generator, dim: Dimension) -> HPoint:
    z = complex(rng.normal(), rng.normal() if dim == 3 else 0.0)
    return pt(z, float(np.exp(rng.normal())), dim)


def random_map(rng: np.random.Generator, dim: Dimension) -> MobiusMap:
    if dim == 2:
        a, b, c = rng.normal(size=3)
        a = a if abs(a) > 0.1 else 0.1
        return MobiusMap(a, b, c, (1 + b * c) / a, dim=2)
    a, b, c = (complex(*rng.normal(size=2)) for _ in range(3))
    return MobiusMap(a, b, c, (1 + b * c) / a, dim=3)


def test_distance_examples() -> None:
    assert dist(pt(0, 1), pt(0, 1)) == 0.0
    assert dist(pt(0, 1), pt(0, 2)) == pytest.approx(math.log(2), abs=1e-12)
    assert dist(pt(0, 1), pt(1, 1)) == pytest.approx(math.acosh(1.5), abs=1e-12)


def test_distance_rejects_mixed_dimensions() -> None:
    with pytest.raises(DimensionMismatchError):
        dist(pt(0, 1), pt(0, 1, dim=3))
    with pytest.raises(ParameterError):
        dist(pt(0, 1), HPoint.boundary(0.0))


def test_points_validate() -> None:
    with pytest.raises(ParameterError):
        pt(0, -1.0)
    with pytest.raises(DimensionMismatchError):
        pt(1j, 1.0)
    with pytest.raises(ParameterError):
        GeodesicLine(HPoint.boundary(1.0), HPoint.boundary(1.0))
    assert parse_complex("1.5-2i") == complex(1.5, -2)
    assert parse_complex("-i") == -1j


@pytest.mark.parametrize("dim", [2, 3])
def test_metric_axioms(generator: np.random.Generator, dim: Dimension) -> None:
    for _ in range(1000):
        x, y, z = (random_point(generator, dim) for _ in range(3))
        assert dist(x, y) == pytest.approx(dist(y, x), abs=1e-12)
        assert dist(x, z) <= dist(x, y) + dist(y, z) + 1e-12
        assert dist(x, y) >= 0


@pytest.mark.parametrize("dim", [2, 3])
def test_isometry_invariance(generator: np.random.Generator, dim: Dimension) -> None:
    for _ in range(100):
        g = random_map(generator, dim)
        x, y = random_point(generator, dim), random_point(generator, dim)
        expected = dist(x, y)
        moved = dist(apply(g, x), apply(g, y))
        assert moved == pytest.approx(expected, abs=1e-10 * max(1, expected))


def test_busemann_examples() -> None:
    assert busemann_cocycle(INF2, pt(0, 1), pt(0, math.e)) == pytest.approx(1.0, abs=1e-12)
    assert busemann_cocycle(HPoint.boundary(0.3), pt(1, 2), pt(1, 2)) == 0.0
    # sending 0 to ∞ by z -> -1/z moves (0, 2) to height 1/2
    zero = HPoint.boundary(0.0)
    assert busemann_cocycle(zero, pt(0, 1), pt(0, 2)) == pytest.approx(-math.log(2), abs=1e-12)


def test_busemann_cocycle_identity(generator: np.random.Generator) -> None:
    for _ in range(200):
        xi = HPoint.boundary(float(generator.normal()))
        x, y, z = (random_point(generator, 2) for _ in range(3))
        total = busemann_cocycle(xi, x, y) + busemann_cocycle(xi, y, z)
        assert busemann_cocycle(xi, x, z) == pytest.approx(total, abs=1e-9)
        assert busemann_cocycle(xi, x, y) == pytest.approx(-busemann_cocycle(xi, y, x), abs=1e-12)
        assert abs(busemann_cocycle(xi, x, y)) <= dist(x, y) + 1e-9


def test_busemann_limit_along_ray() -> None:
    xi = HPoint.boundary(0.5)
    x, y = pt(-1, 0.5), pt(2, 3)
    far = point_along(line_through(y, xi), y, 20.0)
    assert dist(far, x) - dist(far, y) == pytest.approx(busemann_cocycle(xi, x, y), abs=1e-8)


def test_busemann_array_matches_scalar(generator: np.random.Generator) -> None:
    xi = generator.normal(size=5).astype(np.complex128)
    at_infinity = np.array([False, True, False, False, True])
    x, y = pt(0.2, 0.7), pt(-1.0, 2.5)
    values = busemann_array(xi, at_infinity, x, y)
    for value, point, flag in zip(values, xi, at_infinity):
        boundary = INF2 if flag else HPoint.boundary(point.real)
        assert value == pytest.approx(busemann_cocycle(boundary, x, y), abs=1e-12)


def test_gromov_product() -> None:
    vertical = GeodesicLine(HPoint.boundary(0.0), INF2)
    assert gromov_product(vertical, pt(0, 5)) == pytest.approx(0.0, abs=1e-12)
    circle = GeodesicLine(HPoint.boundary(-1.0), HPoint.boundary(1.0))
    assert gromov_product(circle, pt(0, 1)) == pytest.approx(0.0, abs=1e-12)
    x0 = pt(1, 1)
    at_foot = gromov_product(vertical, x0)
    along = gromov_product(vertical, x0, y=point_along(vertical, x0, 1.0))
    assert at_foot == pytest.approx(along, abs=1e-9)
    assert at_foot == pytest.approx(math.log(math.cosh(dist_point_to_line(x0, vertical))))


def test_point_to_line_distance(generator: np.random.Generator) -> None:
    vertical = GeodesicLine(HPoint.boundary(0.0), INF2)
    assert dist_point_to_line(pt(3, 7), GeodesicLine(HPoint.boundary(3.0), INF2)) == 0.0
    assert dist_point_to_line(pt(1, 1), vertical) == pytest.approx(math.asinh(1.0), abs=1e-12)
    for _ in range(20):
        g = random_map(generator, 2)
        x = random_point(generator, 2)
        moved = GeodesicLine(apply(g, vertical.start), apply(g, vertical.end))
        assert dist_point_to_line(apply(g, x), moved) == pytest.approx(
            dist_point_to_line(x, vertical), abs=1e-9
        )


def test_foot_and_point_along() -> None:
    vertical = GeodesicLine(HPoint.boundary(0.0), INF2)
    assert foot_of_perpendicular(vertical, pt(1, 1)).isclose(pt(0, math.sqrt(2)))
    moved = point_along(vertical, pt(1, 1), 2.0)
    assert dist(moved, foot_of_perpendicular(vertical, pt(1, 1))) == pytest.approx(2.0)
    assert moved.height > math.sqrt(2)


def test_line_through(generator: np.random.Generator) -> None:
    for dim in (2, 3):
        x, y = random_point(generator, dim), random_point(generator, dim)
        line = line_through(x, y)
        assert dist_point_to_line(x, line) == pytest.approx(0.0, abs=1e-9)
        assert dist_point_to_line(y, line) == pytest.approx(0.0, abs=1e-9)
        # oriented from x towards y
        assert busemann_cocycle(line.end, x, y) == pytest.approx(dist(x, y), abs=1e-9)
    with pytest.raises(ParameterError):
        line_through(pt(0, 1), pt(0, 1))


def test_oriented_vector() -> None:
    vertical = GeodesicLine(HPoint.boundary(0.0), INF2)
    v = OrientedVector(vertical, basetime=0.0, reference=pt(0, 1))
    assert v.base_point().isclose(pt(0, 1))
    assert v.flow(1.5).base_point().isclose(pt(0, math.exp(1.5)))
    assert v.flow(1.5).hopf_time(pt(0, 1)) == pytest.approx(1.5)
    assert v.reversed().flow(1.0).base_point().isclose(pt(0, math.exp(-1.0)))

"""Test the isometry algebra: action, classification, translation lengths and axes."""

import math

import numpy as np
import pytest

from hypcount.errors import ClassificationError, DimensionMismatchError, ParameterError
from hypcount.geometry.hypgeom import dist
from hypcount.geometry.points import GeodesicLine, HPoint
from hypcount.moebius import (
    MobiusMap,
    apply,
    axis,
    basepoint_frame,
    classify,
    complex_translation_length,
    displacement_at,
    translation_length,
)
from hypcount.types import IsometryKind

INF2 = HPoint.infinity(dim=2)


def m2(matrix: list[list[float]]) -> MobiusMap:
    return MobiusMap.from_matrix(matrix, dim=2)


def random_map(rng: np.random.Generator) -> MobiusMap:
    a, b, c = rng.normal(size=3)
    a = a if abs(a) > 0.2 else 0.2
    return MobiusMap(a, b, c, (1 + b * c) / a, dim=2)


def random_loxodromic(rng: np.random.Generator) -> MobiusMap:
    while True:
        g = random_map(rng)
        if abs(g.trace.real) > 2.5:
            return g


def test_apply_examples() -> None:
    dilation = m2([[math.sqrt(2), 0], [0, 1 / math.sqrt(2)]])
    assert apply(dilation, HPoint.interior(0, 1)).isclose(HPoint.interior(0, 2))
    assert apply(m2([[1, 1], [0, 1]]), INF2).is_infinity
    inversion = m2([[0, -1], [1, 0]])
    assert apply(inversion, HPoint.boundary(0.0)).is_infinity
    assert apply(inversion, INF2).isclose(HPoint.boundary(0.0))
    assert apply(inversion, HPoint.interior(0, 2)).isclose(HPoint.interior(0, 0.5))


def test_apply_is_an_action(generator: np.random.Generator) -> None:
    x = HPoint.interior(0.4, 0.9)
    for _ in range(50):
        g, h = random_map(generator), random_map(generator)
        assert apply(g @ h, x).isclose(apply(g, apply(h, x)), tol=1e-8)
        assert apply(g.inverse(), apply(g, x)).isclose(x, tol=1e-8)


def test_classify() -> None:
    assert classify(MobiusMap.identity()).kind is IsometryKind.IDENTITY
    assert classify(m2([[1, 1], [0, 1]])).kind is IsometryKind.PARABOLIC
    assert classify(m2([[0, 1], [-1, 0]])).kind is IsometryKind.ELLIPTIC
    loxodromic = classify(m2([[2, 0], [0, 0.5]]))
    assert loxodromic.kind is IsometryKind.LOXODROMIC
    assert loxodromic.translation_length == pytest.approx(math.log(4))
    screw = MobiusMap(complex(1, 1), 0, 0, 1 / complex(1, 1), dim=3)
    assert classify(screw).kind is IsometryKind.LOXODROMIC
    with pytest.raises(ParameterError):
        classify(screw, tol=0.0)


def test_translation_length(generator: np.random.Generator) -> None:
    for _ in range(50):
        g, h = random_loxodromic(generator), random_map(generator)
        tau = translation_length(g)
        assert translation_length(g.conjugate(h)) == pytest.approx(tau, rel=1e-9)
        assert translation_length(g**3) == pytest.approx(3 * tau, rel=1e-9)
        assert translation_length(g.inverse()) == pytest.approx(tau, rel=1e-9)
    assert translation_length(m2([[1, 1], [0, 1]])) == 0.0


def test_axis() -> None:
    line = axis(m2([[2, 0], [0, 0.5]]))
    assert line.start.isclose(HPoint.boundary(0.0))
    assert line.end.is_infinity
    assert axis(m2([[0.5, 0], [0, 2]])).start.is_infinity
    with pytest.raises(ClassificationError):
        axis(m2([[1, 1], [0, 1]]))


def test_axis_is_equivariant(generator: np.random.Generator) -> None:
    for _ in range(50):
        g, h = random_loxodromic(generator), random_map(generator)
        line = axis(g)
        for end in line.endpoints:
            assert apply(g, end).isclose(end, tol=1e-8)
        moved = axis(g.conjugate(h))
        assert moved.start.isclose(apply(h, line.start), tol=1e-6)
        assert moved.end.isclose(apply(h, line.end), tol=1e-6)


def test_loxodromic_constructor() -> None:
    g = MobiusMap.loxodromic(HPoint.boundary(-1.0), HPoint.boundary(1.0), 2.0)
    assert translation_length(g) == pytest.approx(2.0)
    line = axis(g)
    assert line.start.isclose(HPoint.boundary(-1.0))
    assert line.end.isclose(HPoint.boundary(1.0))
    zero, inf = HPoint.boundary(0.0, dim=3), HPoint.infinity(dim=3)
    screw = MobiusMap.loxodromic(zero, inf, 1.0, rotation=0.7)
    assert complex_translation_length(screw).real == pytest.approx(1.0)
    assert abs(complex_translation_length(screw).imag) == pytest.approx(0.7)
    with pytest.raises(DimensionMismatchError):
        MobiusMap.loxodromic(HPoint.boundary(0.0), INF2, 1.0, rotation=0.1)
    with pytest.raises(ParameterError):
        MobiusMap.loxodromic(HPoint.boundary(0.0), INF2, 0.0)


def test_sign_and_normalisation() -> None:
    g = m2([[2, 1], [1, 1]])
    assert g == MobiusMap(-2, -1, -1, -1, dim=2)
    assert hash(g) == hash(MobiusMap(-2, -1, -1, -1, dim=2))
    scaled = m2([[4, 0], [0, 1]])
    assert scaled == m2([[2, 0], [0, 0.5]])
    assert g.inverse() @ g == MobiusMap.identity()
    assert m2([[2, 0], [0, 0.5]]) != MobiusMap.from_matrix([[2, 0], [0, 0.5]], dim=3)


def test_parsing_and_validation() -> None:
    g = MobiusMap.from_matrix([["1", "1+i"], ["0", "1"]], dim=3)
    assert g.b == complex(1, 1)
    with pytest.raises(DimensionMismatchError):
        MobiusMap.from_matrix([["1", "i"], ["0", "1"]], dim=2)
    with pytest.raises(ParameterError):
        m2([[1, 0], [0, -1]])
    with pytest.raises(ParameterError):
        m2([[1, 2], [2, 4]])
    with pytest.raises(ParameterError):
        MobiusMap.from_matrix([[1, 0, 0], [0, 1, 0]], dim=2)
    with pytest.raises(DimensionMismatchError):
        m2([[1, 1], [0, 1]]) @ MobiusMap.identity(dim=3)


def test_frames_and_displacement(generator: np.random.Generator) -> None:
    x = HPoint.interior(1.5, 0.3)
    assert apply(basepoint_frame(x), HPoint.interior(0, 1)).isclose(x)
    for _ in range(20):
        g = random_map(generator)
        assert displacement_at(g, x) == pytest.approx(dist(x, apply(g, x)), abs=1e-9)
    assert displacement_at(MobiusMap.identity(), x) == 0.0
    with pytest.raises(ParameterError):
        basepoint_frame(HPoint.boundary(0.0))


def test_line_standardisation() -> None:
    line = GeodesicLine(HPoint.boundary(3.0), HPoint.boundary(-2.0))
    g = MobiusMap.loxodromic(line.start, line.end, 1.0)
    assert axis(g).start.isclose(line.start)
    assert axis(g).end.isclose(line.end)

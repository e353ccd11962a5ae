"""Built-in oracle suite run by ``hypcount selftest``.

Every check recomputes a closed-form value and compares it with the library's answer.
"""

from __future__ import annotations
from collections.abc import Callable
from dataclasses import dataclass
import math

import numpy as np

from hypcount.counting import count_loops, count_primitive_geodesics
from hypcount.exponent import lambda0_from_delta, poincare_partial_sum
from hypcount.geometry.bodies import Ball, Horoball, Tube, body_distance, closest_point_on_body
from hypcount.geometry.hypgeom import busemann_cocycle, dist, dist_point_to_line, gromov_product
from hypcount.geometry.points import GeodesicLine, HPoint
from hypcount.group.classes import conjugacy_classes
from hypcount.group.orbit import enumerate_orbit
from hypcount.group.spec import GroupSpec
from hypcount.measures import EmpiricalBoundaryMeasure, loop_constant_prediction, transport_mass
from hypcount.moebius import MobiusMap, apply, axis, classify, translation_length
from hypcount.types import IsometryKind

__all__ = ["CheckResult", "run_selftest"]

TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


_CHECKS: list[tuple[str, Callable[[np.random.Generator], tuple[bool, str]]]] = []


def _check(name: str):
    def _register(fn: Callable[[np.random.Generator], tuple[bool, str]]):
        _CHECKS.append((name, fn))
        return fn

    return _register


def _close(value: float, expected: float, tol: float = TOL) -> tuple[bool, str]:
    return abs(value - expected) <= tol, f"got {value:.12g}, expected {expected:.12g}"


def _pt(z: complex | float, h: float) -> HPoint:
    return HPoint.interior(z, h, dim=2)


def _line(a: float | None, b: float | None) -> GeodesicLine:
    def end(x: float | None) -> HPoint:
        return HPoint.infinity(dim=2) if x is None else HPoint.boundary(x, dim=2)

    return GeodesicLine(end(a), end(b))


def _cyclic() -> GroupSpec:
    return GroupSpec(
        generators=(MobiusMap.from_matrix([[2, 0], [0, 0.5]], dim=2),),
        basepoint=_pt(0, 1),
        name="cyclic",
    )


def _free_rank_two() -> GroupSpec:
    return GroupSpec(
        generators=(
            MobiusMap.loxodromic(HPoint.boundary(-1.0), HPoint.boundary(1.0), 2.0),
            MobiusMap.loxodromic(HPoint.boundary(0.0), HPoint.infinity(), 2.0),
        ),
        basepoint=_pt(0, 1),
        name="schottky",
    )


@_check("dist: identical points")
def _dist_zero(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(dist(_pt(0, 1), _pt(0, 1)), 0.0)


@_check("dist: vertical")
def _dist_vertical(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(dist(_pt(0, 1), _pt(0, 2)), math.log(2))


@_check("dist: horizontal")
def _dist_horizontal(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(dist(_pt(0, 1), _pt(1, 1)), math.acosh(1.5))


@_check("busemann: at infinity")
def _busemann_infinity(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(busemann_cocycle(HPoint.infinity(), _pt(0, 1), _pt(0, math.e)), 1.0)


@_check("busemann: at zero")
def _busemann_zero(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(busemann_cocycle(HPoint.boundary(0.0), _pt(0, 1), _pt(0, 2)), -math.log(2))


@_check("busemann: cocycle identity")
def _busemann_cocycle(rng: np.random.Generator) -> tuple[bool, str]:
    xi = HPoint.boundary(float(rng.normal()))
    x, y, z = (_pt(float(rng.normal()), float(rng.uniform(0.2, 3))) for _ in range(3))
    lhs = busemann_cocycle(xi, x, z)
    rhs = busemann_cocycle(xi, x, y) + busemann_cocycle(xi, y, z)
    return _close(lhs, rhs)


@_check("gromov: basepoint on line")
def _gromov_on_line(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(gromov_product(_line(-1.0, 1.0), _pt(0, 1)), 0.0)


@_check("gromov: independent of the point on the line")
def _gromov_dual(rng: np.random.Generator) -> tuple[bool, str]:
    line = _line(0.0, None)
    first = gromov_product(line, _pt(1, 1), y=_pt(0, math.sqrt(2)))
    second = gromov_product(line, _pt(1, 1), y=_pt(0, math.sqrt(2) * math.e))
    return _close(first, second)


@_check("point-to-line distance")
def _point_line(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(dist_point_to_line(_pt(1, 1), _line(0.0, None)), math.asinh(1.0))


@_check("body distance: balls")
def _balls(rng: np.random.Generator) -> tuple[bool, str]:
    a, b = Ball(_pt(0, 1), 1.0), Ball(_pt(0, math.exp(3)), 1.0)
    return _close(body_distance(a, b), 1.0)


@_check("body distance: finite horoballs")
def _horoballs(rng: np.random.Generator) -> tuple[bool, str]:
    a, b = Horoball(HPoint.boundary(0.0), 0.5), Horoball(HPoint.boundary(1.0), 0.5)
    return _close(body_distance(a, b), 2 * math.log(2))


@_check("body distance: horoball at infinity")
def _horoball_infinity(rng: np.random.Generator) -> tuple[bool, str]:
    a, b = Horoball(HPoint.infinity(), 1.0), Horoball(HPoint.boundary(0.0), 0.25)
    return _close(body_distance(a, b), math.log(4))


@_check("projection: horoball at infinity")
def _project_horoball(rng: np.random.Generator) -> tuple[bool, str]:
    p = closest_point_on_body(Horoball(HPoint.infinity(), 1.0), _pt(0, 0.5))
    return p.isclose(_pt(0, 1), tol=TOL), str(p)


@_check("projection: tube")
def _project_tube(rng: np.random.Generator) -> tuple[bool, str]:
    p = closest_point_on_body(Tube(_line(0.0, None), 0.0), _pt(1, 1))
    return p.isclose(_pt(0, math.sqrt(2)), tol=TOL), str(p)


@_check("apply: dilation")
def _apply(rng: np.random.Generator) -> tuple[bool, str]:
    g = MobiusMap.from_matrix([[math.sqrt(2), 0], [0, 1 / math.sqrt(2)]], dim=2)
    p = apply(g, _pt(0, 1))
    return p.isclose(_pt(0, 2), tol=TOL), str(p)


@_check("classify: parabolic, loxodromic and elliptic")
def _classify(rng: np.random.Generator) -> tuple[bool, str]:
    kinds = [
        classify(MobiusMap.from_matrix(m, dim=2)).kind
        for m in ([[1, 1], [0, 1]], [[2, 0], [0, 0.5]], [[0, 1], [-1, 0]])
    ]
    expected = [IsometryKind.PARABOLIC, IsometryKind.LOXODROMIC, IsometryKind.ELLIPTIC]
    return kinds == expected, ", ".join(map(str, kinds))


@_check("translation length")
def _translation(rng: np.random.Generator) -> tuple[bool, str]:
    g = MobiusMap.from_matrix([[2, 0], [0, 0.5]], dim=2)
    return _close(translation_length(g), math.log(4))


@_check("axis endpoints are fixed")
def _axis(rng: np.random.Generator) -> tuple[bool, str]:
    g = MobiusMap.from_matrix([[1, 1], [1, 2]], dim=2)
    line = axis(g)
    ok = all(apply(g, end).isclose(end, tol=1e-12) for end in line.endpoints)
    return ok, str(line)


@_check("orbit: cyclic group at T = 3")
def _orbit(rng: np.random.Generator) -> tuple[bool, str]:
    batch = enumerate_orbit(_cyclic(), 3.0)
    return len(batch) == 5, f"{len(batch)} elements"


@_check("orbit: cutoff below the generators")
def _orbit_identity(rng: np.random.Generator) -> tuple[bool, str]:
    batch = enumerate_orbit(_free_rank_two(), 0.5)
    return len(batch) == 1, f"{len(batch)} elements"


@_check("loops: cyclic group at T = 3")
def _loops(rng: np.random.Generator) -> tuple[bool, str]:
    lengths = count_loops(_cyclic(), None, 3.0).lengths
    expected = np.array([math.log(4)] * 2 + [math.log(16)] * 2)
    return bool(np.allclose(lengths, expected, atol=TOL, rtol=0)), str(lengths.round(6))


@_check("classes: free rank 2, word length 2")
def _classes(rng: np.random.Generator) -> tuple[bool, str]:
    batch = conjugacy_classes(_free_rank_two(), math.inf, max_word_length=2)
    primitive = len(batch.primitive())
    return (len(batch), primitive) == (6, 4), f"{len(batch)} classes, {primitive} primitive"


@_check("geodesics: unoriented count at word length 2")
def _geodesics(rng: np.random.Generator) -> tuple[bool, str]:
    series = count_primitive_geodesics(
        _free_rank_two(), math.inf, oriented=False, max_word_length=2
    )
    return len(series) == 4, f"{len(series)} geodesics"


@_check("poincare sum: identity and s = 0")
def _poincare(rng: np.random.Generator) -> tuple[bool, str]:
    trivial = enumerate_orbit(_free_rank_two(), 0.5)
    batch = enumerate_orbit(_cyclic(), 3.0)
    ok = poincare_partial_sum(trivial, 2.5) == 1.0
    ok &= poincare_partial_sum(batch, 0.0) == len(batch)
    return ok, f"{poincare_partial_sum(batch, 0.0):g}"


@_check("lambda0 at the branch point")
def _lambda0(rng: np.random.Generator) -> tuple[bool, str]:
    return _close(lambda0_from_delta(1.0, 3), 1.0)


@_check("transport: single atom at infinity")
def _transport(rng: np.random.Generator) -> tuple[bool, str]:
    mu = EmpiricalBoundaryMeasure(
        dim=2,
        boundary=np.zeros(1, dtype=np.complex128),
        at_infinity=np.ones(1, dtype=np.bool_),
        weights=np.ones(1),
        delta_used=1.0,
        cutoff=0.0,
        reference=_pt(0, 1),
        raw_mass=1.0,
    )
    same = transport_mass(mu, _pt(0, 1), _pt(0, 1))
    moved = transport_mass(mu, _pt(0, 1), _pt(0, math.e))
    ok = abs(same - 1.0) <= TOL and abs(moved - math.e) <= TOL
    return ok, f"got {same:.12g} and {moved:.12g}"


@_check("loop constant prediction")
def _loop_constant(rng: np.random.Generator) -> tuple[bool, str]:
    ok = loop_constant_prediction((1.0, 1.0), 0.5) == 1.0
    ok &= loop_constant_prediction((2.0, 1.0), 0.5) == 4.0
    return ok, ""


def run_selftest(seed: int = 47) -> list[CheckResult]:
    """Run every check; exceptions count as failures."""
    results: list[CheckResult] = []
    for name, fn in _CHECKS:
        rng = np.random.default_rng(seed)
        try:
            passed, detail = fn(rng)
        except Exception as exc:  # noqa: BLE001
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results

"""The isometry algebra PSL(2, R) / PSL(2, C) acting on upper half-space."""

from __future__ import annotations
from collections.abc import Sequence
import cmath
from dataclasses import dataclass
import math
from typing import Final, cast
from typing_extensions import Self

import numpy as np

from hypcount.errors import ClassificationError, DimensionMismatchError, ParameterError
from hypcount.geometry.points import GeodesicLine, HPoint, check_dims, parse_complex
from hypcount.types import Dimension, IsometryKind, NDArrayC, NDArrayF

__all__ = [
    "IsometryClass",
    "MobiusMap",
    "apply",
    "axis",
    "basepoint_frame",
    "classify",
    "complex_translation_length",
    "displacement_at",
    "displacement_from_j",
    "orbit_points_from_j",
    "translation_length",
]

_DET_TOL: Final[float] = 1e-300
_ZERO_TOL: Final[float] = 1e-14
_DEFAULT_TOL: Final[float] = 1e-9


def _canonical_sign(entries: tuple[complex, complex, complex, complex]) -> int:
    for entry in entries:
        if entry.real != 0.0:
            return 1 if entry.real > 0 else -1
        if entry.imag != 0.0:
            return 1 if entry.imag > 0 else -1
    return 1


@dataclass(frozen=True, eq=False)
class MobiusMap:
    """An orientation-preserving isometry, stored as a unimodular 2×2 matrix.

    Entries are normalised to determinant one on construction; ``M`` and ``-M`` compare (and
    hash) equal.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    dim: Dimension = 2

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ParameterError(f"Only H² and H³ are supported, got dimension {self.dim}.")
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        if self.dim == 2:
            scale = max(abs(a), abs(b), abs(c), abs(d))
            if any(abs(x.imag) > 1e-12 * max(scale, 1.0) for x in (a, b, c, d)):
                raise DimensionMismatchError("Isometries of H² have real matrix entries.")
            a, b, c, d = (complex(x.real, 0.0) for x in (a, b, c, d))
        det = a * d - b * c
        if abs(det) <= _DET_TOL:
            raise ParameterError("Matrix is singular.")
        if self.dim == 2:
            if det.real <= 0:
                raise ParameterError(
                    "Isometries of H² need a positive determinant (orientation-preserving)."
                )
            root = complex(math.sqrt(det.real), 0.0)
        else:
            root = cmath.sqrt(det)
        for name, value in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, value / root)

    @classmethod
    def identity(cls, *, dim: Dimension = 2) -> Self:
        return cls(1, 0, 0, 1, dim=dim)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[object]] | NDArrayC, *, dim: Dimension) -> Self:
        """Build a map from ``[[a, b], [c, d]]``; entries may be numbers or ``re+imi`` strings."""
        rows = [list(row) for row in matrix]
        if len(rows) != 2 or any(len(row) != 2 for row in rows):
            raise ParameterError(f"Expected a 2x2 matrix, got {matrix!r}.")
        (a, b), (c, d) = ((parse_complex(cast(str, x)) for x in row) for row in rows)
        return cls(a, b, c, d, dim=dim)

    @classmethod
    def loxodromic(
        cls,
        repelling: HPoint,
        attracting: HPoint,
        length: float,
        rotation: float = 0.0,
    ) -> Self:
        """The loxodromic with the given axis, translation length and rotation angle."""
        dim = check_dims(repelling, attracting)
        if length <= 0:
            raise ParameterError(f"Translation length must be positive, got {length}.")
        if dim == 2 and rotation != 0.0:
            raise DimensionMismatchError("Isometries of H² cannot rotate about their axis.")
        frame = standardizing_map(GeodesicLine(repelling, attracting))
        half = cmath.exp(complex(length, rotation) / 2)
        core = cls(half, 0, 0, 1 / half, dim=dim)
        return frame.inverse() @ core @ frame

    @property
    def entries(self) -> tuple[complex, complex, complex, complex]:
        return self.a, self.b, self.c, self.d

    @property
    def matrix(self) -> NDArrayC:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def _canonical(self) -> tuple[complex, complex, complex, complex]:
        sign = _canonical_sign(self.entries)
        a, b, c, d = self.entries
        return (sign * a, sign * b, sign * c, sign * d)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MobiusMap):
            return NotImplemented
        return self.dim == other.dim and self._canonical() == other._canonical()

    def __hash__(self) -> int:
        return hash((self.dim, self._canonical()))

    def __matmul__(self, other: MobiusMap) -> MobiusMap:
        if self.dim != other.dim:
            raise DimensionMismatchError("Cannot compose isometries of H² and H³.")
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            dim=self.dim,
        )

    def __pow__(self, n: int) -> MobiusMap:
        base = self if n >= 0 else self.inverse()
        result = MobiusMap.identity(dim=self.dim)
        for _ in range(abs(n)):
            result = result @ base
        return result

    def inverse(self) -> MobiusMap:
        return MobiusMap(self.d, -self.b, -self.c, self.a, dim=self.dim)

    def conjugate(self, h: MobiusMap) -> MobiusMap:
        """``h ∘ self ∘ h⁻¹``."""
        return h @ self @ h.inverse()

    def distance(self, other: MobiusMap) -> float:
        """Max-entry distance in PSL(2), i.e. minimised over the sign of ``other``."""
        plus = max(abs(x - y) for x, y in zip(self.entries, other.entries))
        minus = max(abs(x + y) for x, y in zip(self.entries, other.entries))
        return min(plus, minus)

    def isclose(self, other: MobiusMap, *, tol: float = 1e-8) -> bool:
        return self.dim == other.dim and self.distance(other) <= tol

    def is_identity(self, *, tol: float = _DEFAULT_TOL) -> bool:
        return self.distance(MobiusMap.identity(dim=self.dim)) <= tol

    def __repr__(self) -> str:
        def fmt(x: complex) -> str:
            return f"{x.real:.6g}" if self.dim == 2 else f"{x:.6g}"

        return f"MobiusMap([[{fmt(self.a)}, {fmt(self.b)}], [{fmt(self.c)}, {fmt(self.d)}]])"


@dataclass(frozen=True)
class IsometryClass:
    kind: IsometryKind
    translation_length: float = 0.0

    def __post_init__(self) -> None:
        if (self.kind is IsometryKind.LOXODROMIC) != (self.translation_length > 0):
            raise ParameterError(
                "Translation length must be positive exactly for loxodromic isometries."
            )


def apply(g: MobiusMap, x: HPoint) -> HPoint:
    """Act on a boundary point by fractional linear maps and on the interior by the Poincaré
    extension."""
    if g.dim != x.dim:
        raise DimensionMismatchError("Map and point live in spaces of different dimension.")
    a, b, c, d = g.entries
    dim = g.dim
    if x.z is None:
        if abs(c) <= _ZERO_TOL * max(abs(a), 1.0):
            return HPoint.infinity(dim=dim)
        return HPoint.boundary(_horizontal(a / c, dim), dim=dim)
    z = x.z
    den = c * z + d
    if x.h is None:
        if abs(den) <= _ZERO_TOL * (abs(c * z) + abs(d)):
            return HPoint.infinity(dim=dim)
        return HPoint.boundary(_horizontal((a * z + b) / den, dim), dim=dim)
    h = x.h
    scale = abs(den) ** 2 + abs(c) ** 2 * h**2
    z_new = ((a * z + b) * den.conjugate() + a * c.conjugate() * h**2) / scale
    return HPoint.interior(_horizontal(z_new, dim), h / scale, dim=dim)


def _horizontal(z: complex, dim: Dimension) -> complex:
    return complex(z.real, 0.0) if dim == 2 else z


def classify(g: MobiusMap, tol: float = _DEFAULT_TOL) -> IsometryClass:
    """Classify ``g`` by its trace.

    :param g: The isometry.
    :param tol: Tolerance on ``|t² - 4|`` (and on the imaginary part of ``t`` in H³).
    :returns: The isometry type, with the translation length for loxodromics.
    :raises ParameterError: If ``tol`` is not positive.
    """
    if tol <= 0:
        raise ParameterError(f"Classification tolerance must be positive, got {tol}.")
    if g.is_identity(tol=tol):
        return IsometryClass(IsometryKind.IDENTITY)
    t = g.trace
    t2 = t * t
    if abs(t2 - 4) <= tol:
        return IsometryClass(IsometryKind.PARABOLIC)
    if g.dim == 2:
        loxodromic = t2.real > 4
    else:
        loxodromic = abs(t.imag) > tol or abs(t.real) > 2
    if not loxodromic:
        return IsometryClass(IsometryKind.ELLIPTIC)
    length = complex_translation_length(g).real
    if length <= 0:
        # trace within rounding of the parabolic locus but outside ``tol``
        length = math.ulp(0.0)
    return IsometryClass(IsometryKind.LOXODROMIC, translation_length=length)


def complex_translation_length(g: MobiusMap) -> complex:
    """``2·arccosh(t/2)`` on the principal branch with nonnegative real part: translation length
    plus ``i`` times the rotation angle."""
    value = 2 * cmath.acosh(g.trace / 2)
    if value.real < 0:
        value = -value
    return complex(abs(value.real), value.imag)


def translation_length(g: MobiusMap, tol: float = _DEFAULT_TOL) -> float:
    return classify(g, tol).translation_length


def axis(g: MobiusMap, tol: float = _DEFAULT_TOL) -> GeodesicLine:
    """The oriented axis ``(repelling, attracting)`` of a loxodromic.

    :raises ClassificationError: If ``g`` is not loxodromic.
    """
    kind = classify(g, tol).kind
    if kind is not IsometryKind.LOXODROMIC:
        raise ClassificationError(f"Only loxodromic isometries have an axis; {g!r} is {kind}.")
    a, b, c, d = g.entries
    dim = g.dim
    if abs(c) <= _ZERO_TOL * max(abs(a), abs(d)):
        finite = HPoint.boundary(_horizontal(b / (d - a), dim), dim=dim)
        infinity = HPoint.infinity(dim=dim)
        # z -> (a/d) z + b/d expands iff |a/d| > 1
        if abs(a) > abs(d):
            return GeodesicLine(finite, infinity)
        return GeodesicLine(infinity, finite)
    root = cmath.sqrt(g.trace**2 - 4)
    first = (a - d + root) / (2 * c)
    second = (a - d - root) / (2 * c)
    # the attracting fixed point has multiplier |cz + d|⁻² < 1
    if abs(c * first + d) > abs(c * second + d):
        attracting, repelling = first, second
    else:
        attracting, repelling = second, first
    return GeodesicLine(
        HPoint.boundary(_horizontal(repelling, dim), dim=dim),
        HPoint.boundary(_horizontal(attracting, dim), dim=dim),
    )


def standardizing_map(line: GeodesicLine) -> MobiusMap:
    """A map sending ``line.start`` to 0 and ``line.end`` to ∞."""
    dim = line.dim
    p, q = line.start.z, line.end.z
    if p is None:
        assert q is not None
        return MobiusMap(0, -1, 1, -q, dim=dim)
    if q is None:
        return MobiusMap(1, -p, 0, 1, dim=dim)
    if dim == 2 and (p - q).real < 0:
        return MobiusMap(-1, p, 1, -q, dim=dim)
    return MobiusMap(1, -p, 1, -q, dim=dim)


def basepoint_frame(x: HPoint) -> MobiusMap:
    """The map ``A`` with ``A·(0, 1) = x``."""
    if not x.is_interior:
        raise ParameterError(f"A frame is attached to interior points only, got {x}.")
    root = math.sqrt(x.height)
    return MobiusMap(root, x.horizontal / root, 0, 1 / root, dim=x.dim)


def displacement_from_j(
    a: NDArrayC | complex, b: NDArrayC | complex, c: NDArrayC | complex, d: NDArrayC | complex
) -> NDArrayF:
    """Vectorised ``d(j, M·j)`` for unimodular ``M = [[a, b], [c, d]]``.

    Uses ``sinh(d/2) = ½·sqrt(|a - conj(d)|² + |b + conj(c)|²)``, which stays accurate for
    small displacements.
    """
    s = 0.5 * np.sqrt(np.abs(a - np.conj(d)) ** 2 + np.abs(b + np.conj(c)) ** 2)
    return 2.0 * np.arcsinh(s)


def orbit_points_from_j(
    a: NDArrayC, b: NDArrayC, c: NDArrayC, d: NDArrayC
) -> tuple[NDArrayC, NDArrayF]:
    """Vectorised horizontal coordinates and heights of ``M·j``."""
    scale = np.abs(c) ** 2 + np.abs(d) ** 2
    return (b * np.conj(d) + a * np.conj(c)) / scale, 1.0 / scale


def displacement_at(g: MobiusMap, x: HPoint) -> float:
    """``d(x, g·x)``."""
    frame = basepoint_frame(x)
    m = frame.inverse() @ g @ frame
    return float(displacement_from_j(m.a, m.b, m.c, m.d))

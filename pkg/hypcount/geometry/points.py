"""Points and geodesic lines of the upper half-space models of H² and H³."""

from __future__ import annotations
from dataclasses import dataclass
import math
import numbers
from typing import Final
from typing_extensions import Self

from hypcount.errors import DimensionMismatchError, ParameterError
from hypcount.types import Dimension

__all__ = ["GeodesicLine", "HPoint", "check_dims", "parse_complex"]

_REAL_TOL: Final[float] = 1e-12


def _coerce_horizontal(z: complex | float, dim: Dimension) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParameterError(f"Horizontal coordinate {z} is not finite; use HPoint.infinity().")
    if dim == 2:
        if abs(z.imag) > _REAL_TOL * max(1.0, abs(z.real)):
            raise DimensionMismatchError(f"Points of H² have real horizontal coordinates, got {z}.")
        return complex(z.real, 0.0)
    return z


@dataclass(frozen=True, slots=True)
class HPoint:
    """A point of H² or H³ or of its boundary at infinity.

    Interior points carry a horizontal coordinate ``z`` and a height ``h > 0``. Boundary points
    carry no height; the point at infinity has ``z = None``.
    """

    dim: Dimension
    z: complex | None
    h: float | None = None

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ParameterError(f"Only H² and H³ are supported, got dimension {self.dim}.")
        if self.z is None:
            if self.h is not None:
                raise ParameterError("The point at infinity carries no height.")
            return
        object.__setattr__(self, "z", _coerce_horizontal(self.z, self.dim))
        if self.h is not None:
            if not (math.isfinite(self.h) and self.h > 0):
                raise ParameterError(
                    f"Interior points need a finite positive height, got {self.h}."
                )
            object.__setattr__(self, "h", float(self.h))

    @classmethod
    def interior(cls, z: complex | float, h: float, *, dim: Dimension = 2) -> Self:
        return cls(dim=dim, z=complex(z), h=h)

    @classmethod
    def boundary(cls, z: complex | float, *, dim: Dimension = 2) -> Self:
        return cls(dim=dim, z=complex(z))

    @classmethod
    def infinity(cls, *, dim: Dimension = 2) -> Self:
        return cls(dim=dim, z=None)

    @property
    def is_interior(self) -> bool:
        return self.h is not None

    @property
    def is_boundary(self) -> bool:
        return self.h is None

    @property
    def is_infinity(self) -> bool:
        return self.z is None

    @property
    def horizontal(self) -> complex:
        if self.z is None:
            raise ParameterError("The point at infinity has no horizontal coordinate.")
        return self.z

    @property
    def height(self) -> float:
        if self.h is None:
            raise ParameterError(f"Boundary point {self} has no height.")
        return self.h

    def isclose(self, other: HPoint, *, tol: float = 1e-9) -> bool:
        check_dims(self, other)
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        if self.is_interior != other.is_interior:
            return False
        assert self.z is not None and other.z is not None
        if self.h is None or other.h is None:
            return abs(self.z - other.z) <= tol * max(1.0, abs(self.z))
        return (abs(self.z - other.z) + abs(self.h - other.h)) <= tol * max(1.0, self.h)

    def __str__(self) -> str:
        if self.z is None:
            return "∞"
        z = f"{self.z.real:.6g}" if self.dim == 2 else f"{self.z:.6g}"
        return z if self.h is None else f"({z}, {self.h:.6g})"


def check_dims(*points: HPoint | GeodesicLine) -> Dimension:
    dims = {p.dim for p in points}
    if len(dims) != 1:
        raise DimensionMismatchError(
            f"Operands live in spaces of different dimension: {sorted(dims)}."
        )
    return points[0].dim


@dataclass(frozen=True, slots=True)
class GeodesicLine:
    """An oriented geodesic given by its backward and forward endpoints ``(v₋, v₊)``."""

    start: HPoint
    end: HPoint

    def __post_init__(self) -> None:
        check_dims(self.start, self.end)
        if not (self.start.is_boundary and self.end.is_boundary):
            raise ParameterError("Geodesic lines are specified by two boundary points.")
        if self.start.isclose(self.end, tol=_REAL_TOL):
            raise ParameterError(
                f"Endpoints of a geodesic must be distinct, got {self.start} twice."
            )

    @property
    def dim(self) -> Dimension:
        return self.start.dim

    @property
    def endpoints(self) -> tuple[HPoint, HPoint]:
        return self.start, self.end

    def reversed(self) -> GeodesicLine:
        return GeodesicLine(self.end, self.start)

    def has_endpoint(self, point: HPoint, *, tol: float = 1e-9) -> bool:
        return self.start.isclose(point, tol=tol) or self.end.isclose(point, tol=tol)

    def __str__(self) -> str:
        return f"({self.start}, {self.end})"


def parse_complex(value: str | float | int | complex) -> complex:
    """Parse ``re+imi`` style literals (``"1.5-2i"``, ``"3i"``, ``"-i"``) and plain numbers."""
    if isinstance(value, numbers.Number):
        return complex(value)  # type: ignore[arg-type]
    text = value.strip().replace(" ", "").replace("I", "i")
    if not text:
        raise ParameterError("Empty numeric literal.")
    if text.endswith("i"):
        head = text[:-1]
        if head == "" or head[-1] in "+-":
            head += "1"
        text = head + "j"
    try:
        return complex(text)
    except ValueError as err:
        raise ParameterError(f"Cannot parse numeric literal '{value}'.") from err

from enum import auto
from typing import Any, Literal, TypeAlias

import numpy as np
import numpy.typing as npt
from ranzen import StrEnum

__all__ = [
    "BodyKind",
    "Dimension",
    "IsometryKind",
    "NDArrayB",
    "NDArrayC",
    "NDArrayF",
    "NDArrayI",
    "SeriesKind",
    "Subcommand",
]

Dimension: TypeAlias = Literal[2, 3]

NDArrayF: TypeAlias = npt.NDArray[np.floating[Any]]
NDArrayC: TypeAlias = npt.NDArray[np.complexfloating[Any, Any]]
NDArrayI: TypeAlias = npt.NDArray[np.integer[Any]]
NDArrayB: TypeAlias = npt.NDArray[np.bool_]


class IsometryKind(StrEnum):
    LOXODROMIC = auto()
    PARABOLIC = auto()
    ELLIPTIC = auto()
    IDENTITY = auto()


class BodyKind(StrEnum):
    BALL = auto()
    HOROBALL = auto()
    TUBE = auto()


class SeriesKind(StrEnum):
    LOOPS = auto()
    PRIMITIVE_GEODESICS = auto()
    ORTHO = auto()


class Subcommand(StrEnum):
    EXPONENT = "exponent"
    LOOPS = "loops"
    GEODESICS = "geodesics"
    ORTHO = "ortho"
    PS_MEASURE = "ps-measure"
    SWEEP = "sweep"
    SELFTEST = "selftest"

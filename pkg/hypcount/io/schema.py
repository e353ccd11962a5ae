"""YAML schemas of group (``.grp``) and family (``.fam``) files.

Files are merged into ``omegaconf`` structured configs, so unknown keys, missing mandatory
values and type mismatches are reported before any geometry is built.

A group file::

    name: schottky
    dimension: 2
    basepoint: {z: 0, h: 1}
    generators:
      - matrix: [[2, 0], [0, 0.5]]
      - {axis: [0, inf], length: 2.0}
    bodies:
      ball0: {kind: ball, center: {z: 0, h: 1}, radius: 0.25}
      tube_b: {kind: tube, axis: [0, inf], radius: 0.1, stabilizer: b}
      horo_p: {kind: horoball, base: 0.4, size: 0.02}

Matrix entries and horizontal coordinates are numbers or ``re+imi`` strings; boundary points
may be ``inf``.
"""

from dataclasses import dataclass, field
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, cast

from omegaconf import MISSING, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from hypcount.config import DEFAULT_TOLERANCES, Tolerances
from hypcount.errors import HypcountError, ValidationError
from hypcount.geometry.bodies import Ball, ConvexBody, Horoball, Tube
from hypcount.geometry.points import GeodesicLine, HPoint, parse_complex
from hypcount.group.spec import BodySpec, GroupSpec, SubgroupSpec
from hypcount.moebius import MobiusMap
from hypcount.sweep import FamilySpec
from hypcount.types import BodyKind, Dimension

__all__ = [
    "BodyConf",
    "FamilyConf",
    "GeneratorConf",
    "GroupConf",
    "MemberConf",
    "PointConf",
    "build_family",
    "build_group",
    "load_family",
    "load_group",
]

_INFINITY = ("inf", "infinity", "oo", "∞")


@dataclass
class PointConf:
    z: Any = 0
    h: float = MISSING


@dataclass
class GeneratorConf:
    matrix: Any = None
    axis: Optional[List[Any]] = None
    length: Optional[float] = None
    rotation: float = 0.0


@dataclass
class BodyConf:
    kind: str = MISSING
    center: Optional[PointConf] = None
    radius: Optional[float] = None
    base: Any = None
    size: Optional[float] = None
    axis: Optional[List[Any]] = None
    stabilizer: Optional[str] = None


@dataclass
class GroupConf:
    name: str = "group"
    dimension: int = 2
    generators: List[GeneratorConf] = MISSING
    basepoint: PointConf = MISSING
    freeness_assumed: bool = True
    relator_check_length: int = 6
    bodies: Dict[str, BodyConf] = field(default_factory=dict)


@dataclass
class MemberConf:
    k: Optional[float] = None
    group: Optional[str] = None
    name: Optional[str] = None
    generators: Optional[List[GeneratorConf]] = None
    basepoint: Optional[PointConf] = None
    bodies: Optional[Dict[str, BodyConf]] = None


@dataclass
class FamilyConf:
    name: str = "family"
    dimension: int = 2
    basepoint: Optional[PointConf] = None
    bodies: Dict[str, BodyConf] = field(default_factory=dict)
    ortho: Optional[List[str]] = None
    T: float = MISSING
    L: float = MISSING
    window: Optional[List[float]] = None
    node_budget: int = 20_000_000
    freeness_assumed: bool = True
    limit: MemberConf = MISSING
    members: List[MemberConf] = MISSING


def _invalid(message: str, source: str, **details: object) -> ValidationError:
    return ValidationError(message, details={"file": source, **details})


def _dimension(value: int, source: str) -> Dimension:
    if value not in (2, 3):
        raise _invalid(f"Dimension must be 2 or 3, got {value}.", source, field="dimension")
    return cast(Dimension, value)


def _boundary(value: Any, dim: Dimension) -> HPoint:
    if isinstance(value, str) and value.strip().lower() in _INFINITY:
        return HPoint.infinity(dim=dim)
    if isinstance(value, float) and math.isinf(value):
        return HPoint.infinity(dim=dim)
    return HPoint.boundary(parse_complex(value), dim=dim)


def _interior(conf: PointConf, dim: Dimension) -> HPoint:
    return HPoint.interior(parse_complex(conf.z), float(conf.h), dim=dim)


def _line(values: List[Any], dim: Dimension) -> GeodesicLine:
    if len(values) != 2:
        raise ValueError(f"An axis has two endpoints, got {list(values)}.")
    return GeodesicLine(_boundary(values[0], dim), _boundary(values[1], dim))


def _generator(conf: GeneratorConf, dim: Dimension) -> MobiusMap:
    if conf.matrix is not None:
        if conf.axis is not None:
            raise ValueError("Give either 'matrix' or 'axis', not both.")
        return MobiusMap.from_matrix(conf.matrix, dim=dim)
    if conf.axis is None or conf.length is None:
        raise ValueError("A generator needs 'matrix' or both 'axis' and 'length'.")
    line = _line(conf.axis, dim)
    return MobiusMap.loxodromic(line.start, line.end, conf.length, conf.rotation)


def _body(name: str, conf: BodyConf, dim: Dimension) -> BodySpec:
    kind = BodyKind(conf.kind.lower())
    body: ConvexBody
    if kind is BodyKind.BALL:
        if conf.center is None or conf.radius is None:
            raise ValueError(f"Ball '{name}' needs 'center' and 'radius'.")
        body = Ball(_interior(conf.center, dim), conf.radius)
    elif kind is BodyKind.HOROBALL:
        if conf.base is None or conf.size is None:
            raise ValueError(f"Horoball '{name}' needs 'base' and 'size'.")
        body = Horoball(_boundary(conf.base, dim), conf.size)
    else:
        if conf.axis is None:
            raise ValueError(f"Tube '{name}' needs an 'axis'.")
        body = Tube(_line(conf.axis, dim), 0.0 if conf.radius is None else conf.radius)
    return BodySpec(name=name, body=body, stabilizer=SubgroupSpec.parse(conf.stabilizer))


def _build(
    *,
    name: str,
    dim: Dimension,
    generators: List[GeneratorConf],
    basepoint: PointConf,
    bodies: Dict[str, BodyConf],
    freeness_assumed: bool,
    relator_check_length: int,
    tolerances: Tolerances,
    source: str,
) -> GroupSpec:
    try:
        return GroupSpec(
            generators=tuple(_generator(g, dim) for g in generators),
            basepoint=_interior(basepoint, dim),
            freeness_assumed=freeness_assumed,
            name=name,
            bodies={key: _body(key, conf, dim) for key, conf in bodies.items()},
            relator_check_length=relator_check_length,
            tolerances=tolerances,
        )
    except ValidationError as err:
        err.details.setdefault("file", source)
        raise
    except (HypcountError, ValueError) as err:
        raise _invalid(str(err), source, group=name) from err


def build_group(
    conf: GroupConf, *, tolerances: Tolerances = DEFAULT_TOLERANCES, source: str = "<memory>"
) -> GroupSpec:
    return _build(
        name=conf.name,
        dim=_dimension(conf.dimension, source),
        generators=conf.generators,
        basepoint=conf.basepoint,
        bodies=conf.bodies,
        freeness_assumed=conf.freeness_assumed,
        relator_check_length=conf.relator_check_length,
        tolerances=tolerances,
        source=source,
    )


def _merge(schema: type, path: Path) -> Any:
    if not path.is_file():
        raise _invalid(f"No such file: '{path}'.", str(path))
    try:
        merged = OmegaConf.merge(OmegaConf.structured(schema), OmegaConf.load(path))
        return OmegaConf.to_object(merged)
    except OmegaConfBaseException as err:
        raise _invalid(
            f"Invalid {schema.__name__} in '{path}': {err}",
            str(path),
            key=getattr(err, "full_key", None),
        ) from err


def load_group(path: Path | str, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> GroupSpec:
    """Read and validate a group file."""
    path = Path(path)
    conf = cast(GroupConf, _merge(GroupConf, path))
    return build_group(conf, tolerances=tolerances, source=str(path))


def _member(
    conf: MemberConf,
    family: FamilyConf,
    *,
    default_name: str,
    directory: Path,
    tolerances: Tolerances,
    source: str,
) -> GroupSpec:
    if conf.group is not None:
        return load_group(directory / conf.group, tolerances=tolerances)
    if conf.generators is None:
        raise _invalid(f"Member '{default_name}' needs 'group' or 'generators'.", source)
    basepoint = conf.basepoint if conf.basepoint is not None else family.basepoint
    if basepoint is None:
        raise _invalid(f"Member '{default_name}' has no basepoint.", source)
    bodies = dict(family.bodies)
    bodies.update(conf.bodies or {})
    return _build(
        name=conf.name or default_name,
        dim=_dimension(family.dimension, source),
        generators=conf.generators,
        basepoint=basepoint,
        bodies=bodies,
        freeness_assumed=family.freeness_assumed,
        relator_check_length=6,
        tolerances=tolerances,
        source=source,
    )


def build_family(
    conf: FamilyConf,
    *,
    directory: Path = Path("."),
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    source: str = "<memory>",
) -> FamilySpec:
    members = []
    for index, member in enumerate(conf.members):
        if member.k is None:
            raise _invalid(f"Family member {index} has no parameter 'k'.", source, member=index)
        members.append(
            (
                float(member.k),
                _member(
                    member,
                    conf,
                    default_name=f"{conf.name}[k={member.k:g}]",
                    directory=directory,
                    tolerances=tolerances,
                    source=source,
                ),
            )
        )
    limit = _member(
        conf.limit,
        conf,
        default_name=f"{conf.name}[limit]",
        directory=directory,
        tolerances=tolerances,
        source=source,
    )
    bodies = None
    if conf.ortho is not None:
        if len(conf.ortho) != 2:
            raise _invalid("'ortho' names exactly two bodies.", source, ortho=list(conf.ortho))
        bodies = (conf.ortho[0], conf.ortho[1])
    window = None if conf.window is None else (float(conf.window[0]), float(conf.window[1]))
    try:
        return FamilySpec(
            name=conf.name,
            members=tuple(members),
            limit=limit,
            T=conf.T,
            L=conf.L,
            bodies=bodies,
            window=window,
            node_budget=conf.node_budget,
        )
    except ValidationError as err:
        err.details.setdefault("file", source)
        raise


def load_family(path: Path | str, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> FamilySpec:
    """Read and validate a family file; member ``group`` paths are relative to it."""
    path = Path(path)
    conf = cast(FamilyConf, _merge(FamilyConf, path))
    return build_family(conf, directory=path.parent, tolerances=tolerances, source=str(path))

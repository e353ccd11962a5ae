"""Finitely generated (assumed free) groups of isometries with a basepoint and named bodies."""

from __future__ import annotations
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from functools import cached_property
import logging

from hypcount.config import DEFAULT_TOLERANCES, Tolerances
from hypcount.errors import FreenessError, UnsupportedStabilizerError, ValidationError
from hypcount.geometry.bodies import ConvexBody
from hypcount.geometry.points import HPoint
from hypcount.group.words import Word, letter_name, letter_rank, reduced_words
from hypcount.logging import init_logger
from hypcount.moebius import MobiusMap, apply, displacement_at
from hypcount.types import Dimension

__all__ = ["BodySpec", "GroupSpec", "SubgroupSpec"]


@dataclass(frozen=True)
class SubgroupSpec:
    """A trivial or cyclic subgroup ``⟨u⟩`` given by a word in the ambient generators."""

    generator: Word | None = None

    def __post_init__(self) -> None:
        if self.generator is not None and len(self.generator) == 0:
            object.__setattr__(self, "generator", None)

    @classmethod
    def parse(cls, text: str | Sequence[str] | None) -> SubgroupSpec:
        if text is None or text == "":
            return cls()
        if not isinstance(text, str):
            if len(text) > 1:
                raise UnsupportedStabilizerError(
                    f"Only trivial or cyclic stabilizers are supported, got generators"
                    f" {list(text)}."
                )
            if not text:
                return cls()
            text = text[0]
        return cls(Word.parse(text))

    @property
    def is_trivial(self) -> bool:
        return self.generator is None

    def check_supported(self) -> None:
        if self.generator is not None and not self.generator.is_cyclically_reduced():
            raise UnsupportedStabilizerError(
                f"Stabilizer generator '{self.generator}' is not cyclically reduced; conjugate the"
                " body so that it is."
            )

    def __str__(self) -> str:
        return "1" if self.generator is None else f"<{self.generator}>"


@dataclass(frozen=True)
class BodySpec:
    """A convex body together with its stabilizer in the group."""

    name: str
    body: ConvexBody
    stabilizer: SubgroupSpec = field(default_factory=SubgroupSpec)

    def translate(self, g: MobiusMap) -> BodySpec:
        return replace(self, body=self.body.translate(g))


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A group given by ordered generators ``g₁, ..., g_r`` (inverses implicit).

    :param generators: The generators.
    :param basepoint: Interior basepoint ``x₀`` of orbit counts.
    :param freeness_assumed: Whether the group is assumed free on its generators; checked for
        relators of length at most ``relator_check_length``.
    :param name: Label used in reports.
    :param bodies: Named convex bodies with stabilizers, for orthogeodesic counting.
    """

    generators: tuple[MobiusMap, ...]
    basepoint: HPoint
    freeness_assumed: bool = True
    name: str = "group"
    bodies: Mapping[str, BodySpec] = field(default_factory=dict)
    relator_check_length: int = 6
    tolerances: Tolerances = DEFAULT_TOLERANCES
    _cache: dict[Word, MobiusMap] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        details = {"group": self.name}
        if not self.generators:
            raise ValidationError("A group needs at least one generator.", details=details)
        if len(self.generators) > 13:
            raise ValidationError("At most 13 generators are supported.", details=details)
        dims = {g.dim for g in self.generators} | {self.basepoint.dim}
        if len(dims) != 1:
            raise ValidationError(
                "Generators and basepoint live in spaces of different dimension.",
                details={**details, "dimensions": sorted(dims)},
            )
        if not self.basepoint.is_interior:
            raise ValidationError("The basepoint must be an interior point.", details=details)
        for index, g in enumerate(self.generators, start=1):
            if g.is_identity(tol=self.tolerances.relator):
                raise ValidationError(
                    f"Generator '{letter_name(index)}' is the identity.",
                    details={**details, "generator": letter_name(index)},
                )
        for name, spec in self.bodies.items():
            if spec.body.dim != self.dim:
                raise ValidationError(
                    f"Body '{name}' lives in a space of different dimension.",
                    details={**details, "body": name},
                )
            if spec.stabilizer.generator is not None and any(
                abs(letter) > self.rank for letter in spec.stabilizer.generator
            ):
                raise ValidationError(
                    f"Stabilizer of body '{name}' uses letters beyond the {self.rank} generators.",
                    details={**details, "body": name},
                )
        if self.freeness_assumed:
            self._check_short_relators()

    @property
    def logger(self) -> logging.Logger:
        return init_logger(self.__class__.__name__)

    @property
    def dim(self) -> Dimension:
        return self.basepoint.dim

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_elementary(self) -> bool:
        return self.rank == 1

    @property
    def alphabet(self) -> tuple[int, ...]:
        """Signed letters in rank order ``a, A, b, B, ...``."""
        letters = (sign * i for i in range(1, self.rank + 1) for sign in (1, -1))
        return tuple(sorted(letters, key=letter_rank))

    def generator(self, letter: int) -> MobiusMap:
        g = self.generators[abs(letter) - 1]
        return g if letter > 0 else g.inverse()

    def evaluate(self, word: Word) -> MobiusMap:
        """The product ``g_{w₁} ⋯ g_{w_n}``, cached by prefix."""
        if len(word) == 0:
            return MobiusMap.identity(dim=self.dim)
        cached = self._cache.get(word)
        if cached is None:
            prefix = Word(word.letters[:-1])
            cached = self.evaluate(prefix) @ self.generator(word.letters[-1])
            if len(self._cache) < 200_000:
                self._cache[word] = cached
        return cached

    @cached_property
    def generator_displacements(self) -> tuple[float, ...]:
        return tuple(displacement_at(g, self.basepoint) for g in self.generators)

    @property
    def max_generator_displacement(self) -> float:
        return max(self.generator_displacements)

    @property
    def min_generator_displacement(self) -> float:
        return min(self.generator_displacements)

    def body(self, name: str) -> BodySpec:
        try:
            return self.bodies[name]
        except KeyError:
            raise ValidationError(
                f"Group '{self.name}' has no body named '{name}'.",
                details={"group": self.name, "body": name, "available": sorted(self.bodies)},
            ) from None

    def with_basepoint(self, basepoint: HPoint) -> GroupSpec:
        if basepoint == self.basepoint:
            return self
        return replace(self, basepoint=basepoint)

    def conjugate(self, h: MobiusMap) -> GroupSpec:
        """The group ``h Γ h⁻¹`` with basepoint ``h·x₀`` and bodies ``h·D``."""
        return replace(
            self,
            generators=tuple(g.conjugate(h) for g in self.generators),
            basepoint=apply(h, self.basepoint),
            bodies={name: spec.translate(h) for name, spec in self.bodies.items()},
        )

    def _check_short_relators(self) -> None:
        for word in reduced_words(self.rank, self.relator_check_length):
            if self.evaluate(word).is_identity(tol=self.tolerances.relator):
                raise FreenessError(
                    f"The word '{word}' evaluates to the identity, so '{self.name}' is not free on"
                    " its generators.",
                    details={"group": self.name, "relator": str(word)},
                )

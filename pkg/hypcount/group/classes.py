"""Conjugacy classes of a free group, i.e. closed geodesics of the quotient."""

from __future__ import annotations
from dataclasses import dataclass, replace
import math

import numpy as np

from hypcount.config import EnumerationConfig
from hypcount.errors import ParameterError
from hypcount.group.orbit import (
    Certificate,
    CertificateKind,
    Pruned,
    enumerate_orbit,
)
from hypcount.group.spec import GroupSpec
from hypcount.group.words import Word, reduced_words
from hypcount.logging import init_logger
from hypcount.moebius import classify
from hypcount.types import IsometryKind, NDArrayC, NDArrayF

__all__ = ["ClassBatch", "ConjugacyClass", "conjugacy_classes", "translation_lengths"]

LOGGER = init_logger(__name__)


@dataclass(frozen=True)
class ConjugacyClass:
    """An unoriented conjugacy class, represented by its cyclic canonical word."""

    word: Word
    translation_length: float
    primitive: bool
    kind: IsometryKind = IsometryKind.LOXODROMIC

    @property
    def is_loxodromic(self) -> bool:
        return self.kind is IsometryKind.LOXODROMIC


@dataclass(frozen=True)
class ClassBatch:
    """Classes with translation length at most ``max_length``, sorted by (length, word)."""

    max_length: float
    classes: tuple[ConjugacyClass, ...]
    certificate: Certificate

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def primitive(self) -> tuple[ConjugacyClass, ...]:
        return tuple(cls for cls in self.classes if cls.primitive)

    def lengths(self, *, primitive_only: bool = True) -> NDArrayF:
        chosen = self.primitive() if primitive_only else self.classes
        return np.array(
            [cls.translation_length for cls in chosen if cls.is_loxodromic], dtype=np.float64
        )


def translation_lengths(elements: NDArrayC) -> NDArrayF:
    """Vectorised real part of ``2·arccosh(tr/2)`` for a stack of ``2×2`` matrices."""
    traces = (elements[:, 0, 0] + elements[:, 1, 1]).astype(np.complex128)
    return np.abs((2.0 * np.arccosh(traces / 2.0)).real)


def _make_class(spec: GroupSpec, word: Word) -> ConjugacyClass:
    iso = classify(spec.evaluate(word), tol=spec.tolerances.classification)
    return ConjugacyClass(
        word=word,
        translation_length=iso.translation_length,
        primitive=not word.is_proper_power(),
        kind=iso.kind,
    )


def _sorted(classes: dict[Word, ConjugacyClass]) -> tuple[ConjugacyClass, ...]:
    return tuple(
        sorted(classes.values(), key=lambda c: (c.translation_length, len(c.word), c.word.rank_key))
    )


def conjugacy_classes(
    spec: GroupSpec,
    max_length: float,
    *,
    max_word_length: int | None = None,
    config: EnumerationConfig | None = None,
) -> ClassBatch:
    """Enumerate conjugacy classes with translation length at most ``max_length``.

    By default the candidates are the cyclically reduced words of a pruned orbit at cutoff
    ``max_length + 2·slack``. With ``max_word_length`` every cyclically reduced word up to that
    length is visited instead, and ``max_length`` may be infinite.

    :raises ParameterError: If ``max_length`` is not positive or the group is not assumed free.
    """
    if not max_length > 0:
        raise ParameterError(f"'max_length' must be positive, got {max_length}.")
    if not spec.freeness_assumed:
        raise ParameterError("Conjugacy class enumeration requires 'freeness_assumed'.")
    found: dict[Word, ConjugacyClass] = {}

    if max_word_length is not None:
        if max_word_length < 1:
            raise ParameterError(f"'max_word_length' must be at least 1, got {max_word_length}.")
        saturated = False
        for word in reduced_words(spec.rank, max_word_length):
            if not word.is_cyclically_reduced():
                continue
            canonical = word.cyclic_canonical()
            if canonical in found:
                continue
            cls = _make_class(spec, canonical)
            if cls.translation_length <= max_length:
                found[canonical] = cls
                saturated |= len(canonical) == max_word_length
        certificate = Certificate(
            CertificateKind.EXACT,
            cutoff=max_length,
            depth_limit=max_word_length,
            saturated=saturated,
        )
        return ClassBatch(max_length, _sorted(found), certificate)

    if math.isinf(max_length):
        raise ParameterError("An infinite 'max_length' needs 'max_word_length'.")
    config = EnumerationConfig() if config is None else config
    slack = spec.max_generator_displacement
    batch = enumerate_orbit(
        spec, max_length + 2 * slack, Pruned(), config=replace(config, keep_elements=True)
    )
    assert batch.elements is not None
    candidates = batch.nonidentity
    taus = translation_lengths(batch.elements[candidates])
    tol = spec.tolerances.classification
    for index in candidates[taus <= max_length + tol]:
        word = batch.word(int(index))
        if not word.is_cyclically_reduced():
            continue
        canonical = word.cyclic_canonical()
        if canonical in found:
            continue
        cls = _make_class(spec, canonical)
        if cls.translation_length <= max_length:
            found[canonical] = cls
    LOGGER.debug(
        "%d conjugacy classes of '%s' with length <= %s from %d orbit elements",
        len(found),
        spec.name,
        max_length,
        len(batch),
    )
    certificate = Certificate(
        CertificateKind.PRUNED, cutoff=max_length, slack=batch.certificate.slack
    )
    return ClassBatch(max_length, _sorted(found), certificate)

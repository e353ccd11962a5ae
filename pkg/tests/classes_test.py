"""Test conjugacy classes and double coset reduction."""

import math

import numpy as np
import pytest

from hypcount.errors import ParameterError, UnsupportedStabilizerError
from hypcount.group.classes import conjugacy_classes, translation_lengths
from hypcount.group.cosets import canonical_double_coset, double_coset_indices, double_cosets
from hypcount.group.orbit import CertificateKind, enumerate_orbit
from hypcount.group.spec import GroupSpec, SubgroupSpec
from hypcount.group.words import Word, reduced_words
from hypcount.moebius import translation_length

TRIVIAL = SubgroupSpec()


def w(text: str) -> Word:
    return Word.parse(text)


def brute_force_minimum(word: Word, left: SubgroupSpec, right: SubgroupSpec, reach: int) -> Word:
    def powers(generator: Word | None) -> list[Word]:
        if generator is None:
            return [Word()]
        return [generator**i for i in range(-reach, reach + 1)]

    return min(u * word * v for u in powers(left.generator) for v in powers(right.generator))


def test_free_rank_two_classes(schottky: GroupSpec) -> None:
    batch = conjugacy_classes(schottky, math.inf, max_word_length=2)
    assert len(batch) == 6
    assert len(batch.primitive()) == 4
    assert {cls.word for cls in batch} == {w(x) for x in ("a", "b", "aa", "bb", "ab", "aB")}
    assert batch.certificate.kind is CertificateKind.EXACT
    assert batch.certificate.saturated


def test_class_lengths(schottky: GroupSpec) -> None:
    batch = conjugacy_classes(schottky, math.inf, max_word_length=2)
    by_word = {cls.word: cls.translation_length for cls in batch}
    assert by_word[w("a")] == pytest.approx(2.0)
    assert by_word[w("aa")] == pytest.approx(4.0)
    # perpendicular axes: cosh(l/2) = cosh(1)^2
    assert by_word[w("ab")] == pytest.approx(2 * math.acosh(math.cosh(1.0) ** 2))
    assert np.all(np.diff(batch.lengths(primitive_only=False)) >= 0)
    assert len(batch.lengths()) == 4


def test_pruned_classes_match_word_enumeration(schottky: GroupSpec) -> None:
    pruned = conjugacy_classes(schottky, 3.5)
    combinatorial = conjugacy_classes(schottky, 3.5, max_word_length=6)
    assert not combinatorial.certificate.saturated
    assert pruned.certificate.kind is CertificateKind.PRUNED
    assert [cls.word for cls in pruned] == [cls.word for cls in combinatorial]
    np.testing.assert_allclose(pruned.lengths(), combinatorial.lengths())
    # the commutator bounds the one-holed torus and has length 3.39
    assert {cls.word for cls in pruned} == {w(x) for x in ("a", "b", "ab", "aB", "abAB")}


def test_cyclic_classes(cyclic: GroupSpec) -> None:
    batch = conjugacy_classes(cyclic, 5.0)
    assert [str(cls.word) for cls in batch] == ["a", "aa", "a^3"]
    assert [cls.primitive for cls in batch] == [True, False, False]


def test_class_arguments(schottky: GroupSpec) -> None:
    with pytest.raises(ParameterError):
        conjugacy_classes(schottky, 0.0)
    with pytest.raises(ParameterError):
        conjugacy_classes(schottky, math.inf)
    with pytest.raises(ParameterError):
        conjugacy_classes(schottky, 3.0, max_word_length=0)


def test_vectorised_translation_lengths(schottky: GroupSpec) -> None:
    batch = enumerate_orbit(schottky, 5.0)
    assert batch.elements is not None
    expected = [translation_length(batch.element(i)) for i in range(len(batch))]
    np.testing.assert_allclose(translation_lengths(batch.elements), expected, atol=1e-7)


def test_canonical_double_coset() -> None:
    b = SubgroupSpec(w("b"))
    assert canonical_double_coset(w("aB"), TRIVIAL, TRIVIAL) == w("aB")
    assert canonical_double_coset(w("bba"), b, TRIVIAL) == w("a")
    assert canonical_double_coset(w("ab"), TRIVIAL, b) == w("a")
    assert canonical_double_coset(w("bAB"), b, b) == w("A")
    assert canonical_double_coset(w("bbb"), b, b) == Word()


def test_length_preserving_moves() -> None:
    # B and a = ab·B lie in the same coset <ab>·B; neither move shortens
    ab = SubgroupSpec(w("ab"))
    assert canonical_double_coset(w("B"), ab, TRIVIAL) == w("a")
    assert canonical_double_coset(w("a"), ab, TRIVIAL) == w("a")


def test_shortest_word_needs_a_longer_detour() -> None:
    # b = A²·(aab) and A³b = A⁵·(aab) lie in the double coset of the identity
    a, aab = SubgroupSpec(w("a")), SubgroupSpec(w("aab"))
    assert canonical_double_coset(w("b"), a, aab) == Word()
    assert canonical_double_coset(w("A^3b"), a, aab) == Word()


@pytest.mark.parametrize(
    ("left", "right"),
    [
        ("a", "aab"),
        ("ab", "aabb"),
        ("aB", "abAB"),
        ("aab", "ab"),
        ("aab", "aabb"),
        ("a", "ab"),
        ("b", "aB"),
        ("ab", ""),
    ],
)
def test_canonical_double_coset_is_the_shortest_word(left: str, right: str) -> None:
    u, v = SubgroupSpec.parse(left), SubgroupSpec.parse(right)
    for word in [Word(), *reduced_words(2, 3)]:
        assert canonical_double_coset(word, u, v) == brute_force_minimum(word, u, v, reach=10)


def test_unsupported_stabilizer() -> None:
    with pytest.raises(UnsupportedStabilizerError):
        canonical_double_coset(w("a"), SubgroupSpec(w("abA")), TRIVIAL)


def test_double_cosets(schottky: GroupSpec) -> None:
    b = SubgroupSpec(w("b"))
    cosets = double_cosets(schottky, b, b, 6.0)
    representatives = cosets.representatives()
    assert representatives[0] == Word()
    assert len(set(representatives)) == len(cosets)
    for word in representatives[1:]:
        assert abs(word[0]) != 2 and abs(word[-1]) != 2
    seen = set(representatives)
    for index in range(len(cosets.batch)):
        assert canonical_double_coset(cosets.batch.word(index), b, b) in seen
    assert np.all(np.diff(cosets.indices) > 0)


def test_double_cosets_with_different_stabilizers(schottky: GroupSpec) -> None:
    a, ab = SubgroupSpec(w("a")), SubgroupSpec(w("ab"))
    cosets = double_cosets(schottky, a, ab, 6.0)
    words = [cosets.batch.word(index) for index in range(len(cosets.batch))]
    classes = {brute_force_minimum(word, a, ab, reach=2 * len(word) + 4) for word in words}
    representatives = cosets.representatives()
    assert len(set(representatives)) == len(cosets) == len(classes)
    assert set(representatives) == classes


def test_trivial_stabilizers_keep_every_element(schottky: GroupSpec) -> None:
    batch = enumerate_orbit(schottky, 5.0)
    np.testing.assert_array_equal(
        double_coset_indices(batch, TRIVIAL, TRIVIAL), np.arange(len(batch))
    )

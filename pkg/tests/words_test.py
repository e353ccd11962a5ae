"""Test reduced words, word tables and group descriptions."""

import math

import numpy as np
import pytest

from hypcount.errors import (
    FreenessError,
    ParameterError,
    UnsupportedStabilizerError,
    ValidationError,
)
from hypcount.geometry.points import HPoint
from hypcount.group.spec import GroupSpec, SubgroupSpec
from hypcount.group.trie import PowerTable, SyllableTrie
from hypcount.group.words import Word, letter_name, letter_rank, reduced_words
from hypcount.moebius import MobiusMap, displacement_at


def w(text: str) -> Word:
    return Word.parse(text)


def test_free_reduction() -> None:
    assert Word([1, 2, -2, -1]) == Word()
    assert w("aB") * w("bA") == Word()
    assert len(w("abaA")) == 2
    assert w("ab").inverse() == w("BA")
    assert w("ab") ** 3 == w("ababab")
    assert w("ab") ** -1 == w("BA")


def test_parse_and_print() -> None:
    assert w("a^3B^-2").letters == (1, 1, 1, 2, 2)
    assert str(w("a^3B^-2")) == "a^3bb"
    assert str(Word()) == "1"
    assert w("1") == w("") == Word()
    assert letter_name(-3) == "C"
    with pytest.raises(ParameterError):
        w("a*b")


def test_rank_order() -> None:
    assert [letter_rank(x) for x in (1, -1, 2, -2)] == [0, 1, 2, 3]
    assert w("A") < w("b")
    assert w("B") < w("aa")
    assert w("ab").rank == 2


def test_reduced_words() -> None:
    words = list(reduced_words(2, 3))
    assert len(words) == 4 + 12 + 36
    assert len(set(words)) == len(words)
    assert words[:4] == [w("a"), w("A"), w("b"), w("B")]
    assert all(len(x) <= len(y) for x, y in zip(words, words[1:]))


def test_cyclic_reduction() -> None:
    u, core = w("abcA").cyclic_reduction()
    assert (u, core) == (w("a"), w("bc"))
    assert w("abcA").is_cyclically_reduced() is False
    assert w("ba").cyclic_canonical() == w("ab")
    assert w("AB").cyclic_canonical() == w("ab")
    assert w("bAab").cyclic_canonical() == w("bb").cyclic_canonical()


def test_proper_powers() -> None:
    assert w("abab").is_proper_power()
    assert w("aa").is_proper_power()
    assert not w("aab").is_proper_power()
    assert not w("a").is_proper_power()


def test_word_tables() -> None:
    # a, aa, ab under the root
    trie, offsets = SyllableTrie.merge(
        [(np.array([1, 1, 2]), np.array([1, 2, 1]), np.array([-1, -1, 0]))]
    )
    assert offsets == [1]
    assert trie.word(1) == w("a")
    assert trie.word(2) == w("aa")
    assert trie.word(3) == w("ab")
    assert trie.label(0) == "1"
    assert PowerTable().word(-4) == w("A^4")
    assert PowerTable().label(5) == "a^5"


def test_subgroups() -> None:
    assert SubgroupSpec.parse(None).is_trivial
    assert SubgroupSpec.parse("1").is_trivial
    assert SubgroupSpec.parse(["b"]).generator == w("b")
    with pytest.raises(UnsupportedStabilizerError):
        SubgroupSpec.parse(["a", "b"])
    with pytest.raises(UnsupportedStabilizerError):
        SubgroupSpec.parse("abA").check_supported()


def test_group_spec(schottky: GroupSpec) -> None:
    assert schottky.rank == 2
    assert schottky.alphabet == (1, -1, 2, -2)
    assert schottky.generator_displacements == pytest.approx((2.0, 2.0))
    g = schottky.evaluate(w("aB"))
    assert g.isclose(schottky.generators[0] @ schottky.generators[1].inverse())
    assert set(schottky.bodies) == {"ball0", "tube_a", "tube_b", "horo_p", "horo_m"}
    assert schottky.body("tube_b").stabilizer.generator == w("b")
    with pytest.raises(ValidationError):
        schottky.body("missing")


def test_conjugated_spec(schottky: GroupSpec) -> None:
    h = MobiusMap.from_matrix([[1, 3], [0, 1]], dim=2)
    moved = schottky.conjugate(h)
    assert moved.basepoint.isclose(HPoint.interior(3, 1))
    for g, k in zip(moved.generators, schottky.generators):
        assert displacement_at(g, moved.basepoint) == pytest.approx(
            displacement_at(k, schottky.basepoint)
        )


def test_group_validation() -> None:
    basepoint = HPoint.interior(0, 1)
    with pytest.raises(ValidationError):
        GroupSpec(generators=(), basepoint=basepoint)
    with pytest.raises(ValidationError):
        GroupSpec(generators=(MobiusMap.identity(),), basepoint=basepoint)
    with pytest.raises(ValidationError):
        GroupSpec(generators=(MobiusMap.identity(dim=3),), basepoint=basepoint)
    with pytest.raises(ValidationError):
        GroupSpec(generators=(MobiusMap(2, 0, 0, 0.5),), basepoint=HPoint.boundary(0.0))
    # a rotation by pi has order two
    half_turn = MobiusMap.from_matrix([[0, 1], [-1, 0]], dim=2)
    with pytest.raises(FreenessError) as exc_info:
        GroupSpec(generators=(half_turn,), basepoint=basepoint)
    assert exc_info.value.details["relator"] == "aa"
    assert GroupSpec(generators=(half_turn,), basepoint=basepoint, freeness_assumed=False).rank == 1


def test_rotation_of_order_seven_is_found() -> None:
    angle = math.pi / 7
    rotation = MobiusMap(math.cos(angle), math.sin(angle), -math.sin(angle), math.cos(angle))
    # rotations fix i; the seventh power is -I
    with pytest.raises(FreenessError):
        GroupSpec(
            generators=(rotation,), basepoint=HPoint.interior(0, 1), relator_check_length=7
        )

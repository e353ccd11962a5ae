"""Reduced words over a symmetric generating set."""

from __future__ import annotations
from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property
import itertools
import re
from typing import Final
from typing_extensions import Self

from hypcount.errors import ParameterError

__all__ = ["Word", "letter_name", "letter_rank", "reduced_words", "syllable_label"]

_SYLLABLE_RE: Final = re.compile(r"([a-zA-Z])(?:\^(-?\d+))?")
_POWER_DISPLAY: Final[int] = 3


def letter_name(letter: int) -> str:
    """``+i`` prints as the ``i``-th lower-case letter, ``-i`` as its upper-case inverse."""
    if letter == 0 or abs(letter) > 26:
        raise ParameterError(f"Letters are nonzero indices up to 26, got {letter}.")
    name = chr(ord("a") + abs(letter) - 1)
    return name if letter > 0 else name.upper()


def letter_rank(letter: int) -> int:
    """Order ``a < A < b < B < ...`` used to break ties deterministically."""
    return 2 * (abs(letter) - 1) + (letter < 0)


def syllable_label(syllables: Iterable[tuple[int, int]]) -> str:
    """Render ``[(letter, run_length), ...]``; long runs print as powers (``a^12``)."""
    parts = []
    for letter, run in syllables:
        name = letter_name(letter)
        parts.append(f"{name}^{run}" if run >= _POWER_DISPLAY else name * run)
    return "".join(parts) or "1"


class Word(Sequence[int]):
    """A freely reduced word, stored as a tuple of signed generator indices."""

    def __init__(self, letters: Iterable[int] = ()) -> None:
        reduced: list[int] = []
        for letter in letters:
            if letter == 0:
                raise ParameterError("Letter 0 is not a generator index.")
            if reduced and reduced[-1] == -letter:
                reduced.pop()
            else:
                reduced.append(letter)
        self._letters = tuple(reduced)

    @classmethod
    def parse(cls, text: str) -> Self:
        """Parse ``"aB"``, ``"a^3B^-2"`` or ``"1"`` (the empty word)."""
        text = text.strip().replace(" ", "")
        if text in ("", "1", "e"):
            return cls()
        letters: list[int] = []
        pos = 0
        for match in _SYLLABLE_RE.finditer(text):
            if match.start() != pos:
                break
            pos = match.end()
            name, power = match.group(1), match.group(2)
            letter = ord(name.lower()) - ord("a") + 1
            if name.isupper():
                letter = -letter
            exponent = 1 if power is None else int(power)
            letters.extend([letter if exponent > 0 else -letter] * abs(exponent))
        if pos != len(text):
            raise ParameterError(f"Cannot parse word '{text}'.")
        return cls(letters)

    @property
    def letters(self) -> tuple[int, ...]:
        return self._letters

    def __len__(self) -> int:
        return len(self._letters)

    def __getitem__(self, index):  # type: ignore[override]
        return self._letters[index]

    def __iter__(self) -> Iterator[int]:
        return iter(self._letters)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self._letters == other._letters

    def __hash__(self) -> int:
        return hash(self._letters)

    def __lt__(self, other: Word) -> bool:
        return (len(self), self.rank_key) < (len(other), other.rank_key)

    def __mul__(self, other: Word) -> Word:
        return Word(itertools.chain(self._letters, other._letters))

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        return Word(itertools.chain.from_iterable(itertools.repeat(base._letters, abs(n))))

    def inverse(self) -> Word:
        return Word(-letter for letter in reversed(self._letters))

    @cached_property
    def rank_key(self) -> tuple[int, ...]:
        return tuple(letter_rank(letter) for letter in self._letters)

    @property
    def rank(self) -> int:
        """Number of distinct generators used."""
        return len({abs(letter) for letter in self._letters})

    def syllables(self) -> list[tuple[int, int]]:
        return [(letter, len(list(run))) for letter, run in itertools.groupby(self._letters)]

    def is_cyclically_reduced(self) -> bool:
        return len(self) <= 1 or self._letters[0] != -self._letters[-1]

    def cyclic_reduction(self) -> tuple[Word, Word]:
        """Write the word as ``u·w·u⁻¹`` with ``w`` cyclically reduced; returns ``(u, w)``."""
        letters = self._letters
        k = 0
        while k < len(letters) - 1 - k and letters[k] == -letters[-1 - k]:
            k += 1
        return Word(letters[:k]), Word(letters[k : len(letters) - k])

    def rotations(self) -> Iterator[Word]:
        for k in range(max(len(self), 1)):
            yield Word(self._letters[k:] + self._letters[:k])

    def cyclic_canonical(self) -> Word:
        """Representative of the word's conjugacy class up to inversion: the smallest cyclic
        rotation of the cyclic reduction or of its inverse."""
        _, core = self.cyclic_reduction()
        candidates = itertools.chain(core.rotations(), core.inverse().rotations())
        return min(candidates, key=lambda w: w.rank_key)

    def is_proper_power(self) -> bool:
        """Whether the cyclic word is a proper power of a shorter one."""
        if len(self) < 2:
            return False
        letters = self._letters
        doubled = letters + letters
        n = len(letters)
        return any(doubled[k : k + n] == letters for k in range(1, n))

    def __str__(self) -> str:
        return syllable_label(self.syllables())

    def __repr__(self) -> str:
        return f"Word('{self}')"


def reduced_words(rank: int, max_length: int) -> Iterator[Word]:
    """All nonempty reduced words of length at most ``max_length``, by length then rank order."""
    alphabet = sorted(
        (sign * i for i in range(1, rank + 1) for sign in (1, -1)), key=letter_rank
    )
    level: list[tuple[int, ...]] = [(letter,) for letter in alphabet]
    for _ in range(max_length):
        if not level:
            return
        yield from (Word(letters) for letters in level)
        level = [
            letters + (letter,)
            for letters in level
            for letter in alphabet
            if letter != -letters[-1]
        ]

"""Compact storage of the words indexing an orbit batch."""

from __future__ import annotations
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass
from typing_extensions import override

import numpy as np

from hypcount.group.words import Word, syllable_label
from hypcount.types import NDArrayI

__all__ = ["PowerTable", "SyllableTrie", "WordTable"]


class WordTable(ABC):
    """Maps node ids to words without materialising every word up front."""

    @abstractmethod
    def syllables(self, node: int) -> list[tuple[int, int]]:
        """``[(letter, run_length), ...]`` of the word at ``node``."""

    def word(self, node: int) -> Word:
        return Word(letter for letter, run in self.syllables(node) for _ in range(run))

    def label(self, node: int) -> str:
        return syllable_label(self.syllables(node))


@dataclass(frozen=True, eq=False)
class SyllableTrie(WordTable):
    """Prefix tree of reduced words. Node 0 is the empty word.

    Each node stores its last syllable (``letter``, ``run_length``) and ``run_parent``, the
    node of the prefix preceding that syllable, so words come out in syllable form in time
    proportional to their number of syllables.
    """

    letter: NDArrayI
    run_length: NDArrayI
    run_parent: NDArrayI

    def __len__(self) -> int:
        return len(self.letter)

    @override
    def syllables(self, node: int) -> list[tuple[int, int]]:
        out: list[tuple[int, int]] = []
        while node > 0:
            out.append((int(self.letter[node]), int(self.run_length[node])))
            node = int(self.run_parent[node])
        out.reverse()
        return out

    @classmethod
    def merge(
        cls, parts: Sequence[tuple[NDArrayI, NDArrayI, NDArrayI]]
    ) -> tuple[SyllableTrie, list[int]]:
        """Join partition-local tries under a common root.

        Partition-local ``run_parent`` values of ``-1`` refer to the root.

        :returns: The merged trie and, per part, the offset to add to its local node ids.
        """
        letters = [np.zeros(1, dtype=np.int8)]
        runs = [np.zeros(1, dtype=np.int32)]
        parents = [np.full(1, -1, dtype=np.int64)]
        offsets: list[int] = []
        offset = 1
        for letter, run_length, run_parent in parts:
            offsets.append(offset)
            letters.append(letter.astype(np.int8))
            runs.append(run_length.astype(np.int32))
            parents.append(np.where(run_parent < 0, 0, run_parent + offset).astype(np.int64))
            offset += len(letter)
        trie = cls(
            letter=np.concatenate(letters),
            run_length=np.concatenate(runs),
            run_parent=np.concatenate(parents),
        )
        return trie, offsets


@dataclass(frozen=True, eq=False)
class PowerTable(WordTable):
    """Words of a cyclic group: node ``n`` is the ``n``-th power of the generator."""

    letter: int = 1

    @override
    def syllables(self, node: int) -> list[tuple[int, int]]:
        if node == 0:
            return []
        return [(self.letter if node > 0 else -self.letter, abs(node))]

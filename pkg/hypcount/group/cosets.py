"""Double cosets ``H⁻\\Γ/H⁺`` for trivial or cyclic ``H±``."""

from __future__ import annotations
from dataclasses import dataclass
import math

import numpy as np

from hypcount.config import EnumerationConfig
from hypcount.group.orbit import EnumerationMode, OrbitBatch, enumerate_orbit
from hypcount.group.spec import GroupSpec, SubgroupSpec
from hypcount.group.words import Word
from hypcount.logging import init_logger
from hypcount.types import NDArrayI

__all__ = ["DoubleCosets", "canonical_double_coset", "double_cosets", "double_coset_indices"]

LOGGER = init_logger(__name__)


def _moves(word: Word, left: Word | None, right: Word | None) -> list[Word]:
    out: list[Word] = []
    if left is not None:
        out.extend((left * word, left.inverse() * word))
    if right is not None:
        out.extend((word * right, word * right.inverse()))
    return out


def _descend(word: Word, left: Word | None, right: Word | None) -> Word:
    while True:
        shorter = [w for w in _moves(word, left, right) if len(w) < len(word)]
        if not shorter:
            return word
        word = min(shorter)


def _exponent_bound(length: int, period: int, other: int | None) -> int:
    # u^i = X·Z·P⁻¹ with |X| + |P| <= 2·length, and an overlap Z with v^j shorter than
    # lcm(|u|, |v|) for a pair (i, j) of minimal |i| + |j|
    overlap = 0 if other is None else math.lcm(period, other)
    return (2 * length + overlap) // period


def _powers(generator: Word | None, bound: int) -> list[Word]:
    if generator is None:
        return [Word()]
    return [generator**i for i in range(-bound, bound + 1)]


def canonical_double_coset(word: Word, left: SubgroupSpec, right: SubgroupSpec) -> Word:
    """The shortest word of ``⟨u⟩·word·⟨v⟩``, ties broken by rank order.

    Greedy shortening gives a representative ``w``; the minimum is then taken over
    ``u^i·w·v^j`` for all exponents within the bound on free cancellation.
    """
    u, v = left.generator, right.generator
    if u is None and v is None:
        return word
    left.check_supported()
    right.check_supported()
    start = _descend(word, u, v)
    n = len(start)
    i_max = 0 if u is None else _exponent_bound(n, len(u), None if v is None else len(v))
    j_max = 0 if v is None else _exponent_bound(n, len(v), None if u is None else len(u))
    lefts = [power * start for power in _powers(u, i_max)]
    return min(prefix * power for prefix in lefts for power in _powers(v, j_max))


@dataclass(frozen=True)
class DoubleCosets:
    """Representatives of the double cosets met by an orbit batch.

    ``indices`` point into ``batch`` at the first (closest) element of each double coset, in
    batch order.
    """

    batch: OrbitBatch
    indices: NDArrayI
    left: SubgroupSpec
    right: SubgroupSpec

    def __len__(self) -> int:
        return len(self.indices)

    def representative(self, k: int) -> Word:
        return canonical_double_coset(self.batch.word(int(self.indices[k])), self.left, self.right)

    def representatives(self) -> list[Word]:
        return [self.representative(k) for k in range(len(self))]


def double_coset_indices(
    batch: OrbitBatch, left: SubgroupSpec, right: SubgroupSpec
) -> NDArrayI:
    """Indices of the first batch element in each double coset."""
    if left.is_trivial and right.is_trivial:
        return np.arange(len(batch))
    left.check_supported()
    right.check_supported()
    seen: set[Word] = set()
    indices: list[int] = []
    for index in range(len(batch)):
        canonical = canonical_double_coset(batch.word(index), left, right)
        if canonical in seen:
            continue
        seen.add(canonical)
        indices.append(index)
    return np.array(indices, dtype=np.int64)


def double_cosets(
    spec: GroupSpec,
    stab_minus: SubgroupSpec,
    stab_plus: SubgroupSpec,
    T: float,
    mode: EnumerationMode | None = None,
    *,
    config: EnumerationConfig | None = None,
) -> DoubleCosets:
    """One representative per double coset ``H⁻γH⁺`` among the orbit elements within ``T``.

    :raises UnsupportedStabilizerError: If a stabilizer generator is not cyclically reduced.
    """
    stab_minus.check_supported()
    stab_plus.check_supported()
    batch = enumerate_orbit(spec, T, mode, config=config)
    indices = double_coset_indices(batch, stab_minus, stab_plus)
    LOGGER.debug(
        "%d double cosets %s\\%s/%s among %d elements",
        len(indices),
        stab_minus,
        spec.name,
        stab_plus,
        len(batch),
    )
    return DoubleCosets(batch=batch, indices=indices, left=stab_minus, right=stab_plus)

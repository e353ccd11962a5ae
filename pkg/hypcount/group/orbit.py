"""Orbit enumeration: all group elements displacing the basepoint by at most a cutoff."""

from __future__ import annotations
from dataclasses import dataclass, field
from enum import auto
from functools import partial
import logging
import math
from typing import TypeAlias

from joblib import Parallel, delayed
import numpy as np
from ranzen import StrEnum

from hypcount.config import EnumerationConfig
from hypcount.errors import BudgetExceededError, ParameterError
from hypcount.geometry.bodies import Ball
from hypcount.geometry.points import HPoint
from hypcount.group.spec import GroupSpec
from hypcount.group.trie import PowerTable, SyllableTrie, WordTable
from hypcount.group.words import Word, letter_rank
from hypcount.logging import init_logger
from hypcount.moebius import MobiusMap, basepoint_frame, displacement_from_j
from hypcount.types import Dimension, NDArrayC, NDArrayF, NDArrayI

__all__ = [
    "Certificate",
    "CertificateKind",
    "EnumerationMode",
    "EnumerationStats",
    "Exact",
    "OrbitBatch",
    "Pruned",
    "embedded_ball",
    "enumerate_orbit",
    "injectivity_radius",
]

LOGGER = init_logger(__name__)


class CertificateKind(StrEnum):
    EXACT = auto()
    PRUNED = auto()


@dataclass(frozen=True)
class Exact:
    """Visit every reduced word of length at most ``depth_limit``."""

    depth_limit: int

    def __post_init__(self) -> None:
        if self.depth_limit < 1:
            raise ParameterError(f"'depth_limit' must be at least 1, got {self.depth_limit}.")


@dataclass(frozen=True)
class Pruned:
    """Drop a subtree once its root displaces the basepoint by more than ``T + slack``.

    ``slack`` defaults to the largest generator displacement.
    """

    slack: float | None = None

    def __post_init__(self) -> None:
        if self.slack is not None and self.slack < 0:
            raise ParameterError(f"'slack' must be nonnegative, got {self.slack}.")


EnumerationMode: TypeAlias = Exact | Pruned


@dataclass(frozen=True)
class Certificate:
    """How complete an orbit batch is.

    For ``EXACT`` batches ``saturated`` means some word of maximal length still lies within the
    cutoff, so a larger depth limit may find more elements.
    """

    kind: CertificateKind
    cutoff: float
    slack: float | None = None
    depth_limit: int | None = None
    saturated: bool = False

    def describe(self) -> str:
        if self.kind is CertificateKind.PRUNED:
            return f"pruned(T={self.cutoff:.12g}, slack={self.slack:.12g})"
        state = "saturated" if self.saturated else "complete"
        return f"exact(T={self.cutoff:.12g}, depth_limit={self.depth_limit}, {state})"

    def to_dict(self) -> dict[str, object]:
        return {
            "kind": str(self.kind),
            "cutoff": self.cutoff,
            "slack": self.slack,
            "depth_limit": self.depth_limit,
            "saturated": self.saturated,
        }


@dataclass(frozen=True)
class EnumerationStats:
    nodes_visited: int = 0
    partitions: int = 0
    duplicates_dropped: int = 0
    max_depth: int = 0
    entries: int = 0

    def to_dict(self) -> dict[str, int]:
        return {
            "nodes_visited": self.nodes_visited,
            "partitions": self.partitions,
            "duplicates_dropped": self.duplicates_dropped,
            "max_depth": self.max_depth,
            "entries": self.entries,
        }


@dataclass(frozen=True, eq=False)
class OrbitBatch:
    """Group elements ``γ`` with ``d(x₀, γx₀) ≤ T``, identity included.

    Entries are sorted by (displacement, word length, word in rank order); words are stored in
    a :class:`WordTable` and only materialised on request.
    """

    cutoff: float
    basepoint: HPoint
    displacements: NDArrayF
    depths: NDArrayI
    nodes: NDArrayI
    table: WordTable
    certificate: Certificate
    stats: EnumerationStats
    elements: NDArrayC | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.displacements)

    @property
    def dim(self) -> Dimension:
        return self.basepoint.dim

    def word(self, index: int) -> Word:
        return self.table.word(int(self.nodes[index]))

    def label(self, index: int) -> str:
        return self.table.label(int(self.nodes[index]))

    def element(self, index: int) -> MobiusMap:
        if self.elements is None:
            raise AttributeError(
                f"'{self.__class__.__name__}.elements' is 'None'; enumerate with"
                " 'keep_elements=True'."
            )
        (a, b), (c, d) = self.elements[index]
        return MobiusMap(a, b, c, d, dim=self.dim)

    def count(self, t: float) -> int:
        """``N(t) = #{γ : d(x₀, γx₀) ≤ t}``, identity included."""
        return int(np.searchsorted(self.displacements, t, side="right"))

    @property
    def nonidentity(self) -> NDArrayI:
        """Indices of the non-identity entries."""
        return np.flatnonzero(self.depths > 0)


@dataclass
class _PartitionResult:
    first: int
    letter: NDArrayI
    run_length: NDArrayI
    run_parent: NDArrayI
    entry_nodes: NDArrayI
    entry_disp: NDArrayF
    entry_depth: NDArrayI
    entry_position: NDArrayI
    entry_matrices: NDArrayC | None
    visited: int
    exceeded: bool
    max_depth: int


def _normalised_generators(spec: GroupSpec) -> NDArrayC:
    """``A⁻¹ g A`` for each letter in rank order, as rows ``(a, b, c, d)``."""
    frame = basepoint_frame(spec.basepoint)
    inverse = frame.inverse()
    rows = [(inverse @ spec.generator(letter) @ frame).entries for letter in spec.alphabet]
    return np.array(rows, dtype=np.complex128)


def _expand_partition(
    first: int,
    gens: NDArrayC,
    letters: tuple[int, ...],
    *,
    cutoff: float,
    limit: float,
    depth_limit: int | None,
    budget: int,
    keep_elements: bool,
) -> _PartitionResult:
    """Level-synchronous expansion of the subtree of words starting with ``letters[first]``."""
    n_letters = len(letters)
    inverse_of = np.array([letters.index(-letter) for letter in letters], dtype=np.int64)
    letter_values = np.array(letters, dtype=np.int64)

    a, b, c, d = (gens[first, k : k + 1].copy() for k in range(4))
    disp = displacement_from_j(a, b, c, d)
    visited = 1
    tries_letter = [letter_values[[first]]]
    tries_run = [np.ones(1, dtype=np.int64)]
    tries_parent = [np.full(1, -1, dtype=np.int64)]
    entries: dict[str, list[np.ndarray]] = {
        "nodes": [],
        "disp": [],
        "depth": [],
        "position": [],
        "matrices": [],
    }

    def _record(nodes: np.ndarray, dsp: np.ndarray, depth: int, mats: tuple[np.ndarray, ...]):
        within = dsp <= cutoff
        if not within.any():
            return
        entries["nodes"].append(nodes[within])
        entries["disp"].append(dsp[within])
        entries["depth"].append(np.full(int(within.sum()), depth, dtype=np.int64))
        entries["position"].append(np.flatnonzero(within))
        if keep_elements:
            entries["matrices"].append(np.stack([m[within] for m in mats], axis=1))

    _record(np.zeros(1, dtype=np.int64), disp, 1, (a, b, c, d))
    keep = disp <= limit
    frontier = (a[keep], b[keep], c[keep], d[keep])
    f_last = np.full(int(keep.sum()), first, dtype=np.int64)
    f_node = np.zeros(int(keep.sum()), dtype=np.int64)
    f_run = np.ones(int(keep.sum()), dtype=np.int64)
    f_run_parent = np.full(int(keep.sum()), -1, dtype=np.int64)
    n_nodes = 1
    depth = 1
    exceeded = False

    while len(f_last) and (depth_limit is None or depth < depth_limit):
        fa, fb, fc, fd = frontier
        parts = []
        for j in range(n_letters):
            parents = np.flatnonzero(f_last != inverse_of[j])
            if not len(parents):
                continue
            ga, gb, gc, gd = gens[j]
            pa, pb, pc, pd = fa[parents], fb[parents], fc[parents], fd[parents]
            parts.append(
                (
                    parents * n_letters + j,
                    parents,
                    np.full(len(parents), j, dtype=np.int64),
                    pa * ga + pb * gc,
                    pa * gb + pb * gd,
                    pc * ga + pd * gc,
                    pc * gb + pd * gd,
                )
            )
        key, parents, letter_idx, ca, cb, cc, cd = (
            np.concatenate([part[k] for part in parts]) for k in range(7)
        )
        order = np.argsort(key, kind="stable")
        parents, letter_idx = parents[order], letter_idx[order]
        ca, cb, cc, cd = ca[order], cb[order], cc[order], cd[order]
        depth += 1
        visited += len(order)
        if visited > budget:
            exceeded = True
            break
        disp = displacement_from_j(ca, cb, cc, cd)
        keep = disp <= limit
        kept = np.flatnonzero(keep)
        node_ids = np.full(len(order), -1, dtype=np.int64)
        node_ids[kept] = n_nodes + np.arange(len(kept))
        n_nodes += len(kept)

        same = f_last[parents] == letter_idx
        run = np.where(same, f_run[parents] + 1, 1)
        run_parent = np.where(same, f_run_parent[parents], f_node[parents])
        tries_letter.append(letter_values[letter_idx[kept]])
        tries_run.append(run[kept])
        tries_parent.append(run_parent[kept])
        # entries within the cutoff are always kept since limit >= cutoff
        _record(node_ids, disp, depth, (ca, cb, cc, cd))

        frontier = (ca[kept], cb[kept], cc[kept], cd[kept])
        f_last = letter_idx[kept]
        f_node = node_ids[kept]
        f_run = run[kept]
        f_run_parent = run_parent[kept]

    def _cat(name: str, dtype: type) -> np.ndarray:
        return np.concatenate(entries[name]) if entries[name] else np.zeros(0, dtype=dtype)

    matrices = None
    if keep_elements:
        matrices = (
            np.concatenate(entries["matrices"])
            if entries["matrices"]
            else np.zeros((0, 4), dtype=np.complex128)
        )
    return _PartitionResult(
        first=first,
        letter=np.concatenate(tries_letter),
        run_length=np.concatenate(tries_run),
        run_parent=np.concatenate(tries_parent),
        entry_nodes=_cat("nodes", np.int64),
        entry_disp=_cat("disp", np.float64),
        entry_depth=_cat("depth", np.int64),
        entry_position=_cat("position", np.int64),
        entry_matrices=matrices,
        visited=visited,
        exceeded=exceeded,
        max_depth=depth,
    )


def _power_products(base: NDArrayC, powers: NDArrayC) -> NDArrayC:
    a, b, c, d = base
    pa, pb, pc, pd = powers[:, 0], powers[:, 1], powers[:, 2], powers[:, 3]
    return np.stack([a * pa + b * pc, a * pb + b * pd, c * pa + d * pc, c * pb + d * pd], axis=1)


@np.errstate(over="ignore", invalid="ignore")
def _enumerate_powers(
    spec: GroupSpec,
    cutoff: float,
    *,
    limit: float,
    depth_limit: int | None,
    config: EnumerationConfig,
) -> tuple[NDArrayF, NDArrayI, NDArrayI, NDArrayC | None, int, int]:
    """Blockwise enumeration of ``gⁿ`` for a cyclic group.

    :returns: Displacements, signed exponents, depths, optional normalised matrices, the number
        of nodes visited and the largest exponent reached.
    """
    g = _normalised_generators(spec)[0]
    block = config.block_size
    steps = np.empty((block, 4), dtype=np.complex128)
    steps[0] = g
    for k in range(1, block):
        steps[k] = _power_products(steps[k - 1], g[None, :])[0]
    shift = np.array([1, 0, 0, 1], dtype=np.complex128)
    disps: list[NDArrayF] = []
    exps: list[NDArrayI] = []
    mats: list[NDArrayC] = []
    reached = 0
    visited = 0
    while True:
        current = _power_products(shift, steps)
        exponents = reached + np.arange(1, block + 1)
        if depth_limit is not None:
            allowed = exponents <= depth_limit
            current, exponents = current[allowed], exponents[allowed]
        disp = displacement_from_j(current[:, 0], current[:, 1], current[:, 2], current[:, 3])
        visited += 2 * len(exponents)
        if visited > config.node_budget:
            raise BudgetExceededError(
                f"Cyclic enumeration of '{spec.name}' exceeded the node budget"
                f" ({config.node_budget}) at exponent {reached}.",
                stats=EnumerationStats(nodes_visited=visited, partitions=2, max_depth=reached),
            )
        within = disp <= cutoff
        disps.append(disp[within])
        exps.append(exponents[within])
        if config.keep_elements:
            mats.append(current[within])
        reached = int(exponents[-1]) if len(exponents) else reached
        # overflowed powers give nan displacements, which count as beyond the limit
        if len(exponents) < block or not bool(np.any(disp <= limit)):
            break
        shift = current[-1]
    disp = np.concatenate(disps)
    exp = np.concatenate(exps)
    depth = np.concatenate([np.zeros(1, dtype=np.int64), exp, exp])
    signed = np.concatenate([np.zeros(1, dtype=np.int64), exp, -exp])
    displacements = np.concatenate([np.zeros(1), disp, disp])
    matrices = None
    if config.keep_elements:
        positive = np.concatenate(mats) if mats else np.zeros((0, 4), dtype=np.complex128)
        negative = np.stack(
            [positive[:, 3], -positive[:, 1], -positive[:, 2], positive[:, 0]], axis=1
        )
        identity = np.array([[1, 0, 0, 1]], dtype=np.complex128)
        matrices = np.concatenate([identity, positive, negative])
    return displacements, signed, depth, matrices, visited, reached


def _to_raw(matrices: NDArrayC, basepoint: HPoint) -> NDArrayC:
    """``A M A⁻¹`` for the basepoint frame ``A``, returned with shape ``(N, 2, 2)``."""
    frame = basepoint_frame(basepoint)
    alpha, beta, delta = frame.a, frame.b, frame.d
    a, b, c, d = matrices[:, 0], matrices[:, 1], matrices[:, 2], matrices[:, 3]
    # A = [[α, β], [0, δ]], A⁻¹ = [[δ, -β], [0, α]]
    ra = alpha * a + beta * c
    rb = alpha * b + beta * d
    rc = delta * c
    rd = delta * d
    out = np.empty((len(matrices), 2, 2), dtype=np.complex128)
    out[:, 0, 0] = ra * delta
    out[:, 0, 1] = -ra * beta + rb * alpha
    out[:, 1, 0] = rc * delta
    out[:, 1, 1] = -rc * beta + rd * alpha
    return out


def _duplicates(displacements: NDArrayF, matrices: NDArrayC, tol: float) -> NDArrayI:
    """Indices of entries equal (up to sign) to an earlier entry; compared within clusters of
    nearly equal displacement."""
    n = len(displacements)
    dropped = np.zeros(n, dtype=bool)
    window = max(1e-6, 100 * tol)
    shift = 1
    while shift < n:
        gap = displacements[shift:] - displacements[:-shift]
        close = np.flatnonzero(gap <= window)
        if not len(close):
            break
        left, right = matrices[close], matrices[close + shift]
        plus = np.abs(left - right).max(axis=1)
        minus = np.abs(left + right).max(axis=1)
        same = np.minimum(plus, minus) <= tol
        dropped[close[same] + shift] = True
        shift += 1
    return np.flatnonzero(dropped)


def enumerate_orbit(
    spec: GroupSpec,
    T: float,
    mode: EnumerationMode | None = None,
    *,
    config: EnumerationConfig | None = None,
    logger: logging.Logger | None = None,
) -> OrbitBatch:
    """Enumerate the orbit of the basepoint within displacement ``T``.

    The reduced-word tree is split by first letter; partitions are expanded independently (in a
    joblib pool when ``config.workers != 1``) and merged under a total order, so the result does
    not depend on the number of workers.

    :param spec: The group.
    :param T: Displacement cutoff.
    :param mode: :class:`Pruned` (default) or :class:`Exact`.
    :param config: Node budget, parallelism and storage options.
    :param logger: Logger for progress messages.

    :returns: The sorted, deduplicated batch.

    :raises ParameterError: If ``T`` is not positive or pruning is requested for a group that is
        not assumed free.
    :raises BudgetExceededError: If more than ``config.node_budget`` nodes are visited in total;
        the error carries the statistics of the partitions expanded so far.
    """
    if not T > 0:
        raise ParameterError(f"Cutoff T must be positive, got {T}.")
    mode = Pruned() if mode is None else mode
    config = EnumerationConfig() if config is None else config
    logger = LOGGER if logger is None else logger
    if isinstance(mode, Pruned):
        if not spec.freeness_assumed:
            raise ParameterError("Pruned enumeration requires 'freeness_assumed'.")
        slack = spec.max_generator_displacement if mode.slack is None else mode.slack
        limit, depth_limit = T + slack, None
        certificate = Certificate(CertificateKind.PRUNED, cutoff=T, slack=slack)
    else:
        limit, depth_limit = math.inf, mode.depth_limit
        certificate = Certificate(CertificateKind.EXACT, cutoff=T, depth_limit=depth_limit)

    if spec.is_elementary:
        displacements, nodes, depths, matrices, visited, reached = _enumerate_powers(
            spec, T, limit=limit, depth_limit=depth_limit, config=config
        )
        order = np.lexsort((nodes < 0, depths, displacements))
        table: WordTable = PowerTable()
        partitions = 2
        max_depth = reached
    else:
        letters = spec.alphabet
        gens = _normalised_generators(spec)
        expand = partial(
            _expand_partition,
            gens=gens,
            letters=letters,
            cutoff=T,
            limit=limit,
            depth_limit=depth_limit,
            keep_elements=config.keep_elements,
        )
        results: list[_PartitionResult] = []
        visited = 0
        if config.workers == 1:
            # each partition may only spend what the previous ones left over
            for first in range(len(letters)):
                results.append(expand(first, budget=config.node_budget - visited))
                visited += results[-1].visited
                if visited > config.node_budget:
                    break
        else:
            jobs = (
                delayed(expand)(first, budget=config.node_budget) for first in range(len(letters))
            )
            outcomes = Parallel(n_jobs=config.workers, return_as="generator")(jobs)
            for result in outcomes:
                results.append(result)
                visited += result.visited
                if visited > config.node_budget:
                    break
            outcomes.close()
        max_depth = max(r.max_depth for r in results)
        partitions = len(results)
        for result in results:
            logger.debug(
                "partition %s: %d nodes visited, %d entries",
                letters[result.first],
                result.visited,
                len(result.entry_disp),
            )
        if visited > config.node_budget or any(r.exceeded for r in results):
            raise BudgetExceededError(
                f"Enumeration of '{spec.name}' at T={T} exceeded the node budget"
                f" ({config.node_budget}).",
                stats=EnumerationStats(
                    nodes_visited=visited,
                    partitions=partitions,
                    max_depth=max_depth,
                    entries=sum(len(r.entry_disp) for r in results),
                ),
            )
        trie, offsets = SyllableTrie.merge(
            [(r.letter, r.run_length, r.run_parent) for r in results]
        )
        table = trie
        displacements = np.concatenate([np.zeros(1)] + [r.entry_disp for r in results])
        depths = np.concatenate(
            [np.zeros(1, dtype=np.int64)] + [r.entry_depth for r in results]
        )
        nodes = np.concatenate(
            [np.zeros(1, dtype=np.int64)]
            + [r.entry_nodes + offset for r, offset in zip(results, offsets)]
        )
        first_rank = np.concatenate(
            [np.full(1, -1, dtype=np.int64)]
            + [np.full(len(r.entry_disp), letter_rank(letters[r.first])) for r in results]
        )
        position = np.concatenate(
            [np.zeros(1, dtype=np.int64)] + [r.entry_position for r in results]
        )
        matrices = None
        if config.keep_elements:
            matrices = np.concatenate(
                [np.array([[1, 0, 0, 1]], dtype=np.complex128)]
                + [r.entry_matrices for r in results if r.entry_matrices is not None]
            )
        order = np.lexsort((position, first_rank, depths, displacements))

    displacements, depths, nodes = displacements[order], depths[order], nodes[order]
    dropped = 0
    elements = None
    if matrices is not None:
        matrices = matrices[order]
        duplicates = _duplicates(displacements, matrices, config.tolerances.dedupe)
        dropped = len(duplicates)
        if dropped:
            logger.warning(
                "Dropped %d duplicate elements from the orbit of '%s'; check that the group is"
                " free on its generators.",
                dropped,
                spec.name,
            )
            keep = np.ones(len(displacements), dtype=bool)
            keep[duplicates] = False
            displacements, depths, nodes = displacements[keep], depths[keep], nodes[keep]
            matrices = matrices[keep]
        elements = _to_raw(matrices, spec.basepoint)

    if isinstance(mode, Exact):
        certificate = Certificate(
            CertificateKind.EXACT,
            cutoff=T,
            depth_limit=mode.depth_limit,
            saturated=bool(np.any(depths == mode.depth_limit)),
        )
    stats = EnumerationStats(
        nodes_visited=visited,
        partitions=partitions,
        duplicates_dropped=dropped,
        max_depth=max_depth,
        entries=len(displacements),
    )
    logger.debug("orbit of '%s' at T=%s: %d elements", spec.name, T, len(displacements))
    return OrbitBatch(
        cutoff=T,
        basepoint=spec.basepoint,
        displacements=displacements,
        depths=depths,
        nodes=nodes,
        table=table,
        certificate=certificate,
        stats=stats,
        elements=elements,
    )


def injectivity_radius(spec: GroupSpec, *, config: EnumerationConfig | None = None) -> float:
    """Half the shortest nontrivial displacement of the basepoint: the radius of the largest
    embedded ball about it."""
    batch = enumerate_orbit(spec, spec.min_generator_displacement, config=config)
    nontrivial = batch.displacements[batch.nonidentity]
    return float(nontrivial.min()) / 2.0


def embedded_ball(spec: GroupSpec, *, config: EnumerationConfig | None = None) -> Ball:
    return Ball(spec.basepoint, injectivity_radius(spec, config=config))

"""Length spectra (geodesic loops, primitive closed geodesics, orthogeodesics) and exponential
fits of their counting functions."""

from __future__ import annotations
from dataclasses import dataclass, field, replace
import math

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression

from hypcount.config import EnumerationConfig, FitConfig
from hypcount.errors import (
    ContainmentError,
    InsufficientDataError,
    ParameterError,
    ValidationError,
)
from hypcount.geometry.bodies import (
    Ball,
    ConvexBody,
    Horoball,
    Tube,
    body_distance,
    closest_point_on_body,
    to_infinity,
)
from hypcount.geometry.hypgeom import dist, dist_point_to_line
from hypcount.geometry.points import HPoint
from hypcount.group.classes import conjugacy_classes
from hypcount.group.cosets import canonical_double_coset, double_coset_indices
from hypcount.group.orbit import Certificate, OrbitBatch, Pruned, enumerate_orbit
from hypcount.group.spec import BodySpec, GroupSpec
from hypcount.logging import init_logger
from hypcount.moebius import apply, axis, classify
from hypcount.types import IsometryKind, NDArrayF, SeriesKind

__all__ = [
    "CountSeries",
    "ExpFit",
    "body_margin",
    "count_loops",
    "count_ortho",
    "count_primitive_geodesics",
    "fit_exponential",
    "geodesic_ratio",
]

LOGGER = init_logger(__name__)


@dataclass(frozen=True, eq=False)
class CountSeries:
    """Sorted lengths in ``(0, cutoff]`` with ``N(t) = #{ℓ ≤ t}``.

    :param labels: Word labelling each length, when requested.
    :param elementary: Whether the series comes from a cyclic group.
    :param overlaps_skipped: Orthogeodesic candidates whose bodies overlap.
    :param margin: Extra orbit cutoff used to reach every orthogeodesic of length ``≤ cutoff``.
    :param stabilized: Whether that margin is certified (closed form or a stable count).
    """

    lengths: NDArrayF
    kind: SeriesKind
    cutoff: float
    certificate: Certificate
    labels: tuple[str, ...] | None = None
    elementary: bool = False
    overlaps_skipped: int = 0
    margin: float = 0.0
    stabilized: bool = True
    description: str = ""
    extra: dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.lengths)

    def N(self, t: float | NDArrayF) -> NDArrayF | int:
        counts = np.searchsorted(self.lengths, t, side="right")
        return int(counts) if np.ndim(counts) == 0 else counts

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"kind": str(self.kind), "length": self.lengths})
        if self.labels is not None:
            frame.insert(1, "word", list(self.labels))
        return frame

    def diagnostics(self) -> dict[str, object]:
        return {
            "kind": str(self.kind),
            "cutoff": self.cutoff,
            "size": len(self),
            "elementary": self.elementary,
            "overlaps_skipped": self.overlaps_skipped,
            "margin": self.margin,
            "stabilized": self.stabilized,
            **self.extra,
        }


@dataclass(frozen=True)
class ExpFit:
    """``N(t) ≈ Ĉ·e^{δ̂t}`` on ``window``; ``residual`` is the largest relative deviation on the
    fitting grid."""

    C_hat: float
    delta_hat: float
    window: tuple[float, float]
    residual: float
    n_lengths: int
    rejected: bool = False
    elementary: bool = False

    def to_dict(self) -> dict[str, object]:
        return {
            "C_hat": self.C_hat,
            "delta_hat": self.delta_hat,
            "window": list(self.window),
            "residual": self.residual,
            "n_lengths": self.n_lengths,
            "rejected": self.rejected,
            "elementary": self.elementary,
        }


def count_loops(
    spec: GroupSpec,
    basepoint: HPoint | None,
    T: float,
    *,
    labels: bool = True,
    batch: OrbitBatch | None = None,
    config: EnumerationConfig | None = None,
) -> CountSeries:
    """Lengths ``d(x, γx)`` of the geodesic loops at ``basepoint``, identity excluded.

    A precomputed ``batch`` of the orbit of ``basepoint`` may be passed to avoid enumerating
    twice; its entries beyond ``T`` are ignored.
    """
    if basepoint is not None:
        if not basepoint.is_interior:
            raise ParameterError(f"Loops are based at interior points, got {basepoint}.")
        spec = spec.with_basepoint(basepoint)
    if batch is None:
        config = EnumerationConfig() if config is None else config
        batch = enumerate_orbit(spec, T, Pruned(), config=replace(config, keep_elements=False))
    elif batch.cutoff < T or batch.basepoint != spec.basepoint:
        raise ParameterError("The batch does not cover the requested loops.")
    keep = batch.nonidentity
    keep = keep[batch.displacements[keep] <= T]
    return CountSeries(
        lengths=batch.displacements[keep],
        kind=SeriesKind.LOOPS,
        cutoff=T,
        certificate=batch.certificate,
        labels=tuple(batch.label(int(i)) for i in keep) if labels else None,
        elementary=spec.is_elementary,
        description=f"loops at {spec.basepoint}",
    )


def count_primitive_geodesics(
    spec: GroupSpec,
    L: float,
    *,
    oriented: bool = True,
    max_word_length: int | None = None,
    config: EnumerationConfig | None = None,
) -> CountSeries:
    """Translation lengths of the primitive closed geodesics of length at most ``L``.

    With ``oriented`` every unoriented geodesic is counted once per orientation, which is the
    count of primitive periodic orbits of the geodesic flow.
    """
    classes = conjugacy_classes(spec, L, max_word_length=max_word_length, config=config)
    lengths: list[float] = []
    names: list[str] = []
    for cls in classes.primitive():
        if not cls.is_loxodromic:
            continue
        lengths.append(cls.translation_length)
        names.append(str(cls.word))
        if oriented:
            lengths.append(cls.translation_length)
            names.append(str(cls.word.inverse()))
    order = np.argsort(lengths, kind="stable")
    return CountSeries(
        lengths=np.asarray(lengths, dtype=np.float64)[order],
        kind=SeriesKind.PRIMITIVE_GEODESICS,
        cutoff=L,
        certificate=classes.certificate,
        labels=tuple(names[i] for i in order),
        elementary=spec.is_elementary,
        description="oriented primitive geodesics" if oriented else "primitive geodesics",
        extra={"oriented": oriented},
    )


def _check_stabilizer(spec: GroupSpec, body: BodySpec) -> None:
    body.stabilizer.check_supported()
    word = body.stabilizer.generator
    if word is None:
        return
    image = body.body.translate(spec.evaluate(word))
    if not image.isclose(body.body, tol=spec.tolerances.stabilizer):
        raise ValidationError(
            f"Stabilizer '{word}' of body '{body.name}' does not preserve it.",
            details={"group": spec.name, "body": body.name, "stabilizer": str(word)},
        )


def body_margin(spec: GroupSpec, body: BodySpec) -> float | None:
    """A bound on how far from the basepoint the foot of any orthogeodesic on ``body`` can be
    moved by the stabilizer, or ``None`` without a closed form."""
    x0 = spec.basepoint
    shape = body.body
    if isinstance(shape, Ball):
        return dist(x0, shape.center) + shape.radius
    word = body.stabilizer.generator
    if word is None:
        return None
    u = spec.evaluate(word)
    iso = classify(u, tol=spec.tolerances.classification)
    if isinstance(shape, Tube) and iso.kind is IsometryKind.LOXODROMIC:
        if not shape.axis.has_endpoint(axis(u).start):
            return None
        return dist_point_to_line(x0, shape.axis) + iso.translation_length / 2 + shape.radius
    if isinstance(shape, Horoball) and iso.kind is IsometryKind.PARABOLIC and spec.dim == 2:
        frame = to_infinity(shape.base)
        image = apply(frame, x0)
        height = shape.height_at_infinity()
        conj = frame @ u @ frame.inverse()
        shift = abs(conj.b / conj.d)
        return abs(math.log(height / image.height)) + 2 * math.asinh(shift / (4 * height))
    return None


def _core_distance(spec: GroupSpec, body: ConvexBody) -> float:
    try:
        return dist(spec.basepoint, closest_point_on_body(body, spec.basepoint))
    except ContainmentError:
        return 0.0


def _ortho_lengths(
    spec: GroupSpec, d_minus: BodySpec, d_plus: BodySpec, batch: OrbitBatch
) -> tuple[NDArrayF, np.ndarray]:
    indices = double_coset_indices(batch, d_minus.stabilizer, d_plus.stabilizer)
    lower, upper = d_minus.body, d_plus.body
    if isinstance(lower, Ball) and isinstance(upper, Ball):
        x0 = spec.basepoint
        if lower.center == x0 and upper.center == x0:
            lengths = batch.displacements[indices] - lower.radius - upper.radius
        else:
            lengths = np.array(
                [
                    dist(lower.center, apply(batch.element(int(i)), upper.center))
                    for i in indices
                ]
            )
            lengths = lengths - lower.radius - upper.radius
        return lengths, indices
    lengths = np.array(
        [body_distance(lower, upper.translate(batch.element(int(i)))) for i in indices],
        dtype=np.float64,
    )
    return lengths, indices


def count_ortho(
    spec: GroupSpec,
    d_minus: BodySpec | str,
    d_plus: BodySpec | str,
    T: float,
    *,
    labels: bool = True,
    config: EnumerationConfig | None = None,
    fit_config: FitConfig | None = None,
) -> CountSeries:
    """Lengths of the orthogeodesics from ``d_minus`` to the translates ``γ·d_plus``, one per
    double coset of the stabilizers.

    :raises UnsupportedStabilizerError: If a stabilizer is neither trivial nor cyclic with a
        cyclically reduced generator.
    :raises ValidationError: If a stabilizer does not preserve its body.
    """
    if not T > 0:
        raise ParameterError(f"Cutoff T must be positive, got {T}.")
    d_minus = spec.body(d_minus) if isinstance(d_minus, str) else d_minus
    d_plus = spec.body(d_plus) if isinstance(d_plus, str) else d_plus
    _check_stabilizer(spec, d_minus)
    _check_stabilizer(spec, d_plus)
    config = EnumerationConfig() if config is None else config
    config = replace(config, keep_elements=True)
    fit_config = FitConfig() if fit_config is None else fit_config

    margins = [body_margin(spec, d_minus), body_margin(spec, d_plus)]
    closed_form = all(m is not None for m in margins)
    step = spec.max_generator_displacement
    margin = sum(
        m if m is not None else _core_distance(spec, body.body) + step
        for m, body in zip(margins, (d_minus, d_plus))
    )

    previous: int | None = None
    stabilized = closed_form
    for attempt in range(1 if closed_form else fit_config.max_margin_steps):
        batch = enumerate_orbit(spec, T + margin, Pruned(), config=config)
        lengths, indices = _ortho_lengths(spec, d_minus, d_plus, batch)
        count = int(np.count_nonzero((lengths > 0) & (lengths <= T)))
        LOGGER.debug("ortho margin %.4g (attempt %d): %d lengths", margin, attempt, count)
        if previous is not None and count == previous:
            stabilized = True
            break
        previous = count
        if not closed_form and attempt + 1 < fit_config.max_margin_steps:
            margin += step
    else:
        if not closed_form:
            LOGGER.warning(
                "Orthogeodesic count between '%s' and '%s' did not stabilise after %d margin"
                " steps.",
                d_minus.name,
                d_plus.name,
                fit_config.max_margin_steps,
            )
    overlaps = lengths <= 0
    keep = ~overlaps & (lengths <= T)
    order = np.argsort(lengths[keep], kind="stable")
    kept = indices[keep][order]
    names = None
    if labels:
        names = tuple(
            str(canonical_double_coset(batch.word(int(i)), d_minus.stabilizer, d_plus.stabilizer))
            for i in kept
        )
    return CountSeries(
        lengths=lengths[keep][order],
        kind=SeriesKind.ORTHO,
        cutoff=T,
        certificate=batch.certificate,
        labels=names,
        elementary=spec.is_elementary,
        overlaps_skipped=int(np.count_nonzero(overlaps)),
        margin=margin,
        stabilized=stabilized,
        description=f"orthogeodesics {d_minus.name} -> {d_plus.name}",
    )


def fit_exponential(
    series: CountSeries, window: tuple[float, float], *, config: FitConfig | None = None
) -> ExpFit:
    """Least-squares fit of ``log N(t) = log C + δt`` on the integer grid of ``window``.

    :raises ParameterError: If the window is not inside ``(0, cutoff]``.
    :raises InsufficientDataError: If fewer than ``config.min_lengths`` lengths fall in the
        window.
    """
    config = FitConfig() if config is None else config
    lo, hi = window
    if not 0 < lo < hi <= series.cutoff * (1 + 1e-12):
        raise ParameterError(
            f"Fit window {window} must satisfy 0 < t_lo < t_hi <= T={series.cutoff}."
        )
    lengths = series.lengths
    inside = int(np.count_nonzero((lengths >= lo) & (lengths <= hi)))
    if inside < config.min_lengths:
        raise InsufficientDataError(
            f"Only {inside} lengths in the fit window {window}; at least {config.min_lengths}"
            " are needed."
        )
    grid = np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=np.float64)
    if len(grid) < 2:
        grid = np.linspace(lo, hi, 8)
    counts = np.searchsorted(lengths, grid, side="right").astype(np.float64)
    grid, counts = grid[counts > 0], counts[counts > 0]
    if len(grid) < 2:
        raise InsufficientDataError(f"Counting function vanishes on the fit window {window}.")
    model = LinearRegression().fit(grid[:, None], np.log(counts))
    delta_hat = float(model.coef_[0])
    C_hat = float(np.exp(model.intercept_))
    residual = float(np.max(np.abs(counts / (C_hat * np.exp(delta_hat * grid)) - 1.0)))
    rejected = series.elementary or residual > config.residual_threshold
    if rejected:
        LOGGER.info(
            "Rejected exponential fit of %s (residual %.3g, elementary=%s).",
            series.kind,
            residual,
            series.elementary,
        )
    return ExpFit(
        C_hat=C_hat,
        delta_hat=delta_hat,
        window=(float(lo), float(hi)),
        residual=residual,
        n_lengths=inside,
        rejected=rejected,
        elementary=series.elementary,
    )


def geodesic_ratio(series: CountSeries, delta: float, L: float) -> float:
    """``#𝒢(L)·δL·e^{-δL}``, which tends to 1 for primitive geodesic counts."""
    if not delta > 0:
        raise ParameterError(f"'delta' must be positive, got {delta}.")
    return series.N(L) * delta * L * math.exp(-delta * L)

"""Critical exponent estimation and the correspondence with the bottom of the spectrum."""

from __future__ import annotations
from dataclasses import dataclass, replace
import math

import numpy as np
from sklearn.linear_model import LinearRegression

from hypcount.config import EnumerationConfig, ExponentConfig
from hypcount.errors import InsufficientDataError, ParameterError
from hypcount.group.orbit import Certificate, OrbitBatch, Pruned, enumerate_orbit
from hypcount.group.spec import GroupSpec
from hypcount.logging import init_logger
from hypcount.types import Dimension, NDArrayF

__all__ = [
    "ExponentEstimate",
    "delta_from_lambda0",
    "estimate_delta",
    "growth_grid",
    "hausdorff_dimension",
    "lambda0_from_delta",
    "poincare_partial_sum",
]

LOGGER = init_logger(__name__)


@dataclass(frozen=True)
class ExponentEstimate:
    """Two independent estimates of the critical exponent at cutoff ``T_max``.

    :param delta_series: Bisection on the growth of the truncated Poincaré series.
    :param delta_growth: Slope of ``log N(t)`` over ``[T/2, T]``.
    :param size: Number of orbit points used, identity included.
    :param low_confidence: Fewer orbit points than the configured threshold.
    :param elementary: The group is cyclic, so ``N(T)`` grows subexponentially.
    """

    delta_series: float
    delta_growth: float
    T_max: float
    size: int
    dim: Dimension
    certificate: Certificate
    low_confidence: bool = False
    elementary: bool = False

    @property
    def agreement_gap(self) -> float:
        return abs(self.delta_series - self.delta_growth)

    @property
    def delta(self) -> float:
        return self.delta_series

    @property
    def lambda0(self) -> float:
        return lambda0_from_delta(self.delta_series, self.dim)

    def to_dict(self) -> dict[str, object]:
        return {
            "delta_series": self.delta_series,
            "delta_growth": self.delta_growth,
            "agreement_gap": self.agreement_gap,
            "lambda0": self.lambda0,
            "T_max": self.T_max,
            "size": self.size,
            "low_confidence": self.low_confidence,
            "elementary": self.elementary,
        }


def poincare_partial_sum(batch: OrbitBatch, s: float) -> float:
    """``Σ e^{-s·d(x₀, γx₀)}`` over the batch, identity included."""
    if s < 0:
        raise ParameterError(f"The exponent 's' must be nonnegative, got {s}.")
    return float(np.exp(-s * batch.displacements).sum())


def growth_grid(T: float, min_points: int) -> NDArrayF:
    """Integer points of ``[T/2, T]``, or ``min_points`` evenly spaced ones if there are too few."""
    grid = np.arange(math.ceil(T / 2), math.floor(T) + 1, dtype=np.float64)
    if len(grid) < min_points:
        grid = np.linspace(T / 2, T, min_points)
    return grid


def _delta_growth(displacements: NDArrayF, T: float, min_points: int) -> float:
    grid = growth_grid(T, min_points)
    counts = np.searchsorted(displacements, grid, side="right")
    model = LinearRegression().fit(grid[:, None], np.log(counts))
    return float(model.coef_[0])


def _delta_series(displacements: NDArrayF, T: float, dim: int, config: ExponentConfig) -> float:
    early = displacements[(displacements > T / 2) & (displacements <= 3 * T / 4)] - T / 2
    late = displacements[(displacements > 3 * T / 4) & (displacements <= T)] - T / 2
    if not len(early):
        raise InsufficientDataError(
            f"No orbit points with displacement in ({T / 2:g}, {3 * T / 4:g}]; increase T."
        )

    def _subcritical(s: float) -> bool:
        # later half of the tail window gains at least as much mass as the earlier half
        return np.exp(-s * late).sum() >= config.divergence_factor * np.exp(-s * early).sum()

    lo, hi = 0.0, float(dim - 1)
    for _ in range(config.bisection_steps):
        mid = 0.5 * (lo + hi)
        if _subcritical(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def estimate_delta(
    spec: GroupSpec,
    T: float,
    *,
    batch: OrbitBatch | None = None,
    config: EnumerationConfig | None = None,
    exponent_config: ExponentConfig | None = None,
) -> ExponentEstimate:
    """Estimate ``δ(Γ)`` from the orbit of the basepoint within displacement ``T``.

    :param spec: The group.
    :param T: Cutoff; larger is better but the orbit grows like ``e^{δT}``.
    :param batch: A precomputed orbit batch with cutoff at least ``T``.
    :param config: Enumeration options; element matrices are not kept.
    :param exponent_config: Estimator options.

    :raises InsufficientDataError: If the tail window of the orbit is empty.
    """
    exponent_config = ExponentConfig() if exponent_config is None else exponent_config
    if batch is None:
        config = EnumerationConfig() if config is None else config
        batch = enumerate_orbit(spec, T, Pruned(), config=replace(config, keep_elements=False))
    elif batch.cutoff < T:
        raise ParameterError(f"Batch cutoff {batch.cutoff} is below the requested T={T}.")
    displacements = batch.displacements[batch.displacements <= T]
    n = spec.dim
    delta_series = _delta_series(displacements, T, n, exponent_config)
    slope = _delta_growth(displacements, T, exponent_config.min_fit_points)
    delta_growth = float(np.clip(slope, 0, n - 1))
    low_confidence = len(displacements) < exponent_config.low_confidence_size
    if low_confidence:
        LOGGER.warning(
            "Only %d orbit points of '%s' within T=%s; the exponent estimate is low-confidence.",
            len(displacements),
            spec.name,
            T,
        )
    estimate = ExponentEstimate(
        delta_series=delta_series,
        delta_growth=delta_growth,
        T_max=T,
        size=len(displacements),
        dim=n,
        certificate=batch.certificate,
        low_confidence=low_confidence,
        elementary=spec.is_elementary,
    )
    LOGGER.info(
        "'%s': delta_series=%.6f delta_growth=%.6f (gap %.3g, %d points)",
        spec.name,
        estimate.delta_series,
        estimate.delta_growth,
        estimate.agreement_gap,
        estimate.size,
    )
    return estimate


def hausdorff_dimension(spec: GroupSpec, T: float, **kwargs) -> float:
    """Dimension of the limit set, which equals ``δ`` for geometrically finite groups."""
    return estimate_delta(spec, T, **kwargs).delta_series


def lambda0_from_delta(delta: float, n: int) -> float:
    """Bottom of the spectrum of the quotient from the critical exponent.

    ``(n-1)²/4`` when ``δ ≤ (n-1)/2`` and ``δ(n-1-δ)`` otherwise.
    """
    if n not in (2, 3):
        raise ParameterError(f"Dimension must be 2 or 3, got {n}.")
    if not 0 <= delta <= n - 1:
        raise ParameterError(f"'delta' must lie in [0, {n - 1}], got {delta}.")
    half = (n - 1) / 2
    if delta <= half:
        return half**2
    return delta * (n - 1 - delta)


def delta_from_lambda0(lambda0: float, n: int) -> float:
    """Inverse of :func:`lambda0_from_delta` on the branch ``δ ≥ (n-1)/2``."""
    if n not in (2, 3):
        raise ParameterError(f"Dimension must be 2 or 3, got {n}.")
    half = (n - 1) / 2
    if not 0 <= lambda0 <= half**2:
        raise ParameterError(f"'lambda0' must lie in [0, {half**2}], got {lambda0}.")
    return half + math.sqrt(half**2 - lambda0)

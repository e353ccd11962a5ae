"""Runtime configuration shared by the estimation pipelines."""

from dataclasses import dataclass, field
import os
from pathlib import Path

from hypcount.errors import ParameterError
from hypcount.types import Subcommand

__all__ = [
    "DEFAULT_TOLERANCES",
    "EnumerationConfig",
    "ExponentConfig",
    "FitConfig",
    "OUTPUT_DIR_ENV",
    "RunConfig",
    "Tolerances",
    "default_output_dir",
]

OUTPUT_DIR_ENV = "HYPCOUNT_OUTPUT_DIR"


@dataclass(kw_only=True, frozen=True)
class Tolerances:
    """Absolute tolerances.

    :param geometry: Geometric comparisons (point coincidence, containment).
    :param classification: Tolerance on ``|t² - 4|`` used to detect parabolics.
    :param dedupe: Matrix distance under which two orbit elements are identified.
    :param relator: Matrix distance to ``±I`` flagging a short relator.
    :param stabilizer: Matrix/body distance used to check precise invariance.
    """

    geometry: float = 1e-9
    classification: float = 1e-9
    dedupe: float = 1e-8
    relator: float = 1e-8
    stabilizer: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("geometry", "classification", "dedupe", "relator", "stabilizer"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"Tolerance '{name}' must be positive.")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(kw_only=True, frozen=True)
class EnumerationConfig:
    """
    :param node_budget: Maximum total number of word-tree nodes visited per enumeration, summed
        over the first-letter partitions. Serial expansion stops once it is spent; in a worker
        pool each partition is capped at the whole budget and the pool is cancelled as soon as
        the partitions collected so far exceed it.
    :param workers: Number of joblib workers used to expand first-letter partitions.
    :param keep_elements: Whether to store the matrices of the enumerated elements.
    :param block_size: Number of powers computed per block for cyclic groups.
    """

    node_budget: int = 20_000_000
    workers: int = 1
    keep_elements: bool = True
    block_size: int = 4096
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        if self.node_budget <= 0:
            raise ParameterError("'node_budget' must be positive.")
        if self.workers == 0 or self.workers < -1:
            raise ParameterError("'workers' must be positive or -1 (all cores).")
        if self.block_size <= 0:
            raise ParameterError("'block_size' must be positive.")


@dataclass(kw_only=True, frozen=True)
class ExponentConfig:
    """
    :param bisection_steps: Number of halvings of the bracket ``[0, n-1]``.
    :param divergence_factor: Minimum ratio of late-window to early-window Poincaré mass for an
        exponent to be declared subcritical.
    :param min_fit_points: Minimum number of grid points in the growth fit.
    :param low_confidence_size: Batches smaller than this are flagged as low-confidence.
    """

    bisection_steps: int = 40
    divergence_factor: float = 1.0
    min_fit_points: int = 8
    low_confidence_size: int = 1000

    def __post_init__(self) -> None:
        if self.bisection_steps <= 0:
            raise ParameterError("'bisection_steps' must be positive.")
        if self.divergence_factor <= 0:
            raise ParameterError("'divergence_factor' must be positive.")
        if self.min_fit_points < 2:
            raise ParameterError("'min_fit_points' must be at least 2.")


@dataclass(kw_only=True, frozen=True)
class FitConfig:
    """
    :param min_lengths: Minimum number of lengths inside the fit window.
    :param residual_threshold: Fits whose maximum relative deviation exceeds this are rejected.
    :param max_margin_steps: Maximum number of margin enlargements when counting orthogeodesics
        without a closed-form completeness margin.
    """

    min_lengths: int = 30
    residual_threshold: float = 0.25
    max_margin_steps: int = 6


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "hypcount-out"))


@dataclass(kw_only=True)
class RunConfig:
    """Resolved command-line configuration."""

    subcommand: Subcommand
    group: Path | None = None
    family: Path | None = None
    T: float | None = None
    L: float | None = None
    bodies: tuple[str, str] | None = None
    window: tuple[float, float] | None = None
    delta: float | None = None
    output_dir: Path = field(default_factory=default_output_dir)
    workers: int = 1
    node_budget: int = 20_000_000
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 47

    def __post_init__(self) -> None:
        for name in ("T", "L"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ParameterError(f"Cutoff '{name}' must be positive, got {value}.")
        if self.window is not None and not (0 < self.window[0] < self.window[1]):
            raise ParameterError(f"Window {self.window} must satisfy 0 < t_lo < t_hi.")

    @property
    def enumeration(self) -> EnumerationConfig:
        return EnumerationConfig(
            node_budget=self.node_budget, workers=self.workers, tolerances=self.tolerances
        )

"""Convergence sweeps along families of groups ``Γ_k → Γ``."""

from __future__ import annotations
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
import math
from typing import Final

from joblib import Parallel, delayed
import numpy as np
import pandas as pd

from hypcount.config import EnumerationConfig, ExponentConfig, FitConfig
from hypcount.counting import (
    ExpFit,
    count_loops,
    count_ortho,
    count_primitive_geodesics,
    fit_exponential,
    geodesic_ratio,
)
from hypcount.errors import BudgetExceededError, InsufficientDataError, ValidationError
from hypcount.exponent import estimate_delta, lambda0_from_delta
from hypcount.group.orbit import Pruned, enumerate_orbit
from hypcount.group.spec import GroupSpec
from hypcount.logging import init_logger
from hypcount.progress import SweepProgress

__all__ = [
    "FamilySpec",
    "GAP_QUANTITIES",
    "SweepReport",
    "SweepRow",
    "check_monotone_gaps",
    "compute_row",
    "run_sweep",
]

LOGGER = init_logger(__name__)

GAP_QUANTITIES: Final[tuple[str, ...]] = (
    "delta",
    "lambda0",
    "loop_C",
    "ortho_C",
    "geodesic_ratio",
)


@dataclass(frozen=True, kw_only=True)
class FamilySpec:
    """Groups ``Γ_k`` indexed by a real parameter together with their limit ``Γ``.

    :param bodies: Names of the bodies ``(D⁻, D⁺)`` to count orthogeodesics between; every member
        and the limit must define both.
    :param window: Fit window for the counting functions; defaults to ``[T/2, T]``.
    """

    name: str
    members: tuple[tuple[float, GroupSpec], ...]
    limit: GroupSpec
    T: float
    L: float
    bodies: tuple[str, str] | None = None
    window: tuple[float, float] | None = None
    node_budget: int = 20_000_000

    def __post_init__(self) -> None:
        members = tuple(sorted(self.members, key=lambda member: member[0]))
        object.__setattr__(self, "members", members)
        details: dict[str, object] = {"family": self.name}
        if not members:
            raise ValidationError("A family needs at least one member.", details=details)
        ks = [k for k, _ in members]
        if len(set(ks)) != len(ks):
            raise ValidationError("Family parameters must be distinct.", details=details)
        dims = {spec.dim for _, spec in members} | {self.limit.dim}
        if len(dims) != 1:
            raise ValidationError(
                "Family members live in spaces of different dimension.",
                details={**details, "dimensions": sorted(dims)},
            )
        if not (self.T > 0 and self.L > 0):
            raise ValidationError("Cutoffs T and L must be positive.", details=details)
        if self.window is not None and not 0 < self.window[0] < self.window[1] <= self.T:
            raise ValidationError(
                f"Fit window {self.window} must lie in (0, T].", details=details
            )
        if self.bodies is not None:
            for k, spec in (*members, (math.inf, self.limit)):
                missing = [name for name in self.bodies if name not in spec.bodies]
                if missing:
                    raise ValidationError(
                        f"Member k={k} lacks bodies {missing}.",
                        details={**details, "k": k, "missing": missing},
                    )

    @property
    def dim(self) -> int:
        return self.limit.dim

    @property
    def fit_window(self) -> tuple[float, float]:
        return (self.T / 2, self.T) if self.window is None else self.window


@dataclass(frozen=True)
class SweepRow:
    """Estimates for one member (``k = inf`` for the limit)."""

    k: float
    name: str
    delta_series: float = math.nan
    delta_growth: float = math.nan
    lambda0: float = math.nan
    loop_fit: ExpFit | None = None
    geodesic_ratio: float = math.nan
    ortho_fit: ExpFit | None = None
    elementary: bool = False
    failed: bool = False
    error: str | None = None
    notes: tuple[str, ...] = ()

    @property
    def is_limit(self) -> bool:
        return math.isinf(self.k)

    def value(self, quantity: str) -> float:
        if quantity == "delta":
            return self.delta_series
        if quantity == "lambda0":
            return self.lambda0
        if quantity == "loop_C":
            return math.nan if self.loop_fit is None else self.loop_fit.C_hat
        if quantity == "ortho_C":
            return math.nan if self.ortho_fit is None else self.ortho_fit.C_hat
        if quantity == "geodesic_ratio":
            return self.geodesic_ratio
        raise KeyError(quantity)

    def to_record(self) -> dict[str, object]:
        record: dict[str, object] = {
            "k": "limit" if self.is_limit else self.k,
            "name": self.name,
            "delta_series": self.delta_series,
            "delta_growth": self.delta_growth,
            "lambda0": self.lambda0,
        }
        for prefix, fit in (("loop", self.loop_fit), ("ortho", self.ortho_fit)):
            record[f"{prefix}_C_hat"] = math.nan if fit is None else fit.C_hat
            record[f"{prefix}_delta_hat"] = math.nan if fit is None else fit.delta_hat
            record[f"{prefix}_residual"] = math.nan if fit is None else fit.residual
            record[f"{prefix}_rejected"] = None if fit is None else fit.rejected
        record.update(
            geodesic_ratio=self.geodesic_ratio,
            elementary=self.elementary,
            failed=self.failed,
            error=self.error or "",
            notes="; ".join(self.notes),
        )
        return record


@dataclass(frozen=True)
class SweepReport:
    """Rows ordered by ``k`` plus the limit row, and their gaps to the limit."""

    family: str
    rows: tuple[SweepRow, ...]
    limit: SweepRow
    certificates: dict[str, object] = field(default_factory=dict)

    def gap(self, row: SweepRow, quantity: str) -> float:
        return abs(row.value(quantity) - self.limit.value(quantity))

    def gaps(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {q: [self.gap(row, q) for row in self.rows] for q in GAP_QUANTITIES},
            index=pd.Index([row.k for row in self.rows], name="k"),
        )
        return frame

    def to_frame(self) -> pd.DataFrame:
        records = []
        for row in (*self.rows, self.limit):
            record = row.to_record()
            for quantity in GAP_QUANTITIES:
                record[f"gap_{quantity}"] = 0.0 if row.is_limit else self.gap(row, quantity)
            records.append(record)
        return pd.DataFrame.from_records(records)

    def to_dict(self) -> dict[str, object]:
        gaps = self.gaps()
        return {
            "family": self.family,
            "members": [row.k for row in self.rows],
            "failed": [row.k for row in self.rows if row.failed]
            + (["limit"] if self.limit.failed else []),
            "gaps": {q: [None if math.isnan(v) else v for v in gaps[q]] for q in GAP_QUANTITIES},
            "monotone": check_monotone_gaps(self),
            "limit": self.limit.to_record(),
        }


def _fit_or_note(series, window, fit_config: FitConfig, notes: list[str]) -> ExpFit | None:
    try:
        return fit_exponential(series, window, config=fit_config)
    except InsufficientDataError as exc:
        notes.append(f"{series.kind}: {exc}")
        return None


def compute_row(
    k: float,
    spec: GroupSpec,
    family: FamilySpec,
    *,
    config: EnumerationConfig | None = None,
    exponent_config: ExponentConfig | None = None,
    fit_config: FitConfig | None = None,
) -> SweepRow:
    """All estimates for one group; an exhausted node budget yields a failed row."""
    config = EnumerationConfig(node_budget=family.node_budget) if config is None else config
    fit_config = FitConfig() if fit_config is None else fit_config
    notes: list[str] = []
    try:
        batch = enumerate_orbit(
            spec, family.T, Pruned(), config=replace(config, keep_elements=False)
        )
        estimate = estimate_delta(spec, family.T, batch=batch, exponent_config=exponent_config)
        loops = count_loops(spec, None, family.T, labels=False, batch=batch)
        loop_fit = _fit_or_note(loops, family.fit_window, fit_config, notes)
        ratio = math.nan
        if estimate.delta_series > 0:
            geodesics = count_primitive_geodesics(spec, family.L, config=config)
            ratio = geodesic_ratio(geodesics, estimate.delta_series, family.L)
        ortho_fit = None
        if family.bodies is not None:
            ortho = count_ortho(
                spec,
                family.bodies[0],
                family.bodies[1],
                family.T,
                labels=False,
                config=config,
                fit_config=fit_config,
            )
            ortho_fit = _fit_or_note(ortho, family.fit_window, fit_config, notes)
            if not ortho.stabilized:
                notes.append("ortho margin not stabilized")
    except (BudgetExceededError, InsufficientDataError) as exc:
        LOGGER.warning("Row k=%s of '%s' failed: %s", k, family.name, exc)
        return SweepRow(
            k=k,
            name=spec.name,
            elementary=spec.is_elementary,
            failed=True,
            error=f"{type(exc).__name__}: {exc}",
        )
    row = SweepRow(
        k=k,
        name=spec.name,
        delta_series=estimate.delta_series,
        delta_growth=estimate.delta_growth,
        lambda0=lambda0_from_delta(estimate.delta_series, spec.dim),
        loop_fit=loop_fit,
        geodesic_ratio=ratio,
        ortho_fit=ortho_fit,
        elementary=spec.is_elementary,
        notes=tuple(notes),
    )
    LOGGER.info(
        "k=%s: delta=%.6f lambda0=%.6f",
        "limit" if row.is_limit else k,
        row.delta_series,
        row.lambda0,
    )
    return row


def run_sweep(
    family: FamilySpec,
    config: EnumerationConfig | None = None,
    *,
    workers: int = 1,
    exponent_config: ExponentConfig | None = None,
    fit_config: FitConfig | None = None,
    progress: bool = False,
) -> SweepReport:
    """Evaluate every member and the limit, ``workers`` rows at a time.

    Each row enumerates serially, so the report does not depend on ``workers``.
    """
    config = EnumerationConfig(node_budget=family.node_budget) if config is None else config
    config = replace(config, workers=1)
    tasks: list[tuple[float, GroupSpec]] = [*family.members, (math.inf, family.limit)]
    jobs = (
        delayed(compute_row)(
            k,
            spec,
            family,
            config=config,
            exponent_config=exponent_config,
            fit_config=fit_config,
        )
        for k, spec in tasks
    )
    rows: list[SweepRow] = []
    with SweepProgress(len(tasks), description=family.name, disable=not progress) as bar:
        for row in Parallel(n_jobs=workers, return_as="generator")(jobs):
            rows.append(row)
            bar.advance("limit" if row.is_limit else f"k={row.k:g}", failed=row.failed)
    *members, limit = rows
    certificates = {"T": family.T, "L": family.L, "slack": "max generator displacement"}
    return SweepReport(
        family=family.name, rows=tuple(members), limit=limit, certificates=certificates
    )


def check_monotone_gaps(
    report: SweepReport,
    slack: float = 0.02,
    quantities: Sequence[str] = ("delta", "lambda0", "loop_C"),
) -> dict[str, bool]:
    """Whether each gap sequence is weakly decreasing in ``k`` up to ``slack``.

    Failed rows and missing values are skipped.
    """
    out: dict[str, bool] = {}
    for quantity in quantities:
        gaps = np.array(
            [report.gap(row, quantity) for row in report.rows if not row.failed], dtype=np.float64
        )
        gaps = gaps[~np.isnan(gaps)]
        out[quantity] = bool(np.all(np.diff(gaps) <= slack))
    return out

"""Empirical Patterson-Sullivan measures on the boundary at infinity."""

from __future__ import annotations
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
import math
from typing import Final

import numpy as np
import pandas as pd
from sklearn.neighbors import NearestNeighbors

from hypcount.config import EnumerationConfig
from hypcount.errors import DimensionMismatchError, InsufficientDataError, ParameterError
from hypcount.geometry.hypgeom import busemann_array
from hypcount.geometry.points import HPoint, check_dims
from hypcount.group.orbit import Pruned, enumerate_orbit
from hypcount.group.spec import GroupSpec
from hypcount.logging import init_logger
from hypcount.moebius import MobiusMap, apply
from hypcount.types import Dimension, NDArrayB, NDArrayC, NDArrayF

__all__ = [
    "EmpiricalBoundaryMeasure",
    "boundary_directions",
    "invariance_defect",
    "loop_constant_prediction",
    "partition_masses",
    "ps_estimate",
    "pushforward",
    "rebase",
    "support_distance",
    "transport_mass",
]

LOGGER = init_logger(__name__)

DEFAULT_BINS: Final[int] = 16


def boundary_directions(xi: NDArrayC, at_infinity: NDArrayB, reference: HPoint) -> NDArrayF:
    """Unit vectors at ``reference`` pointing to the boundary points ``xi``.

    Rows are ``(x, t)`` in H² and ``(x, y, t)`` in H³, ``t`` pointing towards ∞, in the frame
    that maps ``reference`` to ``j`` by a similarity.
    """
    local = (xi - reference.horizontal) / reference.height
    sq = np.abs(local) ** 2
    scale = sq + 1.0
    last = np.where(at_infinity, 1.0, (sq - 1.0) / scale)
    horizontal = np.where(at_infinity, 0.0, 2.0 * local / scale)
    if reference.dim == 2:
        return np.stack([horizontal.real, last], axis=1)
    return np.stack([horizontal.real, horizontal.imag, last], axis=1)


def _ray_endpoints(z: NDArrayC, h: NDArrayF) -> tuple[NDArrayC, NDArrayB]:
    """Endpoints of the rays from ``j`` through the points ``(z, h)``."""
    horizontal = 2.0 * z
    last = np.abs(z) ** 2 + h**2 - 1.0
    norm = np.sqrt(np.abs(horizontal) ** 2 + last**2)
    upper = last > 0
    sq = np.abs(z) ** 2
    at_infinity = upper & (sq == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        # both branches avoid cancellation in ``norm - last``
        xi = np.where(
            upper,
            z * (norm + last) / (2.0 * np.where(sq == 0, 1.0, sq)),
            horizontal / (norm - last),
        )
    return np.where(at_infinity, 0.0, xi), at_infinity


def _apply_boundary(
    g: MobiusMap, xi: NDArrayC, at_infinity: NDArrayB
) -> tuple[NDArrayC, NDArrayB]:
    a, b, c, d = g.entries
    den = c * xi + d
    pole = ~at_infinity & (np.abs(den) <= 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        image = np.where(at_infinity, a / c if c != 0 else 0.0, (a * xi + b) / den)
    new_inf = pole | (at_infinity & (c == 0))
    image = np.where(new_inf, 0.0, image)
    if g.dim == 2:
        image = image.real.astype(np.complex128)
    return image, new_inf


@dataclass(frozen=True, eq=False)
class EmpiricalBoundaryMeasure:
    """Weighted atoms on the boundary approximating the Patterson-Sullivan measure at
    ``reference``.

    Atoms sit at the endpoints of the rays from ``reference`` through the orbit points
    ``γx₀``, weighted by ``e^{-δ d(x₀, γx₀)}`` and normalised to total mass 1.
    """

    dim: Dimension
    boundary: NDArrayC
    at_infinity: NDArrayB
    weights: NDArrayF
    delta_used: float
    cutoff: float
    reference: HPoint
    raw_mass: float
    displacements: NDArrayF | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def directions(self) -> NDArrayF:
        return boundary_directions(self.boundary, self.at_infinity, self.reference)

    def to_frame(self) -> pd.DataFrame:
        names = ["dir_x", "dir_t"] if self.dim == 2 else ["dir_x", "dir_y", "dir_t"]
        frame = pd.DataFrame(self.directions, columns=names)
        frame["xi_re"] = np.where(self.at_infinity, np.inf, self.boundary.real)
        frame["xi_im"] = np.where(self.at_infinity, 0.0, self.boundary.imag)
        frame["weight"] = self.weights
        if self.displacements is not None:
            frame.insert(0, "displacement", self.displacements)
        return frame


def ps_estimate(
    spec: GroupSpec,
    delta: float,
    T: float,
    *,
    basepoint: HPoint | None = None,
    config: EnumerationConfig | None = None,
) -> EmpiricalBoundaryMeasure:
    """Empirical measure from the orbit of the basepoint within displacement ``T``.

    :raises ParameterError: If ``delta`` is not positive.
    :raises InsufficientDataError: If no non-identity element lies within ``T``.
    """
    if not delta > 0:
        raise ParameterError(f"'delta' must be positive, got {delta}.")
    if basepoint is not None:
        spec = spec.with_basepoint(basepoint)
    config = EnumerationConfig() if config is None else config
    batch = enumerate_orbit(spec, T, Pruned(), config=replace(config, keep_elements=True))
    keep = batch.nonidentity
    if not len(keep):
        raise InsufficientDataError(
            f"The orbit of '{spec.name}' has no non-identity element within T={T}."
        )
    assert batch.elements is not None
    x0 = spec.basepoint
    z0, h0 = x0.horizontal, x0.height
    m = batch.elements[keep]
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    den = c * z0 + d
    scale = np.abs(den) ** 2 + np.abs(c) ** 2 * h0**2
    z = ((a * z0 + b) * np.conj(den) + a * np.conj(c) * h0**2) / scale
    h = h0 / scale
    # in the frame of x0 the orbit point is ((z - z0)/h0, h/h0)
    xi_local, at_infinity = _ray_endpoints((z - z0) / h0, h / h0)
    xi = np.where(at_infinity, 0.0, h0 * xi_local + z0)
    if spec.dim == 2:
        xi = xi.real.astype(np.complex128)
    displacements = batch.displacements[keep]
    raw = np.exp(-delta * displacements)
    raw_mass = float(raw.sum())
    LOGGER.debug("PS estimate of '%s': %d atoms, raw mass %.6g", spec.name, len(raw), raw_mass)
    return EmpiricalBoundaryMeasure(
        dim=spec.dim,
        boundary=xi,
        at_infinity=at_infinity,
        weights=raw / raw_mass,
        delta_used=delta,
        cutoff=T,
        reference=x0,
        raw_mass=raw_mass,
        displacements=displacements,
    )


def _conformal_factors(mu: EmpiricalBoundaryMeasure, from_: HPoint, to: HPoint) -> NDArrayF:
    check_dims(from_, to)
    if from_.dim != mu.dim:
        raise DimensionMismatchError("Measure and points live in spaces of different dimension.")
    return np.exp(-mu.delta_used * busemann_array(mu.boundary, mu.at_infinity, to, from_))


def transport_mass(mu: EmpiricalBoundaryMeasure, from_: HPoint, to: HPoint) -> float:
    """``∫ e^{-δ β_ξ(to, from)} dμ(ξ)``: the mass at ``to`` of the conformal density that has
    the measure ``mu`` at ``from_``."""
    return float((mu.weights * _conformal_factors(mu, from_, to)).sum())


def rebase(
    mu: EmpiricalBoundaryMeasure, to: HPoint, *, normalize: bool = True
) -> EmpiricalBoundaryMeasure:
    """The conformally reweighted measure at ``to``.

    Normalised by default; ``transport_mass(mu, x, y) * transport_mass(rebase(mu, y), y, z)``
    then equals ``transport_mass(mu, x, z)``.
    """
    weights = mu.weights * _conformal_factors(mu, mu.reference, to)
    total = float(weights.sum())
    return replace(
        mu,
        weights=weights / total if normalize else weights,
        reference=to,
        raw_mass=mu.raw_mass * total,
    )


def pushforward(mu: EmpiricalBoundaryMeasure, g: MobiusMap) -> EmpiricalBoundaryMeasure:
    """``g_*μ``, based at ``g·x₀``."""
    if g.dim != mu.dim:
        raise DimensionMismatchError("Map and measure live in spaces of different dimension.")
    boundary, at_infinity = _apply_boundary(g, mu.boundary, mu.at_infinity)
    return replace(
        mu, boundary=boundary, at_infinity=at_infinity, reference=apply(g, mu.reference)
    )


def partition_masses(
    mu: EmpiricalBoundaryMeasure, bins: int = DEFAULT_BINS, *, reference: HPoint | None = None
) -> NDArrayF:
    """Normalised masses of equal arcs (H²) or of an azimuth × ``cos θ`` grid (H³) of the visual
    sphere at ``reference``."""
    if bins < 1:
        raise ParameterError(f"'bins' must be positive, got {bins}.")
    reference = mu.reference if reference is None else reference
    u = boundary_directions(mu.boundary, mu.at_infinity, reference)
    weights = mu.weights / mu.weights.sum()
    if mu.dim == 2:
        angle = np.arctan2(u[:, 1], u[:, 0])
        idx = np.clip(((angle + math.pi) / (2 * math.pi) * bins).astype(np.int64), 0, bins - 1)
        return np.bincount(idx, weights=weights, minlength=bins)
    azimuth = np.arctan2(u[:, 1], u[:, 0])
    ia = np.clip(((azimuth + math.pi) / (2 * math.pi) * bins).astype(np.int64), 0, bins - 1)
    ic = np.clip(((u[:, 2] + 1.0) / 2.0 * bins).astype(np.int64), 0, bins - 1)
    return np.bincount(ia * bins + ic, weights=weights, minlength=bins * bins).reshape(bins, bins)


def invariance_defect(
    mu: EmpiricalBoundaryMeasure, g: MobiusMap, bins: int = DEFAULT_BINS
) -> float:
    """Total-variation distance between ``g_*μ`` and the conformal reweighting of ``μ`` at
    ``g·x₀``, both binned on the visual sphere at ``g·x₀``.

    Zero for a genuine Patterson-Sullivan density.
    """
    pushed = pushforward(mu, g)
    reweighted = rebase(mu, pushed.reference)
    p = partition_masses(pushed, bins)
    q = partition_masses(reweighted, bins, reference=pushed.reference)
    return 0.5 * float(np.abs(p - q).sum())


def support_distance(mu: EmpiricalBoundaryMeasure, other: EmpiricalBoundaryMeasure) -> float:
    """Largest distance from an atom of ``mu`` to the nearest atom of ``other``, measured between
    unit directions at ``mu.reference``."""
    if mu.dim != other.dim:
        raise DimensionMismatchError("Measures live in spaces of different dimension.")
    mine = mu.directions
    theirs = boundary_directions(other.boundary, other.at_infinity, mu.reference)
    distances, _ = NearestNeighbors(n_neighbors=1).fit(theirs).kneighbors(mine)
    return float(distances.max())


def loop_constant_prediction(
    masses: Sequence[float], delta: float, bm_mass_relative: float = 1.0
) -> float:
    """Predicted ratio ``C_x / C_y`` of loop-counting constants at two basepoints from the masses
    of the conformal density there: ``(m_x / m_y)² / bm_mass_relative``."""
    m_x, m_y = masses
    if min(m_x, m_y, delta, bm_mass_relative) <= 0:
        raise ParameterError("Masses, 'delta' and 'bm_mass_relative' must be positive.")
    return (m_x / m_y) ** 2 / bm_mass_relative

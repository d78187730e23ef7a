"""Classical tribaker dynamics and finite-time repeller measures.

Grids are indexed ``values[a, b]`` with ``a`` the position cell
``[a/K, (a+1)/K)`` and ``b`` the momentum cell.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from math import floor
from typing import NamedTuple

import numpy as np

from .reflectivity import ReflectivityProfile, reflectivity_values

logger = logging.getLogger(__name__)

DIRECTIONS = ("forward", "backward", "intersection")
DEFAULT_SEED = 20170601


class PhasePoint(NamedTuple):
    q: float
    p: float


def _branch(x):
    if isinstance(x, np.ndarray):
        return np.minimum(np.floor(3 * x), 2).astype(int)
    return min(floor(3 * x), 2)


def tribaker_forward(q, p):
    """One step of the tribaker map.

    Works on floats, :class:`fractions.Fraction` or numpy arrays; the branch
    is the ternary digit ``floor(3q)``.
    """
    e = _branch(q)
    return PhasePoint(3 * q - e, (p + e) / 3)


def tribaker_backward(q, p):
    """Inverse of :func:`tribaker_forward`; the branch is ``floor(3p)``."""
    e = _branch(p)
    return PhasePoint((q + e) / 3, 3 * p - e)


@dataclass
class MeasureGrid:
    """Finite-time intensity measure on a ``K x K`` partition of the torus."""

    values: np.ndarray
    t: int
    direction: str
    n_ic: int
    seed: int | None
    profile: ReflectivityProfile | None
    zero_flag: bool = False
    mean_intensity: np.ndarray | None = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return self.values.shape[0]

    def metadata(self) -> dict:
        return {
            "K": self.K,
            "t": self.t,
            "N_ic": self.n_ic,
            "seed": self.seed,
            "profile": None if self.profile is None else self.profile.to_dict(),
            "direction": self.direction,
            "zero_flag": self.zero_flag,
        }

    def cell_of(self, q, p):
        K = self.K
        a = np.minimum((np.asarray(q) * K).astype(int), K - 1)
        b = np.minimum((np.asarray(p) * K).astype(int), K - 1)
        return a, b


def _normalize(raw: np.ndarray):
    total = raw.sum()
    if not np.isfinite(total) or total <= 0.0:
        return np.zeros_like(raw), True
    return raw / total, False


def _evolve_intensity(q, p, profile, t, direction):
    intensity = np.ones_like(q)
    for _ in range(t):
        # reflectivity of the pre-step point, then one map step
        intensity *= reflectivity_values(profile, q)
        if direction == "forward":
            q, p = tribaker_forward(q, p)
        else:
            q, p = tribaker_backward(q, p)
    return intensity


def cell_streams(seed: int, K: int) -> list[np.random.SeedSequence]:
    """One independent seed sequence per cell, in row-major cell order."""
    return np.random.SeedSequence(seed).spawn(K * K)


def compute_measure(
    profile: ReflectivityProfile,
    direction: str = "forward",
    t: int = 10,
    K: int = 243,
    n_ic: int = 100,
    seed: int = DEFAULT_SEED,
) -> MeasureGrid:
    """Monte Carlo estimate of the finite-time measure.

    Each cell gets ``n_ic`` uniform initial conditions drawn from its own
    random stream; every trajectory starts with unit intensity, which is
    multiplied by ``F(q)`` before each of the ``t`` steps. The cell value is
    the mean final intensity, normalised over all cells.

    ``direction="intersection"`` returns :func:`continuous_repeller` of the
    forward and backward grids.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    if t < 0:
        raise ValueError("t must be non-negative")
    if K < 3:
        raise ValueError("K must be at least 3")
    if n_ic < 1:
        raise ValueError("n_ic must be at least 1")
    if direction == "intersection":
        fwd = compute_measure(profile, "forward", t, K, n_ic, seed)
        bwd = compute_measure(profile, "backward", t, K, n_ic, seed)
        return continuous_repeller(fwd, bwd)

    streams = cell_streams(seed, K)
    raw = np.empty(K * K)
    offsets = np.arange(K * K) // K, np.arange(K * K) % K
    # one row of cells (fixed position index) per batch
    for a in range(K):
        cells = range(a * K, (a + 1) * K)
        u = np.stack([np.random.default_rng(streams[c]).random((2, n_ic)) for c in cells])
        q = (offsets[0][a * K:(a + 1) * K, None] + u[:, 0]) / K
        p = (offsets[1][a * K:(a + 1) * K, None] + u[:, 1]) / K
        intensity = _evolve_intensity(q, p, profile, t, direction)
        raw[a * K:(a + 1) * K] = intensity.mean(axis=1)
    raw = raw.reshape(K, K)
    values, zero = _normalize(raw)
    if zero:
        logger.warning("all intensities vanished (t=%d, K=%d); measure undefined", t, K)
    return MeasureGrid(values, t, direction, n_ic, seed, profile, zero, raw)


def continuous_repeller(fwd: MeasureGrid, bwd: MeasureGrid) -> MeasureGrid:
    """Cellwise product of two normalised grids, renormalised."""
    if fwd.values.shape != bwd.values.shape:
        raise ValueError("grids must share the same resolution")
    if fwd.t != bwd.t or fwd.profile != bwd.profile:
        raise ValueError("grids must share the same time and profile")
    values, zero = _normalize(fwd.values * bwd.values)
    if zero:
        logger.warning("forward and backward measures have disjoint support")
    return replace(
        fwd,
        values=values,
        direction="intersection",
        zero_flag=zero or fwd.zero_flag or bwd.zero_flag,
        mean_intensity=None,
    )


def mean_surviving_intensity(
    profile: ReflectivityProfile, t: int, n_points: int, seed: int = DEFAULT_SEED
) -> float:
    """Unnormalised mean intensity after ``t`` forward steps from a uniform ensemble."""
    rng = np.random.default_rng(seed)
    q, p = rng.random((2, n_points))
    return float(_evolve_intensity(q, p, profile, t, "forward").mean())

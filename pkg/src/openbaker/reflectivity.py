"""Continuous reflectivity profiles over the opening strip 1/3 < q < 2/3."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

SHAPES = ("step", "sinusoidal", "constant", "complete")

OPENING = (1.0 / 3.0, 2.0 / 3.0)


@dataclass(frozen=True)
class ReflectivityProfile:
    """Reflectivity F(q) applied to the intensity that crosses the opening.

    Parameters
    ----------
    shape : {"step", "sinusoidal", "constant", "complete"}
        ``step`` is the Fermi-Dirac profile, ``sinusoidal`` the cosine bump,
        ``constant`` a flat value ``R`` and ``complete`` a fully absorbing
        opening (``R`` is ignored).
    R : float
        Bottom of the profile, in [0, 1]. ``R=1`` closes the map.
    A, B : float
        Steepness and position of the step profile.
    """

    shape: str = "step"
    R: float = 0.0
    A: float = 120.0
    B: float = 0.63

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown reflectivity shape {self.shape!r}; expected one of {SHAPES}")
        if not (0.0 <= self.R <= 1.0):
            raise ValueError(f"R must lie in [0, 1], got {self.R}")
        if self.shape == "step":
            if not np.isfinite(self.A) or self.A <= 0:
                raise ValueError(f"A must be positive, got {self.A}")
            if not (0.5 < self.B < 1.0):
                raise ValueError(f"B must lie in (1/2, 1), got {self.B}")

    def __call__(self, q):
        return evaluate(self, q)

    @property
    def is_closed(self) -> bool:
        return self.shape != "complete" and self.R == 1.0

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.shape != "step":
            d.pop("A")
            d.pop("B")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ReflectivityProfile":
        return cls(**{k: d[k] for k in ("shape", "R", "A", "B") if k in d})


def _inside_values(profile: ReflectivityProfile, q: np.ndarray) -> np.ndarray:
    R = profile.R
    if profile.shape == "step":
        # two mirrored branches, switching at q = 1/2
        x = np.where(q > 0.5, q, 1.0 - q)
        return (1.0 - R) / (1.0 + np.exp(-profile.A * (x - profile.B))) + R
    if profile.shape == "sinusoidal":
        return ((1.0 - R) * np.cos(6.0 * np.pi * q) + (1.0 + R)) / 2.0
    if profile.shape == "constant":
        return np.full_like(q, R)
    return np.zeros_like(q)


def reflectivity_values(profile: ReflectivityProfile, q) -> np.ndarray:
    """Vectorised evaluation without domain checks (q is reduced modulo 1)."""
    q = np.mod(np.asarray(q, dtype=float), 1.0)
    inside = (q > OPENING[0]) & (q < OPENING[1])
    out = np.ones_like(q)
    if np.any(inside):
        out[inside] = _inside_values(profile, q[inside])
    return out


def evaluate(profile: ReflectivityProfile, q):
    """Reflectivity at position(s) ``q`` in [0, 1).

    Scalars in give a float back; arrays give an array of the same shape.
    """
    arr = np.asarray(q, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise ValueError("q must lie in [0, 1)")
    out = reflectivity_values(profile, arr)
    if arr.ndim == 0:
        return float(out)
    return out

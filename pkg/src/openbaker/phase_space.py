"""Coherent-state (Husimi) representations of resonance projectors."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .scars import coherent_states
from .spectral import ResonanceSet, above_threshold, sort_order

logger = logging.getLogger(__name__)

_CHUNK = 4096


@dataclass
class HusimiGrid:
    """``K x K`` grid over centres ``((a + 1/2)/K, (b + 1/2)/K)``, indexed ``[a, b]``."""

    values: np.ndarray
    source: str = "exact"
    n_states: int = 0
    nu_c: float | None = None

    @property
    def K(self) -> int:
        return self.values.shape[0]

    def metadata(self) -> dict:
        return {"K": self.K, "source": self.source, "n_states": self.n_states, "nu_c": self.nu_c}


def grid_centres(K: int):
    c = (np.arange(K) + 0.5) / K
    q, p = np.meshgrid(c, c, indexing="ij")
    return q.ravel(), p.ravel()


def projector_diagonal(right: np.ndarray, left: np.ndarray, K: int, weights=None) -> np.ndarray:
    """Complex ``<z| sum_j w_j |R_j><L_j| |z>`` over the grid centres ``z``."""
    right = np.atleast_2d(right.T).T
    left = np.atleast_2d(left.T).T
    N = right.shape[0]
    if weights is None:
        weights = 1.0 / np.einsum("ij,ij->j", left.conj(), right)
    q, p = grid_centres(K)
    out = np.empty(K * K, dtype=complex)
    for start in range(0, K * K, _CHUNK):
        cs = coherent_states(N, q[start:start + _CHUNK], p[start:start + _CHUNK])
        a = cs.conj().T @ right
        b = left.conj().T @ cs
        out[start:start + _CHUNK] = (a * b.T) @ weights
    return out.reshape(K, K)


def projector_husimi(right: np.ndarray, left: np.ndarray, K: int = 81) -> HusimiGrid:
    """``|<z|R><L|z>| / |<L|R>|`` for a single resonance."""
    c = np.vdot(left, right)
    if abs(c) < 1e-10:
        raise ValueError("left and right vectors are (nearly) orthogonal")
    values = np.abs(projector_diagonal(right, left, K, weights=np.array([1.0 / c])))
    return HusimiGrid(values, n_states=1)


def accumulate_Q(resonances: ResonanceSet, nu_c: float, K: int = 81, source: str = "exact") -> HusimiGrid:
    """Husimi modulus of the summed projectors of all resonances above ``nu_c``.

    The complex diagonal elements are accumulated first and the modulus is
    taken at the end. Defective pairs are skipped.
    """
    keep = above_threshold(resonances.moduli, nu_c) & ~resonances.defective
    idx = np.flatnonzero(keep)
    idx = idx[sort_order(resonances.eigenvalues[idx])]
    if len(idx) == 0:
        raise ValueError(f"no resonances above nu_c={nu_c}")
    skipped = int((above_threshold(resonances.moduli, nu_c) & resonances.defective).sum())
    if skipped:
        logger.warning("skipped %d defective resonances above nu_c", skipped)
    values = np.abs(projector_diagonal(resonances.right[:, idx], resonances.left[:, idx], K))
    return HusimiGrid(values, source, len(idx), nu_c)


def overlap_O(a: HusimiGrid | np.ndarray, b: HusimiGrid | np.ndarray, normalization: str = "l2") -> float:
    """Overlap of two normalised phase-space distributions.

    ``l2`` normalises both grids to unit Euclidean norm (cosine similarity);
    ``sum`` normalises each to unit integral over the torus and integrates
    the product with cell area ``1/K^2``.
    """
    va = np.asarray(getattr(a, "values", a), dtype=float)
    vb = np.asarray(getattr(b, "values", b), dtype=float)
    if va.shape != vb.shape:
        raise ValueError("grids must share the same resolution")
    if normalization == "l2":
        na, nb = np.linalg.norm(va), np.linalg.norm(vb)
        if na == 0 or nb == 0:
            raise ValueError("zero grid")
        return float(np.sum(va * vb) / (na * nb))
    if normalization == "sum":
        sa, sb = va.sum(), vb.sum()
        if sa == 0 or sb == 0:
            raise ValueError("zero grid")
        K2 = va.size
        return float(np.sum((va * K2 / sa) * (vb * K2 / sb)) / K2)
    raise ValueError(f"unknown normalization {normalization!r}")


def parity_image(values: np.ndarray) -> np.ndarray:
    """Grid image under ``(q, p) -> (1 - q, 1 - p)``."""
    return np.asarray(values)[::-1, ::-1]

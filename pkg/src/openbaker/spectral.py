"""Biorthogonal resonance sets and spectral counting."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

logger = logging.getLogger(__name__)

MAX_DIMENSION = 3**7
PAIRING_TOL = 1e-8
SNAP_TOL = 1e-8


class ResourceGuardError(ValueError):
    """Matrix too large for dense decomposition."""


class NumericalFailure(RuntimeError):
    """Eigensolver or basis failure (non-convergence, degenerate basis)."""


@dataclass
class ResonanceSet:
    """Eigenvalues with paired right/left eigenvectors.

    Columns of ``right`` and ``left`` are the vectors. Pairs satisfy
    ``<left_j|right_j> = 1`` and ``|right_j| = |left_j|``; entries flagged in
    ``defective`` could not be biorthogonalised and are left unit-norm.
    """

    eigenvalues: np.ndarray
    right: np.ndarray | None = None
    left: np.ndarray | None = None
    defective: np.ndarray | None = None

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=complex)
        if self.defective is None:
            self.defective = np.zeros(len(self.eigenvalues), dtype=bool)

    @property
    def N(self) -> int:
        return len(self.eigenvalues) if self.right is None else self.right.shape[0]

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    def subset(self, index) -> "ResonanceSet":
        index = np.asarray(index)
        return ResonanceSet(
            self.eigenvalues[index],
            None if self.right is None else self.right[:, index],
            None if self.left is None else self.left[:, index],
            self.defective[index],
        )

    def longlived(self, nu_c: float) -> "ResonanceSet":
        return self.subset(np.flatnonzero(above_threshold(self.moduli, nu_c)))


def sort_order(z: np.ndarray) -> np.ndarray:
    """Indices ordering by modulus descending, then phase ascending."""
    z = np.asarray(z)
    return np.lexsort((np.angle(z), -np.abs(z)))


def pair_normalize(r: np.ndarray, l: np.ndarray):
    """Rescale so that ``<l|r> = 1`` and ``|r| = |l|``; returns None for a null pairing."""
    c = np.vdot(l, r)
    if abs(c) < 1e-10 * np.linalg.norm(r) * np.linalg.norm(l) or c == 0:
        return None
    nr, nl = np.linalg.norm(r), np.linalg.norm(l)
    scale = 1.0 / math.sqrt(abs(c))
    a = math.sqrt(nl / nr) * scale * np.exp(-1j * np.angle(c))
    b = math.sqrt(nr / nl) * scale
    return r * a, l * b


def _clusters(z: np.ndarray, tol: float):
    """Group indices of eigenvalues lying within ``tol`` of a cluster seed."""
    order = np.argsort(z.real)
    seen = np.zeros(len(z), bool)
    groups = []
    for i in order:
        if seen[i]:
            continue
        group = np.flatnonzero((np.abs(z - z[i]) < tol) & ~seen)
        seen[group] = True
        groups.append(group)
    return groups


def eigendecompose(M: np.ndarray, pairing_tol: float = PAIRING_TOL) -> ResonanceSet:
    """Full biorthogonal eigendecomposition of a dense square matrix.

    Near-degenerate clusters (spacing below ``pairing_tol``) are
    biorthogonalised as a block; clusters whose left/right overlap block is
    singular are flagged as defective and excluded from biorthogonality.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    n = M.shape[0]
    if n > MAX_DIMENSION:
        raise ResourceGuardError(f"dimension {n} exceeds the dense limit {MAX_DIMENSION}")
    try:
        z, vl, vr = sla.eig(M, left=True, right=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    if not np.all(np.isfinite(z)):
        raise NumericalFailure("eigensolver returned non-finite eigenvalues")
    order = sort_order(z)
    z, vl, vr = z[order], vl[:, order], vr[:, order]

    defective = np.zeros(n, bool)
    for group in _clusters(z, pairing_tol):
        if len(group) > 1:
            C = vl[:, group].conj().T @ vr[:, group]
            if np.linalg.cond(C) > 1e8:
                defective[group] = True
                continue
            vr[:, group] = vr[:, group] @ np.linalg.inv(C)
        for j in group:
            pair = pair_normalize(vr[:, j], vl[:, j])
            if pair is None:
                defective[j] = True
                continue
            vr[:, j], vl[:, j] = pair
    if defective.any():
        logger.warning("%d eigenvectors could not be biorthogonalised", int(defective.sum()))
        vr[:, defective] /= np.linalg.norm(vr[:, defective], axis=0)
        vl[:, defective] /= np.linalg.norm(vl[:, defective], axis=0)
    return ResonanceSet(z, vr, vl, defective)


def above_threshold(moduli, nu_c: float, snap: float = SNAP_TOL) -> np.ndarray:
    """``|z| > nu_c``, with moduli within ``snap`` of ``nu_c`` treated as equal to it."""
    moduli = np.asarray(moduli, dtype=float)
    return (moduli > nu_c) & (np.abs(moduli - nu_c) > snap)


def count_longlived(spectrum, nu_c: float) -> int:
    """Number of resonances with modulus strictly above ``nu_c``."""
    if not 0.0 <= nu_c <= 1.0:
        raise ValueError("nu_c must lie in [0, 1]")
    z = spectrum.eigenvalues if isinstance(spectrum, ResonanceSet) else np.asarray(spectrum)
    return int(above_threshold(np.abs(z), nu_c).sum())


def local_dimension(m_n: int, m_n3: int) -> float | None:
    """``log(M(N) / M(N/3)) / log 3``, or None when either count is zero."""
    if m_n < 1 or m_n3 < 1:
        return None
    return (math.log(m_n) - math.log(m_n3)) / math.log(3)


def dloc_curve(spectrum_n, spectrum_n3, nu_grid) -> list[float | None]:
    return [local_dimension(count_longlived(spectrum_n, nu), count_longlived(spectrum_n3, nu)) for nu in nu_grid]


def total_variation(values) -> float:
    """Total variation of a curve, skipping undefined points."""
    v = np.array([np.nan if x is None else x for x in values], dtype=float)
    v = v[np.isfinite(v)]
    return float(np.abs(np.diff(v)).sum())


def conjugation_defect(z) -> float:
    """Worst distance in the optimal one-to-one matching of ``z`` with ``conj(z)``."""
    z = np.asarray(z)
    if len(z) == 0:
        return 0.0
    d = np.abs(z[:, None] - np.conj(z)[None, :])
    rows, cols = linear_sum_assignment(d)
    return float(d[rows, cols].max())

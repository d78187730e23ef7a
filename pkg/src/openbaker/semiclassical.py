"""Scar-function representation of the open propagator and its resonances."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .orbits import SymbolicOrbit, orbit_geometry
from .scars import ScarFunction, UnusableScarError, ehrenfest_time, scar_pair
from .spectral import NumericalFailure, ResonanceSet, above_threshold, pair_normalize, sort_order

logger = logging.getLogger(__name__)

DEFAULT_SIGMA_CUT = 1e-8
ORDERINGS = ("period", "repeller-first")


@dataclass
class SemiclassicalBasis:
    """Ordered scar functions with their interaction and overlap matrices.

    ``interaction[a, b] = <L_a|U|R_b>`` and ``overlap[a, b] = <L_a|R_b>``.
    """

    scars: list
    right: np.ndarray
    left: np.ndarray
    interaction: np.ndarray
    overlap: np.ndarray
    excluded: list = field(default_factory=list)

    def __len__(self):
        return self.right.shape[1]

    def prefix(self, k: int) -> "SemiclassicalBasis":
        return SemiclassicalBasis(
            self.scars[:k], self.right[:, :k], self.left[:, :k], self.interaction[:k, :k], self.overlap[:k, :k]
        )

    @property
    def labels(self) -> list[str]:
        return [f"{s.orbit.word}:{s.m}" if isinstance(s, ScarFunction) else str(s) for s in self.scars]


def order_orbits(inside, outside=(), policy: str = "period") -> list[tuple[SymbolicOrbit, bool]]:
    """Basis order of orbits, tagged with whether they lie outside the repeller.

    ``period``: period ascending, inside before outside, then symbols.
    ``repeller-first``: every inside orbit before any outside orbit.
    """
    tagged = [(o, False) for o in inside] + [(o, True) for o in outside]
    if policy == "period":
        return sorted(tagged, key=lambda x: (x[0].period, x[1], x[0].symbols))
    if policy == "repeller-first":
        return sorted(tagged, key=lambda x: (x[1], x[0].period, x[0].symbols))
    raise ValueError(f"unknown ordering policy {policy!r}")


def basis_from_vectors(right: np.ndarray, left: np.ndarray, U: np.ndarray, labels=None) -> SemiclassicalBasis:
    labels = list(range(right.shape[1])) if labels is None else list(labels)
    Lh = left.conj().T
    return SemiclassicalBasis(labels, right, left, Lh @ (U @ right), Lh @ right)


def build_basis(
    inside,
    U: np.ndarray,
    outside=(),
    tau: int | None = None,
    ordering: str = "period",
    theta: str = "preceding",
    action: str = "coherent",
) -> SemiclassicalBasis:
    """All ``(orbit, m)`` scar pairs of the selected orbits, in basis order."""
    N = U.shape[0]
    tau = ehrenfest_time(N) if tau is None else tau
    scars, excluded = [], []
    for orbit, _ in order_orbits(inside, outside, ordering):
        geometry = orbit_geometry(orbit, action)
        for m in range(orbit.period):
            try:
                scars.append(scar_pair(geometry, m, U, tau, theta))
            except UnusableScarError as exc:
                logger.warning("%s; excluded", exc)
                excluded.append((orbit, m))
    if not scars:
        raise NumericalFailure("empty scar basis")
    right = np.column_stack([s.right for s in scars])
    left = np.column_stack([s.left for s in scars])
    basis = basis_from_vectors(right, left, U)
    basis.scars = scars
    basis.excluded = excluded
    return basis


@dataclass
class SemiclassicalSpectrum:
    """Generalised eigenvalues with basis coefficients and reconstructed states."""

    eigenvalues: np.ndarray
    right_coefficients: np.ndarray
    left_coefficients: np.ndarray
    rank: int
    resonances: ResonanceSet | None = None


def solve_generalized(
    interaction: np.ndarray,
    overlap: np.ndarray,
    sigma_cut: float = DEFAULT_SIGMA_CUT,
) -> SemiclassicalSpectrum:
    """Solve ``A c = z S c`` on the numerically non-singular part of ``S``.

    ``S = W diag(s) V^H``; directions with ``s < sigma_cut * s_max`` are
    dropped and the reduced standard problem
    ``diag(1/s) W_k^H A V_k y = z y`` is solved. Right coefficients are
    ``V_k y``; left coefficients ``W_k diag(1/s) x`` for left eigenvectors
    ``x`` of the reduced matrix, so that ``d^H A = z d^H S`` on the kept space.
    """
    A = np.asarray(interaction, dtype=complex)
    S = np.asarray(overlap, dtype=complex)
    if A.shape != S.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("interaction and overlap must be square and of equal shape")
    W, s, Vh = np.linalg.svd(S)
    if len(s) == 0 or s[0] == 0:
        raise NumericalFailure("overlap matrix vanishes")
    k = int(np.sum(s >= sigma_cut * s[0]))
    Wk, sk, Vk = W[:, :k], s[:k], Vh[:k].conj().T
    reduced = (Wk.conj().T @ A @ Vk) / sk[:, None]
    z, x, y = sla.eig(reduced, left=True, right=True)
    order = sort_order(z)
    z, x, y = z[order], x[:, order], y[:, order]
    return SemiclassicalSpectrum(z, Vk @ y, Wk @ (x / sk[:, None]), k)


def semiclassical_resonances(basis: SemiclassicalBasis, sigma_cut: float = DEFAULT_SIGMA_CUT) -> SemiclassicalSpectrum:
    """Solve the basis and rebuild states as coefficient-weighted scar sums."""
    spec = solve_generalized(basis.interaction, basis.overlap, sigma_cut)
    right = basis.right @ spec.right_coefficients
    left = basis.left @ spec.left_coefficients
    defective = np.zeros(len(spec.eigenvalues), bool)
    for j in range(right.shape[1]):
        pair = pair_normalize(right[:, j], left[:, j])
        if pair is None:
            defective[j] = True
        else:
            right[:, j], left[:, j] = pair
    spec.resonances = ResonanceSet(spec.eigenvalues, right, left, defective)
    slack = np.abs(spec.eigenvalues).max(initial=0.0) - 1.0
    if slack > 0.05:
        logger.warning("semiclassical eigenvalue outside the unit disk by %.3g", slack)
    return spec


@dataclass
class PerformanceReport:
    P: float | None
    epsilon: float
    nu_c: float
    matches: list
    n_exact: int
    n_sf: int | None = None

    @property
    def defined(self) -> bool:
        return self.P is not None


def _eigs(x):
    if isinstance(x, (ResonanceSet, SemiclassicalSpectrum)):
        return np.asarray(x.eigenvalues)
    return np.asarray(x, dtype=complex)


def performance(exact, semi, nu_c: float, epsilon: float = 1e-3, n_sf: int | None = None) -> PerformanceReport:
    """Fraction of long-lived exact eigenvalues reproduced within ``epsilon``.

    Exact eigenvalues above ``nu_c`` are taken by decreasing modulus and each
    is matched to the nearest still-unmatched semiclassical eigenvalue, if
    that lies closer than ``epsilon``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    ze, zs = _eigs(exact), _eigs(semi)
    ze = ze[above_threshold(np.abs(ze), nu_c)]
    ze = ze[sort_order(ze)]
    if len(ze) == 0:
        return PerformanceReport(None, epsilon, nu_c, [], 0, n_sf)
    free = np.ones(len(zs), bool)
    matches = []
    for z in ze:
        if not free.any():
            break
        d = np.where(free, np.abs(zs - z), np.inf)
        j = int(np.argmin(d))
        if d[j] < epsilon:
            free[j] = False
            matches.append((complex(z), complex(zs[j]), float(d[j])))
    return PerformanceReport(len(matches) / len(ze), epsilon, nu_c, matches, len(ze), n_sf)


@dataclass
class ScanPoint:
    n_sf: int
    P: float | None
    reached: bool


def nsf_search(
    basis: SemiclassicalBasis,
    exact,
    nu_c: float,
    epsilon: float = 1e-3,
    target: float = 0.8,
    sigma_cut: float = DEFAULT_SIGMA_CUT,
) -> ScanPoint:
    """Smallest basis prefix whose resonances reach ``P >= target``.

    When no prefix reaches the target the full basis size is reported with
    ``reached=False`` and the best ``P`` seen.
    """
    ze = _eigs(exact)
    n_long = int(above_threshold(np.abs(ze), nu_c).sum())
    if n_long == 0:
        return ScanPoint(len(basis), None, False)
    best = 0.0
    # fewer functions than target * n_long cannot reach the target
    start = max(1, int(np.ceil(target * n_long)))
    for k in range(start, len(basis) + 1):
        spec = solve_generalized(basis.interaction[:k, :k], basis.overlap[:k, :k], sigma_cut)
        P = performance(ze, spec.eigenvalues, nu_c, epsilon).P
        best = max(best, P)
        if P >= target:
            return ScanPoint(k, P, True)
    return ScanPoint(len(basis), best, False)

"""End-to-end computations shared by the CLI, estimators and acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import DEFAULT_SEED, compute_measure
from .orbits import enumerate_orbits, rank_outside_orbits
from .phase_space import HusimiGrid, accumulate_Q, overlap_O
from .quantum import open_baker
from .reflectivity import ReflectivityProfile
from .semiclassical import (
    DEFAULT_SIGMA_CUT,
    PerformanceReport,
    SemiclassicalBasis,
    SemiclassicalSpectrum,
    build_basis,
    nsf_search,
    performance,
    semiclassical_resonances,
)
from .spectral import ResonanceSet, count_longlived, eigendecompose, local_dimension

NU_C_DEFAULTS = {"step": 0.81, "sinusoidal": 0.91}
R_SCAN_GRID = (0.0, 0.001, 0.01, 0.05, 0.1)


def default_nu_c(shape: str) -> float:
    return NU_C_DEFAULTS.get(shape, 0.81)


def exact_resonances(N: int, profile: ReflectivityProfile) -> ResonanceSet:
    return eigendecompose(open_baker(N, profile))


def nu_grid(start: float = 0.0, stop: float = 1.0, step: float = 0.01) -> np.ndarray:
    n = int(round((stop - start) / step))
    return np.round(start + step * np.arange(n + 1), 10)


def dloc_rows(N: int, profile: ReflectivityProfile, nus) -> list[dict]:
    """``d_loc(nu_c)`` between dimensions ``N`` and ``N/3``."""
    big = exact_resonances(N, profile).eigenvalues
    small = exact_resonances(N // 3, profile).eigenvalues
    rows = []
    for nu in nus:
        m_n, m_n3 = count_longlived(big, nu), count_longlived(small, nu)
        rows.append({"N": N, "nu_c": float(nu), "M_N": m_n, "M_N3": m_n3, "d_loc": local_dimension(m_n, m_n3)})
    return rows


def outside_candidates(profile: ReflectivityProfile, l_max: int, n_max: int, t=10, K=243, n_ic=100, seed=DEFAULT_SEED):
    if n_max <= 0:
        return []
    measure = compute_measure(profile, "intersection", t, K, n_ic, seed)
    return rank_outside_orbits(enumerate_orbits(l_max, (0, 1, 2)), measure, n_max)


@dataclass
class SemiclassicalRun:
    N: int
    profile: ReflectivityProfile
    nu_c: float
    exact: ResonanceSet
    basis: SemiclassicalBasis
    spectrum: SemiclassicalSpectrum
    report: PerformanceReport
    outside: list


def run_semiclassical(
    N: int,
    profile: ReflectivityProfile,
    nu_c: float | None = None,
    l_max: int = 7,
    n_outside: int = 0,
    tau: int | None = None,
    theta: str = "preceding",
    action: str = "coherent",
    ordering: str = "period",
    sigma_cut: float = DEFAULT_SIGMA_CUT,
    epsilon: float = 1e-3,
    exact: ResonanceSet | None = None,
    classical: dict | None = None,
) -> SemiclassicalRun:
    nu_c = default_nu_c(profile.shape) if nu_c is None else nu_c
    U = open_baker(N, profile)
    exact = eigendecompose(U) if exact is None else exact
    inside = enumerate_orbits(l_max, (0, 2))
    outside = outside_candidates(profile, l_max, n_outside, **(classical or {}))
    basis = build_basis(inside, U, outside, tau, ordering, theta, action)
    spectrum = semiclassical_resonances(basis, sigma_cut)
    report = performance(exact, spectrum, nu_c, epsilon, n_sf=len(basis))
    return SemiclassicalRun(N, profile, nu_c, exact, basis, spectrum, report, outside)


def husimi_pair(run: SemiclassicalRun, K: int = 81) -> tuple[HusimiGrid, HusimiGrid, float]:
    """Exact and semiclassical accumulated repellers and their overlap."""
    q_exact = accumulate_Q(run.exact, run.nu_c, K, "exact")
    q_semi = accumulate_Q(run.spectrum.resonances, run.nu_c, K, "semiclassical")
    return q_exact, q_semi, overlap_O(q_exact, q_semi)


def nsf_scan(
    N: int,
    shape: str,
    R_grid=R_SCAN_GRID,
    nu_c: float | None = None,
    epsilon: float = 1e-3,
    target: float = 0.8,
    l_max: int = 7,
    n_outside: int = 0,
    sigma_cut: float = DEFAULT_SIGMA_CUT,
    ordering: str = "period",
    tau: int | None = None,
    theta: str = "preceding",
    action: str = "coherent",
    profile_kwargs: dict | None = None,
    classical: dict | None = None,
) -> list[dict]:
    """``N_SF / N`` needed to reach ``P >= target`` for each ``R`` of the grid."""
    nu_c = default_nu_c(shape) if nu_c is None else nu_c
    rows = []
    inside = enumerate_orbits(l_max, (0, 2))
    for R in R_grid:
        profile = ReflectivityProfile(shape, float(R), **(profile_kwargs or {}))
        U = open_baker(N, profile)
        exact = eigendecompose(U)
        outside = outside_candidates(profile, l_max, n_outside, **(classical or {}))
        basis = build_basis(inside, U, outside, tau, ordering, theta, action)
        point = nsf_search(basis, exact, nu_c, epsilon, target, sigma_cut)
        rows.append(
            {
                "R": float(R),
                "profile": shape,
                "nu_c": nu_c,
                "epsilon": epsilon,
                "N": N,
                "N_SF": point.n_sf,
                "N_SF_over_N": point.n_sf / N,
                "P_reached": point.P,
                "reached_flag": point.reached,
            }
        )
    return rows

"""Quantum tribaker propagators on an ``N``-dimensional torus Hilbert space.

Position grid: ``q_j = (j + chi_q) / N``. With the default antiperiodic
conditions the middle third of the grid is exactly ``j in [N/3, 2N/3)``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from .reflectivity import ReflectivityProfile, reflectivity_values


def _check_dimension(N: int) -> None:
    if int(N) != N or N < 3 or N % 3:
        raise ValueError(f"N must be a positive multiple of 3, got {N}")


def dft_matrix(N: int, chi_q: float = 0.5, chi_p: float = 0.5) -> np.ndarray:
    """``G[k, j] = <p_k|q_j> = exp(-2i pi (j + chi_q)(k + chi_p) / N) / sqrt(N)``."""
    if N < 1:
        raise ValueError("N must be positive")
    j = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(j + chi_p, j + chi_q) / N) / np.sqrt(N)


def position_grid(N: int, chi_q: float = 0.5) -> np.ndarray:
    return (np.arange(N) + chi_q) / N


def _block_dft(N: int) -> np.ndarray:
    g = dft_matrix(N // 3)
    return block_diag(g, g, g)


def closed_baker(N: int) -> np.ndarray:
    """Unitary tribaker propagator ``G_N^{-1} diag(G_{N/3}, G_{N/3}, G_{N/3})``."""
    _check_dimension(N)
    return dft_matrix(N).conj().T @ _block_dft(N)


def opening_diagonal(N: int, profile: ReflectivityProfile) -> np.ndarray:
    _check_dimension(N)
    return np.sqrt(reflectivity_values(profile, position_grid(N)))


def opening_operator(N: int, profile: ReflectivityProfile) -> np.ndarray:
    """Diagonal attenuation ``sqrt(F(q_j))``; identity outside the opening."""
    return np.diag(opening_diagonal(N, profile)).astype(complex)


def open_baker(N: int, profile: ReflectivityProfile) -> np.ndarray:
    """Continuously open propagator ``G_N^{-1} P G_{N/3} P``."""
    _check_dimension(N)
    d = opening_diagonal(N, profile)
    return dft_matrix(N).conj().T @ (d[:, None] * _block_dft(N) * d[None, :])


def parity_operator(N: int) -> np.ndarray:
    """``(Pi psi)_j = psi_{N-1-j}``, the quantum image of ``(q, p) -> (1-q, 1-p)``."""
    return np.eye(N)[::-1].copy()


def commutator_norm(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.abs(A @ B - B @ A).max())


def unitarity_defect(M: np.ndarray) -> float:
    return float(np.abs(M.conj().T @ M - np.eye(M.shape[0])).max())

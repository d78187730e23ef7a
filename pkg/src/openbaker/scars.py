"""Torus coherent states, periodic-orbit modes and scar functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .orbits import OrbitGeometry, SymbolicOrbit, orbit_geometry
from .quantum import position_grid
from .spectral import pair_normalize

THETA_CONVENTIONS = ("preceding", "inclusive")


class UnusableScarError(ValueError):
    """Right and left scar vectors are (numerically) orthogonal."""


def ehrenfest_time(N: int) -> int:
    """``round(ln N / ln 3)``: the Lyapunov exponent of the tribaker is ln 3."""
    return int(round(math.log(N) / math.log(3)))


def coherent_state(N: int, q0: float, p0: float, windings: int = 3) -> np.ndarray:
    """Antiperiodic torus coherent state centred at ``(q0, p0)``, unit norm.

    Periodised Gaussian ``sum_nu (-1)^nu exp(-pi N d^2 + 2 pi i N p0 d)`` with
    ``d = q_j + nu - q0``, truncated to ``|nu| <= windings``.
    """
    return coherent_states(N, np.atleast_1d(q0), np.atleast_1d(p0), windings)[:, 0]


def coherent_states(N: int, q0, p0, windings: int = 3) -> np.ndarray:
    """Columns are :func:`coherent_state` for each centre in ``(q0, p0)``."""
    q = position_grid(N)[:, None]
    q0 = np.asarray(q0, dtype=float)[None, :]
    p0 = np.asarray(p0, dtype=float)[None, :]
    out = np.zeros((N, q0.shape[1]), dtype=complex)
    for nu in range(-windings, windings + 1):
        d = q + nu - q0
        out += (-1) ** nu * np.exp(-np.pi * N * d**2 + 2j * np.pi * N * p0 * d)
    return out / np.linalg.norm(out, axis=0)


def accumulated_actions(geometry: OrbitGeometry, theta: str = "preceding") -> list[Fraction]:
    """Phase offsets ``theta_j`` of the orbit points.

    ``preceding`` (default) sums the step actions before point ``j``
    (``theta_0 = 0``); ``inclusive`` also includes step ``j``.
    """
    S = geometry.step_actions
    if theta == "preceding":
        return [sum(S[:j], Fraction(0)) for j in range(len(S))]
    if theta == "inclusive":
        return [sum(S[: j + 1], Fraction(0)) for j in range(len(S))]
    raise ValueError(f"unknown theta convention {theta!r}")


def quasienergy(geometry: OrbitGeometry, m: int, N: int) -> float:
    """``(N S_gamma + m) / L``, with ``N S_gamma`` evaluated exactly."""
    return float((N * geometry.total_action + m) / geometry.period)


def po_mode(geometry: OrbitGeometry, m: int, N: int, theta: str = "preceding") -> np.ndarray:
    """Phase-coherent superposition of the coherent states along the orbit."""
    L = geometry.period
    if not 0 <= m < L:
        raise ValueError(f"m must lie in [0, {L})")
    A = (N * geometry.total_action + m) / L
    thetas = accumulated_actions(geometry, theta)
    # exact phases modulo 1 keep large N * theta accurate
    phases = np.array([float((j * A - N * th) % 1) for j, th in enumerate(thetas)])
    cs = coherent_states(N, geometry.q, geometry.p)
    return cs @ np.exp(-2j * np.pi * phases) / math.sqrt(L)


@dataclass
class ScarFunction:
    orbit: SymbolicOrbit
    m: int
    quasienergy: float
    right: np.ndarray
    left: np.ndarray
    norm_right: float
    norm_left: float
    tau: int

    def metadata(self) -> dict:
        return {"orbit": self.orbit.word, "m": self.m, "A": self.quasienergy, "tau": self.tau}


def propagate_window(U: np.ndarray, phi: np.ndarray, A: float, tau: int):
    """Windowed sums ``sum_t cos(pi t / 2 tau) e^{-2 pi i A t} U^t phi`` and the left analogue.

    The left vector is returned as a ket, i.e. the sum over ``(U^dagger)^t``
    with the conjugate phase.
    """
    if tau < 1:
        raise ValueError("tau must be at least 1")
    Uh = U.conj().T
    right = np.zeros_like(phi)
    left = np.zeros_like(phi)
    vr, vl = phi.copy(), phi.copy()
    for t in range(tau + 1):
        w = math.cos(math.pi * t / (2 * tau))
        phase = np.exp(-2j * np.pi * ((A * t) % 1))
        right += w * phase * vr
        left += w * np.conj(phase) * vl
        if t < tau:
            vr = U @ vr
            vl = Uh @ vl
    return right, left


def scar_pair(
    geometry: OrbitGeometry | SymbolicOrbit,
    m: int,
    U: np.ndarray,
    tau: int | None = None,
    theta: str = "preceding",
) -> ScarFunction:
    """Right/left scar functions normalised to ``<L|R> = 1`` and ``|R| = |L|``."""
    if isinstance(geometry, SymbolicOrbit):
        geometry = orbit_geometry(geometry)
    N = U.shape[0]
    tau = ehrenfest_time(N) if tau is None else tau
    phi = po_mode(geometry, m, N, theta)
    A = quasienergy(geometry, m, N)
    r, l = propagate_window(U, phi, A, tau)
    vanished = min(np.linalg.norm(r), np.linalg.norm(l)) < 1e-10
    pair = None if vanished else pair_normalize(r, l)
    if pair is None:
        raise UnusableScarError(f"scar function {geometry.orbit.word}, m={m} has vanishing <L|R>")
    right, left = pair
    return ScarFunction(
        geometry.orbit,
        m,
        A,
        right,
        left,
        float(np.linalg.norm(r) / np.linalg.norm(right)),
        float(np.linalg.norm(l) / np.linalg.norm(left)),
        tau,
    )

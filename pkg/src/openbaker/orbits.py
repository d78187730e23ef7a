"""Periodic orbits of the tribaker map from symbolic dynamics.

Every primitive periodic orbit corresponds to exactly one Lyndon word over
the ternary alphabet. Orbit points are exact rationals with denominator
``3**L - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classical import MeasureGrid

ACTION_CONVENTIONS = ("coherent", "generating")


@dataclass(frozen=True, order=True)
class SymbolicOrbit:
    symbols: tuple[int, ...]

    def __post_init__(self):
        if not self.symbols or any(s not in (0, 1, 2) for s in self.symbols):
            raise ValueError(f"invalid itinerary {self.symbols!r}")
        if canonical_rotation(self.symbols) != self.symbols:
            raise ValueError(f"{self.word} is not in canonical (minimal rotation) form")
        if not is_primitive(self.symbols):
            raise ValueError(f"{self.word} is a repetition of a shorter word")

    @classmethod
    def from_word(cls, word: str) -> "SymbolicOrbit":
        return cls(canonical_rotation(tuple(int(c) for c in word)))

    @property
    def period(self) -> int:
        return len(self.symbols)

    @property
    def word(self) -> str:
        return "".join(map(str, self.symbols))

    @property
    def in_repeller(self) -> bool:
        return 1 not in self.symbols

    def sort_key(self):
        return (self.period, self.symbols)

    def __str__(self):
        return self.word


def canonical_rotation(symbols) -> tuple[int, ...]:
    symbols = tuple(symbols)
    return min(symbols[i:] + symbols[:i] for i in range(len(symbols)))


def is_primitive(symbols) -> bool:
    L = len(symbols)
    return all(symbols != symbols[d:] + symbols[:d] for d in range(1, L) if L % d == 0)


def lyndon_words(max_length: int, alphabet):
    """Duval's algorithm: all Lyndon words of length <= ``max_length``, in lexicographic order."""
    alphabet = sorted(alphabet)
    k = len(alphabet)
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(alphabet[i] for i in w)
        m = len(w)
        while len(w) < max_length:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()


def enumerate_orbits(max_period: int, alphabet=(0, 2)) -> list[SymbolicOrbit]:
    """All primitive periodic orbits up to ``max_period``, sorted by (period, symbols)."""
    if not 1 <= max_period <= 12:
        raise ValueError("max_period must lie in [1, 12]")
    alphabet = set(alphabet)
    if not alphabet or not alphabet <= {0, 1, 2}:
        raise ValueError("alphabet must be a non-empty subset of {0, 1, 2}")
    return sorted((SymbolicOrbit(w) for w in lyndon_words(max_period, alphabet)), key=SymbolicOrbit.sort_key)


@dataclass(frozen=True)
class OrbitGeometry:
    """Phase-space points and step actions of a periodic orbit.

    ``points`` are reduced modulo 1. ``step_actions[l]`` is the action
    acquired between point ``l`` and point ``l + 1``.
    """

    orbit: SymbolicOrbit
    points: tuple[tuple[Fraction, Fraction], ...]
    step_actions: tuple[Fraction, ...]
    convention: str

    @property
    def period(self) -> int:
        return self.orbit.period

    @property
    def total_action(self) -> Fraction:
        return sum(self.step_actions, Fraction(0))

    @property
    def in_repeller(self) -> bool:
        return self.orbit.in_repeller

    @property
    def q(self) -> np.ndarray:
        return np.array([float(q) for q, _ in self.points])

    @property
    def p(self) -> np.ndarray:
        return np.array([float(p) for _, p in self.points])

    def to_dict(self) -> dict:
        return {
            "symbols": self.orbit.word,
            "period": self.period,
            "points": [[str(q), str(p)] for q, p in self.points],
            "S_l": [float(s) for s in self.step_actions],
            "S_gamma": float(self.total_action),
            "in_repeller": self.in_repeller,
            "action_convention": self.convention,
        }


def _ternary_fraction(symbols) -> Fraction:
    L = len(symbols)
    num = sum(e * 3 ** (L - 1 - j) for j, e in enumerate(symbols))
    return Fraction(num, 3**L - 1)


def step_action(q, p_next, eps, convention="coherent"):
    """Action of one map step from position ``q`` to momentum ``p_next`` on branch ``eps``.

    ``generating`` is the mixed generating function ``W = 3 q p' - eps (q + p')``.
    ``coherent`` is ``q' p' - W``, which reduces to ``eps * q``; it is the phase
    carried by the torus coherent states of :mod:`openbaker.scars`.
    """
    if convention == "generating":
        return 3 * q * p_next - eps * (q + p_next)
    if convention == "coherent":
        return eps * q
    raise ValueError(f"unknown action convention {convention!r}")


def orbit_geometry(orbit: SymbolicOrbit, convention: str = "coherent") -> OrbitGeometry:
    """Exact orbit points and step actions.

    Point ``j`` has position digits given by the itinerary rotated by ``j``
    and momentum digits given by the reversed past itinerary.
    """
    if convention not in ACTION_CONVENTIONS:
        raise ValueError(f"unknown action convention {convention!r}")
    s = orbit.symbols
    L = len(s)
    # lifted coordinates lie in [0, 1]; only the all-2 fixed point touches 1
    lifted = []
    for j in range(L):
        future = s[j:] + s[:j]
        past = tuple(reversed(future))
        lifted.append((_ternary_fraction(future), _ternary_fraction(past)))
    for j in range(L):
        q, p = lifted[j]
        e = s[j]
        assert (3 * q - e, (p + e) / 3) == lifted[(j + 1) % L], orbit
    actions = tuple(step_action(lifted[j][0], lifted[(j + 1) % L][1], s[j], convention) for j in range(L))
    points = tuple((q % 1, p % 1) for q, p in lifted)
    return OrbitGeometry(orbit, points, actions, convention)


def orbit_score(geometry: OrbitGeometry, measure: MeasureGrid) -> float:
    a, b = measure.cell_of(geometry.q, geometry.p)
    return float(measure.values[a, b].mean())


def rank_outside_orbits(orbits, measure: MeasureGrid, n_max: int = 5) -> list[SymbolicOrbit]:
    """Outside-repeller orbits with the largest mean measure over their points.

    Ties are broken by period, then by the symbol sequence.
    """
    scored = []
    for orbit in orbits:
        if orbit.in_repeller:
            continue
        score = orbit_score(orbit_geometry(orbit), measure)
        scored.append((-score, orbit.period, orbit.symbols, orbit))
    scored.sort(key=lambda x: x[:3])
    return [x[3] for x in scored[:n_max]]

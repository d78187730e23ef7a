import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from openbaker.classical import MeasureGrid, tribaker_forward
from openbaker.orbits import (
    SymbolicOrbit,
    canonical_rotation,
    enumerate_orbits,
    is_primitive,
    lyndon_words,
    orbit_geometry,
    rank_outside_orbits,
)


def mobius(n):
    out, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    return -out if n > 1 else out


def necklace_count(L, k):
    return sum(mobius(d) * k ** (L // d) for d in range(1, L + 1) if L % d == 0) // L


def lifted_fixed_points(L, alphabet):
    """Fixed points of the L-th iterate, one per itinerary, in lifted coordinates."""
    pts = {}
    for word in itertools.product(alphabet, repeat=L):
        cq = cp = Fraction(0)
        for e in word:
            cq = 3 * cq + e
            cp = (cp + e) / 3
        q = cq / (3**L - 1)
        p = cp * 3**L / (3**L - 1)
        pts[word] = (q, p)
    return pts


def brute_force_orbits(L, alphabet):
    """Cycles of minimal period L found by iterating the map on fixed points."""
    cycles = set()
    for word, (q, p) in lifted_fixed_points(L, alphabet).items():
        if not is_primitive(word):
            continue
        orbit = [(q % 1, p % 1)]
        x = orbit[0]
        for _ in range(L - 1):
            x = tuple(tribaker_forward(*x))
            orbit.append(x)
        assert tuple(tribaker_forward(*x)) == orbit[0]
        cycles.add(frozenset(orbit) | {("word", canonical_rotation(word))})
    return cycles


def test_binary_counts_by_period():
    orbits = enumerate_orbits(7, (0, 2))
    assert len(orbits) == 41
    counts = [sum(o.period == L for o in orbits) for L in range(1, 8)]
    assert counts == [2, 1, 2, 3, 6, 9, 18]


@pytest.mark.parametrize("k", [2, 3])
def test_counts_match_moebius_necklace_formula(k):
    alphabet = (0, 2) if k == 2 else (0, 1, 2)
    for L in range(1, 9 if k == 3 else 13):
        got = sum(1 for o in enumerate_orbits(L, alphabet) if o.period == L)
        assert got == necklace_count(L, k)


def test_ternary_small_periods():
    orbits = enumerate_orbits(2, (0, 1, 2))
    assert [o.word for o in orbits] == ["0", "1", "2", "01", "02", "12"]


def test_period_one_binary():
    assert [o.word for o in enumerate_orbits(1, (0, 2))] == ["0", "2"]


@pytest.mark.parametrize("L", range(1, 7))
def test_geometry_matches_brute_force_iteration(L):
    cycles = brute_force_orbits(L, (0, 1, 2))
    ours = set()
    for o in enumerate_orbits(L, (0, 1, 2)):
        if o.period != L:
            continue
        g = orbit_geometry(o)
        ours.add(frozenset(g.points) | {("word", o.symbols)})
    assert ours == cycles


def test_rejects_bad_bounds_and_words():
    with pytest.raises(ValueError):
        enumerate_orbits(0)
    with pytest.raises(ValueError):
        enumerate_orbits(13)
    with pytest.raises(ValueError):
        SymbolicOrbit((2, 0))
    with pytest.raises(ValueError):
        SymbolicOrbit((0, 2, 0, 2))
    assert SymbolicOrbit.from_word("20") == SymbolicOrbit((0, 2))


def test_duval_output_is_lyndon():
    words = list(lyndon_words(6, (0, 1, 2)))
    assert len(words) == len(set(words))
    for w in words:
        assert canonical_rotation(w) == w and is_primitive(w)
        assert all(w < w[i:] + w[:i] for i in range(1, len(w)))


def test_middle_fixed_point():
    g = orbit_geometry(SymbolicOrbit.from_word("1"))
    assert g.points == ((Fraction(1, 2), Fraction(1, 2)),)


def test_period_two_points_and_actions():
    o = SymbolicOrbit.from_word("02")
    g = orbit_geometry(o, "generating")
    assert g.points == ((Fraction(1, 4), Fraction(3, 4)), (Fraction(3, 4), Fraction(1, 4)))
    assert g.step_actions == (Fraction(3, 16), Fraction(-21, 16))
    assert float(g.total_action) == -1.125
    c = orbit_geometry(o, "coherent")
    assert c.step_actions == (Fraction(0), Fraction(3, 2))


def test_corner_fixed_point_is_reduced():
    g = orbit_geometry(SymbolicOrbit.from_word("2"))
    assert g.points == ((Fraction(0), Fraction(0)),)
    assert g.step_actions == (Fraction(2),)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=9))
def test_geometry_is_exactly_periodic(symbols):
    if not is_primitive(symbols):
        return
    o = SymbolicOrbit(canonical_rotation(symbols))
    g = orbit_geometry(o)
    assert g.total_action == sum(g.step_actions)
    if o.word == "2":
        return
    for j, x in enumerate(g.points):
        assert tuple(tribaker_forward(*x)) == g.points[(j + 1) % o.period]


def test_repeller_orbits_avoid_opening():
    for o in enumerate_orbits(8, (0, 2)):
        q = orbit_geometry(o).q
        assert np.all((q <= 1 / 3) | (q >= 2 / 3))
        assert o.in_repeller
    assert not SymbolicOrbit.from_word("01").in_repeller


def test_to_dict_fields():
    d = orbit_geometry(SymbolicOrbit.from_word("02")).to_dict()
    assert d["points"] == [["1/4", "3/4"], ["3/4", "1/4"]]
    assert d["S_gamma"] == 1.5 and d["action_convention"] == "coherent"


def uniform(K):
    return MeasureGrid(np.full((K, K), 1 / K**2), 10, "intersection", 1, 0, None)


def test_rank_selects_requested_number():
    orbits = enumerate_orbits(5, (0, 1, 2))
    assert len(rank_outside_orbits(orbits, uniform(27), 5)) == 5
    assert rank_outside_orbits([], uniform(27), 5) == []


def test_rank_uniform_falls_back_to_tie_break():
    orbits = enumerate_orbits(4, (0, 1, 2))
    ranked = rank_outside_orbits(orbits, uniform(27), 4)
    assert [o.word for o in ranked] == ["1", "01", "12", "001"]


def test_rank_ignores_repeller_orbits_and_uses_measure():
    K = 27
    v = np.zeros((K, K))
    g = orbit_geometry(SymbolicOrbit.from_word("112"))
    a = np.minimum((g.q * K).astype(int), K - 1)
    b = np.minimum((g.p * K).astype(int), K - 1)
    v[a, b] = 1
    m = MeasureGrid(v / v.sum(), 10, "intersection", 1, 0, None)
    ranked = rank_outside_orbits(enumerate_orbits(4, (0, 1, 2)), m, 3)
    assert ranked[0].word == "112"
    assert all(not o.in_repeller for o in ranked)

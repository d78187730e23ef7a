import numpy as np
import pytest

from openbaker.classical import compute_measure
from openbaker.phase_space import (
    HusimiGrid,
    accumulate_Q,
    grid_centres,
    overlap_O,
    parity_image,
    projector_diagonal,
    projector_husimi,
)
from openbaker.quantum import closed_baker, parity_operator
from openbaker.reflectivity import ReflectivityProfile
from openbaker.scars import coherent_states
from openbaker.spectral import eigendecompose

from conftest import cached_resonances


def test_biorthogonal_completeness_gives_unit_grid():
    res = cached_resonances(27, "constant", 0.5)
    assert not res.defective.any()
    h = res.right @ np.diag(1 / np.einsum("ij,ij->j", res.left.conj(), res.right)) @ res.left.conj().T
    assert np.abs(h - np.eye(27)).max() < 1e-6
    grid = accumulate_Q(res, 0.0, K=9)
    assert np.abs(grid.values - 1).max() < 1e-6


def test_pure_state_grid_is_husimi_density():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=27) + 1j * rng.normal(size=27)
    psi /= np.linalg.norm(psi)
    g = projector_husimi(psi, psi, K=9)
    q, p = grid_centres(9)
    expected = np.abs(coherent_states(27, q, p).conj().T @ psi) ** 2
    assert np.allclose(g.values.ravel(), expected, atol=1e-14)


def test_closed_map_eigenstates_parity_invariant():
    N = 27
    U = closed_baker(N)
    res = eigendecompose(U)
    Pi = parity_operator(N)
    for j in range(N):
        r = res.right[:, j]
        parity = np.vdot(r, Pi @ r) / np.vdot(r, r)
        if abs(abs(parity) - 1) > 1e-8:
            continue
        g = projector_husimi(r, res.left[:, j], K=9).values
        assert g.min() >= 0
        assert np.abs(g - parity_image(g)).max() < 1e-8


def test_single_resonance_accumulation_matches_projector():
    res = cached_resonances(27, "step", 0.1)
    nu = (res.moduli[0] + res.moduli[1]) / 2
    g = accumulate_Q(res, nu, K=9)
    h = projector_husimi(res.right[:, 0], res.left[:, 0], K=9)
    assert g.n_states == 1
    assert np.allclose(g.values, h.values, atol=1e-13)


def test_accumulation_is_linear_before_modulus():
    res = cached_resonances(27, "step", 0.1)
    both = projector_diagonal(res.right[:, :2], res.left[:, :2], 9)
    parts = sum(projector_diagonal(res.right[:, [j]], res.left[:, [j]], 9) for j in range(2))
    assert np.allclose(both, parts, atol=1e-14)


@pytest.mark.parametrize("shape,R", [("step", 0.01), ("sinusoidal", 0.1)])
def test_Q_grid_parity_symmetric(shape, R):
    g = accumulate_Q(cached_resonances(81, shape, R), 0.8, K=27).values
    assert np.abs(g - parity_image(g)).max() < 1e-6 * g.max()


def test_empty_long_lived_set_is_flagged():
    with pytest.raises(ValueError):
        accumulate_Q(cached_resonances(27, "step", 0.01), 0.999, K=9)


def test_orthogonal_projector_rejected():
    with pytest.raises(ValueError):
        projector_husimi(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), K=3)


def test_exact_Q_follows_classical_repeller():
    profile = ReflectivityProfile("step", 0.01)
    Q = accumulate_Q(cached_resonances(243, "step", 0.01), 0.81, K=81)
    mu = compute_measure(profile, "intersection", t=10, K=81, n_ic=100)
    assert overlap_O(Q, mu.values) > 0.6


def test_overlap_examples():
    a = np.random.default_rng(1).random((9, 9))
    assert overlap_O(a, a) == pytest.approx(1.0)
    assert overlap_O(HusimiGrid(a), HusimiGrid(3 * a)) == pytest.approx(1.0)
    b = np.zeros((9, 9))
    c = np.zeros((9, 9))
    b[:4], c[5:] = 1, 1
    assert overlap_O(b, c) == 0.0
    assert overlap_O(b, c, "sum") == 0.0
    assert overlap_O(a, a, "sum") >= 1.0


def test_overlap_rejects_bad_input():
    with pytest.raises(ValueError):
        overlap_O(np.ones((3, 3)), np.ones((4, 4)))
    with pytest.raises(ValueError):
        overlap_O(np.zeros((3, 3)), np.ones((3, 3)))
    with pytest.raises(ValueError):
        overlap_O(np.ones((3, 3)), np.ones((3, 3)), "max")

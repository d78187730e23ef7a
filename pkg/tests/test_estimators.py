import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from openbaker.estimators import ContinuousRepellerMeasure, OpenMapResonances, ScarFunctionResonances
from openbaker.phase_space import grid_centres


def test_params_round_trip_and_clone():
    est = ScarFunctionResonances(l_max=4, sigma_cut=1e-6)
    assert est.get_params()["l_max"] == 4
    twin = clone(est).set_params(nu_c=0.5)
    assert twin.nu_c == 0.5 and est.nu_c == 0.81


@pytest.mark.parametrize("est", [ContinuousRepellerMeasure(), OpenMapResonances(), ScarFunctionResonances()])
def test_transform_requires_fit(est):
    with pytest.raises(NotFittedError):
        est.transform([[0.1, 0.2]])


def test_repeller_transform_reads_cells():
    est = ContinuousRepellerMeasure(shape="complete", K=9, n_ic=20, t=3).fit()
    out = est.transform([[0.5, 0.1], [0.05, 0.05]])
    assert out.shape == (2, 1)
    assert out[0, 0] == 0 and out[1, 0] > 0
    assert est.forward_.direction == "forward" and est.backward_.direction == "backward"
    with pytest.raises(ValueError):
        est.transform([[0.1, 0.2, 0.3]])


def test_open_map_transform_matches_grid():
    est = OpenMapResonances(N=27, R=0.1, nu_c=0.6).fit()
    q, p = grid_centres(9)
    assert np.allclose(est.transform(np.c_[q, p]).ravel(), est.husimi_grid(9).values.ravel(), atol=1e-13)
    assert est.n_longlived_ == int((np.abs(est.eigenvalues_) > 0.6).sum())


def test_scar_estimator_scores_against_exact():
    exact = OpenMapResonances(N=243, R=0.01, nu_c=0.81).fit()
    est = ScarFunctionResonances(nu_c=0.81).fit(exact.propagator_)
    assert len(est.basis_) == 232
    assert est.score(exact.eigenvalues_) >= 0.8
    small = ScarFunctionResonances(n_sf=10).fit(exact.propagator_)
    assert len(small.eigenvalues_) <= 10


def test_scar_estimator_rejects_non_square():
    with pytest.raises(ValueError):
        ScarFunctionResonances().fit(np.ones((3, 4)))

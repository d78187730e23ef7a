"""scikit-learn style wrappers around the classical and quantum pipelines.

The "data" here are phase-space points ``X`` of shape ``(n, 2)`` holding
``(q, p)`` pairs, or a propagator matrix for :class:`ScarFunctionResonances`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .classical import DEFAULT_SEED, compute_measure
from .orbits import enumerate_orbits
from .phase_space import accumulate_Q
from .quantum import open_baker
from .reflectivity import ReflectivityProfile
from .scars import coherent_states
from .semiclassical import DEFAULT_SIGMA_CUT, build_basis, performance, semiclassical_resonances
from .spectral import above_threshold, eigendecompose


def _points(X) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected (q, p) pairs, got {X.shape[1]} columns")
    return np.mod(X, 1.0)


def _husimi_at(resonances, nu_c: float, X: np.ndarray) -> np.ndarray:
    """``|<z|Q|z>|`` at arbitrary points, ``Q`` summed over pairs above ``nu_c``."""
    keep = above_threshold(resonances.moduli, nu_c) & ~resonances.defective
    R, L = resonances.right[:, keep], resonances.left[:, keep]
    w = 1.0 / np.einsum("ij,ij->j", L.conj(), R)
    cs = coherent_states(resonances.N, X[:, 0], X[:, 1])
    return np.abs(((cs.conj().T @ R) * (cs.T @ L.conj())) @ w)


class ContinuousRepellerMeasure(TransformerMixin, BaseEstimator):
    """Monte Carlo intersection of forward and backward intensity measures.

    Parameters
    ----------
    shape, R, A, B : reflectivity profile.
    t : int
        Number of map steps in each direction.
    K : int
        Cells per axis.
    n_ic : int
        Initial conditions per cell.
    seed : int

    Attributes
    ----------
    measure_ : MeasureGrid
        Normalised continuous repeller.
    forward_, backward_ : MeasureGrid
    """

    def __init__(self, shape="step", R=0.01, A=120.0, B=0.63, t=10, K=243, n_ic=100, seed=DEFAULT_SEED):
        self.shape = shape
        self.R = R
        self.A = A
        self.B = B
        self.t = t
        self.K = K
        self.n_ic = n_ic
        self.seed = seed

    def fit(self, X=None, y=None):
        profile = ReflectivityProfile(self.shape, self.R, self.A, self.B)
        self.forward_ = compute_measure(profile, "forward", self.t, self.K, self.n_ic, self.seed)
        self.backward_ = compute_measure(profile, "backward", self.t, self.K, self.n_ic, self.seed)
        self.measure_ = compute_measure(profile, "intersection", self.t, self.K, self.n_ic, self.seed)
        return self

    def transform(self, X):
        """Measure of the cell containing each point, shape ``(n, 1)``."""
        check_is_fitted(self, "measure_")
        X = _points(X)
        a, b = self.measure_.cell_of(X[:, 0], X[:, 1])
        return self.measure_.values[a, b][:, None]


class OpenMapResonances(TransformerMixin, BaseEstimator):
    """Exact resonances of the open tribaker propagator.

    ``fit`` ignores ``X``; the operator is built from the parameters.
    ``transform`` evaluates the accumulated Husimi function of the
    long-lived resonances at the given points.
    """

    def __init__(self, N=243, shape="step", R=0.01, A=120.0, B=0.63, nu_c=0.81):
        self.N = N
        self.shape = shape
        self.R = R
        self.A = A
        self.B = B
        self.nu_c = nu_c

    def fit(self, X=None, y=None):
        self.profile_ = ReflectivityProfile(self.shape, self.R, self.A, self.B)
        self.propagator_ = open_baker(self.N, self.profile_)
        self.resonances_ = eigendecompose(self.propagator_)
        self.eigenvalues_ = self.resonances_.eigenvalues
        self.n_longlived_ = int(above_threshold(self.resonances_.moduli, self.nu_c).sum())
        return self

    def transform(self, X):
        check_is_fitted(self, "resonances_")
        return _husimi_at(self.resonances_, self.nu_c, _points(X))[:, None]

    def husimi_grid(self, K=81):
        check_is_fitted(self, "resonances_")
        return accumulate_Q(self.resonances_, self.nu_c, K, "exact")


class ScarFunctionResonances(TransformerMixin, BaseEstimator):
    """Resonances of a propagator restricted to a periodic-orbit scar basis.

    ``fit(U)`` takes the ``N x N`` open propagator. ``score(z_exact)``
    returns the performance ``P`` against exact eigenvalues.

    Parameters
    ----------
    l_max : int
        Longest orbit period of the inside-repeller basis.
    n_sf : int or None
        Keep only the first ``n_sf`` basis functions.
    """

    def __init__(
        self,
        l_max=7,
        n_sf=None,
        tau=None,
        theta="preceding",
        action="coherent",
        sigma_cut=DEFAULT_SIGMA_CUT,
        nu_c=0.81,
        epsilon=1e-3,
    ):
        self.l_max = l_max
        self.n_sf = n_sf
        self.tau = tau
        self.theta = theta
        self.action = action
        self.sigma_cut = sigma_cut
        self.nu_c = nu_c
        self.epsilon = epsilon

    def fit(self, X, y=None):
        # check_array rejects complex input
        U = np.asarray(X, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise ValueError("propagator must be square")
        basis = build_basis(enumerate_orbits(self.l_max, (0, 2)), U, (), self.tau, "period", self.theta, self.action)
        if self.n_sf is not None:
            basis = basis.prefix(self.n_sf)
        self.basis_ = basis
        self.spectrum_ = semiclassical_resonances(basis, self.sigma_cut)
        self.resonances_ = self.spectrum_.resonances
        self.eigenvalues_ = self.spectrum_.eigenvalues
        return self

    def transform(self, X):
        check_is_fitted(self, "resonances_")
        return _husimi_at(self.resonances_, self.nu_c, _points(X))[:, None]

    def score(self, X, y=None):
        """Performance ``P`` against exact eigenvalues ``X`` (0 when undefined)."""
        check_is_fitted(self, "eigenvalues_")
        P = performance(np.ravel(X), self.eigenvalues_, self.nu_c, self.epsilon).P
        return 0.0 if P is None else P

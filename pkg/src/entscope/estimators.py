"""scikit-learn style wrappers.

Rows of ``X`` are state vectors (complex amplitudes, row-major, party 0
slowest). The wrappers are stateless apart from input bookkeeping, so they
drop into ``Pipeline``/``FunctionTransformer`` style workflows and support
``get_params``/``set_params``/``clone``.

>>> from entscope.estimators import GeometricMeasure
>>> from entscope.states import ghz, w
>>> X = [ghz(3).amps, w(3).amps]
>>> GeometricMeasure(dims=(2, 2, 2), m=2).fit_transform(X).round(6).ravel().tolist()
[0.5, 0.333333]
"""

from math import prod

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .classify import DEFAULT_TOL, classify
from .coherence import min_fidelity_coherence
from .exceptions import DimensionError
from .geometric import AlsConfig, closest_block_product, gm_m
from .partitions import Partition
from .tensor import NORM_REJECT_TOL, MAX_JOINT_DIM, PureState, _check_dims, product_state


def check_dims(dims, max_dim=MAX_JOINT_DIM):
    """Validate per-party dimensions and return them as a tuple of ints."""
    if dims is None:
        raise DimensionError("dims must be given")
    return _check_dims(dims, max_dim)


def check_state_array(X, dims, normalize=False):
    """Validate a batch of state vectors.

    Parameters
    ----------
    X : array_like of shape (n_samples, prod(dims)) or (prod(dims),)
    dims : sequence of int
    normalize : bool, default False
        Rescale rows instead of rejecting those with norm off by > 1e-6.

    Returns
    -------
    ndarray of complex128, shape (n_samples, prod(dims))
    """
    dims = check_dims(dims)
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D array of state vectors, got shape {X.shape}")
    if X.shape[1] != prod(dims):
        raise DimensionError(f"rows have {X.shape[1]} amplitudes, dims {dims} need {prod(dims)}")
    if X.shape[0] == 0:
        raise ValueError("need at least one state")
    if not np.all(np.isfinite(X)):
        raise ValueError("state amplitudes must be finite")
    norms = np.linalg.norm(X, axis=1)
    bad = np.abs(norms - 1) > NORM_REJECT_TOL
    if bad.any():
        if not normalize:
            raise ValueError(f"rows {np.nonzero(bad)[0].tolist()} are not unit vectors")
        X = X / norms[:, None]
    return X


def _states(X, dims, normalize):
    return [PureState(dims, row, normalize=normalize) for row in check_state_array(X, dims, normalize)]


class _StateTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        X = check_state_array(X, self.dims, self.normalize)
        self.dims_ = check_dims(self.dims)
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self, "dims_")
        X = check_state_array(X, self.dims_, self.normalize)
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(f"X has {X.shape[1]} features, fitted with {self.n_features_in_}")
        return [PureState(self.dims_, row) for row in X]

    def _als(self):
        return AlsConfig(
            restarts=self.restarts, max_iterations=self.max_iter, convergence_tol=self.tol, seed=self.random_state
        )


class GeometricMeasure(_StateTransformer):
    """Map each state to ``GM_m``.

    Parameters
    ----------
    dims : tuple of int
    m : int, default 2
        Number of blocks of the reference product states; ``m=2`` gives
        the generalized geometric measure.
    restarts, max_iter, tol, random_state
        Alternating-maximization budget, see :class:`AlsConfig`.
    normalize : bool, default False
    """

    def __init__(self, dims=None, m=2, restarts=32, max_iter=500, tol=1e-12, random_state=0, normalize=False):
        self.dims = dims
        self.m = m
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state
        self.normalize = normalize

    def transform(self, X):
        cfg = self._als()
        return np.array([[gm_m(s, self.m, cfg).value] for s in self._check(X)])


class MinFidelityCoherence(_StateTransformer):
    """Map each state to its minimal fidelity-based coherence over product bases on m blocks."""

    def __init__(self, dims=None, m=2, restarts=32, max_iter=500, tol=1e-12, random_state=0, normalize=False):
        self.dims = dims
        self.m = m
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state
        self.normalize = normalize

    def transform(self, X):
        cfg = self._als()
        return np.array([[min_fidelity_coherence(s, self.m, cfg).value] for s in self._check(X)])


class SeparabilityClassifier(_StateTransformer):
    """Separability level of pure states.

    ``predict`` returns the largest m for which each state is m-separable;
    ``transform`` returns ``[m_sep, k_ent]`` columns.
    """

    def __init__(self, dims=None, product_tol=DEFAULT_TOL, normalize=False):
        self.dims = dims
        self.product_tol = product_tol
        self.normalize = normalize

    def transform(self, X):
        res = [classify(s, self.product_tol) for s in self._check(X)]
        return np.array([[r.m_sep, r.k_ent] for r in res], dtype=int)

    def predict(self, X):
        return self.transform(X)[:, 0]


class BlockProductApproximation(BaseEstimator):
    """Closest block-product state to a single target state.

    ``fit`` takes one state (one row). Afterwards ``vectors_`` holds one
    unit vector per block, ``overlap_sq_`` the squared overlap reached, and
    ``transform`` returns ``|<P|x>|^2`` of new states against the fitted
    product state ``P``.

    Parameters
    ----------
    dims : tuple of int
    partition : Partition or str
        Blocks; strings use the 1-based text form ``"1|2,3"``.
    method : {"auto", "svd", "als"}
    restarts, max_iter, tol, random_state
        Alternating-maximization budget.
    """

    def __init__(
        self, dims=None, partition=None, method="auto", restarts=32, max_iter=500, tol=1e-12, random_state=0
    ):
        self.dims = dims
        self.partition = partition
        self.method = method
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _partition(self):
        p = self.partition
        if p is None:
            raise ValueError("partition must be given")
        return Partition.from_text(p) if isinstance(p, str) else p

    def fit(self, X, y=None):
        X = check_state_array(X, self.dims)
        if X.shape[0] != 1:
            raise ValueError("BlockProductApproximation fits a single state")
        self.dims_ = check_dims(self.dims)
        self.partition_ = self._partition()
        cfg = AlsConfig(self.restarts, self.max_iter, self.tol, self.random_state)
        psi = PureState(self.dims_, X[0])
        ov, state, info = closest_block_product(psi, self.partition_, cfg, method=self.method)
        self.overlap_sq_ = ov
        self.vectors_ = state.vectors
        self.n_iter_ = info["iterations"]
        self.converged_ = info["converged"]
        self.n_features_in_ = X.shape[1]
        return self

    def product_state(self) -> PureState:
        check_is_fitted(self, "vectors_")
        return product_state(self.partition_, self.vectors_, self.dims_)

    def transform(self, X):
        P = self.product_state()
        X = check_state_array(X, self.dims_)
        return (np.abs(X @ P.amps.conj()) ** 2)[:, None]

    def score(self, X, y=None):
        """Mean squared overlap of ``X`` with the fitted product state."""
        return float(self.transform(X).mean())

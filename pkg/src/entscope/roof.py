"""Convex-roof upper bounds for mixed states.

Every pure-state ensemble of ``rho = sum_j lam_j |e_j><e_j|`` with ``L``
members arises from an ``L x r`` isometry ``V`` through
``|psi~_i> = sum_j V_ij sqrt(lam_j) |e_j>``. The roof of a functional is
the minimum over ``V`` of the ensemble average; sampling and locally
perturbing isometries gives an upper bound, never a certified value.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .coherence import min_fidelity_coherence
from .exceptions import ArgumentError, IsometryError, NonPSDError
from .geometric import AlsConfig, _rng, gm_m
from .tensor import DensityMatrix, PureState

EIG_NEG_TOL = 1e-8
DROP_PROB = 1e-14


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Ensemble ``{probs[i], states[i]}``."""

    probs: np.ndarray
    states: tuple

    def __init__(self, probs: Sequence[float], states: Sequence[PureState]):
        probs = np.asarray(probs, dtype=float)
        if len(probs) != len(states):
            raise ValueError("probs and states must have the same length")
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
            raise ValueError("probs must be non-negative and sum to 1")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", tuple(states))

    def __len__(self):
        return len(self.probs)

    def matrix(self) -> np.ndarray:
        return sum(p * np.outer(s.amps, s.amps.conj()) for p, s in zip(self.probs, self.states))

    def reconstructs(self, rho: DensityMatrix, tol: float = 1e-8) -> bool:
        return bool(np.allclose(self.matrix(), rho.matrix, rtol=0, atol=tol))

    def to_dict(self):
        return {
            "probs": [float(p) for p in self.probs],
            "states": [
                {"dims": list(s.dims), "amps": [[float(z.real), float(z.imag)] for z in s.amps]}
                for s in self.states
            ],
        }


@dataclass(frozen=True, eq=False)
class RoofResult:
    upper_bound: float
    best_decomposition: Decomposition
    L: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "upperBound": self.upper_bound,
            "isUpperBound": True,
            "L": self.L,
            "bestDecomposition": self.best_decomposition.to_dict(),
            "diagnostics": self.diagnostics,
        }


def spectral_decomposition(rho: DensityMatrix, tol: float = 1e-12) -> Decomposition:
    """Eigen-ensemble of ``rho``, largest weight first; eigenvalues ``<= tol`` dropped."""
    lam, vecs = np.linalg.eigh(rho.matrix)
    if lam[0] < -EIG_NEG_TOL:
        raise NonPSDError(f"eigenvalue {lam[0]:.3g} below -{EIG_NEG_TOL}")
    keep = np.nonzero(lam > tol)[0][::-1]
    probs = lam[keep] / lam[keep].sum()
    states = [PureState(rho.dims, vecs[:, j], normalize=True) for j in keep]
    return Decomposition(probs, states)


def ensemble_from_isometry(spectral: Decomposition, V) -> Decomposition:
    """Ensemble generated by an ``L x r`` isometry from the eigen-ensemble."""
    V = np.asarray(V, dtype=np.complex128)
    r = len(spectral)
    if V.ndim != 2 or V.shape[1] != r or V.shape[0] < r:
        raise ArgumentError(f"isometry must have shape (L, {r}) with L >= {r}, got {V.shape}")
    if not np.allclose(V.conj().T @ V, np.eye(r), rtol=0, atol=1e-8):
        raise IsometryError("V^dagger V is not the identity")
    E = np.stack([s.amps for s in spectral.states], axis=1)  # columns e_j
    tilde = (V * np.sqrt(spectral.probs)[None, :]) @ E.T  # row i = psi~_i
    weights = np.sum(np.abs(tilde) ** 2, axis=1)
    keep = weights > DROP_PROB
    dims = spectral.states[0].dims
    states = [PureState(dims, tilde[i] / np.sqrt(weights[i]), normalize=True) for i in np.nonzero(keep)[0]]
    probs = weights[keep] / weights[keep].sum()
    return Decomposition(probs, states)


def _orthonormalize(z):
    # positive diagonal in R keeps Q close to z when z is nearly an isometry
    q, rr = np.linalg.qr(z)
    d = np.diag(rr)
    return q * (d / np.abs(d))


def _haar_isometry(rng, L, r):
    return _orthonormalize(rng.standard_normal((L, r)) + 1j * rng.standard_normal((L, r)))


def default_ensemble_size(rank: int) -> int:
    return max(rank, min(rank + 2, rank**2))


def gm_functional(m: int, cfg: Optional[AlsConfig] = None) -> Callable[[PureState], float]:
    return lambda psi: gm_m(psi, m, cfg).value


def coherence_sq_functional(m: int, cfg: Optional[AlsConfig] = None) -> Callable[[PureState], float]:
    """Squared minimal coherence; each ensemble member gets its own optimal basis."""
    return lambda psi: min_fidelity_coherence(psi, m, cfg).value ** 2


def roof_upper_bound(
    rho: DensityMatrix,
    functional: Callable[[PureState], float],
    L: Optional[int] = None,
    cfg: Optional[AlsConfig] = None,
    scale: float = 0.1,
    min_scale: float = 1e-4,
    patience: int = 20,
) -> RoofResult:
    """Upper bound on ``min sum_i p_i f(psi_i)`` over ``L``-member ensembles.

    Candidates are the eigen-ensemble plus ``cfg.restarts`` Haar-random
    isometries; the best one is refined by random perturbations
    (accepted only on improvement) whose size halves after ``patience``
    consecutive rejections, until it drops below ``min_scale``.
    """
    cfg = cfg or AlsConfig()
    spectral = spectral_decomposition(rho)
    r = len(spectral)
    L = default_ensemble_size(r) if L is None else int(L)
    if L < r:
        raise ArgumentError(f"ensemble size L={L} is below rank {r}")

    def score(dec):
        return float(sum(p * functional(s) for p, s in zip(dec.probs, dec.states)))

    base = score(spectral)
    if r == 1:
        return RoofResult(base, spectral, L, {"rank": 1, "samples": 0, "refineSteps": 0, "seed": cfg.seed})

    rng = _rng(cfg.seed, 2 << 32)
    best_V = np.eye(L, r, dtype=np.complex128)
    best_dec = ensemble_from_isometry(spectral, best_V)
    best = score(best_dec)
    for _ in range(cfg.restarts):
        V = _haar_isometry(rng, L, r)
        dec = ensemble_from_isometry(spectral, V)
        val = score(dec)
        if val < best:
            best, best_V, best_dec = val, V, dec

    steps, rejected = 0, 0
    while scale >= min_scale:
        steps += 1
        G = rng.standard_normal((L, r)) + 1j * rng.standard_normal((L, r))
        V = _orthonormalize(best_V + scale * G)
        dec = ensemble_from_isometry(spectral, V)
        val = score(dec)
        if val < best:
            best, best_V, best_dec, rejected = val, V, dec, 0
        else:
            rejected += 1
            if rejected >= patience:
                scale /= 2
                rejected = 0

    assert best_dec.reconstructs(rho)
    return RoofResult(
        max(best, 0.0),
        best_dec,
        L,
        {"rank": r, "samples": cfg.restarts, "refineSteps": steps, "seed": cfg.seed, "spectralValue": base},
    )


@dataclass(frozen=True, eq=False)
class MixedGmReport:
    m: int
    gm_roof: RoofResult
    coherence_roof: RoofResult

    @property
    def gap(self) -> float:
        return abs(self.gm_roof.upper_bound - self.coherence_roof.upper_bound)

    def to_dict(self):
        return {
            "m": self.m,
            "gmUpperBound": self.gm_roof.upper_bound,
            "coherenceSqUpperBound": self.coherence_roof.upper_bound,
            "gap": self.gap,
            "gmRoof": self.gm_roof.to_dict(),
            "coherenceRoof": self.coherence_roof.to_dict(),
        }


def gm_mixed(rho: DensityMatrix, m: int, L: Optional[int] = None, cfg: Optional[AlsConfig] = None) -> MixedGmReport:
    """Roof bounds of ``GM_m`` and of the squared minimal coherence, side by side.

    Both searches use the same seed, so they visit the same isometries and
    differ only through the pure-state functional.
    """
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= rho.n:
        raise ArgumentError(f"m must satisfy 1 <= m <= {rho.n}, got {m!r}")
    cfg = cfg or AlsConfig()
    g = roof_upper_bound(rho, gm_functional(m, cfg), L, cfg)
    c = roof_upper_bound(rho, coherence_sq_functional(m, cfg), L, cfg)
    return MixedGmReport(int(m), g, c)

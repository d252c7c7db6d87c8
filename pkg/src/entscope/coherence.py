"""Fidelity-based coherence of pure states in product bases.

The coherence of ``psi`` in a complete basis ``B`` is
``sqrt(1 - max_b |<b|psi>|^2)``. Minimizing it over all product bases
built on partitions into ``m`` blocks recovers ``sqrt(GM_m)``: any
block-product state can be completed to such a basis, and a basis
element is itself a block-product state.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._parallel import ordered_map
from .bases import ProductBasis
from .exceptions import ArgumentError, BudgetExceeded, DimensionError
from .geometric import AlsConfig, GmResult, _rng, gm_m
from .partitions import enumerate_partitions, merged_dims
from .tensor import PureState, block_tensor, product_state

IDENTITY_GAP_TOL = 1e-6
DIRECT_SEARCH_MAX_DIM = 2**12


@dataclass(frozen=True, eq=False)
class CoherenceResult:
    value: float
    max_fidelity: float
    best_element: tuple
    best_basis: Optional[ProductBasis] = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "value": self.value,
            "maxFidelity": self.max_fidelity,
            "bestElementIndex": list(self.best_element),
        }
        if self.best_basis is not None:
            out["bestPartition"] = str(self.best_basis.partition)
            out["bestBasis"] = [
                [[[float(z.real), float(z.imag)] for z in row] for row in U] for U in self.best_basis.block_bases
            ]
        out["diagnostics"] = self.diagnostics
        return out


def rotated_amplitudes(psi: PureState, basis: ProductBasis) -> np.ndarray:
    """Amplitudes ``<b_{j1..jm}|psi>`` as an m-way array over basis indices."""
    if basis.dims != psi.dims:
        raise DimensionError(f"basis dims {basis.dims} do not match state dims {psi.dims}")
    T = block_tensor(psi, basis.partition)
    for axis, U in enumerate(basis.block_bases):
        # contract axis with conj(U) and put the new index back in place
        T = np.moveaxis(np.tensordot(T, U.conj(), axes=([axis], [0])), -1, axis)
    return T


def fidelity_coherence(psi: PureState, basis: ProductBasis) -> CoherenceResult:
    """Coherence of ``psi`` in ``basis``; ties go to the lexicographically first element."""
    F = np.abs(rotated_amplitudes(psi, basis)) ** 2
    flat = int(np.argmax(F))
    fmax = min(float(F.reshape(-1)[flat]), 1.0)
    idx = tuple(int(i) for i in np.unravel_index(flat, F.shape))
    return CoherenceResult(value=float(np.sqrt(max(0.0, 1.0 - fmax))), max_fidelity=fmax, best_element=idx)


def _check_m(psi, m):
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= psi.n:
        raise ArgumentError(f"m must satisfy 1 <= m <= {psi.n}, got {m!r}")


def min_fidelity_coherence(
    psi: PureState, m: int, cfg: Optional[AlsConfig] = None, gm: Optional[GmResult] = None
) -> CoherenceResult:
    """Smallest coherence over product bases on partitions into ``m`` blocks.

    The optimal basis is built by completing each block vector of the
    closest block-product state (from :func:`gm_m`, or ``gm`` if given)
    and the reported value is re-evaluated in that basis.
    """
    _check_m(psi, m)
    gm = gm if gm is not None else gm_m(psi, m, cfg)
    basis = ProductBasis.from_vectors(gm.best_partition, psi.dims, gm.closest.vectors)
    res = fidelity_coherence(psi, basis)
    from_gm = float(np.sqrt(max(0.0, 1.0 - gm.overlap_sq)))
    return CoherenceResult(
        value=res.value,
        max_fidelity=res.max_fidelity,
        best_element=res.best_element,
        best_basis=basis,
        diagnostics={"m": int(m), "fromOverlap": from_gm, "gmMethod": gm.diagnostics.get("method")},
    )


@dataclass(frozen=True)
class IdentityReport:
    m: int
    gm: float
    coherence: float
    gap: float
    passed: bool
    tol: float = IDENTITY_GAP_TOL

    def to_dict(self):
        return {
            "m": self.m,
            "gm": self.gm,
            "coherence": self.coherence,
            "gap": self.gap,
            "pass": self.passed,
            "tol": self.tol,
        }


def verify_theorem5(psi: PureState, m: int, cfg: Optional[AlsConfig] = None, tol: float = IDENTITY_GAP_TOL) -> IdentityReport:
    """Compare ``GM_m(psi)`` with the squared minimal coherence.

    Both sides share the overlap optimum; the coherence side is evaluated
    through an explicitly constructed product basis, so the check covers
    basis completion and the change-of-basis contraction.
    """
    _check_m(psi, m)
    gm = gm_m(psi, m, cfg)
    coh = min_fidelity_coherence(psi, m, cfg, gm=gm)
    gap = abs(gm.value - coh.value**2)
    return IdentityReport(m=int(m), gm=gm.value, coherence=coh.value, gap=gap, passed=gap <= tol, tol=tol)


def _haar_unitary(rng, d):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _refine(psi, p, vectors, rng, max_steps=20000):
    """Random-perturbation hill climb on the block vectors of one element."""
    vectors = [v.copy() for v in vectors]

    def fid(vs):
        return abs(np.vdot(product_state(p, vs, psi.dims).amps, psi.amps)) ** 2

    f = fid(vectors)
    scale, rejected, steps = 0.25, 0, 0
    patience = 20 * p.m
    while scale > 1e-8 and steps < max_steps:
        b = steps % p.m
        steps += 1
        d = vectors[b].size
        step = (rng.standard_normal(d) + 1j * rng.standard_normal(d)) * (scale / np.sqrt(2 * d))
        trial = vectors[b] + step
        trial /= np.linalg.norm(trial)
        cand = vectors[:b] + [trial] + vectors[b + 1:]
        fc = fid(cand)
        if fc > f:
            vectors, f, rejected = cand, fc, 0
        else:
            rejected += 1
            if rejected >= patience:
                scale /= 2
                rejected = 0
    return vectors, steps


def direct_basis_search(
    psi: PureState, m: int, cfg: Optional[AlsConfig] = None, max_dim: int = DIRECT_SEARCH_MAX_DIM
) -> CoherenceResult:
    """Minimize coherence directly over sampled product bases.

    For every partition into ``m`` blocks, ``cfg.restarts`` bases with
    Haar-random block unitaries are scored by :func:`fidelity_coherence`;
    the closest element of the best one is then refined by a random
    perturbation hill climb on its block vectors and completed to a basis.
    This path never calls the overlap optimizers of :mod:`.geometric`.
    """
    cfg = cfg or AlsConfig()
    _check_m(psi, m)
    if psi.dim > max_dim:
        raise BudgetExceeded(f"joint dimension {psi.dim} exceeds direct-search cap {max_dim}")
    parts = list(enumerate_partitions(psi.n, int(m)))

    def run(item):
        idx, p = item
        rng = _rng(cfg.seed, (1 << 32) + idx)
        bdims = merged_dims(p, psi.dims)
        best = None
        for _ in range(cfg.restarts):
            basis = ProductBasis(p, psi.dims, [_haar_unitary(rng, d) for d in bdims])
            res = fidelity_coherence(psi, basis)
            if best is None or res.max_fidelity > best[0]:
                vecs = [U[:, j].copy() for U, j in zip(basis.block_bases, res.best_element)]
                best = (res.max_fidelity, vecs)
        vecs, steps = _refine(psi, p, best[1], rng)
        basis = ProductBasis.from_vectors(p, psi.dims, vecs)
        return fidelity_coherence(psi, basis), basis, steps

    results = ordered_map(run, enumerate(parts))
    bi = 0
    for i, (res, _, _) in enumerate(results):
        if res.value < results[bi][0].value:
            bi = i
    res, basis, steps = results[bi]
    return CoherenceResult(
        value=res.value,
        max_fidelity=res.max_fidelity,
        best_element=res.best_element,
        best_basis=basis,
        diagnostics={"m": int(m), "samples": cfg.restarts, "refineSteps": steps, "partitions": len(parts)},
    )

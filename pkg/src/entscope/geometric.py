"""Geometric measure of m-inseparability for pure states.

``GM_m(psi) = 1 - max |<P|psi>|^2`` with ``P`` ranging over states that
are products across some partition of the parties into ``m`` blocks. The
outer maximum runs over :func:`enumerate_partitions`; the inner one is
exact (SVD) for two blocks and a multi-restart alternating maximization
otherwise.
"""

import string
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._parallel import ordered_map
from .exceptions import ArgumentError, DimensionError
from .partitions import Partition, enumerate_partitions, merged_dims
from .tensor import PureState, block_tensor, product_state

PARTITION_TIE_TOL = 1e-12


@dataclass(frozen=True)
class AlsConfig:
    """Budget for the alternating maximization.

    Attributes
    ----------
    restarts : int
        Independent random starts per partition.
    max_iterations : int
        Cap on full sweeps over the blocks per start.
    convergence_tol : float
        A start stops once a full sweep gains less overlap than this.
    seed : int
        Seeds every random start; results are reproducible for a fixed seed.
    """

    restarts: int = 32
    max_iterations: int = 500
    convergence_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise ArgumentError("restarts and max_iterations must be positive")
        if not 0 < self.convergence_tol < 1e-6:
            raise ArgumentError("convergence_tol must lie in (0, 1e-6)")
        if not 0 <= self.seed < 2**64:
            raise ArgumentError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class BlockProductState:
    """One unit vector per block of ``partition``."""

    partition: Partition
    dims: tuple
    vectors: tuple

    def __post_init__(self):
        bdims = merged_dims(self.partition, self.dims)
        if len(self.vectors) != len(bdims):
            raise DimensionError("one vector per block is required")
        for v, d in zip(self.vectors, bdims):
            if v.shape != (d,):
                raise DimensionError(f"block vector shape {v.shape}, expected {(d,)}")
            if abs(np.linalg.norm(v) - 1) > 1e-9:
                raise ValueError("block vectors must be unit norm")

    def to_state(self) -> PureState:
        return product_state(self.partition, self.vectors, self.dims)


@dataclass(frozen=True, eq=False)
class GmResult:
    value: float
    overlap_sq: float
    best_partition: Partition
    closest: BlockProductState
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        d = self.diagnostics
        return {
            "value": self.value,
            "overlapSq": self.overlap_sq,
            "bestPartition": str(self.best_partition),
            "closest": [[[float(z.real), float(z.imag)] for z in v] for v in self.closest.vectors],
            "diagnostics": {
                "method": d.get("method"),
                "restarts": d.get("restarts"),
                "iterations": d.get("iterations"),
                "converged": d.get("converged"),
                "partitions": d.get("table", []),
            },
        }


def _overlap(psi: PureState, p: Partition, vectors) -> float:
    return float(abs(np.vdot(product_state(p, vectors, psi.dims).amps, psi.amps)) ** 2)


def _rng(seed, stream):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def _random_unit_rows(rng, rows, d):
    z = rng.standard_normal((rows, d)) + 1j * rng.standard_normal((rows, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


class _Contractor:
    """Batched environment contractions for one block tensor."""

    def __init__(self, T, restarts):
        m = T.ndim
        letters = string.ascii_letters.replace("R", "")
        self.T = T
        self.m = m
        self.specs = []
        for b in range(m):
            others = [c for c in range(m) if c != b]
            subs = ",".join([letters[:m]] + ["R" + letters[c] for c in others]) + "->R" + letters[b]
            dummy = [T] + [np.empty((restarts, T.shape[c]), dtype=T.dtype) for c in others]
            path = np.einsum_path(subs, *dummy, optimize="greedy")[0]
            self.specs.append((subs, others, path))

    def env(self, V, b):
        subs, others, path = self.specs[b]
        return np.einsum(subs, self.T, *[V[c].conj() for c in others], optimize=path)


def alternating_maximization(psi: PureState, p: Partition, cfg: AlsConfig, stream: int = 0, record: bool = False):
    """Run ``cfg.restarts`` alternating-update starts on one partition.

    Each sweep visits blocks in ascending order and replaces the block's
    vector with its normalized environment vector, which is the exact
    maximizer with all other blocks held fixed. A start stops when a sweep
    gains less than ``cfg.convergence_tol`` or after ``cfg.max_iterations``
    sweeps.

    Returns ``(overlap_sq, vectors, info)`` for the best start (lowest
    start index on ties). With ``record=True``, ``info["history"]`` holds
    the overlap of every start after every block update.
    """
    T = block_tensor(psi, p)
    m, R = p.m, cfg.restarts
    rng = _rng(cfg.seed, stream)
    V = [_random_unit_rows(rng, R, d) for d in T.shape]
    con = _Contractor(T, R)

    active = np.ones(R, dtype=bool)
    iters = np.zeros(R, dtype=int)
    prev = np.full(R, -np.inf)
    ov = np.zeros(R)
    history = []
    for _ in range(cfg.max_iterations):
        for b in range(m):
            e = con.env(V, b)
            norms = np.linalg.norm(e, axis=1)
            upd = active & (norms > 0)
            V[b][upd] = e[upd] / norms[upd, None]
            ov = np.where(upd, norms**2, ov)
            if record:
                history.append(ov.copy())
        iters[active] += 1
        gain = ov - prev
        prev = ov.copy()
        active &= ~(gain < cfg.convergence_tol)
        if not active.any():
            break

    best = int(np.argmax(ov))
    vectors = [V[b][best].copy() for b in range(m)]
    info = {
        "iterations": int(iters[best]),
        "converged": bool(not active[best]),
        "restart_overlaps": ov,
    }
    if record:
        info["history"] = np.array(history)
    return _overlap(psi, p, vectors), vectors, info


def _svd_closest(psi: PureState, p: Partition):
    T = block_tensor(psi, p)
    u, s, vh = np.linalg.svd(T, full_matrices=False)
    vectors = [u[:, 0].copy(), vh[0].copy()]
    return min(float(s[0] ** 2), 1.0), vectors


def closest_block_product(psi: PureState, p: Partition, cfg: Optional[AlsConfig] = None, method="auto", stream=0):
    """Best block-product approximation of ``psi`` over a fixed partition.

    Parameters
    ----------
    psi : PureState
    p : Partition
        Must cover the parties of ``psi``.
    cfg : AlsConfig, optional
    method : {"auto", "svd", "als"}
        ``"auto"`` uses the exact SVD for two blocks, the state itself for
        one block, and alternating maximization otherwise. ``"als"`` forces
        the iterative path (used to cross-check the SVD).
    stream : int
        Sub-stream of ``cfg.seed`` for the random starts.

    Returns
    -------
    overlap_sq : float
    state : BlockProductState
    info : dict
        ``method``, ``iterations``, ``converged``.
    """
    cfg = cfg or AlsConfig()
    if p.n != psi.n:
        raise DimensionError(f"partition {p} does not cover {psi.n} parties")
    if method == "auto":
        method = "trivial" if p.m == 1 else "svd" if p.m == 2 else "als"
    if method == "trivial":
        if p.m != 1:
            raise ArgumentError("trivial path needs a single block")
        overlap, vectors, info = 1.0, [psi.amps.copy()], {"iterations": 0, "converged": True}
    elif method == "svd":
        if p.m != 2:
            raise ArgumentError("the SVD path needs exactly two blocks")
        overlap, vectors = _svd_closest(psi, p)
        info = {"iterations": 0, "converged": True}
    elif method == "als":
        overlap, vectors, info = alternating_maximization(psi, p, cfg, stream)
    else:
        raise ArgumentError(f"unknown method {method!r}")
    info["method"] = method
    overlap = min(overlap, 1.0)
    return overlap, BlockProductState(p, psi.dims, tuple(vectors)), info


def gm_m(psi: PureState, m: int, cfg: Optional[AlsConfig] = None, method="auto") -> GmResult:
    """Geometric measure of m-inseparability.

    The reported overlap is the best found; with alternating maximization
    it is a lower bound on the true maximum, so ``value`` is an upper
    bound on ``GM_m``. Two-block partitions are exact.

    >>> from entscope.states import ghz
    >>> round(gm_m(ghz(3), 2).value, 12)
    0.5
    """
    cfg = cfg or AlsConfig()
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= psi.n:
        raise ArgumentError(f"m must satisfy 1 <= m <= {psi.n}, got {m!r}")
    parts = list(enumerate_partitions(psi.n, int(m)))

    def run(item):
        idx, p = item
        return closest_block_product(psi, p, cfg, method=method, stream=idx)

    results = ordered_map(run, enumerate(parts))

    best = 0
    table = []
    for i, (p, (ov, _, info)) in enumerate(zip(parts, results)):
        table.append(
            {
                "partition": str(p),
                "overlapSq": ov,
                "iterations": info["iterations"],
                "converged": info["converged"],
            }
        )
        if ov > results[best][0] + PARTITION_TIE_TOL:
            best = i
    ov, state, info = results[best]
    return GmResult(
        value=max(0.0, 1.0 - ov),
        overlap_sq=ov,
        best_partition=parts[best],
        closest=state,
        diagnostics={
            "method": info["method"],
            "restarts": cfg.restarts if info["method"] == "als" else 0,
            "iterations": info["iterations"],
            "converged": info["converged"],
            "table": table,
        },
    )


def ggm(psi: PureState, cfg: Optional[AlsConfig] = None) -> GmResult:
    """Generalized geometric measure, ``GM_2``, always on the exact SVD path."""
    if psi.n < 2:
        raise ArgumentError("the generalized geometric measure needs n >= 2")
    return gm_m(psi, 2, cfg, method="svd")

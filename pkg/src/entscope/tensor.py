"""Dense multi-party states and the linear algebra the measures are built on.

Amplitudes are stored row-major with party 0 slowest, so the amplitude of
``|i_0 i_1 ... i_{n-1}>`` sits at ``amps.reshape(dims)[i_0, ..., i_{n-1}]``.
"""

from dataclasses import dataclass
from math import prod
from typing import Mapping, Sequence

import numpy as np

from .exceptions import DimensionError
from .partitions import Partition, merged_dims

MAX_JOINT_DIM = 2**20
NORM_REJECT_TOL = 1e-6
NORM_FIX_TOL = 1e-9


def _check_dims(dims, max_dim=MAX_JOINT_DIM):
    dims = tuple(dims)
    if len(dims) < 1:
        raise DimensionError("a state needs at least one party")
    for d in dims:
        if int(d) != d or d < 2:
            raise DimensionError(f"party dimensions must be integers >= 2, got {dims}")
    dims = tuple(int(d) for d in dims)
    if prod(dims) > max_dim:
        raise DimensionError(f"joint dimension {prod(dims)} exceeds cap {max_dim}")
    return dims


def _frozen(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector on ``C^{d_0} (x) ... (x) C^{d_{n-1}}``.

    Parameters
    ----------
    dims : sequence of int
        Per-party dimensions, each at least 2.
    amps : array_like
        Complex amplitudes, length ``prod(dims)`` (any shape that flattens
        to it is accepted).
    normalize : bool, default False
        Rescale inputs whose norm is off by more than ``1e-6``. Without
        it such inputs raise ``ValueError``.
    """

    dims: tuple
    amps: np.ndarray

    def __init__(self, dims, amps, normalize=False, max_dim=MAX_JOINT_DIM):
        dims = _check_dims(dims, max_dim)
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if amps.size != prod(dims):
            raise DimensionError(f"{amps.size} amplitudes do not match dims {dims}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector is not a state")
        if abs(norm - 1) > NORM_REJECT_TOL and not normalize:
            raise ValueError(f"state norm {norm:.3g} is not 1; pass normalize=True to rescale")
        if abs(norm - 1) > NORM_FIX_TOL:
            amps = amps / norm
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", _frozen(amps))

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amps, self.amps.conj()))

    def __repr__(self):
        return f"PureState(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace operator on the joint space."""

    dims: tuple
    matrix: np.ndarray

    def __init__(self, dims, matrix, tol=1e-9, max_dim=MAX_JOINT_DIM):
        dims = _check_dims(dims, max_dim)
        matrix = np.asarray(matrix, dtype=np.complex128)
        D = prod(dims)
        if matrix.shape != (D, D):
            raise DimensionError(f"matrix shape {matrix.shape} does not match dims {dims}")
        if not np.allclose(matrix, matrix.conj().T, rtol=0, atol=tol):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(matrix).real - 1) > tol:
            raise ValueError(f"density matrix trace {np.trace(matrix).real:.12g} is not 1")
        if np.linalg.eigvalsh(matrix)[0] < -tol:
            raise ValueError("density matrix has negative eigenvalues")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(matrix))

    @property
    def n(self) -> int:
        return len(self.dims)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


@dataclass(frozen=True)
class SchmidtResult:
    """Schmidt decomposition across a block/complement cut.

    ``coefficients`` are descending; columns of ``left`` span the block,
    columns of ``right`` the complement.
    """

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray


def kron(*states: PureState) -> PureState:
    """Tensor product, parties concatenated left to right."""
    dims = ()
    amps = np.ones(1, dtype=np.complex128)
    for s in states:
        dims += s.dims
        amps = np.kron(amps, s.amps)
    return PureState(dims, amps)


def inner_product(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.dims != b.dims:
        raise DimensionError(f"dims {a.dims} and {b.dims} differ")
    return complex(np.vdot(a.amps, b.amps))


def _check_block(block, n, proper=True):
    block = sorted({int(i) for i in block})
    if not block:
        raise IndexError("block must be non-empty")
    if block[0] < 0 or block[-1] >= n:
        raise IndexError(f"block {block} out of range for {n} parties")
    if proper and len(block) == n:
        raise IndexError("block must be a proper subset of the parties")
    return block


def partial_trace(rho, keep) -> DensityMatrix:
    """Reduce ``rho`` to the parties in ``keep`` (kept in ascending order).

    ``rho`` may also be a :class:`PureState`; the reduction is then taken
    from the matricization without forming the full density matrix.
    """
    keep = _check_block(keep, rho.n, proper=False)
    dims = rho.dims
    if isinstance(rho, PureState):
        if len(keep) == rho.n:
            return rho.density()
        M = matricize(rho, keep)
        return DensityMatrix([dims[i] for i in keep], M @ M.conj().T)
    n = rho.n
    t = rho.matrix.reshape(dims + dims)
    row = list(range(n))
    col = [i if i not in keep else n + i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    red = np.einsum(t, row + col, out)
    kd = prod(dims[i] for i in keep)
    return DensityMatrix([dims[i] for i in keep], red.reshape(kd, kd))


def matricize(psi: PureState, block) -> np.ndarray:
    """Reshape ``psi`` into a (block) x (complement) matrix.

    Parties keep their relative order on each side.
    """
    block = _check_block(block, psi.n)
    rest = [i for i in range(psi.n) if i not in block]
    rows = prod(psi.dims[i] for i in block)
    return psi.tensor.transpose(block + rest).reshape(rows, -1)


def schmidt(psi: PureState, block) -> SchmidtResult:
    M = matricize(psi, block)
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    return SchmidtResult(s, u, vh.conj().T)


def schmidt_max(psi: PureState, block) -> float:
    """Largest squared Schmidt coefficient across ``block`` | rest.

    Equals the maximal squared overlap of ``psi`` with states that are
    products across that cut.
    """
    s = np.linalg.svd(matricize(psi, block), compute_uv=False)
    return float(s[0] ** 2)


def block_tensor(psi: PureState, p: Partition) -> np.ndarray:
    """``psi`` as an m-way tensor with one (merged) axis per block of ``p``."""
    if p.n != psi.n:
        raise DimensionError(f"partition {p} has {p.n} parties, state has {psi.n}")
    return psi.tensor.transpose(p.order()).reshape(merged_dims(p, psi.dims))


def environment_vector(
    psi: PureState,
    p: Partition,
    fixed: Mapping[int, np.ndarray],
    free: int,
) -> np.ndarray:
    """Contract ``psi`` with the conjugates of every block vector except ``free``.

    The norm of the result is the largest ``|<P|psi>|`` reachable by
    changing only the free block's vector, attained at the normalized
    result itself.
    """
    T = block_tensor(psi, p)
    bdims = T.shape
    if set(fixed) != set(range(p.m)) - {free}:
        raise DimensionError(f"fixed blocks must be exactly all blocks except {free}")
    for b in sorted(fixed, reverse=True):
        v = np.asarray(fixed[b], dtype=np.complex128).reshape(-1)
        if v.size != bdims[b]:
            raise DimensionError(f"block {b} vector has length {v.size}, expected {bdims[b]}")
        T = np.tensordot(T, v.conj(), axes=([b], [0]))
    return T


def product_state(p: Partition, vectors: Sequence[np.ndarray], dims: Sequence[int]) -> PureState:
    """Assemble a block-product state in the natural party order."""
    bdims = merged_dims(p, dims)
    t = np.ones(1, dtype=np.complex128)
    for v, d in zip(vectors, bdims):
        v = np.asarray(v, dtype=np.complex128).reshape(-1)
        if v.size != d:
            raise DimensionError(f"block vector length {v.size} != merged dim {d}")
        t = np.kron(t, v)
    t = t.reshape([dims[i] for i in p.order()])
    inverse = np.argsort(p.order())
    return PureState(dims, t.transpose(inverse).reshape(-1))


def random_state(dims: Sequence[int], rng=None) -> PureState:
    """Haar-random pure state (normalized complex Gaussian)."""
    rng = np.random.default_rng(rng)
    D = prod(dims)
    z = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    return PureState(dims, z / np.linalg.norm(z))

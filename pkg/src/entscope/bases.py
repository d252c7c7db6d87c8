"""Multi-orthonormal product bases over a partition."""

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .exceptions import DimensionError
from .partitions import Partition, merged_dims
from .tensor import PureState, product_state

GS_SKIP_TOL = 1e-8


def complete_basis(v, tol=GS_SKIP_TOL) -> np.ndarray:
    """Unitary whose first column is ``v / |v|``.

    Remaining columns come from Gram-Schmidt over the computational basis
    vectors in index order; candidates whose residual norm falls below
    ``tol`` are skipped.
    """
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    d = v.size
    cols = [v / np.linalg.norm(v)]
    for i in range(d):
        if len(cols) == d:
            break
        e = np.zeros(d, dtype=np.complex128)
        e[i] = 1.0
        # two passes keep the columns orthogonal to machine precision
        for _ in range(2):
            for c in cols:
                e = e - np.vdot(c, e) * c
        nrm = np.linalg.norm(e)
        if nrm < tol:
            continue
        cols.append(e / nrm)
    return np.stack(cols, axis=1)


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """Complete basis ``{|u^1_{j1}> (x) ... (x) |u^m_{jm}>}`` over a partition.

    ``block_bases[b]`` is a unitary whose columns are block ``b``'s
    orthonormal vectors over its merged dimension.
    """

    partition: Partition
    dims: tuple
    block_bases: tuple

    def __init__(self, partition: Partition, dims: Sequence[int], block_bases, tol=1e-9):
        dims = tuple(int(d) for d in dims)
        if partition.n != len(dims):
            raise DimensionError(f"partition {partition} does not match {len(dims)} parties")
        bdims = merged_dims(partition, dims)
        if len(block_bases) != len(bdims):
            raise DimensionError(f"need {len(bdims)} block bases, got {len(block_bases)}")
        mats = []
        for U, d in zip(block_bases, bdims):
            U = np.array(U, dtype=np.complex128)
            if U.shape != (d, d):
                raise DimensionError(f"block basis shape {U.shape}, expected {(d, d)}")
            if not np.allclose(U.conj().T @ U, np.eye(d), rtol=0, atol=tol):
                raise ValueError("block basis is not unitary")
            U.flags.writeable = False
            mats.append(U)
        object.__setattr__(self, "partition", partition)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "block_bases", tuple(mats))

    @classmethod
    def computational(cls, partition: Partition, dims) -> "ProductBasis":
        return cls(partition, dims, [np.eye(d) for d in merged_dims(partition, dims)])

    @classmethod
    def from_vectors(cls, partition: Partition, dims, vectors) -> "ProductBasis":
        """Complete each block vector to a block basis; element (0, ..., 0) is their product."""
        return cls(partition, dims, [complete_basis(v) for v in vectors])

    @property
    def size(self) -> int:
        return prod(self.dims)

    def element(self, index: Sequence[int]) -> PureState:
        """The basis element with one column index per block."""
        vecs = [U[:, j] for U, j in zip(self.block_bases, index)]
        return product_state(self.partition, vecs, self.dims)

    def __repr__(self):
        return f"ProductBasis(partition={str(self.partition)!r}, dims={self.dims})"

"""Separability level and entanglement depth of pure states."""

from dataclasses import dataclass

import numpy as np

from .bases import ProductBasis
from .exceptions import ArgumentError, NotProductError
from .partitions import Partition, bipartitions
from .tensor import PureState, matricize, product_state, schmidt_max

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of :func:`classify`.

    m_sep is the largest m for which the state is m-separable, k_ent the
    size of its largest genuinely entangled factor (1 when fully separable).
    """

    m_sep: int
    k_ent: int
    finest: Partition
    block_entangled: tuple

    def to_dict(self):
        return {
            "mSep": self.m_sep,
            "kEnt": self.k_ent,
            "finest": str(self.finest),
            "blockEntangled": list(self.block_entangled),
        }


def _check_tol(tol):
    if not 0 < tol < 1:
        raise ArgumentError(f"tol must lie in (0, 1), got {tol}")


def is_product_across(psi: PureState, p: Partition, tol: float = DEFAULT_TOL) -> bool:
    """True iff every block of ``p`` is unentangled from its complement."""
    _check_tol(tol)
    if p.n != psi.n:
        raise ArgumentError(f"partition {p} does not cover {psi.n} parties")
    if p.m == 1:
        return True
    # the last block's cut is implied by the others
    return all(schmidt_max(psi, b) >= 1 - tol for b in p.blocks[:-1])


def _split_product(psi: PureState, tol):
    """First product cut in bipartition order, as (block_a, block_b, factor_a, factor_b)."""
    for bp in bipartitions(psi.n):
        a, b = bp.blocks
        u, s, vh = np.linalg.svd(matricize(psi, a), full_matrices=False)
        if s[0] ** 2 >= 1 - tol:
            left = PureState([psi.dims[i] for i in a], u[:, 0], normalize=True)
            right = PureState([psi.dims[i] for i in b], vh[0], normalize=True)
            return a, b, left, right
    return None


def _finest_blocks(psi: PureState, labels, tol):
    if psi.n == 1:
        return [tuple(labels)]
    cut = _split_product(psi, tol)
    if cut is None:
        return [tuple(labels)]
    a, b, left, right = cut
    return _finest_blocks(left, [labels[i] for i in a], tol) + _finest_blocks(
        right, [labels[i] for i in b], tol
    )


def finest_factorization(psi: PureState, tol: float = DEFAULT_TOL) -> Partition:
    """The partition with the most blocks across which ``psi`` is a product.

    Each block is split at the first product cut found among its
    bipartitions, then both halves are split recursively. Product factors
    of a pure state refine consistently, so the scan order does not change
    the result.
    """
    _check_tol(tol)
    return Partition(_finest_blocks(psi, list(range(psi.n)), tol))


def classify(psi: PureState, tol: float = DEFAULT_TOL) -> ClassificationResult:
    finest = finest_factorization(psi, tol)
    m_sep = finest.m
    k_ent = max(len(b) for b in finest.blocks)
    assert k_ent <= psi.n - m_sep + 1
    return ClassificationResult(
        m_sep=m_sep,
        k_ent=k_ent,
        finest=finest,
        block_entangled=tuple(len(b) > 1 for b in finest.blocks),
    )


def block_factors(psi: PureState, p: Partition):
    """Dominant block vectors of ``psi`` over ``p``, phased so their product overlaps ``psi`` positively."""
    if p.m == 1:
        return [psi.amps.copy()]
    vecs = []
    for b in p.blocks:
        u, _, _ = np.linalg.svd(matricize(psi, b), full_matrices=False)
        vecs.append(u[:, 0])
    ov = np.vdot(product_state(p, vecs, psi.dims).amps, psi.amps)
    if abs(ov) > 0:
        vecs[0] = vecs[0] * (ov / abs(ov))
    return vecs


def incoherent_basis_witness(psi: PureState, p: Partition, tol: float = DEFAULT_TOL) -> ProductBasis:
    """Product basis over ``p`` that contains ``psi`` as its first element."""
    if not is_product_across(psi, p, tol):
        raise NotProductError(f"state is not a product across {p}")
    return ProductBasis.from_vectors(p, psi.dims, block_factors(psi, p))


def theorem1_check(psi: PureState, m: int, tol: float = DEFAULT_TOL):
    """Coherence conditions characterizing m-separability of a pure state.

    Returns ``(cond_i, cond_ii)``:

    * cond_i: ``psi`` is a product across no partition into ``m + 1``
      blocks, so it is coherent in every product basis over such a
      partition (a pure state is incoherent exactly when it is a basis
      element).
    * cond_ii: ``psi`` is a product across some partition into ``m``
      blocks, so :func:`incoherent_basis_witness` yields a basis in which
      it is incoherent.

    Both hold iff ``classify(psi).m_sep == m``. A state is a product across
    some j-block partition iff j does not exceed the block count of its
    finest factorization (merge blocks to coarsen).
    """
    if not isinstance(m, int) or not 1 <= m <= psi.n:
        raise ArgumentError(f"m must satisfy 1 <= m <= {psi.n}, got {m!r}")
    m_sep = finest_factorization(psi, tol).m
    return (m_sep < m + 1, m_sep >= m)


def theorem3_check(psi: PureState, k: int, tol: float = DEFAULT_TOL):
    """Coherence conditions characterizing entanglement depth ``k``.

    Returns ``(cond_i, cond_ii)``: cond_i holds when some irreducible
    factor spans exactly ``k`` parties (it is coherent in every product
    basis over any bipartition of them); cond_ii holds when no factor
    spans ``k + 1`` or more parties (every larger sub-state splits across
    some bipartition and so is incoherent in a basis built from that
    split).
    """
    if not isinstance(k, int) or not 1 <= k <= psi.n:
        raise ArgumentError(f"k must satisfy 1 <= k <= {psi.n}, got {k!r}")
    sizes = [len(b) for b in finest_factorization(psi, tol).blocks]
    return (k in sizes, max(sizes) <= k)

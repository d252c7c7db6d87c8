import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entscope import (
    ArgumentError,
    NotProductError,
    Partition,
    PureState,
    classify,
    enumerate_partitions,
    fidelity_coherence,
    finest_factorization,
    incoherent_basis_witness,
    is_product_across,
    kron,
    random_state,
    theorem1_check,
    theorem3_check,
)
from entscope.states import bell, ghz, ket, w
from oracles import haar_unitary, local_unitary

PSIM = bell("psim")
STATE_I = kron(ghz(3), ghz(3), ghz(3), ket("0"))
STATE_II = kron(ghz(3), PSIM, PSIM, PSIM, ket("0"))


def planted(rng, sizes, dims=2):
    """Random product of Haar-random factors on consecutive parties, then a random party shuffle."""
    factors = [random_state((dims,) * s, rng) for s in sizes]
    psi = kron(*factors)
    n = psi.n
    perm = rng.permutation(n)
    amps = psi.tensor.transpose(perm).reshape(-1)
    # factor j occupies positions where perm maps to its consecutive range
    starts = np.cumsum([0] + list(sizes))
    owner = {}
    for j, (a, b) in enumerate(zip(starts[:-1], starts[1:])):
        for party in range(a, b):
            owner[party] = j
    blocks = [[] for _ in sizes]
    for new_pos, old in enumerate(perm):
        blocks[owner[old]].append(new_pos)
    return PureState(psi.dims, amps), Partition(blocks)


def test_is_product_across_examples():
    assert is_product_across(ket("000"), Partition([[0], [1], [2]]))
    assert not is_product_across(ghz(3), Partition([[0], [1, 2]]))
    assert is_product_across(kron(ghz(3), ket("0")), Partition([[0, 1, 2], [3]]))


def test_is_product_across_brute_force():
    # oracle: a product state is reproduced exactly by the outer product of its block marginals
    psi = kron(bell("phip"), ket("1"), w(2))
    for p in enumerate_partitions(5, 3):
        expect = True
        for b in p.blocks:
            rest = [i for i in range(5) if i not in b]
            M = psi.tensor.transpose(list(b) + rest).reshape(2 ** len(b), -1)
            expect &= np.linalg.matrix_rank(M, tol=1e-10) == 1
        assert is_product_across(psi, p) == expect


def test_finest_factorization_examples():
    assert finest_factorization(kron(PSIM, ket("0"))) == Partition([[0, 1], [2]])
    assert finest_factorization(ghz(3)) == Partition([[0, 1, 2]])
    f = finest_factorization(STATE_II)
    assert sorted(len(b) for b in f.blocks) == [1, 2, 2, 2, 3]
    assert f == Partition.from_text("1,2,3|4,5|6,7|8,9|10")


def test_ten_party_example_states():
    r = classify(STATE_I)
    assert (r.m_sep, r.k_ent) == (4, 3)
    assert r.block_entangled == (True, True, True, False)
    r = classify(STATE_II)
    assert (r.m_sep, r.k_ent) == (5, 3)
    r = classify(ket("000"))
    assert (r.m_sep, r.k_ent) == (3, 1)
    assert r.to_dict()["finest"] == "1|2|3"


def test_classify_interleaved_factors():
    rng = np.random.default_rng(5)
    psi, blocks = planted(rng, [2, 3, 1])
    r = classify(psi)
    assert r.finest == blocks
    assert (r.m_sep, r.k_ent) == (3, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_finest_is_consistent_and_unrefinable(seed):
    rng = np.random.default_rng(seed)
    sizes = list(rng.integers(1, 3, size=rng.integers(1, 4)))
    psi, blocks = planted(rng, sizes)
    f = finest_factorization(psi)
    assert f == blocks
    assert is_product_across(psi, f)
    # no partition with more blocks passes the product test
    if f.m < psi.n:
        for p in enumerate_partitions(psi.n, f.m + 1):
            assert not is_product_across(psi, p)
    r = classify(psi)
    assert r.k_ent <= psi.n - r.m_sep + 1


def test_finest_is_permutation_covariant():
    rng = np.random.default_rng(8)
    psi = kron(random_state((2, 2), rng), ket("1"), random_state((2, 2, 2), rng))
    f = finest_factorization(psi)
    for perm in itertools.islice(itertools.permutations(range(6)), 0, 720, 97):
        moved = PureState(psi.dims, psi.tensor.transpose(perm).reshape(-1))
        # new party i is old party perm[i]
        relabel = {old: new for new, old in enumerate(perm)}
        expect = Partition([[relabel[i] for i in b] for b in f.blocks])
        assert finest_factorization(moved) == expect


def test_local_unitary_invariance():
    rng = np.random.default_rng(2)
    for psi in (STATE_II, kron(w(3), bell("phim"))):
        us = [haar_unitary(rng, d) for d in psi.dims]
        moved = PureState(psi.dims, local_unitary(psi.amps, psi.dims, us))
        a, b = classify(psi), classify(moved)
        assert (a.m_sep, a.k_ent) == (b.m_sep, b.k_ent)


def test_witness_examples():
    basis = incoherent_basis_witness(ket("00"), Partition([[0], [1]]))
    assert fidelity_coherence(ket("00"), basis).value == pytest.approx(0, abs=1e-12)
    assert fidelity_coherence(ket("00"), basis).best_element == (0, 0)

    psi = kron(PSIM, ket("0"))
    basis = incoherent_basis_witness(psi, Partition([[0, 1], [2]]))
    first = basis.block_bases[0][:, 0]
    assert abs(np.vdot(first, PSIM.amps)) == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(basis.element((0, 0)).amps, psi.amps, atol=1e-12)

    basis = incoherent_basis_witness(ghz(3), Partition([[0, 1, 2]]))
    np.testing.assert_allclose(basis.block_bases[0][:, 0], ghz(3).amps, atol=1e-15)


def test_witness_rejects_non_product():
    with pytest.raises(NotProductError):
        incoherent_basis_witness(ghz(3), Partition([[0], [1, 2]]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_witness_gives_zero_coherence(seed):
    rng = np.random.default_rng(seed)
    psi, blocks = planted(rng, [1, 2, 2])
    for p in [blocks] + [q for q in enumerate_partitions(5, 2) if is_product_across(psi, q)]:
        basis = incoherent_basis_witness(psi, p)
        assert fidelity_coherence(psi, basis).value <= 1e-6


def brute_m_sep(psi):
    """Largest m with some m-block partition passing the product test."""
    return max(m for m in range(1, psi.n + 1) if any(is_product_across(psi, p) for p in enumerate_partitions(psi.n, m)))


def test_separability_check_examples():
    assert theorem1_check(ghz(3), 1) == (True, True)
    assert theorem1_check(ket("000"), 2) == (False, True)
    assert theorem1_check(kron(PSIM, ket("0")), 2) == (True, True)
    with pytest.raises(ArgumentError):
        theorem1_check(ghz(3), 4)


def test_separability_check_against_enumeration():
    rng = np.random.default_rng(17)
    for sizes in ([1, 1, 1, 1], [2, 2], [3, 1], [4], [2, 1, 1]):
        psi, _ = planted(rng, sizes)
        ms = brute_m_sep(psi)
        for m in range(1, psi.n + 1):
            c1, c2 = theorem1_check(psi, m)
            brute_c1 = not any(is_product_across(psi, p) for p in enumerate_partitions(psi.n, m + 1)) if m < psi.n else True
            brute_c2 = any(is_product_across(psi, p) for p in enumerate_partitions(psi.n, m))
            assert (c1, c2) == (brute_c1, brute_c2)
            assert (c1 and c2) == (ms == m) == (classify(psi).m_sep == m)


def test_depth_check_examples():
    assert theorem3_check(STATE_I, 3) == (True, True)
    assert theorem3_check(STATE_I, 4) == (False, True)
    assert theorem3_check(kron(PSIM, PSIM), 2) == (True, True)
    with pytest.raises(ArgumentError):
        theorem3_check(STATE_I, 0)


def test_depth_check_iff():
    rng = np.random.default_rng(23)
    for sizes in ([1, 1, 1], [2, 1, 2], [3, 2], [1, 4]):
        psi, _ = planted(rng, sizes)
        k_ent = classify(psi).k_ent
        for k in range(1, psi.n + 1):
            c1, c2 = theorem3_check(psi, k)
            assert (c1 and c2) == (k == k_ent)


def test_tolerance_validation():
    with pytest.raises(ArgumentError):
        classify(ghz(3), tol=0)

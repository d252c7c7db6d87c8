"""Acceptance criteria, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line that is printed in the
terminal summary; run with ``pytest tests/test_acceptance.py -v``.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from entscope import (
    AlsConfig,
    DensityMatrix,
    PureState,
    bipartitions,
    classify,
    closest_block_product,
    enumerate_partitions,
    ggm,
    gm_m,
    kron,
    min_fidelity_coherence,
    random_state,
    verify_theorem5,
)
from entscope.roof import gm_mixed
from entscope.states import bell, ghz, ket, w
from conftest import mixture
from oracles import stirling_table, two_qubit_gm, w3_grid_max

pytestmark = pytest.mark.acceptance


def test_1_example_classification(acceptance):
    i = kron(ghz(3), ghz(3), ghz(3), ket("0"))
    ii = kron(ghz(3), bell("psim"), bell("psim"), bell("psim"), ket("0"))
    assert i.n == ii.n == 10
    results = []
    for psi, want in ((i, (4, 3)), (ii, (5, 3))):
        t = time.perf_counter()
        r = classify(psi)
        results.append(((r.m_sep, r.k_ent), want, time.perf_counter() - t))
    ok = all(got == want and dt < 10 for got, want, dt in results)
    detail = "; ".join(f"(mSep,kEnt)={got} want {want} in {dt:.3f}s" for got, want, dt in results)
    assert acceptance("1 example classification", ok, detail)


def test_2_known_values(acceptance):
    oracle = w3_grid_max()
    checks = []

    def timed(label, fn, want, tol):
        t = time.perf_counter()
        got = fn()
        dt = time.perf_counter() - t
        checks.append((label, got, want, abs(got - want) <= tol and dt < 1, dt))

    timed("ggm(psi-)", lambda: ggm(bell("psim")).value, 0.5, 1e-9)
    timed("ggm(GHZ3)", lambda: ggm(ghz(3)).value, 0.5, 1e-9)
    timed("ggm(W3)", lambda: ggm(w(3)).value, 1 / 3, 1e-9)
    timed("gm_3(W3)", lambda: gm_m(w(3), 3, AlsConfig(restarts=32)).value, 5 / 9, 1e-6)
    oracle_ok = abs((1 - oracle) - 5 / 9) <= 1e-6 and abs(checks[-1][1] - (1 - oracle)) <= 1e-6
    ok = all(c[3] for c in checks) and oracle_ok
    detail = "; ".join(f"{lbl}={got:.12f} ({dt:.3f}s)" for lbl, got, _, _, dt in checks)
    assert acceptance("2 known values", ok, f"{detail}; grid oracle 1-max={1 - oracle:.12f}")


def test_3_als_svd_agreement(acceptance):
    t = time.perf_counter()
    worst, count = 0.0, 0
    for seed in range(100):
        n = 3 if seed < 50 else 4
        psi = random_state((2,) * n, seed)
        for p in bipartitions(n):
            als, _, _ = closest_block_product(psi, p, method="als")
            svd, _, _ = closest_block_product(psi, p, method="svd")
            worst = max(worst, abs(als - svd))
            count += 1
    dt = time.perf_counter() - t
    ok = worst <= 1e-7 and dt < 60
    assert acceptance("3 ALS/SVD agreement", ok, f"max diff {worst:.2e} over {count} partitions in {dt:.1f}s")


def test_4_gm_coherence_identity(acceptance):
    suite = [ghz(3), w(3), kron(bell("psim"), ket("0"))]
    suite += [random_state((2, 2, 2), 1000 + s) for s in range(50)]
    suite += [random_state((2, 2, 2, 2), 2000 + s) for s in range(20)]
    t = time.perf_counter()
    worst, count = 0.0, 0
    for psi in suite:
        for m in range(1, psi.n + 1):
            worst = max(worst, verify_theorem5(psi, m).gap)
            count += 1
    dt = time.perf_counter() - t
    ok = worst <= 1e-6 and dt < 300
    assert acceptance("4 GM_m equals squared min coherence", ok, f"max gap {worst:.2e} over {count} cases in {dt:.1f}s")


def planted(rng):
    """Random product of entangled factors with parties shuffled; returns (state, n)."""
    n = int(rng.integers(3, 6))
    sizes, left = [], n
    while left:
        s = int(rng.integers(1, min(left, 3) + 1))
        sizes.append(s)
        left -= s
    psi = kron(*[random_state((2,) * s, rng) for s in sizes])
    perm = rng.permutation(n)
    amps = np.transpose(psi.tensor, perm).reshape(-1)
    return PureState((2,) * n, amps), len(sizes)


def test_5_zero_coherence_iff_separable(acceptance):
    rng = np.random.default_rng(5)
    t = time.perf_counter()
    failures, cases, worst_zero, min_pos = [], 0, 0.0, np.inf
    for idx in range(50):
        psi, blocks = planted(rng)
        m_sep = classify(psi).m_sep
        if m_sep != blocks:
            failures.append(f"state {idx}: mSep {m_sep} vs planted {blocks}")
        for m in range(1, psi.n + 1):
            c = min_fidelity_coherence(psi, m).value
            cases += 1
            if m_sep >= m:
                worst_zero = max(worst_zero, c)
                if c > 1e-6:
                    failures.append(f"state {idx} m={m}: {c:.2e} should be 0")
            else:
                min_pos = min(min_pos, c)
                if c <= 1e-3:
                    failures.append(f"state {idx} m={m}: {c:.2e} should exceed 1e-3")
    dt = time.perf_counter() - t
    ok = not failures and dt < 120
    detail = f"{cases} cases, max zero-side {worst_zero:.2e}, min positive side {min_pos:.3f}, {dt:.1f}s"
    assert acceptance("5 zero coherence iff m-separable", ok, detail + "".join("; " + f for f in failures[:5]))


def test_6_stirling_counts(acceptance):
    S = stirling_table(10)
    t = time.perf_counter()
    bad = [(n, m) for n in range(1, 11) for m in range(1, n + 1) if sum(1 for _ in enumerate_partitions(n, m)) != S[n][m]]
    dt = time.perf_counter() - t
    ok = not bad and dt < 5
    assert acceptance("6 partition counts", ok, f"{55 - len(bad)}/55 (n,m) pairs match in {dt:.2f}s")


def test_7_convex_roof(acceptance):
    t = time.perf_counter()
    notes, ok = [], True

    pure_diff = 0.0
    for psi in (bell("psim"), w(3), ghz(3), random_state((2, 2, 2), 77)):
        rho = DensityMatrix(psi.dims, np.outer(psi.amps, psi.amps.conj()))
        for m in range(2, psi.n + 1):
            rep = gm_mixed(rho, m)
            want = gm_m(psi, m).value
            pure_diff = max(pure_diff, abs(rep.gm_roof.upper_bound - want), abs(rep.coherence_roof.upper_bound - want))
    ok &= pure_diff <= 1e-9
    notes.append(f"rank-1 max diff {pure_diff:.1e}")

    bell_mix = mixture((0.5, bell("psip")), (0.5, bell("psim")))
    rep = gm_mixed(bell_mix, 2)
    report = rep.to_dict()["gmRoof"]["bestDecomposition"]
    amps = [np.array([complex(*z) for z in s["amps"]]) for s in report["states"]]
    supports = {int(np.argmax(np.abs(a))) for a in amps if np.max(np.abs(a)) ** 2 > 1 - 1e-6}
    certified = rep.gm_roof.upper_bound <= 1e-6 and supports == {1, 2}
    ok &= certified
    notes.append(f"Bell mixture bound {rep.gm_roof.upper_bound:.1e}, members on {sorted(supports)}")

    rng = np.random.default_rng(7)
    fixtures = [
        bell_mix,
        mixture((0.75, bell("psim")), (0.25, ket("01"))),
        mixture((0.6, bell("phip")), (0.4, ket("00"))),
        mixture((0.5, bell("phip")), (0.5, bell("psim"))),
    ]
    for _ in range(4):
        p = rng.uniform(0.2, 0.8)
        fixtures.append(mixture((p, random_state((2, 2), rng)), (1 - p, random_state((2, 2), rng))))
    gap, exact_err = 0.0, 0.0
    for rho in fixtures:
        rep = gm_mixed(rho, 2)
        gap = max(gap, rep.gap)
        exact_err = max(exact_err, rep.gm_roof.upper_bound - two_qubit_gm(rho.matrix))
    ok &= gap <= 1e-5
    notes.append(f"max functional gap {gap:.1e} on {len(fixtures)} fixtures (bound minus exact <= {exact_err:.1e})")

    dt = time.perf_counter() - t
    ok &= dt < 120
    assert acceptance("7 convex roof", bool(ok), "; ".join(notes) + f"; {dt:.1f}s")


COMMANDS = [
    ["classify", "ghz(3)*bell(psim)", "--m", "2", "--k", "3"],
    ["gm", "rand(2,2,2,2,3)", "--m", "3"],
    ["coherence", "w(3)", "--m", "3"],
    ["coherence", "rand(2,2,2,1)", "--m", "2", "--direct", "--restarts", "4"],
    ["verify", "rand(2,2,2,4)"],
    ["roof", "0.75*bell(psim) + 0.25*ket(01)", "--m", "2", "--restarts", "8"],
    ["partitions", "5"],
    ["partitions", "4", "--m", "2"],
]


def test_8_determinism(acceptance):
    bad = []
    for argv in COMMANDS:
        for fmt in ("json", "csv"):
            full = [sys.executable, "-m", "entscope", *argv, "--seed", "11", "--deterministic", "--output", fmt]
            runs = [subprocess.run(full, capture_output=True, check=True).stdout for _ in range(2)]
            if runs[0] != runs[1] or not runs[0]:
                bad.append(f"{argv[0]} {fmt}")
    ok = not bad
    assert acceptance("8 deterministic output", ok, f"{2 * len(COMMANDS) - len(bad)}/{2 * len(COMMANDS)} command/format pairs identical" + (f"; differ: {bad}" if bad else ""))

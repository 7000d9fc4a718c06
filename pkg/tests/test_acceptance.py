"""The fourteen acceptance criteria, one test each, at their stated tolerances.

A per-criterion PASS/FAIL table is printed at the end of the pytest run.
"""

import math
import time

import numpy as np
import pytest

from ghzstab import analytic, encodings, ptspec, pulsegen, qcore, sweeprunner, tnet
from oracles import (
    distill_protocol,
    hs_ratio_dense,
    index_q_dense,
    noisy_cghz,
    offdiag_norm,
)

P_GRID = np.linspace(0, 1, 21)


def test_c01_coherence_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for m in range(1, 6):
        enc = encodings.ghz_encoding(m)
        for p in P_GRID:
            worst = max(worst, abs(analytic.i0_trace_norm(m, p) - offdiag_norm(enc, p)))
            if p > 0:
                worst = max(worst, abs(analytic.hs_ratio(m, p) - hs_ratio_dense(m, p)))
    assert worst <= 1e-10
    assert time.perf_counter() - t0 < 10


def test_c02_bound_chain():
    for m in range(1, 10):
        for N in (1, 10, 100):
            for p in P_GRID:
                lo = analytic.i_lower_bound(N, m, p)
                mid = analytic.i_trace_norm(N, m, p)
                hi = analytic.j0_upper_bound(m, p) ** N
                assert lo <= mid * (1 + 1e-12) and mid <= hi * (1 + 1e-12) + 1e-300
    ps = [0.8, 0.9, 0.95]
    for _, p, j0 in encodings.random_encoding_search(3, 1000, ps, seed=2024):
        assert j0 <= 1 - (1 - p) ** 3 + 1e-12


def test_c03_fig1_shape():
    p = math.exp(-0.05)
    values = [analytic.i_trace_norm(100, m, p) for m in range(1, 6)]
    assert all(a < b for a, b in zip(values, values[1:]))
    gts = np.geomspace(1e-4, 1e-3, 6)
    for m in range(1, 6):
        tail = [1 - analytic.i0_trace_norm(m, math.exp(-g)) for g in gts]
        slope = np.polyfit(np.log(gts), np.log(tail), 1)[0]
        assert abs(slope - math.ceil(m / 2)) <= 0.05, (m, slope)


def test_c04_cluster_closed_form():
    enc5 = encodings.cluster_encoding(5)
    for p in (0.5, 0.8, 0.9, 0.99):
        assert abs(analytic.cluster_j0_m5(p) - offdiag_norm(enc5, p)) <= 1e-10
    ghz3, cl3 = encodings.ghz_encoding(3), encodings.cluster_encoding(3)
    for p in P_GRID:
        assert abs(offdiag_norm(ghz3, p) - offdiag_norm(cl3, p)) <= 1e-10


PAIRS = [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (3, 2), (3, 3), (2, 4)]


def test_c05_negativity_engine():
    worst = 0.0
    for m, N in PAIRS:
        for p in P_GRID:
            dense = qcore.negativity_dense(noisy_cghz(N, m, p), list(range(m)))
            worst = max(worst, abs(ptspec.negativity(N, m, p, cutoff=0) - dense))
        assert abs(ptspec.negativity(N, m, 1.0, cutoff=0) - 0.5) <= 1e-12
        assert abs(qcore.negativity_dense(noisy_cghz(N, m, 1.0), list(range(m))) - 0.5) <= 1e-12
    assert worst <= 1e-8


def test_c06_distillability():
    t0 = time.perf_counter()
    counts = [analytic.max_distillable_N(m, 0.9) for m in range(1, 11)]
    assert counts[0].n < 100
    assert counts[8].n >= 10**10
    assert all(a.n < b.n for a, b in zip(counts, counts[1:]))
    assert time.perf_counter() - t0 < 5
    points = [(N, m, p) for N, m in [(2, 1), (3, 1), (4, 1), (8, 1), (2, 2), (3, 2), (4, 2), (3, 3), (2, 5)]
              for p in (0.3, 0.7, 0.9, 0.99)]
    points += [(6, 2, 0.9), (4, 3, 0.7)]
    for N, m, p in points:
        fid, _ = distill_protocol(N, m, p)
        assert abs(fid - analytic.distill_fidelity(N, m, p)) <= 1e-9


def test_c07_lifetime_bound():
    root = ptspec.g0_lifetime(30, 10)
    assert 0.70 <= root <= 0.85
    for N, m in [(2, 1), (3, 2), (2, 3), (4, 3), (6, 2), (3, 4)]:
        gt = ptspec.g0_lifetime(N, m)
        below = math.exp(-0.99 * gt)
        assert qcore.negativity_dense(noisy_cghz(N, m, below), list(range(m))) > 0


def test_c08_beta_extraction():
    Ns = list(range(40, 121, 2)) + list(range(130, 301, 10))
    ms = [1, 3, 5, 7]
    betas = [ptspec.decay_rate_beta(m, 0.95, Ns, cutoff=1e-12).beta for m in ms]
    assert None not in betas
    assert all(a > b for a, b in zip(betas, betas[1:]))
    y = np.log(betas)
    slope, icept = np.polyfit(ms, y, 1)
    resid = y - (slope * np.array(ms) + icept)
    r2 = 1 - resid.var() / y.var()
    assert slope < 0 and r2 > 0.9


def test_c09_gme():
    for N in (1, 2, 5, 20):
        for m in (1, 2, 3, 5):
            assert analytic.gme_alpha(N, m, 1.0) == pytest.approx(1.0, abs=1e-12)
            assert analytic.gme_alpha_projected(N, m, 1.0) == pytest.approx(1.0, abs=1e-12)
    for N in (3, 5, 10, 20, 50):
        l1, l2, l3 = (analytic.gme_lifetime(N, m, projected=True) for m in (1, 2, 3))
        assert l2 > l1 > l3


def test_c10_index_q():
    for N in range(1, 9):
        for p in (0.5, 0.9, 1.0):
            oracle = 4 * N * N * p**N
            assert abs(index_q_dense(N, 1, p) - oracle) <= 1e-8
            assert abs(ptspec.index_q_cghz(N, 1, p) - oracle) <= 1e-8
    points = [(N, m, p) for N, m in [(2, 2), (3, 2), (2, 3), (4, 2), (3, 3), (2, 5)] for p in (0.5, 0.8, 0.95)]
    points += [(6, 2, 0.8), (4, 3, 0.9), (3, 4, 0.7)]
    for N, m, p in points:
        assert abs(ptspec.index_q_cghz(N, m, p) - index_q_dense(N, m, p)) <= 1e-8
    for N in (1, 2, 5, 10, 30):
        for m in range(1, 6):
            for p in P_GRID:
                # equality holds for m = 1, so allow rounding
                assert ptspec.index_q_upper_bound(N, m, p) >= ptspec.index_q_cghz(N, m, p) * (1 - 1e-12)
    rel = [ptspec.n_eff(8, m, 0.9) / 8 for m in (1, 2, 3)]
    assert rel[0] < rel[1] < rel[2]


def test_c11_tensor_network():
    t0 = time.perf_counter()
    ch = qcore.depolarizing(0.83)
    ops = [
        tnet.outer_product(tnet.mps_cluster(6, 1), tnet.mps_cluster(6, -1)),
        tnet.outer_product(tnet.mps_cghz(4, 3), tnet.mps_cghz(4, 3)),
        tnet.outer_product(tnet.mps_concat_cluster(1, 3, 3), tnet.mps_concat_cluster(-1, 3, 3)),
        tnet.outer_product(tnet.mps_codeword_product(3, 4, 0), tnet.mps_codeword_product(3, 4, 1)),
    ]
    for op in ops:
        noisy = tnet.apply_superop(op, ch)
        dense = qcore.apply_channel_all(tnet.to_dense(op), ch)
        assert abs(tnet.hs_norm_chain(noisy) - qcore.hs_norm(dense)) <= 1e-10

    for N, m in [(100, 1), (50, 2), (33, 3), (20, 5), (10, 10)]:
        for p in (0.6, 0.9, 0.99):
            ch = qcore.depolarizing(p)
            if m == 1:
                a, b = tnet.mps_basis(N, 0), tnet.mps_basis(N, 1)
            else:
                a, b = tnet.mps_codeword_product(N, m, 0), tnet.mps_codeword_product(N, m, 1)
            assert abs(tnet.noisy_relative_hs(a, b, ch) - analytic.hs_ratio(m, p) ** N) <= 1e-10

    ch = qcore.depolarizing(0.9)
    flat = tnet.apply_superop(tnet.outer_product(tnet.mps_flat_codeword(25, 0, "cluster"),
                                                 tnet.mps_flat_codeword(25, 1, "cluster")), ch)
    inner_dims, loop_dims = tnet.hs_transfer_dims(flat)
    assert max(inner_dims + loop_dims) == 16
    cat = tnet.apply_superop(tnet.outer_product(tnet.mps_concat_cluster(1), tnet.mps_concat_cluster(-1)), ch)
    inner_dims, loop_dims = tnet.hs_transfer_dims(cat)
    assert set(inner_dims) == {16} and set(loop_dims) == {256}

    a, b = tnet.mps_cluster(100, 1), tnet.mps_cluster(100, -1)
    for gt in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5):
        p = math.exp(-gt)
        cl = tnet.noisy_relative_hs(a, b, qcore.depolarizing(p))
        assert analytic.hs_ratio(3, p) ** 100 < cl < analytic.hs_ratio(5, p) ** 100

    ch = qcore.depolarizing(math.exp(-0.1))
    rel = {
        fam: tnet.noisy_relative_hs(tnet.mps_flat_codeword(25, 0, fam), tnet.mps_flat_codeword(25, 1, fam), ch)
        for fam in ("ghz", "cluster")
    }
    cat_ghz = tnet.noisy_relative_hs(tnet.mps_concat_ghz(1), tnet.mps_concat_ghz(-1), ch)
    cat_cl = tnet.noisy_relative_hs(tnet.mps_concat_cluster(1), tnet.mps_concat_cluster(-1), ch)
    assert cat_cl > rel["cluster"]
    assert rel["ghz"] > cat_ghz
    assert time.perf_counter() - t0 < 300


def test_c12_error_correction():
    for gt in np.linspace(0, 0.01, 6):
        p = math.exp(-gt)
        assert abs(encodings.ec_corrected_offdiagonal(p) - analytic.i0_trace_norm(5, p)) <= 1e-3
    for gt in (1.0, 1.5, 2.0, 3.0):
        p = math.exp(-gt)
        assert encodings.ec_corrected_offdiagonal(p) < p


def test_c13_pulse_compiler():
    from fractions import Fraction

    seq = pulsegen.compile(4, 2)
    ms = [op for op in seq.ops if isinstance(op, pulsegen.MS)]
    zs = [op for op in seq.ops if isinstance(op, pulsegen.Z)]
    assert len(ms) == 4 and all(op.xi == Fraction(1, 8) for op in ms)
    assert len(zs) == 3 and all(len(z.sites) == 4 for z in zs)
    for N in (2, 4, 8):
        for m in (2, 3):
            assert pulsegen.meets_target(pulsegen.compile(N, m), N, m)
    for N, m in [(2, 2), (2, 3), (3, 2), (4, 2), (3, 3), (2, 4), (2, 5), (5, 2)]:
        assert pulsegen.verify_dense(pulsegen.compile(N, m), m).passed
        if N * m % 2 == 0:
            assert pulsegen.verify_dense(pulsegen.full_cghz_sequence(N, m), m).passed
    assert [pulsegen.minimal_pulse_search(N, 2) for N in (2, 3, 4, 5)] == [2, 4, 4, 8]


def test_c14_determinism(tmp_path):
    for name in sweeprunner.RECIPES:
        _, first = sweeprunner.run_recipe(name, str(tmp_path / "a"))
        _, second = sweeprunner.run_recipe(name, str(tmp_path / "b"))
        with open(first, "rb") as fa, open(second, "rb") as fb:
            assert fa.read() == fb.read(), name

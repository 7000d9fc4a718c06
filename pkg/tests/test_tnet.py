import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzstab import analytic, encodings, qcore, tnet


def close(a, b, tol=1e-12):
    return np.abs(np.asarray(a) - np.asarray(b)).max() < tol


@pytest.mark.parametrize("N", [3, 4, 5, 8])
def test_cluster_ring_matches_dense(N):
    for sign in (1, -1):
        assert close(tnet.to_dense(tnet.mps_cluster(N, sign)), encodings.cluster_state(N, sign))
    a, b = tnet.mps_cluster(N, 1), tnet.mps_cluster(N, -1)
    assert tnet.inner(a, a) == pytest.approx(1)
    assert abs(tnet.inner(a, b)) < 1e-12
    assert a.inner_bonds == [2] * N


def test_ghz_ring_is_standard_ghz():
    v = np.zeros(32)
    v[[0, -1]] = 1 / math.sqrt(2)
    assert close(tnet.to_dense(tnet.mps_cghz(5, 1)), v)


@pytest.mark.parametrize("N,m", [(2, 2), (3, 3), (4, 3), (2, 5), (3, 4), (6, 2)])
def test_cghz_matches_dense(N, m):
    chain = tnet.mps_cghz(N, m)
    assert close(tnet.to_dense(chain), encodings.logical_ghz_state(encodings.ghz_encoding(m), N))
    assert tnet.norm(chain) == pytest.approx(1)
    assert chain.max_bond == 2


def test_concatenated_cluster_small_matches_dense():
    for sign, inner_sign in ((1, 1), (-1, -1)):
        dense = encodings._substitute(encodings.cluster_state(3, inner_sign), 3, encodings.cluster_encoding(4))
        assert close(tnet.to_dense(tnet.mps_concat_cluster(sign, 3, 4)), dense)


def test_concatenated_ghz_small_matches_dense():
    inner = encodings.ghz_encoding(3)
    dense = encodings._substitute(inner.one, 3, inner)
    assert close(tnet.to_dense(tnet.mps_concat_ghz(-1, 3, 3)), dense)


def test_concatenated_cluster_codewords_and_bonds():
    a, b = tnet.mps_concat_cluster(1), tnet.mps_concat_cluster(-1)
    assert a.n_sites == 25
    assert tnet.inner(a, a) == pytest.approx(1)
    assert abs(tnet.inner(a, b)) < 1e-12
    assert set(a.inner_bonds) == {2}
    assert max(d for lb in a.loop_bonds for d in lb) == 4


def test_operator_pipeline_bond_dims():
    a, b = tnet.mps_cluster(6, 1), tnet.mps_cluster(6, -1)
    op = tnet.outer_product(a, b)
    assert op.inner_bonds == [4] * 6
    noisy = tnet.apply_superop(op, qcore.depolarizing(0.7))
    assert noisy.bond_dims == op.bond_dims
    assert tnet.multiply(noisy, tnet.adjoint(noisy)).inner_bonds == [16] * 6
    cat = tnet.outer_product(tnet.mps_concat_cluster(1), tnet.mps_concat_cluster(-1))
    inner_dims, loop_dims = tnet.hs_transfer_dims(cat)
    assert set(inner_dims) == {16} and set(loop_dims) == {256}


def test_operator_chain_matches_dense():
    a, b = tnet.mps_cluster(6, 1), tnet.mps_cluster(6, -1)
    op = tnet.outer_product(a, b)
    dense = np.outer(encodings.cluster_state(6, 1), encodings.cluster_state(6, -1).conj())
    assert close(tnet.to_dense(op), dense)
    assert abs(tnet.trace(op)) < 1e-12
    assert tnet.trace(tnet.outer_product(a, a)) == pytest.approx(1)
    ch = qcore.depolarizing(0.6)
    noisy = tnet.apply_superop(op, ch)
    noisy_dense = qcore.apply_channel_all(dense, ch)
    assert close(tnet.to_dense(noisy), noisy_dense)
    assert close(tnet.to_dense(tnet.adjoint(noisy)), noisy_dense.conj().T)
    assert close(tnet.to_dense(tnet.multiply(noisy, tnet.adjoint(noisy))), noisy_dense @ noisy_dense.conj().T)
    assert tnet.hs_norm_chain(noisy) == pytest.approx(qcore.hs_norm(noisy_dense), abs=1e-10)


def test_identity_superop_and_full_depolarization():
    a = tnet.mps_cghz(3, 2)
    rho = tnet.outer_product(a, a)
    assert close(tnet.to_dense(tnet.apply_superop(rho, qcore.identity_channel())), tnet.to_dense(rho))
    mixed = tnet.apply_superop(rho, qcore.depolarizing(0.0))
    assert close(tnet.to_dense(mixed), np.eye(64) / 64)


def test_identity_hs_norm():
    for N in (2, 6, 40):
        assert tnet.hs_norm_chain(tnet.identity_chain(N)) == pytest.approx(2 ** (N / 2))


@given(k=st.integers(0, 9), p=st.floats(0.05, 1))
@settings(max_examples=20, deadline=None)
def test_contraction_invariant_under_rotation(k, p):
    a, b = tnet.mps_cghz(5, 2), tnet.mps_codeword_product(5, 2, 1)
    op = tnet.apply_superop(tnet.outer_product(a, b), qcore.depolarizing(p))
    assert tnet.hs_norm_chain(tnet.rotate(op, k)) == pytest.approx(tnet.hs_norm_chain(op), rel=1e-12)
    assert tnet.inner(tnet.rotate(a, k), tnet.rotate(a, k)) == pytest.approx(1, abs=1e-12)


@given(N=st.integers(1, 60), m=st.integers(2, 6), p=st.floats(0.3, 1))
@settings(max_examples=25, deadline=None)
def test_relative_hs_matches_closed_form(N, m, p):
    ch = qcore.depolarizing(p)
    a, b = tnet.mps_codeword_product(N, m, 0), tnet.mps_codeword_product(N, m, 1)
    assert tnet.noisy_relative_hs(a, b, ch) == pytest.approx(analytic.hs_ratio(m, p) ** N, rel=1e-9, abs=1e-12)


def test_noiseless_relative_hs_is_one():
    ch = qcore.depolarizing(1.0)
    for fam in ("ghz", "cluster"):
        a, b = tnet.mps_flat_codeword(25, 0, fam), tnet.mps_flat_codeword(25, 1, fam)
        assert tnet.noisy_relative_hs(a, b, ch) == pytest.approx(1.0)


def test_log_domain_survives_underflow():
    a, b = tnet.mps_basis(400, 0), tnet.mps_basis(400, 1)
    ch = qcore.depolarizing(0.1)
    op = tnet.apply_superop(tnet.outer_product(a, b), ch)
    lg = tnet.log_hs_norm(op)
    assert math.isfinite(lg)
    # per site the |0><1| image has HS norm p / sqrt(2) relative to the 2-dim identity scale
    assert lg == pytest.approx(400 * math.log(0.1), rel=1e-12)


def test_bad_geometry_rejected():
    with pytest.raises(ValueError):
        tnet.outer_product(tnet.mps_cluster(4), tnet.mps_cluster(5))
    with pytest.raises(ValueError):
        tnet.trace(tnet.mps_cluster(4))
    with pytest.raises(ValueError):
        tnet.mps_cluster(4, sign=0)

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from ghzstab import encodings, pulsegen, qcore


def ms_dense(n, xi):
    """exp(i xi/2 sum_{k<l} X_k X_l) built from Pauli strings."""
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    for k in range(n):
        for l in range(k + 1, n):
            H += qcore.pauli_on(n, k, 1) @ qcore.pauli_on(n, l, 1)
    return expm(0.5j * xi * H)


def z_dense(n, sites):
    H = sum(qcore.pauli_on(n, s, 3) for s in sites)
    return expm(0.5j * math.pi * H)


def dense_reference(seq):
    n = seq.n_sites
    U = np.eye(1 << n, dtype=complex)
    for op in seq.ops:
        G = ms_dense(n, float(op.xi) * math.pi) if isinstance(op, pulsegen.MS) else z_dense(n, op.sites)
        U = G @ U
    return U


@pytest.mark.parametrize("seq", [
    pulsegen.compile(2, 2),
    pulsegen.compile(3, 2),
    pulsegen.full_cghz_sequence(2, 3),
    pulsegen.PulseSequence((pulsegen.MS(Fraction(1, 3)), pulsegen.Z(frozenset({0, 2})), pulsegen.MS(Fraction(1, 7))), 4),
])
def test_simulator_matches_matrix_exponentials(seq):
    assert np.allclose(pulsegen.dense_unitary(seq), dense_reference(seq), atol=1e-12)
    assert np.allclose(pulsegen.phase_unitary(seq), dense_reference(seq), atol=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_half_pi_pulse_makes_ghz(n):
    psi = pulsegen.simulate(pulsegen.PulseSequence((pulsegen.MS(Fraction(1, 2)),), n))
    amps = np.abs(psi)
    assert amps[0] == pytest.approx(1 / math.sqrt(2)) and amps[-1] == pytest.approx(1 / math.sqrt(2))
    rel = np.angle(psi[-1] / psi[0])
    assert rel == pytest.approx(math.pi / 2 if (n // 2) % 2 else -math.pi / 2)


def test_compile_four_blocks_of_two():
    seq = pulsegen.compile(4, 2)
    kinds = [type(op).__name__ for op in seq.ops]
    assert kinds == ["MS", "Z", "MS", "Z", "MS", "Z", "MS"]
    assert seq.total_xi == Fraction(1, 2)
    assert [sorted(f) for f in pulsegen.frames(seq)] == [[], [0, 1, 2, 3], [0, 1, 4, 5], [0, 1, 6, 7]]


@given(k=st.integers(0, 4), m=st.integers(1, 4))
@settings(max_examples=20, deadline=None)
def test_compile_meets_target_exactly(k, m):
    N = 2 ** k if k else 3
    if N < 2:
        N = 2
    seq = pulsegen.compile(N, m)
    assert pulsegen.meets_target(seq, N, m)
    assert seq.ms_count == 1 << (N - 1).bit_length()
    assert seq.z_count == seq.ms_count - 1


@pytest.mark.parametrize("N", [3, 5, 6, 7])
def test_non_power_of_two_registers(N):
    assert pulsegen.meets_target(pulsegen.compile(N, 2), N, 2)


def test_block_frames_doubling():
    assert pulsegen.block_frames(1) == [frozenset()]
    fr = pulsegen.block_frames(4)
    assert len(fr) == 4 and len(set(fr)) == 4
    with pytest.raises(ValueError):
        pulsegen.compile(1, 2)


@pytest.mark.parametrize("N,m", [(2, 2), (4, 2), (2, 4), (3, 2)])
def test_full_sequence_prepares_cghz_up_to_local_unitaries(N, m):
    psi = pulsegen.simulate(pulsegen.full_cghz_sequence(N, m))
    target = encodings.logical_ghz_state(encodings.ghz_encoding(m), N)
    got, want = pulsegen.block_spectra(psi, N, m), pulsegen.block_spectra(target, N, m)
    assert got.keys() == want.keys()
    for key in got:
        assert np.allclose(got[key], want[key], atol=1e-10)


def test_odd_register_rejected_for_full_sequence():
    with pytest.raises(ValueError):
        pulsegen.full_cghz_sequence(3, 3)


def test_certificates_detect_a_missing_rotation():
    good = pulsegen.compile(4, 2)
    assert pulsegen.verify_dense(good, 2).passed
    bad = pulsegen.PulseSequence(tuple(op for i, op in enumerate(good.ops) if i != 1), 8)
    cert = pulsegen.verify_dense(bad, 2)
    assert not cert.passed and not cert.blocks_independent


def test_json_round_trip():
    seq = pulsegen.full_cghz_sequence(4, 3)
    again = pulsegen.PulseSequence.from_json(seq.to_json())
    assert again == seq


def test_invalid_pulses_rejected():
    with pytest.raises(ValueError):
        pulsegen.PulseSequence((pulsegen.MS(Fraction(0)),), 2)
    with pytest.raises(ValueError):
        pulsegen.PulseSequence((pulsegen.Z(frozenset({5})),), 2)


def test_minimal_search():
    assert pulsegen.minimal_pulse_search(4, 1) == 0
    assert pulsegen.minimal_pulse_search(2, 3) == 2
    with pytest.raises(LookupError):
        pulsegen.minimal_pulse_search(5, 2, max_pulses=4)

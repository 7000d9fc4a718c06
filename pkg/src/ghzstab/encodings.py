"""Logical-qubit codeword families and the five-qubit cluster correction scheme."""

from dataclasses import dataclass, field

import numpy as np

from . import qcore


@dataclass(frozen=True)
class BlockEncoding:
    m: int
    zero: np.ndarray
    one: np.ndarray
    label: str = ""

    def offdiagonal(self):
        """|0_L><1_L| as a dense operator."""
        return np.outer(self.zero, self.one.conj())

    def offdiagonal_norm(self, channel):
        """Trace norm of the noisy off-diagonal element of one block."""
        return qcore.trace_norm(qcore.apply_channel_all(self.offdiagonal(), channel))


def _basis(m, bit):
    v = np.zeros(1 << m, dtype=complex)
    v[((1 << m) - 1) if bit else 0] = 1
    return v


def _require_m(m, least=1):
    if int(m) != m or m < least:
        raise ValueError(f"block size must be an integer >= {least}, got {m}")


def ghz_encoding(m):
    _require_m(m)
    qcore.check_capacity(m)
    a, b = _basis(m, 0), _basis(m, 1)
    return BlockEncoding(m, (a + b) / np.sqrt(2), (a - b) / np.sqrt(2), f"ghz{m}")


def product_encoding(m):
    _require_m(m)
    qcore.check_capacity(m)
    return BlockEncoding(m, _basis(m, 0), _basis(m, 1), f"product{m}")


def ring_cz_phases(m):
    """Diagonal of the product of controlled-Z gates around a ring of m qubits."""
    idx = np.arange(1 << m)
    bits = (idx[:, None] >> (m - 1 - np.arange(m))) & 1
    parity = (bits * np.roll(bits, -1, axis=1)).sum(axis=1) & 1
    return 1 - 2 * parity


def cluster_state(m, sign=+1):
    """Ring cluster state built from |+>^m (sign=+1) or |->^m (sign=-1)."""
    _require_m(m, 3)
    qcore.check_capacity(m)
    idx = np.arange(1 << m)
    if sign > 0:
        base = np.ones(1 << m)
    else:
        # |->^m has amplitude (-1)^{popcount}
        pop = np.array([bin(i).count("1") for i in idx])
        base = (-1.0) ** pop
    return (ring_cz_phases(m) * base / np.sqrt(1 << m)).astype(complex)


def cluster_encoding(m):
    _require_m(m, 3)
    return BlockEncoding(m, cluster_state(m, +1), cluster_state(m, -1), f"cluster{m}")


def logical_ghz_state(enc, N):
    """(|0_L>^N + |1_L>^N)/sqrt(2) on N*m qubits."""
    if N < 1:
        raise ValueError("N must be positive")
    qcore.check_capacity(N * enc.m)
    a = qcore.kron_all([enc.zero] * N)
    b = qcore.kron_all([enc.one] * N)
    v = a + b
    return v / np.linalg.norm(v)


def concatenated_ghz_encoding(m, levels):
    """Substitute each physical qubit of the level-1 codewords by a GHZ codeword."""
    _require_m(m)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    qcore.check_capacity(m**levels)
    inner = ghz_encoding(m)
    zero, one = inner.zero, inner.one
    for _ in range(levels - 1):
        zero, one = _substitute(zero, m, inner), _substitute(one, m, inner)
    return BlockEncoding(m**levels, zero, one, f"concat_ghz{m}^{levels}")


def _substitute(vec, n, enc):
    """Replace |b_1 ... b_n> by |c_{b_1}> ... |c_{b_n}> in the expansion of ``vec``."""
    out = np.zeros(enc.zero.size**n, dtype=complex)
    words = (enc.zero, enc.one)
    for idx in np.flatnonzero(np.abs(vec) > 0):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        out += vec[idx] * qcore.kron_all([words[b] for b in bits])
    return out


@dataclass(frozen=True)
class SubspaceFamily:
    projectors: list
    corrections: list = field(default_factory=list)
    labels: list = field(default_factory=list)


def cluster_code_subspaces():
    """Sixteen rank-2 projectors: the 5-qubit ring code space and its single-qubit error images.

    Index 3*(k-1)+i holds sigma_i on qubit k (k = 1..5, i = x, y, z = 1, 2, 3).
    ``corrections[j]`` is the Pauli mapping the code space onto subspace j.
    """
    enc = cluster_encoding(5)
    P0 = qcore.projector(enc.zero) + qcore.projector(enc.one)
    projectors, corrections, labels = [P0], [np.eye(32, dtype=complex)], ["code"]
    for k in range(1, 6):
        for i in (1, 2, 3):
            E = qcore.pauli_on(5, k - 1, i)
            projectors.append(E @ P0 @ E)
            corrections.append(E)
            labels.append(f"{'xyz'[i - 1]}{k}")
    return SubspaceFamily(projectors, corrections, labels)


def ec_corrected_offdiagonal(p, family=None):
    """Trace norm of the weighted, renormalized projections of the noisy cluster off-diagonal."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    family = family or cluster_code_subspaces()
    enc = cluster_encoding(5)
    ch = qcore.depolarizing(p)
    off = qcore.apply_channel_all(enc.offdiagonal(), ch)
    diag = qcore.apply_channel_all(qcore.projector(enc.zero), ch)
    w = [np.trace(P @ diag).real for P in family.projectors]
    norm = sum(wi * np.trace(P @ diag).real for wi, P in zip(w, family.projectors))
    acc = sum(wi * (P @ off @ P) for wi, P in zip(w, family.projectors))
    return qcore.trace_norm(acc / norm)


def random_orthonormal_pair(m, seed):
    sa, sb = np.random.SeedSequence(seed).spawn(2)
    a, b = qcore.haar_random_state(m, sa), qcore.haar_random_state(m, sb)
    b = b - np.vdot(a, b) * a
    return a, b / np.linalg.norm(b)


def random_encoding_search(m, count, p_grid, seed):
    """Off-diagonal trace norms of ``count`` Haar-random codeword pairs.

    Sample ``i`` uses seed ``seed + i``. Returns rows (sample_index, p, J0).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    qcore.check_capacity(m)
    rows = []
    for i in range(count):
        a, b = random_orthonormal_pair(m, seed + i)
        off = np.outer(a, b.conj())
        for p in p_grid:
            rows.append((i, float(p), qcore.trace_norm(qcore.apply_channel_all(off, qcore.depolarizing(p)))))
    return rows

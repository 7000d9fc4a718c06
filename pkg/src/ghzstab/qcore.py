"""Dense linear algebra kernel and single-qubit noise channels.

Qubit ordering is big-endian: qubit 0 is the most significant tensor factor,
so a basis index ``b`` has qubit ``k`` in bit ``n - 1 - k``.

Channels are stored in the Pauli coefficient form

    E(rho) = sum_{k,l} lam[k, l] * sigma_k rho sigma_l

with labels 0 = identity, 1 = x, 2 = y, 3 = z.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

DENSE_QUBIT_CAP = 14


class CapacityError(RuntimeError):
    """Raised when a dense computation would exceed the configured qubit cap."""


def set_dense_cap(n):
    """Change the dense qubit cap and return the previous value."""
    global DENSE_QUBIT_CAP
    old, DENSE_QUBIT_CAP = DENSE_QUBIT_CAP, int(n)
    return old


def check_capacity(n):
    if n > DENSE_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds the dense cap of {DENSE_QUBIT_CAP}")


I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)


def num_qubits(op):
    """Number of qubits of a square operator or state vector."""
    dim = op.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or (op.ndim == 2 and op.shape[1] != dim):
        raise ValueError(f"shape {op.shape} is not a qubit operator")
    return n


@dataclass(frozen=True)
class NoiseChannel:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (4, 4):
            raise ValueError("channel coefficients must be a 4x4 matrix")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_kraus(cls, kraus):
        """Convert Kraus operators to Pauli coefficients."""
        lam = np.zeros((4, 4), dtype=complex)
        for K in kraus:
            a = np.array([np.trace(P @ K) / 2 for P in PAULIS])
            lam += np.outer(a, a.conj())
        return cls(lam)

    def superop(self):
        """Tensor S[a, b, i, j] with out[a, b] = sum_ij S[a, b, i, j] rho[i, j]."""
        P = np.stack(PAULIS)
        return np.einsum("kl,kai,ljb->abij", self.coeffs, P, P)

    def apply_single(self, rho):
        return np.einsum("abij,ij->ab", self.superop(), rho)

    def choi(self):
        """Channel applied to the second half of |Phi+><Phi+|."""
        phi = np.zeros(4, dtype=complex)
        phi[0] = phi[3] = 1 / np.sqrt(2)
        return apply_channel(np.outer(phi, phi.conj()), self, 1)

    def compose(self, other):
        """Channel equal to applying ``self`` first and then ``other``."""
        S = np.einsum("abij,ijcd->abcd", other.superop(), self.superop())
        return channel_from_superop(S)


def channel_from_superop(S):
    """Inverse of :meth:`NoiseChannel.superop` (Paulis span the 2x2 matrices)."""
    P = np.stack(PAULIS)
    # S[a,b,i,j] = sum_kl lam_kl P_k[a,i] P_l[j,b]; project with Tr-orthogonality.
    lam = np.einsum("abij,kia,lbj->kl", S, P.conj(), P.conj()) / 4
    return NoiseChannel(lam)


def identity_channel():
    lam = np.zeros((4, 4), dtype=complex)
    lam[0, 0] = 1
    return NoiseChannel(lam)


def depolarizing(p):
    """White noise: p * rho + (1 - p) / 4 * sum_k sigma_k rho sigma_k."""
    lam = np.diag([p + (1 - p) / 4] + [(1 - p) / 4] * 3).astype(complex)
    return NoiseChannel(lam)


def dephasing(p):
    """Off-diagonal entries in the z basis shrink by p."""
    return NoiseChannel(np.diag([(1 + p) / 2, 0, 0, (1 - p) / 2]).astype(complex))


def pauli_channel(p, weights=(1 / 3, 1 / 3, 1 / 3)):
    """rho -> p rho + (1 - p) sum_k w_k sigma_k rho sigma_k, weights summing to 1."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (3,) or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise ValueError("pauli weights must be three nonnegative numbers summing to 1")
    return NoiseChannel(np.diag([p, *((1 - p) * w)]).astype(complex))


def amplitude_damping(p):
    """Amplitude damping with survival amplitude p: |1> decays to |0> with prob 1 - p^2."""
    K0 = np.array([[1, 0], [0, p]], dtype=complex)
    K1 = np.array([[0, np.sqrt(max(0.0, 1 - p * p))], [0, 0]], dtype=complex)
    return NoiseChannel.from_kraus([K0, K1])


_FAMILIES = {
    "depolarizing": depolarizing,
    "dephasing": dephasing,
    "pauli": pauli_channel,
    "amplitude-damping": amplitude_damping,
}


@dataclass(frozen=True)
class ChannelFamily:
    """Time-parametrized channel with p(t) = exp(-rate * t)."""

    kind: str
    rate: float = 1.0

    def __post_init__(self):
        if self.kind not in _FAMILIES:
            raise ValueError(f"unknown channel family {self.kind!r}")

    def survival(self, t):
        return float(np.exp(-self.rate * t))

    def __call__(self, t):
        return _FAMILIES[self.kind](self.survival(t))


def _site_view(op, site):
    n = num_qubits(op)
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} qubits")
    L, R = 1 << site, 1 << (n - site - 1)
    return op.reshape(L, 2, R, L, 2, R)


def _apply_superop(rho, S, site):
    view = _site_view(rho, site)
    L, _, R = view.shape[:3]
    moved = view.transpose(1, 4, 0, 2, 3, 5).reshape(4, -1)
    out = (S.reshape(4, 4) @ moved).reshape(2, 2, L, R, L, R)
    return out.transpose(2, 0, 3, 4, 1, 5).reshape(rho.shape)


def apply_channel(rho, ch, site):
    """Apply ``ch`` to qubit ``site`` of an arbitrary operator ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    return _apply_superop(rho, ch.superop(), site)


def apply_channel_all(rho, ch):
    """Apply ``ch`` independently to every qubit."""
    rho = np.asarray(rho, dtype=complex)
    S = ch.superop()
    for site in range(num_qubits(rho)):
        rho = _apply_superop(rho, S, site)
    return rho


def apply_local(op, U, site):
    """Conjugate-free left multiplication by a single-qubit matrix on ``site``.

    Works on state vectors (1-d) and on operators (acts on the row index).
    """
    n = num_qubits(op)
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} qubits")
    L, R = 1 << site, 1 << (n - site - 1)
    shape = op.shape
    view = op.reshape(L, 2, R, -1)
    return np.einsum("ai,xiyk->xayk", U, view).reshape(shape)


def pauli_on(n, site, k):
    """Dense n-qubit operator with Pauli ``k`` on ``site``."""
    out = np.ones((1, 1), dtype=complex)
    for q in range(n):
        out = np.kron(out, PAULIS[k] if q == site else I2)
    return out


def is_hermitian(A, tol=1e-12):
    return A.shape[0] == A.shape[1] and np.allclose(A, A.conj().T, atol=tol, rtol=0)


def _components(A):
    """Index sets of the diagonal blocks of A under a symmetric permutation."""
    pattern = sparse.csr_matrix((A != 0) | (A.T != 0))
    count, labels = connected_components(pattern, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(count + 1))
    return [order[bounds[c] : bounds[c + 1]] for c in range(count)]


def _dense_trace_norm(A):
    if is_hermitian(A):
        return float(np.abs(np.linalg.eigvalsh((A + A.conj().T) / 2)).sum())
    return float(np.linalg.svd(A, compute_uv=False).sum())


def trace_norm(A):
    """Sum of singular values.

    Large operators are split into the independent blocks of their sparsity
    pattern first; singular values of a block-diagonal matrix are the union of
    the blocks' singular values.
    """
    A = np.asarray(A, dtype=complex)
    if A.shape[0] < 128 or A.shape[0] != A.shape[1]:
        return _dense_trace_norm(A)
    return math.fsum(_dense_trace_norm(A[np.ix_(idx, idx)]) for idx in _components(A))


def hs_norm(A):
    return float(np.linalg.norm(A))


def partial_transpose(rho, party):
    """Transpose the tensor factors listed in ``party``."""
    rho = np.asarray(rho)
    n = num_qubits(rho)
    party = sorted(set(party))
    if not party or len(party) >= n:
        raise ValueError("party must be a nonempty proper subset of the qubits")
    if party[0] < 0 or party[-1] >= n:
        raise IndexError("party index out of range")
    axes = list(range(2 * n))
    for q in party:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    return rho.reshape((2,) * (2 * n)).transpose(axes).reshape(rho.shape)


def negativity_dense(rho, party):
    return (trace_norm(partial_transpose(rho, party)) - 1) / 2


def double_commutator_norm(rho, A):
    if rho.shape != A.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {A.shape}")
    inner = A @ rho - rho @ A
    return trace_norm(A @ inner - inner @ A)


def haar_random_state(n, seed):
    """Normalized complex Gaussian vector on n qubits."""
    if n <= 0:
        raise ValueError("qubit count must be positive")
    check_capacity(n)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def partial_trace(rho, keep):
    """Reduced operator on the qubits in ``keep`` (returned in ascending order)."""
    n = num_qubits(rho)
    keep = sorted(set(keep))
    drop = [q for q in range(n) if q not in keep]
    t = np.asarray(rho).reshape((2,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = [letters[q] for q in range(n)]
    cols = [letters[n + q] if q in keep else letters[q] for q in range(n)]
    out = "".join(letters[q] for q in keep) + "".join(letters[n + q] for q in keep)
    r = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 1 << len(keep)
    return r.reshape(d, d)


def von_neumann_entropy(rho):
    """Entropy in bits."""
    ev = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    ev = ev[ev > 1e-15]
    return float(-(ev * np.log2(ev)).sum())


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def kron_all(ops):
    out = np.ones((1,) * np.ndim(ops[0]), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def is_density_matrix(rho, tol=1e-10):
    return (
        is_hermitian(rho, 1e-12)
        and abs(np.trace(rho) - 1) < 1e-12
        and np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() >= -tol
    )

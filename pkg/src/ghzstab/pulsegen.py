"""Global Molmer-Sorensen pulse sequences that prepare products of block GHZ states.

``MS(xi)`` is exp(i xi/2 sum_{k<l} X_k X_l) on every qubit; with this
normalization MS(pi/2) turns |0...0> into a GHZ state. ``Z(G)`` is
exp(i pi/2 sum_{k in G} Z_k). Conjugating an MS pulse by Z(G) flips the sign
of every pair with exactly one site in G, so a sequence is summarized by its
phase matrix: Xi[k, l] = sum over pulses of xi * (-1)^(f_k + f_l), with f the
Z parity accumulated before the pulse. Phases are kept as exact fractions of
pi.
"""

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import nnls

from . import qcore


@dataclass(frozen=True)
class MS:
    xi: Fraction  # in units of pi


@dataclass(frozen=True)
class Z:
    sites: frozenset


@dataclass(frozen=True)
class PulseSequence:
    ops: tuple
    n_sites: int

    def __post_init__(self):
        for op in self.ops:
            if isinstance(op, MS):
                if op.xi <= 0:
                    raise ValueError("MS pulse strengths must be positive multiples of pi")
            elif isinstance(op, Z):
                if any(not 0 <= s < self.n_sites for s in op.sites):
                    raise ValueError("Z rotation touches a site outside the register")
            else:
                raise TypeError(f"unknown pulse {op!r}")

    @property
    def ms_count(self):
        return sum(isinstance(op, MS) for op in self.ops)

    @property
    def z_count(self):
        return sum(isinstance(op, Z) for op in self.ops)

    @property
    def total_xi(self):
        return sum((op.xi for op in self.ops if isinstance(op, MS)), Fraction(0))

    def to_json(self):
        out = []
        for op in self.ops:
            if isinstance(op, MS):
                out.append({"type": "MS", "xi_over_pi": str(op.xi)})
            else:
                out.append({"type": "Z", "sites": sorted(op.sites)})
        return json.dumps({"n_sites": self.n_sites, "ops": out}, indent=2)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        ops = []
        for op in data["ops"]:
            if op["type"] == "MS":
                ops.append(MS(Fraction(op["xi_over_pi"])))
            elif op["type"] == "Z":
                ops.append(Z(frozenset(op["sites"])))
            else:
                raise ValueError(f"unknown op type {op['type']!r}")
        return cls(tuple(ops), int(data["n_sites"]))


@dataclass(frozen=True)
class PhaseMatrix:
    xi: tuple  # tuple of tuples of Fraction, units of pi
    flips: tuple

    def as_array(self):
        return np.array([[float(x) for x in row] for row in self.xi]) * math.pi


def frames(seq):
    """Set of Z-flipped sites in force at each MS pulse."""
    flip = set()
    out = []
    for op in seq.ops:
        if isinstance(op, Z):
            flip ^= set(op.sites)
        else:
            out.append(frozenset(flip))
    return out


def accumulate(seq):
    n = seq.n_sites
    xi = [[Fraction(0)] * n for _ in range(n)]
    flip = [0] * n
    for op in seq.ops:
        if isinstance(op, Z):
            for s in op.sites:
                flip[s] ^= 1
            continue
        for k in range(n):
            for l in range(k + 1, n):
                v = op.xi if flip[k] == flip[l] else -op.xi
                xi[k][l] += v
                xi[l][k] += v
    return PhaseMatrix(tuple(tuple(r) for r in xi), tuple(flip))


def _is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


def block_frames(N):
    """Block sets flipped before each of the N pulses, for N a power of two.

    Doubling: run the N/2 scheme on pairs of blocks, then run it again with
    the first block of every pair additionally flipped.
    """
    if N == 1:
        return [frozenset()]
    half = block_frames(N // 2)
    lift = [frozenset(b for g in f for b in (2 * g, 2 * g + 1)) for f in half]
    H = frozenset(range(0, N, 2))
    return lift + [f ^ H for f in lift]


def _canonical(f, N):
    """Representative of {f, complement} that contains block 0."""
    return f if 0 in f or not f else frozenset(range(N)) - f


def compile(N, m):
    """N global MS(pi/(2N)) pulses with N-1 Z rotations giving Xi = pi/2 inside blocks, 0 across.

    N that is not a power of two is compiled for the next power of two; the
    surplus blocks are simply absent from the register, which leaves every
    phase among the real blocks unchanged.
    """
    if int(N) != N or N < 2:
        raise ValueError("N must be an integer >= 2")
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    P = 1 << (N - 1).bit_length()
    fr = [_canonical(f, P) for f in block_frames(P)]
    xi = Fraction(1, 2 * P)
    ops, prev = [], frozenset()
    for f in fr:
        change = f ^ prev
        sites = frozenset(b * m + j for b in change if b < N for j in range(m))
        if sites:
            ops.append(Z(sites))
        ops.append(MS(xi))
        prev = f
    return PulseSequence(tuple(ops), N * m)


def full_cghz_sequence(N, m):
    """Global MS(pi/2) then compile(N, m): prepares the C-GHZ state up to block-local unitaries."""
    if (N * m) % 2:
        raise ValueError(
            "N*m must be even: for odd N*m the first pulse yields a GHZ state in the "
            "sigma_y eigenbasis, which needs an additional frame change"
        )
    body = compile(N, m)
    return PulseSequence((MS(Fraction(1, 2)),) + body.ops, N * m)


def target_phase_matrix(N, m):
    n = N * m
    xi = [[Fraction(1, 2) if k != l and k // m == l // m else Fraction(0) for l in range(n)] for k in range(n)]
    return tuple(tuple(r) for r in xi)


def meets_target(seq, N, m):
    return accumulate(seq).xi == target_phase_matrix(N, m)


# Dense simulation ------------------------------------------------------------


def _bits(n):
    idx = np.arange(1 << n)
    return (idx[:, None] >> (n - 1 - np.arange(n))) & 1


def _wht(v, n):
    """Apply H^{(x)n} to the leading axis of v."""
    shape = v.shape
    t = v.reshape((2,) * n + shape[1:])
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    for q in range(n):
        t = np.moveaxis(np.tensordot(H, t, axes=([1], [q])), 0, q)
    return t.reshape(shape)


def _ms_phase(n, xi):
    """Diagonal of MS(xi) in the x basis (xi in radians)."""
    x = 1 - 2 * _bits(n)
    S = x.sum(axis=1)
    return np.exp(0.5j * xi * (S * S - n) / 2)


def _z_phase(n, sites):
    b = _bits(n)
    sel = np.zeros(n, dtype=bool)
    sel[list(sites)] = True
    return (1j) ** len(sites) * (-1.0) ** b[:, sel].sum(axis=1)


def _apply(op, v, n):
    if isinstance(op, MS):
        return _wht(_ms_phase(n, float(op.xi) * math.pi).reshape((-1,) + (1,) * (v.ndim - 1)) * _wht(v, n), n)
    return _z_phase(n, op.sites).reshape((-1,) + (1,) * (v.ndim - 1)) * v


def simulate(seq, state=None):
    n = seq.n_sites
    qcore.check_capacity(n)
    if state is None:
        state = np.zeros(1 << n, dtype=complex)
        state[0] = 1
    v = np.asarray(state, dtype=complex)
    for op in seq.ops:
        v = _apply(op, v, n)
    return v


def dense_unitary(seq):
    n = seq.n_sites
    qcore.check_capacity(n)
    return simulate(seq, np.eye(1 << n, dtype=complex))


def phase_unitary(seq):
    """exp(i/2 sum_{k<l} Xi_kl X_k X_l) followed by the product of all Z rotations."""
    n = seq.n_sites
    qcore.check_capacity(n)
    Xi = accumulate(seq).as_array()
    x = 1 - 2 * _bits(n)
    quad = 0.5 * np.einsum("ik,kl,il->i", x, np.triu(Xi, 1), x)
    U = _wht(np.diag(np.exp(1j * quad)).astype(complex), n)
    U = _wht(U.T, n).T
    zsum = np.ones(1 << n, dtype=complex)
    for op in seq.ops:
        if isinstance(op, Z):
            zsum *= _z_phase(n, op.sites)
    return zsum[:, None] * U


@dataclass(frozen=True)
class Certificate:
    single_mixed: bool
    block_rank_two: bool
    blocks_independent: bool
    worst: dict

    @property
    def passed(self):
        return self.single_mixed and self.block_rank_two and self.blocks_independent


def _starts_with_superposition(seq):
    return bool(seq.ops) and seq.ops[0] == MS(Fraction(1, 2))


def verify_dense(seq, m, tol=1e-10):
    """Certify that a sequence prepares m-qubit GHZ blocks, densely.

    ``seq`` is either a block-preparing body such as compile(N, m) or a full
    sequence starting with the global MS(pi/2) pulse. Writing body for the
    former and full for MS(pi/2) followed by body:
    (i) every qubit of full|0> is maximally mixed,
    (ii) every block of full|0> has spectrum {1/2, 1/2, 0, ...},
    (iii) every pair of blocks of body|0> has zero mutual information.
    """
    n = seq.n_sites
    if n % m:
        raise ValueError("register size is not a multiple of m")
    qcore.check_capacity(n)
    if _starts_with_superposition(seq):
        body, full = PulseSequence(seq.ops[1:], n), seq
    else:
        body, full = seq, PulseSequence((MS(Fraction(1, 2)),) + seq.ops, n)
    N = n // m
    blocks = [list(range(b * m, (b + 1) * m)) for b in range(N)]

    rho = qcore.projector(simulate(full))
    single = max(float(np.abs(qcore.partial_trace(rho, [q]) - np.eye(2) / 2).max()) for q in range(n))
    want = np.zeros(1 << m)
    want[-2:] = 0.5
    block = 0.0
    for keep in blocks:
        ev = np.sort(np.linalg.eigvalsh(qcore.partial_trace(rho, keep)))
        block = max(block, float(np.abs(ev - want).max()))

    rho = qcore.projector(simulate(body))
    ent = [qcore.von_neumann_entropy(qcore.partial_trace(rho, keep)) for keep in blocks]
    mutual = 0.0
    for a, b in itertools.combinations(range(N), 2):
        joint = qcore.von_neumann_entropy(qcore.partial_trace(rho, blocks[a] + blocks[b]))
        mutual = max(mutual, abs(ent[a] + ent[b] - joint))
    worst = {"single": single, "block": block, "mutual": mutual}
    return Certificate(single < tol, block < tol, mutual < tol, worst)


def block_spectra(psi, N, m):
    """Sorted reduced spectra for every nonempty proper set of blocks containing block 0.

    These are invariant under block-local unitaries.
    """
    rho = qcore.projector(psi)
    out = {}
    for r in range(1, N):
        for blocks in itertools.combinations(range(N), r):
            if 0 not in blocks:
                continue
            keep = [b * m + j for b in blocks for j in range(m)]
            ev = np.linalg.eigvalsh(qcore.partial_trace(rho, keep))
            out[blocks] = np.sort(ev)
    return out


# Minimal pulse count ------------------------------------------------------------


def _feasible(S, pairs, target):
    """Is there xi >= 0 with sum_t xi_t S[t,k] S[t,l] = target over the listed pairs?"""
    k, l = np.array(pairs).T
    A = (S[:, k] * S[:, l]).T
    _, resid = nnls(A, target)
    return resid < 1e-9


def minimal_pulse_search(N, m, max_pulses=8, full=None):
    """Fewest global MS pulses (with free strengths and Z frames in between) reaching the block-GHZ phase matrix.

    Frames range over subsets of sites when ``full`` (default: N*m <= 6) and
    over unions of whole blocks otherwise. The first frame is empty without
    loss of generality (a common Z conjugation only changes local phases).
    Targets are exact: pi/2 for pairs inside a block, 0 across blocks.
    Raises LookupError if no sequence with at most ``max_pulses`` exists.
    """
    if N < 1 or m < 1:
        raise ValueError("N and m must be positive")
    if m == 1:
        return 0  # the target is the all-zero phase matrix
    n = N * m
    if full is None:
        full = n <= 6
    units = n if full else N
    owner = list(range(n)) if full else [k // m for k in range(n)]
    pairs = [(k, l) for k in range(n) for l in range(k + 1, n)]
    target = np.array([0.5 if k // m == l // m else 0.0 for k, l in pairs])
    # frames over units, modulo complement: fix unit 0 unflipped
    cand = [frozenset(c) for r in range(units) for c in itertools.combinations(range(1, units), r)]
    signs = {f: np.array([-1.0 if owner[k] in f else 1.0 for k in range(n)]) for f in cand}
    empty = frozenset()
    for K in range(1, max_pulses + 1):
        others = [f for f in cand if f != empty]
        for combo in itertools.combinations(others, K - 1):
            S = np.array([signs[empty]] + [signs[f] for f in combo])
            if _feasible(S, pairs, target):
                return K
    raise LookupError(f"no sequence with at most {max_pulses} pulses")

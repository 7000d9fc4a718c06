"""Exact matrix-product states and operators on decorated rings.

A chain is a ring of *hub* tensors. Every hub may carry a closed loop of
further sites that leaves the hub on its loop-out bond and returns on its
loop-in bond. Plain rings have no loops (loop bonds of dimension 1); encoded
states put the first qubit of each logical block on the hub and the rest of
the block on its loop. Qubit order is hub 0, loop 0, hub 1, loop 1, ...

Tensor layouts (physical legs last):

    state hub       (left, right, loop_out, loop_in, s)
    state loop site (left, right, s)
    operator hub    (left, right, loop_out, loop_in, out, in)
    operator site   (left, right, out, in)

Nothing is ever truncated; every contraction is exact.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import qcore

_SQ2 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class TensorChain:
    hubs: tuple
    loops: tuple
    kind: str = "state"

    def __post_init__(self):
        if self.kind not in ("state", "operator"):
            raise ValueError(f"unknown chain kind {self.kind!r}")
        hubs = tuple(np.asarray(h, dtype=complex) for h in self.hubs)
        loops = tuple(tuple(np.asarray(a, dtype=complex) for a in lp) for lp in self.loops)
        if not hubs or len(loops) != len(hubs):
            raise ValueError("need one (possibly empty) loop per hub")
        nphys = 1 if self.kind == "state" else 2
        for k, h in enumerate(hubs):
            if h.ndim != 4 + nphys:
                raise ValueError(f"hub {k} has rank {h.ndim}, expected {4 + nphys}")
            if h.shape[1] != hubs[(k + 1) % len(hubs)].shape[0]:
                raise ValueError(f"bond mismatch between hubs {k} and {k + 1}")
            dim = h.shape[2]
            for j, a in enumerate(loops[k]):
                if a.ndim != 2 + nphys or a.shape[0] != dim:
                    raise ValueError(f"loop site {j} of hub {k} does not fit its left bond")
                dim = a.shape[1]
            if dim != h.shape[3]:
                raise ValueError(f"loop of hub {k} does not close on the hub")
        object.__setattr__(self, "hubs", hubs)
        object.__setattr__(self, "loops", loops)

    @property
    def n_sites(self):
        return len(self.hubs) + sum(len(lp) for lp in self.loops)

    @property
    def sites(self):
        out = []
        for h, lp in zip(self.hubs, self.loops):
            out.append(h)
            out.extend(lp)
        return out

    @property
    def topology(self):
        return "ring" if self.hubs[0].shape[0] > 1 else "open"

    @property
    def inner_bonds(self):
        """Dimension of the link leaving each hub towards the next hub (last one closes the ring)."""
        return [h.shape[1] for h in self.hubs]

    @property
    def loop_bonds(self):
        """Per hub: hub -> first loop site, ..., last loop site -> hub."""
        return [[h.shape[2]] + [a.shape[1] for a in lp] if lp else [h.shape[2]]
                for h, lp in zip(self.hubs, self.loops)]

    @property
    def bond_dims(self):
        return self.inner_bonds + [d for lb in self.loop_bonds for d in lb]

    @property
    def max_bond(self):
        return max(self.bond_dims)


# State builders -------------------------------------------------------------


def _plain(tensors):
    """Wrap (left, right, s) ring tensors as loop-free hubs."""
    hubs = [t[:, :, None, None, :] for t in tensors]
    return TensorChain(tuple(hubs), tuple(() for _ in hubs))


def _check_sign(sign):
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")


def mps_basis(N, bit):
    """|bit>^N with trivial bonds."""
    if N < 1 or bit not in (0, 1):
        raise ValueError("need N >= 1 and bit in {0, 1}")
    t = np.zeros((1, 1, 2))
    t[0, 0, bit] = 1
    return _plain([t] * N)


def mps_ghz(N, sign=1):
    """(|0...0> + sign |1...1>)/sqrt(2) as a bond-2 ring; the bond carries the shared bit."""
    if N < 1:
        raise ValueError("N must be positive")
    _check_sign(sign)
    copy = np.zeros((2, 2, 2))
    copy[0, 0, 0] = copy[1, 1, 1] = 1
    first = copy.copy()
    first[1, 1, 1] = sign
    return _plain([first * _SQ2] + [copy] * (N - 1))


def mps_cluster(N, sign=1):
    """Ring cluster state from |+>^N (sign=+1) or |->^N (sign=-1); the bond carries the previous bit."""
    if N < 3:
        raise ValueError("a ring cluster state needs N >= 3")
    _check_sign(sign)
    t = np.zeros((2, 2, 2))
    for a in (0, 1):
        for s in (0, 1):
            t[a, s, s] = (-1) ** (a * s) * sign**s * _SQ2
    return _plain([t] * N)


def _ghz_block(m):
    """Hub part H[x] (loop_out, loop_in, s) and loop sites for the codeword (|0^m> + (-1)^x |1^m>)/sqrt(2)."""
    hub = np.zeros((2, 2, 2, 2))
    for x in (0, 1):
        for s in (0, 1):
            hub[x, s, s, s] = (-1) ** (x * s) * _SQ2
    copy = np.zeros((2, 2, 2))
    copy[0, 0, 0] = copy[1, 1, 1] = 1
    return hub, [copy] * (m - 1)


def _cluster_block(m):
    """Codeword Z^{x m}|Cl_m^+>; loop bonds carry (x, previous bit) as 2*x + bit."""
    hub = np.zeros((2, 4, 4, 2))
    site = np.zeros((4, 4, 2))
    for x in (0, 1):
        for s in (0, 1):
            for prev in (0, 1):
                # hub: receives (x, last bit of the loop), emits (x, own bit)
                hub[x, 2 * x + s, 2 * x + prev, s] = (-1) ** (x * s + s * prev) * _SQ2
                site[2 * x + prev, 2 * x + s, s] = (-1) ** (x * s + s * prev) * _SQ2
    return hub, [site] * (m - 1)


_BLOCKS = {"ghz": (_ghz_block, 1), "cluster": (_cluster_block, 3)}


def decorate(inner, family, m):
    """Replace every qubit x of a loop-free ring state by an m-qubit codeword of ``family``.

    The codeword's first qubit sits on the hub, the other m - 1 on its loop;
    the logical bit x is summed over inside the hub.
    """
    if family not in _BLOCKS:
        raise ValueError(f"unknown codeword family {family!r}")
    build, least = _BLOCKS[family]
    if m < max(least, 2):
        raise ValueError(f"{family} codewords need m >= {max(least, 2)}")
    if inner.kind != "state" or any(inner.loops):
        raise ValueError("decorate expects a loop-free state chain")
    hub_part, loop = build(m)
    hubs = []
    for h in inner.hubs:
        A = h[:, :, 0, 0, :]  # (left, right, x)
        hubs.append(np.einsum("lrx,xoiS->lroiS", A, hub_part))
    return TensorChain(tuple(hubs), tuple(tuple(loop) for _ in hubs))


def mps_cghz(N, m):
    """C-GHZ state on N blocks of m qubits; every bond has dimension 2. m=1 gives the standard GHZ ring."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return mps_ghz(N)
    return decorate(mps_ghz(N), "ghz", m)


def mps_codeword_product(N, m, bit, family="ghz"):
    """|bit_L>^N for m-qubit codewords of ``family``: one branch of the C-GHZ state."""
    return decorate(mps_basis(N, bit), family, m)


def mps_flat_codeword(m, bit, family="ghz"):
    """A single m-qubit codeword as a loop-free ring."""
    sign = 1 - 2 * bit
    if family == "ghz":
        return mps_ghz(m, sign)
    if family == "cluster":
        return mps_cluster(m, sign)
    raise ValueError(f"unknown codeword family {family!r}")


def mps_concat_cluster(sign=1, inner=5, outer=5):
    """Two-level cluster codeword: an inner ring cluster whose qubits are re-encoded as outer ring clusters.

    Default geometry is 5 x 5 = 25 qubits. Inner links have dimension 2,
    loop links dimension 4.
    """
    return decorate(mps_cluster(inner, sign), "cluster", outer)


def mps_concat_ghz(sign=1, inner=5, outer=5):
    return decorate(mps_ghz(inner, sign), "ghz", outer)


# Operators ------------------------------------------------------------------


def _kron_bonds(a, b, axes):
    """Merge each listed bond axis of a (first) with the same axis of b (second)."""
    nb = len(axes)
    t = np.multiply.outer(a, b)
    na = a.ndim
    order, shape = [], []
    for ax in axes:
        order += [ax, na + ax]
        shape.append(a.shape[ax] * b.shape[ax])
    rest_a = [i for i in range(na) if i not in axes]
    rest_b = [na + i for i in range(b.ndim) if i not in axes]
    t = t.transpose(order + rest_a + rest_b)
    return t.reshape(shape + list(t.shape[2 * nb:]))


def outer_product(ket, bra):
    """|ket><bra| as an operator chain; every bond dimension is the product of the two."""
    if ket.kind != "state" or bra.kind != "state":
        raise ValueError("outer_product needs two state chains")
    _same_geometry(ket, bra)
    hubs = [_kron_bonds(a, b.conj(), [0, 1, 2, 3]) for a, b in zip(ket.hubs, bra.hubs)]
    loops = [tuple(_kron_bonds(a, b.conj(), [0, 1]) for a, b in zip(la, lb))
             for la, lb in zip(ket.loops, bra.loops)]
    return TensorChain(tuple(hubs), tuple(loops), "operator")


def _same_geometry(a, b):
    if len(a.hubs) != len(b.hubs) or [len(x) for x in a.loops] != [len(x) for x in b.loops]:
        raise ValueError("chains have different geometry")


def _require_op(op):
    if op.kind != "operator":
        raise ValueError("expected an operator chain")


def _map_sites(op, f):
    hubs = tuple(f(h) for h in op.hubs)
    loops = tuple(tuple(f(a) for a in lp) for lp in op.loops)
    return TensorChain(hubs, loops, "operator")


def adjoint(op):
    _require_op(op)
    return _map_sites(op, lambda t: np.swapaxes(t, -1, -2).conj())


def apply_superop(op, channel):
    """Apply the single-qubit channel to every site; bond dimensions do not change."""
    _require_op(op)
    S = channel.superop()
    return _map_sites(op, lambda t: np.einsum("abij,...ij->...ab", S, t))


def multiply(a, b):
    """Operator product a @ b; bond dimensions multiply."""
    _require_op(a)
    _require_op(b)
    _same_geometry(a, b)

    def prod(x, y, nb):
        t = np.tensordot(x, y, axes=([nb + 1], [nb]))  # (bx..., a, by..., b)
        order = [k for i in range(nb) for k in (i, nb + 1 + i)]
        t = t.transpose(order + [nb, 2 * nb + 1])
        return t.reshape([x.shape[i] * y.shape[i] for i in range(nb)] + [2, 2])

    hubs = tuple(prod(x, y, 4) for x, y in zip(a.hubs, b.hubs))
    loops = tuple(tuple(prod(x, y, 2) for x, y in zip(la, lb))
                  for la, lb in zip(a.loops, b.loops))
    return TensorChain(hubs, loops, "operator")


def identity_chain(N):
    t = np.eye(2)[None, None, None, None]
    return TensorChain(tuple([t] * N), tuple(() for _ in range(N)), "operator")


def rotate(chain, k):
    """Cyclically relabel hubs so that hub k comes first."""
    n = len(chain.hubs)
    k %= n
    return TensorChain(chain.hubs[k:] + chain.hubs[:k], chain.loops[k:] + chain.loops[:k], chain.kind)


# Contraction ----------------------------------------------------------------


def _flat_phys(t, nbonds):
    return t.reshape(t.shape[:nbonds] + (-1,))


def _block_tensor(hub, loop):
    """Contract a hub with its loop: (left, right, combined physical index of the block)."""
    cur = _flat_phys(hub, 4).transpose(0, 1, 3, 2, 4)  # (l, r, li, lo, P)
    for a in loop:
        a = _flat_phys(a, 2)
        cur = np.einsum("xyiaP,abQ->xyibPQ", cur, a)
        cur = cur.reshape(cur.shape[:4] + (-1,))
    return np.einsum("xyiiP->xyP", cur)


def to_dense(chain):
    """Dense vector (state) or matrix (operator); limited by the dense qubit cap."""
    n = chain.n_sites
    qcore.check_capacity(n)
    acc = None
    for h, lp in zip(chain.hubs, chain.loops):
        B = _block_tensor(h, lp)
        if acc is None:
            acc = B
        else:
            acc = np.einsum("arP,rsQ->asPQ", acc, B)
            acc = acc.reshape(acc.shape[:2] + (-1,))
    flat = np.einsum("aaP->P", acc)
    if chain.kind == "state":
        return flat
    t = flat.reshape((2, 2) * n).transpose(list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))
    return t.reshape(1 << n, 1 << n)


class _LogScaled:
    """Running matrix product kept at unit norm with a separate log scale."""

    def __init__(self):
        self.M = None
        self.log = 0.0

    def push(self, F):
        self.M = F if self.M is None else self.M @ F
        s = np.abs(self.M).max()
        if s > 0:
            self.M = self.M / s
            self.log += math.log(s)

    def trace(self):
        tr = np.trace(self.M)
        return tr, self.log


def _pair_transfers(a, b):
    """Per-hub transfer matrices of sum over physical indices of a (x) conj(b)."""
    phys = "s" if a.kind == "state" else "st"
    for ha, hb, la, lb in zip(a.hubs, b.hubs, a.loops, b.loops):
        dlo = ha.shape[2] * hb.shape[2]
        L = np.eye(dlo, dtype=complex)
        for x, y in zip(la, lb):
            E = np.einsum(f"lr{phys},LR{phys}->lLrR", x, y.conj())
            L = L @ E.reshape(x.shape[0] * y.shape[0], -1)
        L = L.reshape(ha.shape[2], hb.shape[2], ha.shape[3], hb.shape[3])
        F = np.einsum(f"lroi{phys},LROI{phys},oOiI->lLrR", ha, hb.conj(), L, optimize=True)
        yield F.reshape(ha.shape[0] * hb.shape[0], ha.shape[1] * hb.shape[1]), L.shape


def _log_pair(a, b):
    """(phase-carrying mantissa, log scale) of the full contraction of a with conj(b)."""
    if a.kind != b.kind:
        raise ValueError("cannot pair a state with an operator")
    _same_geometry(a, b)
    acc = _LogScaled()
    for F, _ in _pair_transfers(a, b):
        acc.push(F)
    return acc.trace()


def inner(a, b):
    """<b|a> for states, Tr(b^dagger a) for operators."""
    tr, lg = _log_pair(a, b)
    return complex(tr * math.exp(lg))


def norm(chain):
    return math.sqrt(max(0.0, inner(chain, chain).real))


def trace(op):
    """Tr(op) by closing every site's physical pair."""
    _require_op(op)
    acc = _LogScaled()
    for h, lp in zip(op.hubs, op.loops):
        L = np.eye(h.shape[2], dtype=complex)
        for a in lp:
            L = L @ np.einsum("lrss->lr", a)
        acc.push(np.einsum("lroiss,oi->lr", h, L))
    tr, lg = acc.trace()
    return complex(tr * math.exp(lg))


def log_hs_norm(op):
    """log of sqrt(Tr(O O^dagger)); safe for norms far below the double range."""
    _require_op(op)
    tr, lg = _log_pair(op, op)
    if tr.real <= 0:
        return -math.inf
    return 0.5 * (math.log(tr.real) + lg)


def hs_norm_chain(op):
    """sqrt(Tr(O O^dagger)) via ring contraction of the O (x) conj(O) transfer matrices."""
    return math.exp(log_hs_norm(op))


def hs_transfer_dims(op):
    """Bond dimensions of the O O^dagger chain as met during hs_norm_chain (inner, loop)."""
    _require_op(op)
    inner_dims = [d * d for d in op.inner_bonds]
    loop_dims = [d * d for lb in op.loop_bonds for d in lb]
    return inner_dims, loop_dims


def relative_hs(offdiag, diag):
    return math.exp(log_hs_norm(offdiag) - log_hs_norm(diag))


def noisy_relative_hs(ket0, ket1, channel):
    """||E(|0><1|)||_2 / ||E(|0><0|)||_2 for local noise E on every site."""
    off = apply_superop(outer_product(ket0, ket1), channel)
    diag = apply_superop(outer_product(ket0, ket0), channel)
    return relative_hs(off, diag)

"""Partial-transpose spectrum of noisy C-GHZ states for the 1 : N-1 split.

After a block-local rotation taking |0_L> -> |0^m> and |1_L> -> |1^m>, the noisy
state only couples a configuration X of the N blocks to its bitwise complement.
Transposing the first block keeps this pairing, so the spectrum consists of
2x2 problems [[a, b], [b, a]] with eigenvalues a +- |b|.

Only pairs whose first block is a corner (all zeros or all ones) can go
negative. We fix the representative with the first block equal to 1^m and
describe the remaining N-1 blocks by the key k = (k_0, ..., k_m), where k_j
counts blocks with j ones.  Per block the diagonal weights are

    all zeros: c0+ + q        all ones: c0+ - q        else: c_j^+

(mirrored in the second diagonal term) and the coherence weights are

    alpha = c0- + q           beta = c0- - q          else: |c_j^-|

with q = p**m / 2.  The pair then has

    a_k = 1/2 prod_j (c_j^+)^{k_j} [g+^{k0} g-^{km+1} + g-^{k0} g+^{km+1}]
    b_k = 1/2 prod_j |c_j^-|^{k_j} [alpha^{k0+1} beta^{km} + beta^{k0+1} alpha^{km}]

where the products run over 0 < j < m and g+- = c0+ +- q.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import analytic


@dataclass(frozen=True)
class GroupKey:
    k: tuple

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if len(k) < 2 or min(k) < 0:
            raise ValueError(f"invalid key {self.k}")
        object.__setattr__(self, "k", k)

    @property
    def m(self):
        return len(self.k) - 1

    @property
    def n_blocks(self):
        return sum(self.k) + 1

    @property
    def group(self):
        return self.n_blocks - 1 - self.k[0]

    def validate(self, N, m):
        if self.m != m or self.n_blocks != N:
            raise ValueError(f"key {self.k} does not describe N={N}, m={m}")


@dataclass(frozen=True)
class EigenContribution:
    key: GroupKey
    a: float
    b: float
    log_degeneracy: float

    @property
    def lam_plus(self):
        return self.a + abs(self.b)

    @property
    def lam_minus(self):
        return self.a - abs(self.b)

    @property
    def group(self):
        return self.key.group


def all_keys(N, m):
    """Every key with sum N - 1, in lexicographic order of (k_0, ..., k_m) descending k_0."""
    for parts in _compositions(N - 1, m + 1):
        yield GroupKey(tuple(int(v) for v in parts))


def degeneracy(key):
    """Exact number of rest-block configurations sharing ``key``."""
    m = key.m
    d = math.factorial(sum(key.k))
    for j, kj in enumerate(key.k):
        d *= math.comb(m, j) ** kj
    for kj in key.k:
        d //= math.factorial(kj)
    return d


def log_degeneracy(key):
    m = key.m
    out = float(gammaln(sum(key.k) + 1))
    for j, kj in enumerate(key.k):
        out += kj * analytic.log_binom(m, j) - float(gammaln(kj + 1))
    return out


@dataclass(frozen=True)
class _BlockWeights:
    g_plus: float
    g_minus: float
    alpha: float
    beta: float
    c_plus: np.ndarray
    c_minus_abs: np.ndarray


def _weights(cs):
    q = cs.corner
    cp0, cm0 = cs.c_plus[0], cs.c_minus[0]
    # beta >= 0 always: c0- >= p^m/2 termwise from the binomial expansion.
    return _BlockWeights(
        cp0 + q, cp0 - q, cm0 + q, max(cm0 - q, 0.0), cs.c_plus, np.abs(cs.c_minus)
    )


def eigen_pair(key, cs):
    """(lambda+, lambda-) of the 2x2 problem labelled by ``key`` (first block 1^m)."""
    if key.m != cs.m:
        raise ValueError("key and coefficient set disagree on m")
    w = _weights(cs)
    k = key.k
    k0, km = k[0], k[-1]
    mid_p = math.prod(w.c_plus[j] ** k[j] for j in range(1, cs.m))
    mid_m = math.prod(w.c_minus_abs[j] ** k[j] for j in range(1, cs.m))
    a = 0.5 * mid_p * (w.g_plus**k0 * w.g_minus ** (km + 1) + w.g_minus**k0 * w.g_plus ** (km + 1))
    b = 0.5 * mid_m * (w.alpha ** (k0 + 1) * w.beta**km + w.beta ** (k0 + 1) * w.alpha**km)
    return a + b, a - b


def eigen_contribution(key, cs):
    lp, lm = eigen_pair(key, cs)
    return EigenContribution(key, (lp + lm) / 2, (lp - lm) / 2, log_degeneracy(key))


def full_spectrum(N, m, p):
    """Every eigenvalue of the partial transpose with multiplicity: list of (value, count).

    Includes the pairs whose first block is not a corner, which never go
    negative but are needed for trace checks.
    """
    cs = analytic.coeffs(m, p)
    w = _weights(cs)
    out = []
    for key in all_keys(N, m):
        d = degeneracy(key)
        lp, lm = eigen_pair(key, cs)
        out += [(lp, d), (lm, d)]
        k = key.k
        k0, km = k[0], k[-1]
        mid_p = math.prod(w.c_plus[j] ** k[j] for j in range(1, m))
        mid_m = math.prod(w.c_minus_abs[j] ** k[j] for j in range(1, m))
        corner_a = w.g_plus**k0 * w.g_minus**km + w.g_minus**k0 * w.g_plus**km
        corner_b = w.alpha**k0 * w.beta**km + w.beta**k0 * w.alpha**km
        for s in range(1, m):
            # Pairs {Y, complement}: each counted once, hence binom / 2.
            a = 0.5 * w.c_plus[s] * mid_p * corner_a
            b = 0.5 * w.c_minus_abs[s] * mid_m * corner_b
            mult = math.comb(m, s) * d / 2
            out += [(a + b, mult), (a - b, mult)]
    return out


def g0_matrix(N, m, p):
    """The 2x2 problem of the key with every rest block equal to 0^m."""
    cs = analytic.coeffs(m, p)
    w = _weights(cs)
    a = w.g_plus ** (N - 1) * w.g_minus + w.g_plus * w.g_minus ** (N - 1)
    b = w.alpha**N + w.beta**N
    return 0.5 * np.array([[a, b], [b, a]])


def g0_lifetime(N, m):
    """gamma*t at which the smallest G_0 eigenvalue reaches zero (a lifetime lower bound)."""
    return analytic.gamma_t_root(lambda p: -np.linalg.eigvalsh(g0_matrix(N, m, p))[0], level=0.0)


# Grouped enumeration --------------------------------------------------------


@functools.lru_cache(maxsize=4096)
def _compositions(total, parts):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``.

    Rows are ordered by descending first entry, then recursively.
    """
    if parts == 1:
        out = np.array([[total]], dtype=np.int64)
    else:
        pieces = []
        for first in range(total, -1, -1):
            tail = _compositions(total - first, parts - 1)
            pieces.append(np.hstack([np.full((len(tail), 1), first, dtype=np.int64), tail]))
        out = np.vstack(pieces)
    out.setflags(write=False)
    return out


def _klog(k, logv):
    """k * log v with 0 * log 0 = 0."""
    with np.errstate(invalid="ignore"):
        return np.where(k == 0, 0.0, k * logv)


# Stands in for log(0) so that 0 * log(0) evaluates to 0 in matrix products.
_LOG_ZERO = -1e250


def _safe_log(x):
    return math.log(x) if x > 0 else _LOG_ZERO


class _GroupEvaluator:
    """Evaluates group contributions with symmetric non-corner classes merged.

    Blocks with j and m - j ones share |c^-| and c^+, so their counts merge
    with multiplicity binom(m, j) + binom(m, m - j).
    """

    def __init__(self, N, m, p):
        self.N, self.m = N, m
        cs = analytic.coeffs(m, p)
        w = _weights(cs)
        self.lg = (_safe_log(w.g_plus), _safe_log(w.g_minus))
        self.lab = (_safe_log(w.alpha), _safe_log(w.beta))
        classes = list(range(1, m // 2 + 1))
        if m % 2 == 0:
            mult = [2 * math.comb(m, j) if j != m - j else math.comb(m, j) for j in classes]
        else:
            mult = [2 * math.comb(m, j) for j in classes]
        self.log_mult = np.array([math.log(v) for v in mult])
        self.log_cp = np.array([_safe_log(cs.c_plus[j]) for j in classes])
        self.log_cm = np.array([_safe_log(abs(cs.c_minus[j])) for j in classes])
        self.n_classes = len(classes)
        self.log_fact_rest = float(gammaln(N))

    def group(self, i):
        """Sum over keys with k_0 = N - 1 - i of d * max(0, |b| - a)."""
        k0 = self.N - 1 - i
        km, K, lgam = _group_rows(i, self.n_classes)
        log_d = self.log_fact_rest - gammaln(k0 + 1) - lgam + K @ self.log_mult
        gp, gm = self.lg
        al, be = self.lab
        la = K @ self.log_cp + np.logaddexp(k0 * gp + (km + 1) * gm, k0 * gm + (km + 1) * gp)
        lb = K @ self.log_cm + np.logaddexp((k0 + 1) * al + km * be, (k0 + 1) * be + km * al)
        neg = lb > la
        if not neg.any():
            return 0.0
        vals = np.exp(math.log(0.5) + log_d[neg] + lb[neg]) * -np.expm1(la[neg] - lb[neg])
        return math.fsum(vals.tolist())


@functools.lru_cache(maxsize=1024)
def _group_rows(i, n_classes):
    """Float views of the group-i compositions: (k_m, class counts, log of count factorials)."""
    rows = _compositions(i, 1 + n_classes).astype(float)
    lgam = gammaln(rows + 1).sum(axis=1)
    return rows[:, 0], rows[:, 1:], lgam


@dataclass(frozen=True)
class NegativityResult:
    value: float
    groups_used: int
    profile: tuple
    complete: bool


def negativity_profile(N, m, p, cutoff=1e-10):
    """Group-wise negativity accumulation.

    Groups are visited in increasing i. With ``cutoff > 0`` the sweep stops at
    the first group below ``cutoff`` once the contributions have stopped
    growing for two consecutive groups after becoming positive; ``cutoff = 0``
    enumerates everything.
    """
    if N < 2:
        raise ValueError("negativity needs at least two blocks")
    if cutoff != 0 and not 1e-12 <= cutoff <= 1e-4:
        raise ValueError("cutoff must be 0 or lie in [1e-12, 1e-4]")
    ev = _GroupEvaluator(N, m, p)
    profile = []
    peak, falling = 0.0, 0
    for i in range(N):
        c = ev.group(i)
        falling = falling + 1 if profile and peak > 0 and c <= profile[-1] else 0
        profile.append(c)
        peak = max(peak, c)
        if cutoff > 0 and falling >= 2 and c < cutoff:
            break
    complete = len(profile) == N
    return NegativityResult(math.fsum(profile), len(profile), tuple(profile), complete)


def negativity(N, m, p, cutoff=1e-10):
    return negativity_profile(N, m, p, cutoff).value


def negativity_upper_bound(N, m, p):
    return analytic.i_trace_norm(N, m, p) / 2


# Decay rate -----------------------------------------------------------------


@dataclass(frozen=True)
class BetaResult:
    beta: float | None
    window: tuple | None
    rates: tuple

    @property
    def found(self):
        return self.beta is not None


def plateau(values, min_len=8, rel_tol=0.05):
    """Widest window (start, stop) with (max - min) / |mean| < rel_tol, or None."""
    v = np.asarray(values, dtype=float)
    best = None
    for start in range(len(v)):
        lo = hi = v[start]
        if not np.isfinite(lo):
            continue
        stop = start
        for j in range(start, len(v)):
            x = v[j]
            if not np.isfinite(x):
                break
            lo, hi = min(lo, x), max(hi, x)
            mean = v[start : j + 1].mean()
            if mean == 0 or (hi - lo) / abs(mean) >= rel_tol:
                break
            stop = j + 1
        if stop - start >= min_len and (best is None or stop - start > best[1] - best[0]):
            best = (start, stop)
    return best


def decay_rate_beta(m, p, N_range, cutoff=1e-10, min_len=8, rel_tol=0.05):
    """Mean of L(N) = -(ln Neg(N+1) - ln Neg(N)) over its widest flat window."""
    Ns = sorted(int(n) for n in N_range)
    logs = [math.log(v) if v > 0 else -math.inf for v in (negativity(N, m, p, cutoff) for N in Ns)]
    rates = []
    for (n1, l1), (n2, l2) in zip(zip(Ns, logs), zip(Ns[1:], logs[1:])):
        rates.append(-(l2 - l1) / (n2 - n1) if np.isfinite(l1) and np.isfinite(l2) else math.nan)
    win = plateau(rates, min_len, rel_tol)
    if win is None:
        return BetaResult(None, None, tuple(rates))
    beta = float(np.mean(rates[win[0] : win[1]]))
    return BetaResult(beta, (Ns[win[0]], Ns[win[1]]), tuple(rates))


# Index q --------------------------------------------------------------------


def index_q_cghz(N, m, p):
    """Trace norm of [A, [A, rho]] for A = sum of block observables |0_L><0_L| - |1_L><1_L|.

    In the rotated frame A is diagonal with eigenvalue (#zero blocks - #one
    blocks); only the complement couplings survive, each scaled by
    (2 * eigenvalue)^2. Summing over non-corner block strings factorizes into
    M = sum_s binom(m, s) |c_s^-| per such block.
    """
    if N < 1:
        raise ValueError("N must be positive")
    cs = analytic.coeffs(m, p)
    w = _weights(cs)
    M = sum(math.comb(m, s) * abs(cs.c_minus[s]) for s in range(1, m))
    la, lb, lM = _safe_log(w.alpha), _safe_log(w.beta), _safe_log(M)
    terms = []
    for z in range(N + 1):
        for o in range(N + 1 - z):
            r = N - z - o
            if z == o:
                continue
            lmult = float(gammaln(N + 1) - gammaln(z + 1) - gammaln(o + 1) - gammaln(r + 1))
            lcoh = np.logaddexp(_klog(z, la) + _klog(o, lb), _klog(z, lb) + _klog(o, la))
            lt = lmult + _klog(r, lM) + lcoh + math.log(2 * (z - o) ** 2)
            if np.isfinite(lt):
                terms.append(float(lt))
    return math.fsum(math.exp(t) for t in terms)


def n_eff(N, m, p):
    return index_q_cghz(N, m, p) / (4 * N)


def index_q_upper_bound(N, m, p):
    """4 N^2 times the interference-term trace norm (asymptotic, o(N^2) dropped)."""
    return 4 * N * N * analytic.i_trace_norm(N, m, p)

"""Closed-form coherence, distillation and GME quantities for GHZ-encoded blocks.

Every N-th power of a number in (0, 1) goes through ``exp(N * log(x))`` and every
``1 - x**N`` through ``expm1`` so that block counts up to 1e12 and beyond stay
accurate in double precision.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp


def _check(m, p):
    if int(m) != m or m < 1:
        raise ValueError(f"block size must be a positive integer, got {m}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def _check_n(N, least=1):
    if int(N) != N or N < least:
        raise ValueError(f"N must be an integer >= {least}, got {N}")


def log_binom(m, s):
    if m <= 60:
        return math.log(math.comb(m, s))
    return float(gammaln(m + 1) - gammaln(s + 1) - gammaln(m - s + 1))


def binom(m, s):
    return math.comb(m, s) if m <= 60 else math.exp(log_binom(m, s))


def _log(x):
    return math.log(x) if x > 0 else -math.inf


def _pow(x, n):
    """x**n for x >= 0 with the log-domain convention 0**0 = 1."""
    if n == 0:
        return 1.0
    return math.exp(n * math.log(x)) if x > 0 else 0.0


@dataclass(frozen=True)
class CoeffSet:
    """Per-block coefficients of a noisy GHZ-encoded block.

    ``c_plus[s]`` / ``c_minus[s]`` weight basis states with s ones; the tilde
    corner values absorb the surviving coherence p**m / 2.
    """

    m: int
    p: float
    c_plus: np.ndarray
    c_minus: np.ndarray

    @property
    def corner(self):
        return self.p**self.m / 2

    @property
    def ct0_plus(self):
        return self.c_plus[0] + self.corner

    @property
    def ct0_minus(self):
        return self.c_minus[0] + self.corner

    @property
    def ctm_plus(self):
        return self.c_plus[self.m] - self.corner

    @property
    def ctm_minus(self):
        return self.c_minus[self.m] - self.corner


def coeffs(m, p):
    _check(m, p)
    s = np.arange(m + 1)
    a = (1 + p) ** (m - s) * (1 - p) ** s
    b = (1 + p) ** s * (1 - p) ** (m - s)
    scale = 2.0 ** (m + 1)
    return CoeffSet(m, float(p), (a + b) / scale, (a - b) / scale)


def _log_tail(m, p):
    """log of 1 - I_0: the weight the noisy off-diagonal loses within one block."""
    lp, lq = math.log1p(p), _log(1 - p)
    terms = []
    for s in range(m // 2 + 1, m + 1):
        terms.append(log_binom(m, s) + (m - s) * lp + s * lq - (m - 1) * math.log(2))
    if m % 2 == 0:
        h = m // 2
        terms.append(log_binom(m, h) + h * _log(1 - p * p) - m * math.log(2))
    return float(logsumexp(terms)) if terms else -math.inf


def i0_trace_norm(m, p):
    """Trace norm of one noisy GHZ-encoded off-diagonal block element."""
    _check(m, p)
    tail = _log_tail(m, p)
    return -math.expm1(tail) if tail < 0 else 0.0


def i0_from_coeffs(m, p):
    cs = coeffs(m, p)
    return float(sum(binom(m, s) * abs(cs.c_minus[s]) for s in range(m + 1)))


def i0_small_time(m, gamma_t):
    """Leading small-time form 1 - binom(k, h) * 2**(1 - h) * (gamma t)**h, k the odd part of m, h = (k + 1) / 2."""
    k = m if m % 2 else m - 1
    h = (k + 1) // 2
    return 1 - math.comb(k, h) * 2.0 ** (1 - h) * gamma_t**h


def i_trace_norm(N, m, p):
    _check_n(N)
    _check(m, p)
    tail = _log_tail(m, p)
    if tail >= 0:
        return 0.0
    return math.exp(N * math.log1p(-math.exp(tail)))


def j0_upper_bound(m, p):
    """1 - (1 - p)**m, valid for any orthogonal codeword pair."""
    _check(m, p)
    return -math.expm1(m * math.log1p(-p)) if p < 1 else 1.0


def i_lower_bound(N, m, p):
    """Stirling-type lower bound on i_trace_norm; exact (p**N) for unencoded qubits."""
    _check_n(N)
    _check(m, p)
    if m == 1:
        # The Stirling estimate overshoots I = p**N for p < 0.149 when m = 1.
        return _pow(p, N)
    h = -(-m // 2)
    bracket = 1 - math.sqrt(2 * m / math.pi) * (1 + 1 / (11 * m)) * (1 - p * p) ** h
    if bracket <= 0:
        return 0.0
    return math.exp(N * math.log(bracket))


def hs_ratio(m, p):
    """Hilbert-Schmidt norm of the noisy off-diagonal relative to the noisy diagonal."""
    _check(m, p)
    a, b, c = (1 + p * p) ** m, (1 - p * p) ** m, (2 * p * p) ** m
    return math.sqrt(max(0.0, (a - b + c) / (a + b + c)))


def cluster_j0_m5(p):
    """Off-diagonal trace norm of the 5-qubit ring-cluster encoding."""
    _check(5, p)
    return 0.5 * p**3 * (5 - 3 * p * p)


# Distillation -------------------------------------------------------------


def _distill_parts(m, p):
    """Return (log of corner weight ratio squared, log of c0-/c0+)."""
    y = (1 - p) / (1 + p)
    ym = y**m
    log_ratio = math.log1p(-ym) - math.log1p(ym) if ym < 1 else -math.inf
    # p**m / (2 c0+) = (2p/(1+p))**m / (1 + y**m)
    log_corner = m * (_log(2 * p) - math.log1p(p)) - math.log1p(ym)
    return 2 * log_corner, log_ratio


def distill_fidelity(N, m, p):
    """Logical Bell fidelity after projecting N - 2 blocks onto |0...0> (all outcomes lambda_+)."""
    _check_n(N, 2)
    _check(m, p)
    log_a, log_r = _distill_parts(m, p)
    a = math.exp(log_a) if log_a > -math.inf else 0.0
    r_n2 = math.exp((N - 2) * log_r) if N > 2 else 1.0
    r_n = math.exp(N * log_r)
    return 0.25 * (1 + a * (1 + r_n2) + r_n)


def distill_two_block_state(N, m, p):
    """Normalized two-block state of the distillation protocol in the {|0^m>, |1^m>} basis.

    The two surviving blocks carry the four tensor-square terms; the projected
    blocks multiply them by c0+**(N-2) (diagonal terms) or c0-**(N-2)
    (coherence terms).
    """
    _check_n(N, 2)
    cs = coeffs(m, p)
    cp, cm, q = cs.c_plus[0], cs.c_minus[0], p**m
    terms = [
        (cp, np.array([[2 * cp, q], [q, 2 * cp]])),
        (cp, np.array([[2 * cp, -q], [-q, 2 * cp]])),
        (cm, np.array([[2 * cm, -q], [q, -2 * cm]])),
        (cm, np.array([[2 * cm, q], [-q, -2 * cm]])),
    ]
    rho = sum(w ** (N - 2) * np.kron(A, A) for w, A in terms)
    return rho / np.trace(rho)


def distill_threshold_p0(b):
    if b <= 0:
        raise ValueError("b must be positive")
    return (1 + 4 / b) ** -0.5


def distill_threshold_t0(b, gamma=1.0):
    if b <= 0 or gamma <= 0:
        raise ValueError("b and gamma must be positive")
    return math.log1p(4 / b) / (2 * gamma)


class MaxN(NamedTuple):
    n: int
    unbounded: bool


def max_distillable_N(m, p, cap=10**15):
    """Largest N with distill_fidelity > 1/2; ``unbounded`` is set when the cap is reached."""
    _check(m, p)

    def ok(N):
        return distill_fidelity(N, m, p) > 0.5

    if not ok(2):
        return MaxN(1, False)
    lo, hi = 2, 4
    while ok(hi):
        lo = hi
        if hi >= cap:
            return MaxN(cap, True)
        hi = min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return MaxN(lo, False)


# Genuine multipartite entanglement -----------------------------------------


def _power_sum(bases, N):
    """sum_i b_i**N for nonnegative or negative b_i, evaluated via logs."""
    total = 0.0
    for b in bases:
        mag = _pow(abs(b), N)
        total += mag if (b >= 0 or N % 2 == 0) else -mag
    return total


def gme_alpha(N, m, p):
    """Largest GHZ-basis coefficient of the noisy C-GHZ state (GME iff > 1/2)."""
    _check_n(N)
    cs = coeffs(m, p)
    q = cs.corner
    cp, cm = cs.c_plus[0], cs.c_minus[0]
    return 0.5 * _power_sum([cp + q, cp - q, cm + q, cm - q], N)


def gme_alpha_projected(N, m, p):
    """Largest GHZ overlap after projecting each block onto span{|0^m>, |1^m>}."""
    _check_n(N)
    cs = coeffs(m, p)
    cp, cm = cs.c_plus[0], cs.c_minus[0]
    # Normalized corner of the projected block; see the decisions ledger on the factor 2.
    x = p**m / (2 * cp)
    r = cm / cp
    return 0.5 * _power_sum([(1 + x) / 2, (1 - x) / 2, (r + x) / 2, (r - x) / 2], N)


def gamma_t_root(f, level=0.5, hi=50.0):
    """Smallest gamma*t in (0, hi] where f(exp(-gamma*t)) falls to ``level``; None if never."""
    def g(gt):
        return f(math.exp(-gt)) - level

    if g(0.0) <= 0:
        return 0.0
    lo, up = 0.0, 1e-3
    while g(up) > 0:
        lo, up = up, 2 * up
        if up > hi:
            return None
    return float(brentq(g, lo, up, xtol=1e-14))


def gme_lifetime(N, m, projected=True):
    f = gme_alpha_projected if projected else gme_alpha
    return gamma_t_root(lambda p: f(N, m, p))

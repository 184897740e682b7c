"""Polynomial families of the M/M/n birth-death chain.

``f_{n,k}`` feeds the gap characterization through the ratio
``z_n = f_{n,n} / f_{n,n-1}``; ``Q_{n,k}`` (Poisson-Charlier type) feed the
Karlin-McGregor integrand.  Both overflow doubles for large ``n``, so values
are carried as sign plus log-magnitude, and ``z_n`` is only ever formed
through its own ratio recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import NumericalFailure, PreconditionViolated
from .model import INFINITE, QueueParams, a_n, b_n, log_g
from .signedlog import SignedLog, signed_sum

RESCALE_LOG = 300.0


# --------------------------------------------------------------------------- f

def f_series(p: QueueParams, k: int, x: float) -> SignedLog:
    """``f_{n,k}(x)`` from its closed-form binomial sum (reference path)."""
    if not 0 <= k <= p.n:
        raise PreconditionViolated(f"k must lie in [0, n], got {k}")
    log_lam = math.log(p.lam)
    terms = []
    for j in range(k + 1):
        sign = 1
        logmag = gammaln(k + 1) - gammaln(j + 1) - gammaln(k - j + 1) + j * log_lam
        for i in range(1, k - j + 1):
            d = i - x
            if d == 0:
                sign = 0
                break
            if d < 0:
                sign = -sign
            logmag += math.log(abs(d))
        if sign:
            terms.append(SignedLog(sign, logmag))
    return signed_sum(terms)


def f_recursion(p: QueueParams, k: int, x: float, rescale_log: float = RESCALE_LOG) -> SignedLog:
    """``f_{n,k}(x)`` from the three-term recursion with periodic rescaling."""
    if k < 0:
        raise PreconditionViolated("k must be nonnegative")
    lam = p.lam
    if k == 0:
        return SignedLog(1, 0.0)
    prev, cur, scale = 1.0, 1.0 + lam - x, 0.0
    for m in range(2, k + 1):
        prev, cur = cur, (lam + m - x) * cur - lam * (m - 1) * prev
        if abs(cur) > math.exp(rescale_log):
            c = abs(cur)
            prev, cur, scale = prev / c, cur / c, scale + math.log(c)
    if cur == 0:
        return SignedLog(0, -math.inf)
    return SignedLog(1 if cur > 0 else -1, math.log(abs(cur)) + scale)


def z_ratio_sequence(p: QueueParams, x: float) -> list[float]:
    """``[z_{n,1}(x), ..., z_{n,n}(x)]`` by ``z_k = (lam + k - x) - lam (k-1) / z_{k-1}``."""
    lam = p.lam
    z = lam + 1.0 - x
    if z <= 0:
        raise NumericalFailure(f"z_(n,1)({x}) = {z} is not positive")
    out = [z]
    for k in range(2, p.n + 1):
        z = (lam + k - x) - lam * (k - 1) / z
        if z <= 0:
            raise NumericalFailure(f"z_(n,{k})({x}) = {z} is not positive")
        out.append(z)
    return out


def z_ratio(p: QueueParams, x: float) -> float:
    """``z_n(x) = f_{n,n}(x) / f_{n,n-1}(x)``.

    Valid while every partial ratio stays positive, which holds for ``x < 1``
    and for ``x`` up to the lower spectrum edge.

    Raises:
        NumericalFailure: an intermediate ratio was not positive.
    """
    lam = p.lam
    z = lam + 1.0 - x
    if z <= 0:
        raise NumericalFailure(f"z_(n,1)({x}) = {z} is not positive")
    for k in range(2, p.n + 1):
        z = (lam + k - x) - lam * (k - 1) / z
        if z <= 0:
            raise NumericalFailure(f"z_(n,{k})({x}) = {z} is not positive")
    return z


def psi_big(p: QueueParams, x: float) -> float:
    """``Psi_n(x) = z_n(x) - a_n(x)``; ``INFINITE`` past the lower edge."""
    a = a_n(p, x)
    if a == INFINITE:
        return INFINITE
    return z_ratio(p, x) - a


def sigma_sign(p: QueueParams, x: float) -> int:
    """Sign of ``f_{n,n} - sqrt(lam n) f_{n,n-1}`` where ``f_{n,n-1} > 0``."""
    d = z_ratio(p, x) - math.sqrt(p.lam * p.n)
    return (d > 0) - (d < 0)


def psi_sign(p: QueueParams, x: float) -> int:
    """Sign of ``f_{n,n} - a_n f_{n,n-1}`` on the guarded domain."""
    v = psi_big(p, x)
    return (v > 0) - (v < 0)


# --------------------------------------------------------------------------- Q

class _QRecursion:
    """Vectorized ``Q_{n,k}(x)`` recursion over an array of points.

    Keeps ``(Q_{k-1}, Q_k)`` in linear scale sharing one log offset per
    point; the pair is renormalized whenever its magnitude leaves
    ``[exp(-rescale_log), exp(rescale_log)]``.  Ratios of quantities
    captured at the same step are exact under rescaling.
    """

    def __init__(self, p: QueueParams, x, rescale_log: float = RESCALE_LOG):
        self.p = p
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        self.k = 1
        self.prev = np.ones_like(self.x)
        self.cur = 1.0 - self.x / p.lam
        self.offset = np.zeros_like(self.x)
        self.threshold = math.exp(rescale_log)

    def advance_to(self, k: int):
        if k < self.k:
            raise ValueError("cannot rewind the recursion")
        lam, n = self.p.lam, self.p.n
        base = 1.0 - self.x / lam
        while self.k < k:
            m = min(self.k, n)              # min(k'-1, n) for k' = self.k + 1
            nxt = (base + m / lam) * self.cur - (m / lam) * self.prev
            self.prev, self.cur = self.cur, nxt
            self.k += 1
            big = np.maximum(np.abs(self.prev), np.abs(self.cur))
            # Both directions: the pair decays toward underflow for large x.
            over = (big > self.threshold) | ((big < 1.0 / self.threshold) & (big > 0))
            if np.any(over):
                c = np.where(over, big, 1.0)
                self.prev = self.prev / c
                self.cur = self.cur / c
                self.offset = self.offset + np.log(c)

    def pair(self):
        """``(Q_{k-1}, Q_k, log offset)`` at the current step."""
        return self.prev, self.cur, self.offset


def _to_signed_log(values: np.ndarray, offset: np.ndarray):
    with np.errstate(divide="ignore"):
        return np.sign(values), np.log(np.abs(values)) + offset


def q_eval_many(p: QueueParams, ks, x, rescale_log: float = RESCALE_LOG):
    """``Q_{n,k}(x)`` for several ``k`` and an array of ``x``.

    Returns a dict ``k -> (sign array, log-magnitude array)``.
    """
    ks = sorted(set(int(k) for k in ks))
    if ks and ks[0] < 0:
        raise PreconditionViolated("k must be nonnegative")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = {}
    rec = _QRecursion(p, x, rescale_log)
    for k in ks:
        if k == 0:
            out[0] = (np.ones_like(x), np.zeros_like(x))
            continue
        rec.advance_to(k)
        _, cur, off = rec.pair()
        out[k] = _to_signed_log(cur, off)
    return out


def q_eval(p: QueueParams, k: int, x: float, rescale_log: float = RESCALE_LOG) -> SignedLog:
    """``Q_{n,k}(x)`` as a SignedLog."""
    sign, logmag = q_eval_many(p, [k], [x], rescale_log)[int(k)]
    s = int(sign[0])
    return SignedLog(s, float(logmag[0])) if s else SignedLog(0, -math.inf)


def _c_from_pair(p: QueueParams, q_nm1, q_n, x):
    """``c_n = Q_n^2 - Q_{n-1} Q_{n+1}`` as a sum of two squares.

    Eliminating ``Q_{n+1}`` with the recursion turns ``c_n`` into the
    positive-definite form ``(Q_n - beta Q_{n-1})^2 + (b_n / 2 lam)^2 Q_{n-1}^2``
    with ``beta = (lam + n - x) / (2 lam)``, so nothing cancels near the edges.
    """
    lam, n = p.lam, p.n
    beta = (lam + n - x) / (2 * lam)
    lower, upper = p.edge, p.upper_edge
    bsq = np.clip((x - lower) * (upper - x), 0.0, None)
    return (q_n - beta * q_nm1) ** 2 + bsq / (4 * lam * lam) * q_nm1 ** 2


@dataclass(frozen=True)
class SpectralIntegrand:
    """Karlin-McGregor integrand pieces at one spectral point ``x``."""

    x: float
    qi: SignedLog
    qj: SignedLog
    qn_m1: SignedLog
    qn: SignedLog
    qn_p1: SignedLog
    c: SignedLog
    b: float
    log_prefactor: float

    def log_combination(self) -> tuple[int, float]:
        """Sign and log of ``Q_i Q_j b / c`` times the prefactor."""
        sign = self.qi.sign * self.qj.sign
        if sign == 0 or self.b == 0:
            return 0, -math.inf
        return sign, (self.qi.logmag + self.qj.logmag + math.log(self.b)
                      - self.c.logmag + self.log_prefactor)

    def value(self) -> float:
        sign, logv = self.log_combination()
        return sign * math.exp(logv) if sign else 0.0


def km_log_prefactor(p: QueueParams, j: int) -> float:
    """``log(g_n(j) n! / lam^n / (lam n))``."""
    return log_g(p, j) + gammaln(p.n + 1) - p.n * math.log(p.lam) - math.log(p.lam * p.n)


def km_terms(p: QueueParams, i: int, j: int, x, rescale_log: float = RESCALE_LOG,
             cdf: bool = False):
    """Vectorized signed-log pieces used by the transient integrals.

    Returns ``(sign_i, log_i, sign_j, log_j, log_c)`` arrays.  With ``cdf``
    the ``j`` entries hold ``Q_{j+1} - Q_j`` instead of ``Q_j``.

    Raises:
        NumericalFailure: ``c_n(x) <= 0`` at a point inside the spectrum.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = p.n
    jj = j + 1 if cdf else j
    rec = _QRecursion(p, x, rescale_log)
    snap = {}
    for k in sorted({n, i, jj} - {0}):
        rec.advance_to(k)
        snap[k] = tuple(a.copy() for a in rec.pair())

    q_nm1, q_n, off_n = snap[n]
    c = _c_from_pair(p, q_nm1, q_n, x)
    if np.any(c <= 0):
        raise NumericalFailure("c_n(x) is not positive inside the spectrum")
    log_c = np.log(c) + 2 * off_n

    def value_at(k):
        if k == 0:
            return np.ones_like(x), np.zeros_like(x)
        _, cur, off = snap[k]
        return _to_signed_log(cur, off)

    si, li = value_at(i)
    if cdf:
        prev, cur, off = snap[jj]
        sj, lj = _to_signed_log(cur - prev, off)
    else:
        sj, lj = value_at(j)
    return si, li, sj, lj, log_c


def km_integrand(p: QueueParams, i: int, j: int, x: float,
                 rescale_log: float = RESCALE_LOG) -> SpectralIntegrand:
    """Assemble the integrand of the spectral transient formula at one point."""
    lower, upper = p.edge, p.upper_edge
    if not lower < x < upper:
        raise PreconditionViolated("x must lie strictly inside the spectrum interval")
    if i < 0 or j < 0:
        raise PreconditionViolated("states must be nonnegative")
    n = p.n
    vals = q_eval_many(p, [i, j, n - 1, n, n + 1], [x], rescale_log)

    def sl(k):
        s, l = vals[k]
        s0 = int(s[0])
        return SignedLog(s0, float(l[0])) if s0 else SignedLog(0, -math.inf)

    _, _, _, _, log_c = km_terms(p, n, n, [x], rescale_log)
    c = SignedLog(1, float(log_c[0]))
    return SpectralIntegrand(
        x=x, qi=sl(i), qj=sl(j), qn_m1=sl(n - 1), qn=sl(n), qn_p1=sl(n + 1),
        c=c, b=b_n(p, x), log_prefactor=km_log_prefactor(p, j),
    )

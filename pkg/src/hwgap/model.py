"""Elementary M/M/n quantities in the Halfin-Whitt scaling.

The arrival rate is ``lam = n - B*sqrt(n)`` and the service rate is 1.
Functions that are only real-valued on part of the line return ``INFINITE``
elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import expit, gammaln, ndtr

from .errors import NumericalFailure, PreconditionViolated
from .signedlog import SignedLog

#: Marker for the "infinite otherwise" branches (a real ``inf``, never NaN).
INFINITE = math.inf


@dataclass(frozen=True)
class QueueParams:
    """Number of servers ``n``, excess parameter ``B`` and arrival rate ``lam``."""

    n: int
    B: float
    lam: float

    @property
    def rho(self) -> float:
        return self.lam / self.n

    @cached_property
    def _sqrt_gap(self) -> float:
        # sqrt(n) - sqrt(lam) without cancellation.
        return (self.n - self.lam) / (math.sqrt(self.n) + math.sqrt(self.lam))

    @property
    def edge(self) -> float:
        """Lower spectrum edge ``(sqrt(n) - sqrt(lam))**2``."""
        return self._sqrt_gap ** 2

    @property
    def upper_edge(self) -> float:
        return (math.sqrt(self.n) + math.sqrt(self.lam)) ** 2


@dataclass(frozen=True)
class SpectrumInterval:
    lower: float
    upper: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)


def make_params(n: int, B: float, strict: bool = True) -> QueueParams:
    """Build and validate an ``(n, B)`` pair.

    With ``strict`` (the default) the standing assumptions ``lam > 0`` and
    ``n > lam + 1`` are enforced.  ``strict=False`` only requires a stable
    queue (``0 < lam < n``), which admits the M/M/1 comparison cases.
    """
    if int(n) != n or n < 1:
        raise PreconditionViolated(f"n must be a positive integer, got {n!r}")
    n = int(n)
    B = float(B)
    if not (B > 0 and math.isfinite(B)):
        raise PreconditionViolated(f"B must be positive, got {B!r}")
    lam = n - B * math.sqrt(n)
    if lam <= 0:
        raise PreconditionViolated(f"arrival rate {lam} is not positive for n={n}, B={B}")
    if strict and not n > lam + 1:
        raise PreconditionViolated(f"need n > lam + 1, got n={n}, lam={lam}")
    return QueueParams(n=n, B=B, lam=lam)


def params_from_rate(n: int, lam: float, strict: bool = True) -> QueueParams:
    """Same as :func:`make_params`, parametrized by the arrival rate."""
    return make_params(n, (n - lam) / math.sqrt(n), strict=strict)


def spectrum_edges(p: QueueParams) -> SpectrumInterval:
    return SpectrumInterval(p.edge, p.upper_edge)


def blim_bracket(p: QueueParams) -> tuple[float, float]:
    """Bounds ``B/2 <= sqrt(n) - sqrt(lam) <= B/2 + B^2/(4 sqrt(n) - 2B)``."""
    B = p.B
    return B / 2, B / 2 + B * B / (4 * math.sqrt(p.n) - 2 * B)


def a_n(p: QueueParams, x: float) -> float:
    """Smaller root of ``y^2 - (lam + n - x) y + lam n``; ``INFINITE`` past the edge."""
    lower = p.edge
    if x > lower:
        return INFINITE
    if x == lower:
        return math.sqrt(p.lam * p.n)
    root = math.sqrt((lower - x) * (p.upper_edge - x))
    # Product of the two roots is lam*n; dividing avoids cancellation.
    return 2 * p.lam * p.n / (p.lam + p.n - x + root)


def b_n(p: QueueParams, x: float) -> float:
    lower, upper = p.edge, p.upper_edge
    if x < lower or x > upper:
        return INFINITE
    return math.sqrt((x - lower) * (upper - x))


def log_g(p: QueueParams, k):
    """``log g_n(k)``; accepts scalars or integer arrays."""
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise PreconditionViolated("state index must be nonnegative")
    n, lam = p.n, p.lam
    below = k_arr * math.log(lam) - gammaln(k_arr + 1)
    above = n * math.log(lam) - gammaln(n + 1) + (k_arr - n) * math.log(lam / n)
    out = np.where(k_arr <= n, below, above)
    return float(out) if out.ndim == 0 else out


def g_weight_log(p: QueueParams, k: int) -> SignedLog:
    return SignedLog(1, log_g(p, k))


class StationaryDist:
    """Stationary law of the M/M/n queue.

    Normalization is exact: the mass above ``n`` is a geometric series.
    ``pmf_array`` covers ``0..truncation`` where the neglected tail is below
    ``1e-14``.  Log weights are accumulated from the one-step ratios
    ``lam / min(k, n)`` relative to the mode, which keeps every entry
    accurate to a few ulps even for ``n`` near ``10**6``.
    """

    def __init__(self, p: QueueParams, tail_tol: float = 1e-14):
        self.params = p
        n, lam = p.n, p.lam
        rho = lam / n
        log_rho = math.log(rho)
        steps = np.log(np.longdouble(lam) / np.arange(1, n + 1, dtype=np.longdouble))
        rel = np.concatenate([[np.longdouble(0)], np.cumsum(steps)])
        rel -= rel.max()
        body = math.fsum(np.exp(rel.astype(float)))
        tail = math.exp(float(rel[-1])) * rho / (1 - rho)
        log_mass = math.log(body + tail)
        if not math.isfinite(log_mass):
            raise NumericalFailure("stationary normalization is not finite")
        # Tail above K >= n is P_K * rho / (1 - rho).
        log_pn = float(rel[-1]) - log_mass
        log_tail_factor = math.log(rho / (1 - rho))
        extra = 0
        if log_pn + log_tail_factor > math.log(tail_tol):
            extra = math.ceil((math.log(tail_tol) - log_pn - log_tail_factor) / log_rho)
        self.truncation = n + max(extra, 0)
        above = rel[-1] + np.arange(1, self.truncation - n + 1) * np.longdouble(log_rho)
        log_pmf = np.concatenate([rel, above]) - np.longdouble(log_mass)
        self.log_pmf_array = log_pmf.astype(float)
        self.pmf_array = np.exp(log_pmf).astype(float)
        #: ``log sum_k g_n(k)``, so ``P_k = exp(log g_n(k) - log_norm)``.
        self.log_norm = float(log_g(p, 0)) - float(log_pmf[0])
        self._cdf = np.cumsum(np.exp(log_pmf)).astype(float)

    def pmf(self, k: int) -> float:
        if k < 0:
            return 0.0
        K = self.truncation
        if k <= K:
            return float(self.pmf_array[k])
        return math.exp(self.log_pmf_array[K] + (k - K) * math.log(self.params.rho))

    def cdf(self, j: int) -> float:
        """``P(Q <= j)`` in steady state."""
        if j < 0:
            return 0.0
        if j <= self.truncation:
            return float(min(self._cdf[j], 1.0))
        return 1.0 - self.tail(j)

    def tail(self, j: int) -> float:
        """``P(Q > j)``; exact geometric form for ``j >= n``."""
        n = self.params.n
        if j >= n:
            rho = self.params.rho
            return self.pmf(j) * rho / (1 - rho)
        return 1.0 - float(self._cdf[j])


def stationary(p: QueueParams) -> StationaryDist:
    return StationaryDist(p)


def hw_wait_prob(B: float) -> float:
    """Limiting probability that an arriving customer waits."""
    if not B > 0:
        raise PreconditionViolated("B must be positive")
    # B e^{B^2/2} int_{-inf}^B e^{-z^2/2} dz = B e^{B^2/2} sqrt(2 pi) Phi(B); log form avoids overflow.
    log_term = math.log(B) + 0.5 * B * B + 0.5 * math.log(2 * math.pi) + math.log(ndtr(B))
    return float(expit(-log_term))

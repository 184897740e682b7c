"""Transient probabilities, distance-to-stationarity bounds, and brute-force oracles.

The spectral integrals only apply when the gap sits at the spectrum edge
(no jumps in the spectral measure below it); otherwise PreconditionViolated
is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.stats import poisson

from .charlier import km_log_prefactor, km_terms
from .errors import NumericalFailure, PreconditionViolated
from .gap import edge_regime, gap_finite
from .limit import cached_bstar
from .model import QueueParams, log_g, stationary
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate

_LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class TransientQuery:
    p: QueueParams
    i: int
    j: int
    t: float

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise PreconditionViolated("states must be nonnegative")
        if self.t < 0:
            raise PreconditionViolated("time must be nonnegative")


@dataclass(frozen=True)
class BoundReport:
    pmf_bound: float
    cdf_bound: float
    alpha: float
    valid_caveat: bool = True   # the threshold N_{B,a1,a2} is never quantified


@dataclass(frozen=True)
class TruncatedGenerator:
    """Birth-death generator on ``0..m`` with a reflecting top state."""

    m: int
    lam: float
    n: int

    @property
    def birth(self) -> np.ndarray:
        b = np.full(self.m + 1, self.lam)
        b[-1] = 0.0
        return b

    @property
    def death(self) -> np.ndarray:
        return np.minimum(np.arange(self.m + 1), self.n).astype(float)

    @property
    def diag(self) -> np.ndarray:
        return -(self.birth + self.death)

    @property
    def super(self) -> np.ndarray:
        return self.birth[:-1]

    @property
    def sub(self) -> np.ndarray:
        return self.death[1:]

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.super, 1) + np.diag(self.sub, -1)


# ----------------------------------------------------------- spectral integrals

def _require_edge_regime(p: QueueParams):
    if not edge_regime(p):
        raise PreconditionViolated(
            "the spectral integral needs the spectrum-edge regime (no jump below the edge)"
        )


def _spectral_integral(p: QueueParams, i: int, j: int, t: float, cfg: QuadratureConfig,
                       cdf: bool) -> float:
    lower, upper = p.edge, p.upper_edge
    mid, half = 0.5 * (lower + upper), 0.5 * (upper - lower)
    if cdf:
        log_pref = log_g(p, j) + math.lgamma(p.n + 1) - p.n * math.log(p.lam) - math.log(p.n)
    else:
        log_pref = km_log_prefactor(p, j)
    log_pref -= _LOG_2PI

    def f(theta):
        x = mid + half * np.cos(theta)
        si, li, sj, lj, log_c = km_terms(p, i, j, x, cdf=cdf)
        # x = mid + half cos(theta): b_n(x) dx = half^2 sin^2(theta) dtheta
        with np.errstate(divide="ignore"):
            log_b_dx = 2 * np.log(half * np.sin(theta))
        logs = log_pref + li + lj + log_b_dx - log_c - x * t
        if cdf:
            logs = logs - np.log(x)
            sign = np.abs(si * sj)
        else:
            sign = si * sj
        return np.where(sign != 0, sign * np.exp(logs), 0.0)

    panels = max(16, min(512, (max(i, j, p.n) // 8)))
    value, _ = integrate(f, 0.0, math.pi, cfg, initial_panels=panels)
    return value


def km_transient(q: TransientQuery, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``P_{i,j}(t) - P_j(inf)`` from the Karlin-McGregor integral.

    Raises:
        PreconditionViolated: the queue is in the interior-jump regime.
        NumericalFailure: quadrature failed or ``c_n`` lost positivity.
    """
    _require_edge_regime(q.p)
    return _spectral_integral(q.p, q.i, q.j, q.t, cfg, cdf=False)


def km_cdf_diff(q: TransientQuery, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Upper bound on ``|P_{i,<=j}(t) - P_{<=j}(inf)|`` from the probability-flow integral.

    This is the integral of the absolute integrand, not the signed difference.
    """
    _require_edge_regime(q.p)
    return _spectral_integral(q.p, q.i, q.j, q.t, cfg, cdf=True)


# --------------------------------------------------------------------- bounds

def explicit_bounds(p: QueueParams, a1: float, a2: float, t: float) -> BoundReport:
    """Distance-to-stationarity bounds for states ``n + a sqrt(n)``, ``B < B*``, ``t >= 1``."""
    if p.B >= cached_bstar():
        raise PreconditionViolated("explicit bounds need B < B*")
    if t < 1:
        raise PreconditionViolated("explicit bounds need t >= 1")
    B = p.B
    alpha = max(B, abs(a1), abs(a2))
    expo = 2 * (alpha + B) ** 2 + 18 * alpha ** 2 / t - 0.25 * B * B * t
    factor = (1 + p.n ** -0.125) * math.exp(expo)
    return BoundReport(
        pmf_bound=2 * (math.pi * t) ** -0.5 * factor,
        cdf_bound=4 * (B * B * math.pi * t) ** -0.5 * factor,
        alpha=alpha,
    )


def t_star(a: float, B: float, eps: float) -> float:
    """Rule-of-thumb return time ``8a^2/B^2 + (4/B^2) log(1/eps)``."""
    if not B > 0:
        raise PreconditionViolated("B must be positive")
    if not 0 < eps <= 1:
        raise PreconditionViolated("eps must lie in (0, 1]")
    return 8 * a * a / (B * B) + 4 / (B * B) * math.log(1 / eps)


def literature_bounds(p: QueueParams, t: float) -> tuple[float, float]:
    """Two earlier bounds on ``|P_{n,<=n}(t) - P_{<=n}(inf)|``.

    Returns ``(zeif, chen)``: the first has rate ``(B sqrt(n) - 1)/(n - 1)``,
    the second prefactor ``(1/P_n(inf) - 1)^(1/2)`` and rate ``gamma_n``.
    """
    n = p.n
    if n < 2:
        raise PreconditionViolated("literature bounds need n >= 2")
    dist = stationary(p)
    r = n / (n - 1)
    growth = p.lam / (n - 1)                    # rho * r, < 1 when n > lam + 1
    if not growth < 1:
        raise NumericalFailure("series for the first bound diverges")
    K = dist.truncation
    ks = np.arange(1, K + 1)
    body = math.fsum(np.expm1(ks * math.log(r)) * dist.pmf_array[1:])
    # Geometric remainder of sum_{i>K} (r^i - 1) P_i.
    pk = dist.pmf(K)
    tail = pk * r ** K * growth / (1 - growth) - dist.tail(K)
    pn = dist.pmf(n)
    zeif = 4 * (n - 1) * (body + tail + math.expm1(n * math.log(r)) * (1 - 2 * pn))
    zeif *= math.exp(-(p.B * math.sqrt(n) - 1) / (n - 1) * t)
    gamma = gap_finite(p).gap
    chen = math.sqrt(1 / pn - 1) * math.exp(-gamma * t)
    return zeif, chen


# --------------------------------------------------------------------- oracles

def _uniformize(gen: TruncatedGenerator, i: int, t: float, tail: float) -> np.ndarray:
    m = gen.m
    v = np.zeros(m + 1)
    v[i] = 1.0
    if t == 0:
        return v
    rate = gen.lam + gen.n
    mu = rate * t
    lo = int(poisson.ppf(tail / 2, mu))
    hi = int(poisson.isf(tail / 2, mu)) + 1
    weights = poisson.pmf(np.arange(lo, hi + 1), mu)
    birth, death = gen.birth / rate, gen.death / rate
    stay = 1.0 - birth - death
    out = np.zeros(m + 1)
    for k in range(hi + 1):
        if k >= lo:
            out += weights[k - lo] * v
        # row vector times P: mass moves up with birth, down with death
        nxt = v * stay
        nxt[1:] += v[:-1] * birth[:-1]
        nxt[:-1] += v[1:] * death[1:]
        v = nxt
    return out


def oracle_uniformization(p: QueueParams, i: int, t: float, trunc: int | None = None,
                          boundary_tol: float = 1e-10, tail: float = 1e-12) -> np.ndarray:
    """Row ``i`` of ``exp(G t)`` on a truncated chain, by uniformization.

    The truncation doubles until the mass in the top tenth of the states is
    below ``boundary_tol``.

    Raises:
        NumericalFailure: the truncation would exceed ``2**20`` states.
    """
    if trunc is None:
        trunc = max(i, p.n) + math.ceil(25 * math.sqrt(p.n) / p.B) + 50
    trunc = max(trunc, i + 10)
    while True:
        if trunc > 2 ** 20:
            raise NumericalFailure("uniformization truncation exceeded 2**20 states")
        gen = TruncatedGenerator(trunc, p.lam, p.n)
        row = _uniformize(gen, i, t, tail)
        top = row[int(0.9 * trunc):].sum()
        if top < boundary_tol:
            return row
        trunc *= 2


def _second_eigenvalue(p: QueueParams, m: int) -> float:
    gen = TruncatedGenerator(m, p.lam, p.n)
    birth, death = gen.birth, gen.death
    # Similarity by sqrt of the stationary weights gives a symmetric matrix.
    d = birth + death
    e = np.sqrt(birth[:-1] * death[1:])
    w = eigh_tridiagonal(d, -e, eigvals_only=True, select="i", select_range=(0, 1))
    return float(w[1])


def oracle_gap(p: QueueParams, trunc: int) -> float:
    """Smallest nonzero eigenvalue magnitude of the truncated generator.

    Raises:
        PreconditionViolated: ``trunc < n + 10``.
        NumericalFailure: ``trunc > 4000`` (dense budget).
    """
    if trunc < p.n + 10:
        raise PreconditionViolated("trunc must be at least n + 10")
    if trunc > 4000:
        raise NumericalFailure("truncation exceeds the eigen-solve budget of 4000")
    return _second_eigenvalue(p, trunc)


@dataclass(frozen=True)
class OracleGapReport:
    truncations: tuple[int, ...]
    values: tuple[float, ...]
    extrapolated: float
    change: float


def oracle_gap_report(p: QueueParams, trunc: int = 2000, levels: int = 3) -> OracleGapReport:
    """Eigenvalues at ``trunc / 2**k`` (largest last) plus a Richardson value.

    The extrapolation assumes the ``1/m^2`` convergence of a continuous
    spectrum edge; in the jump regime the values are already stable and the
    extrapolation changes nothing.
    """
    ms = [trunc // 2 ** k for k in reversed(range(levels))]
    vals = [oracle_gap(p, m) for m in ms]
    rich = (4 * vals[-1] - vals[-2]) / 3 if len(vals) > 1 else vals[-1]
    change = abs(vals[-1] - vals[-2]) if len(vals) > 1 else math.inf
    return OracleGapReport(tuple(ms), tuple(vals), rich, change)

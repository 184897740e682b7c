"""The n -> infinity objects: zeta(B), Psi_inf, B* and the limiting gap.

Near ``x = 1`` the limiting gap is ``1 - O(exp(-B^2/2))``, far below double
resolution once ``B`` exceeds about 9, so every routine that can approach
``x = 1`` works in the complement ``s = 1 - x`` and reports it alongside.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import brentq

from .errors import NumericalFailure, PreconditionViolated
from .model import INFINITE
from .pcf import moment_ratio
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

SQRT2 = math.sqrt(2.0)
_CLAMP = 1e-14
_RTOL = 4 * 2.220446049250313e-16


class LimitRegime(str, enum.Enum):
    QUADRATIC = "Quadratic"
    ROOT = "Root"


@dataclass(frozen=True)
class LimitGap:
    """Limiting gap; ``complement`` is ``1 - gamma`` computed without rounding to 0."""

    B: float
    gamma: float
    regime: LimitRegime
    complement: float


def a_inf(B: float, x: float) -> float:
    disc = B * B - 4 * x
    if disc < 0:
        return INFINITE
    # 2x / (B + sqrt(disc)) is the cancellation-free form of (B - sqrt(disc)) / 2.
    return 2 * x / (B + math.sqrt(disc))


def z_inf(B: float, x: float | None = None, *, s: float | None = None,
          cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``D_x(-B)/D_{x-1}(-B) + B`` for ``x < 1``; pass ``s = 1 - x`` near 1."""
    if s is None:
        s = 1.0 - x
    if not s > 0:
        raise PreconditionViolated("z_inf needs x < 1")
    return moment_ratio(s, B, cfg)


def _psi(B: float, x: float, s: float, disc: float, cfg: QuadratureConfig) -> float:
    a = 2 * x / (B + math.sqrt(disc))
    return moment_ratio(s, B, cfg) - a


def psi_inf(B: float, x: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``Psi_inf(x) = D_x(-B)/D_{x-1}(-B) + (B + sqrt(B^2 - 4x))/2``.

    Returns ``INFINITE`` for ``x > B^2/4``; ``x = 1`` uses the integer-order
    closed forms.
    """
    if not B > 0:
        raise PreconditionViolated("B must be positive")
    disc = B * B - 4 * x
    if disc < 0:
        return INFINITE
    if x > 1:
        raise PreconditionViolated("psi_inf is implemented for x <= 1 only")
    if x == 1:
        return 0.5 * (math.sqrt(disc) - B)       # D_1(-B)/D_0(-B) = -B
    return _psi(B, x, 1.0 - x, disc, cfg)


def psi_inf_complement(B: float, s: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``Psi_inf(1 - s)`` for ``B >= 2`` and ``0 < s``, accurate for tiny ``s``."""
    if B < 2:
        raise PreconditionViolated("complement form needs B >= 2 so that 1 <= B^2/4")
    if not s > 0:
        raise PreconditionViolated("s must be positive")
    x = 1.0 - s
    disc = (B * B - 4.0) + 4.0 * s
    return _psi(B, x, s, disc, cfg)


def zeta(B: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``zeta(B) = Psi_inf(B^2/4)`` for ``0 < B <= 2``."""
    if not 0 < B <= 2:
        raise PreconditionViolated(f"zeta is defined here for 0 < B <= 2, got {B}")
    if B == 2:
        return -2.0 + 1.0                        # D_1(-2)/D_0(-2) + 1
    # pcf_ratio(B^2/4) + B/2 == moment ratio - B/2
    return moment_ratio(1.0 - 0.25 * B * B, B, cfg) - 0.5 * B


def bstar(tol: float = 1e-10, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Unique zero of ``zeta`` on ``[sqrt(2), 2)``.

    Raises:
        NumericalFailure: zeta does not change sign over the bracket.
    """
    lo, hi = SQRT2, 2.0
    if not zeta(lo, cfg) > 0:
        raise NumericalFailure("zeta(sqrt(2)) is not positive")
    if not zeta(hi - 1e-9, cfg) < 0:
        raise NumericalFailure("zeta(2-) is not negative")
    return brentq(lambda b: zeta(b, cfg), lo, hi, xtol=tol, rtol=_RTOL)


@lru_cache(maxsize=1)
def cached_bstar() -> float:
    """B* at tolerance 1e-10, computed once per process."""
    return bstar(1e-10)


def _root_below_two(B: float, tol: float, cfg: QuadratureConfig) -> tuple[float, float]:
    cap = 0.25 * B * B - _CLAMP

    def f(x):
        return _psi(B, x, 1.0 - x, B * B - 4 * x, cfg)

    if not f(0.0) > 0:
        raise NumericalFailure("Psi_inf(0) should be positive")
    if f(cap) >= 0:
        # B is within rounding of B*: both branches give B^2/4.
        return cap, 1.0 - cap
    x = brentq(f, 0.0, cap, xtol=tol, rtol=_RTOL)
    return x, 1.0 - x


def _root_above_two(B: float, tol: float, cfg: QuadratureConfig) -> tuple[float, float]:
    # Search in u = log(1 - x); Psi_inf is increasing in u.
    def f(u):
        return psi_inf_complement(B, math.exp(u), cfg)

    hi = 0.0
    if not f(hi) > 0:
        raise NumericalFailure("Psi_inf(0) should be positive")
    lo = -(0.5 * B * B + 8 * math.log(3 * B + 7)) - 5.0
    while f(lo) >= 0:
        lo -= 20.0
        if lo < -700:
            raise NumericalFailure("no sign change of Psi_inf near x = 1")
    u = brentq(f, lo, hi, xtol=tol, rtol=_RTOL)
    s = math.exp(u)
    return 1.0 - s, s


def gamma_limit(B: float, tol: float = 1e-12, cfg: QuadratureConfig = DEFAULT_CONFIG) -> LimitGap:
    """Limiting spectral gap ``gamma_B``.

    ``B^2/4`` up to B*, the first zero of ``Psi_inf`` beyond it.  For
    ``B >= 2`` ``tol`` applies to ``log(1 - gamma)``.
    """
    if not B > 0:
        raise PreconditionViolated("B must be positive")
    if B <= cached_bstar():
        g = 0.25 * B * B
        return LimitGap(B, g, LimitRegime.QUADRATIC, 1.0 - g)
    if B < 2:
        g, comp = _root_below_two(B, tol, cfg)
    else:
        g, comp = _root_above_two(B, tol, cfg)
    return LimitGap(B, g, LimitRegime.ROOT, comp)


def gamma_bracket_complement(B: float) -> tuple[float, float]:
    """Bounds on ``1 - gamma_B`` for ``B >= 10``: ``(exp(-B^2/2 - 8 log(3B+7)), exp(-(B-1)^2/2))``."""
    if B < 10:
        raise PreconditionViolated("bracket holds for B >= 10")
    return math.exp(-0.5 * B * B - 8 * math.log(3 * B + 7)), math.exp(-0.5 * (B - 1) ** 2)


def gamma_bracket(B: float) -> tuple[float, float]:
    """``(1 - exp(-(B-1)^2/2), 1 - exp(-B^2/2 - 8 log(3B+7)))``; both round to 1.0 near B=10."""
    small, big = gamma_bracket_complement(B)
    return 1.0 - big, 1.0 - small

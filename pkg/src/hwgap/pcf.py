"""Parabolic cylinder functions D_x(z) for real order and argument.

Two independent routes are provided:

* :func:`pcf` evaluates the integral representations directly (oscillatory
  cosine integral for ``x >= 0``, Laplace-type integral for ``x < 0``).
* :func:`pcf_ratio` evaluates ``D_x(-B) / D_{x-1}(-B)`` for ``0 < x < 1``
  through Gaussian power moments, which never oscillate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx, gammaln

from .errors import PreconditionViolated
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate

__all__ = [
    "PcfValue",
    "QuadratureConfig",
    "gaussian_moment",
    "moment_ratio",
    "pcf",
    "pcf_derivative_check",
    "pcf_ratio",
]

_SQRT_2_OVER_PI = math.sqrt(2 / math.pi)


@dataclass(frozen=True)
class PcfValue:
    order: float
    argument: float
    value: float
    est_abs_error: float


def _closed_form(x: float, z: float) -> float | None:
    if x == 0:
        return math.exp(-z * z / 4)
    if x == 1:
        return z * math.exp(-z * z / 4)
    if x == -1:
        # sqrt(2) e^{z^2/4} int_{z/sqrt2}^inf e^{-t^2} dt, via the scaled erfc
        return math.sqrt(math.pi / 2) * math.exp(-z * z / 4) * float(erfcx(z / math.sqrt(2)))
    return None


def _log_peak_cutoff(power: float, shift: float, log_cut: float) -> float:
    """Point beyond the peak where ``-t^2/2 + shift t + power log t`` fell by ``-log_cut``."""
    def phi(t):
        return -0.5 * t * t + shift * t + (power * math.log(t) if power else 0.0)

    if power > 0:
        t_peak = 0.5 * (shift + math.sqrt(shift * shift + 4 * power))
    else:
        t_peak = max(shift, 1.0)
    ref = phi(max(t_peak, 1e-300))
    t = t_peak + 1.0
    while phi(t) - ref > log_cut:
        t += 1.0
    return t


def _pcf_cosine(x: float, z: float, cfg: QuadratureConfig) -> tuple[float, float]:
    log_cut = math.log(cfg.tail_cut)
    t_max = _log_peak_cutoff(x, 0.0, log_cut)
    phase = 0.5 * math.pi * x

    def f(t):
        with np.errstate(divide="ignore"):
            return np.exp(-0.5 * t * t + x * np.log(t)) * np.cos(phase - z * t)

    # Panels no wider than a quarter period of the cosine.
    width = 0.5 * math.pi / max(abs(z), 1e-3)
    panels = max(8, math.ceil(t_max / width))
    pref = _SQRT_2_OVER_PI * math.exp(z * z / 4)
    value, err = integrate(f, 0.0, t_max, cfg, initial_panels=panels,
                           abs_tol=cfg.abs_tol / pref)
    return pref * value, pref * err


def _pcf_laplace(x: float, z: float, cfg: QuadratureConfig) -> tuple[float, float]:
    alpha = -(x + 1)                       # power of t in the integrand
    log_cut = math.log(cfg.tail_cut)
    t_max = _log_peak_cutoff(max(alpha, 0.0), -z, log_cut)
    # e^{-z^2/4} folded into the exponent keeps every factor O(peak).
    log_pref = -gammaln(-x)

    def kernel(t):
        return np.exp(-0.5 * t * t - z * t - 0.25 * z * z + log_pref)

    total, total_err = 0.0, 0.0
    if alpha < 0:
        # t = u^p with p = -1/x cancels t^alpha dt on [0, 1] exactly.
        p = -1.0 / x

        def head(u):
            return p * kernel(u ** p)

        v, e = integrate(head, 0.0, 1.0, cfg, initial_panels=16)
        total, total_err = v, e

        def body(t):
            return kernel(t) * t ** alpha

        v, e = integrate(body, 1.0, max(t_max, 2.0), cfg, initial_panels=16)
    else:
        def body(t):
            return kernel(t) * t ** alpha

        v, e = integrate(body, 0.0, t_max, cfg, initial_panels=16)
    return total + v, total_err + e


def pcf(x: float, z: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
        closed_form: bool = True) -> PcfValue:
    """Evaluate ``D_x(z)``.

    Orders -1, 0 and 1 use closed forms unless ``closed_form`` is False.

    Raises:
        NumericalFailure: Quadrature could not meet the tolerance.
    """
    x = float(x)
    z = float(z)
    if not (math.isfinite(x) and math.isfinite(z)):
        raise PreconditionViolated("order and argument must be finite")
    if closed_form:
        exact = _closed_form(x, z)
        if exact is not None:
            return PcfValue(x, z, exact, 0.0)
    if x >= 0:
        value, err = _pcf_cosine(x, z, cfg)
    else:
        value, err = _pcf_laplace(x, z, cfg)
    return PcfValue(x, z, value, err)


def gaussian_moment(sigma: float, B: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``int_0^inf t^(sigma-1) exp(-(B-t)^2/2) dt`` for ``sigma > 0``.

    ``sigma`` may be arbitrarily close to 0: the ``h(0)/sigma`` pole is split
    off analytically, and the remainder has a bounded integrand.
    """
    if not sigma > 0:
        raise PreconditionViolated("sigma must be positive")
    h0 = math.exp(-0.5 * B * B)
    sm1 = sigma - 1.0

    def head(t):
        # t^(sigma-1) (h(t) - h(0))
        return np.exp(sm1 * np.log(t)) * h0 * np.expm1(B * t - 0.5 * t * t)

    def body(t):
        return np.exp(sm1 * np.log(t) - 0.5 * (B - t) ** 2)

    pole = h0 / sigma
    v_head, _ = integrate(head, 0.0, 1.0, cfg, initial_panels=8, abs_tol=cfg.abs_tol * 1e-6)
    top = max(1.0, B) + 13.0 + max(0.0, sm1)
    bps = (B,) if B > 1.0 else ()
    v_body, _ = integrate(body, 1.0, top, cfg, initial_panels=8, breakpoints=bps,
                          abs_tol=cfg.abs_tol * 1e-6)
    return pole + v_head + v_body


def moment_ratio(s: float, B: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``D_{1-s}(-B) / D_{-s}(-B) + B`` written in terms of ``s = 1 - x > 0``."""
    return gaussian_moment(1.0 + s, B, cfg) / gaussian_moment(s, B, cfg)


def pcf_ratio(x: float, B: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``D_x(-B) / D_{x-1}(-B)`` for ``0 < x < 1`` and ``B > 0``."""
    if not 0 < x < 1:
        raise PreconditionViolated(f"order must lie in (0, 1), got {x}")
    if not B > 0:
        raise PreconditionViolated(f"B must be positive, got {B}")
    return moment_ratio(1.0 - x, B, cfg) - B


def pcf_derivative_check(x: float, z: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                         step: float = 1e-5) -> float:
    """Residual of ``D'_x(z) + z D_x(z)/2 - x D_{x-1}(z)`` with a centered difference."""
    tight = cfg.tightened(1e-3)
    d_plus = pcf(x, z + step, tight).value
    d_minus = pcf(x, z - step, tight).value
    deriv = (d_plus - d_minus) / (2 * step)
    lower = pcf(x - 1, z, tight).value if x != 0 else 0.0
    return abs(deriv + 0.5 * z * pcf(x, z, tight).value - x * lower)

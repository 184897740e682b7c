"""Finite-n spectral gap of the M/M/n queue.

The gap is either the lower spectrum edge or the unique zero of ``Psi_n`` on
``(0, min(1, edge))``; which one is decided by the sign of ``Psi_n`` at the
edge.  ``Psi_n`` is strictly decreasing there, so bracketing is safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .charlier import psi_big, z_ratio
from .errors import NumericalFailure, PreconditionViolated
from .model import QueueParams, make_params


class Regime(str, enum.Enum):
    SPECTRUM_EDGE = "SpectrumEdge"
    INTERIOR_JUMP = "InteriorJump"


@dataclass(frozen=True)
class GapResult:
    gap: float
    regime: Regime
    edge: float
    psi_at_edge: float
    iterations: int


def _psi_at_edge(p: QueueParams) -> float:
    # a_n(edge) = sqrt(lam n) exactly; avoids the branch point of the root.
    return z_ratio(p, p.edge) - math.sqrt(p.lam * p.n)


def edge_regime(p: QueueParams) -> bool:
    """True when the gap equals the spectrum edge (no jump below it)."""
    edge = p.edge
    if edge >= 1:
        return False
    return _psi_at_edge(p) >= 0


def gap_finite(p: QueueParams, root_tol: float = 1e-12) -> GapResult:
    """Spectral gap for finite ``n``.

    Raises:
        NumericalFailure: Psi_n has the wrong sign at an end of the bracket.
    """
    edge = p.edge
    if edge < 1:
        psi_edge = _psi_at_edge(p)
        if psi_edge >= 0:
            return GapResult(edge, Regime.SPECTRUM_EDGE, edge, psi_edge, 0)
        hi, psi_hi = edge, psi_edge
    else:
        try:
            psi_edge = psi_big(p, edge)
        except NumericalFailure:
            # z_n has a pole before the edge; only the sign split matters here.
            psi_edge = -math.inf
        hi = 1.0
        psi_hi = psi_big(p, hi)
    psi_lo = psi_big(p, 0.0)
    if not psi_lo > 0:
        raise NumericalFailure(f"Psi_n(0) = {psi_lo} should be positive")
    if not psi_hi < 0:
        raise NumericalFailure(f"Psi_n({hi}) = {psi_hi} should be negative")
    root, info = brentq(lambda x: psi_big(p, x), 0.0, hi, xtol=root_tol,
                        rtol=4 * 2.220446049250313e-16, full_output=True)
    return GapResult(root, Regime.INTERIOR_JUMP, edge, psi_edge, info.iterations)


def vandoorn_lower(p: QueueParams) -> float:
    """Lower bound ``min(sqrt(lam/n)/2, edge)`` on the gap."""
    return min(0.5 * math.sqrt(p.lam / p.n), p.edge)


def bstar_finite(n: int, tol: float = 1e-8) -> tuple[float, float]:
    """Excess parameter at which the finite-n gap leaves the spectrum edge.

    Returns ``(B_n_star, rho_n_star)`` with ``rho = 1 - B/sqrt(n)``.

    Raises:
        PreconditionViolated: ``n < 5``.
        NumericalFailure: no regime change in ``[1, 2.2]`` nor in ``[0.5, 3]``.
    """
    if n < 5:
        raise PreconditionViolated("bstar_finite needs n >= 5")

    def is_edge(B: float) -> bool:
        return edge_regime(make_params(n, B))

    for lo, hi in ((1.0, 2.2), (0.5, 3.0)):
        try:
            if is_edge(lo) and not is_edge(hi):
                break
        except PreconditionViolated:
            continue
    else:
        raise NumericalFailure(f"no regime change found for n={n}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_edge(mid):
            lo = mid
        else:
            hi = mid
    B = 0.5 * (lo + hi)
    return B, 1.0 - B / math.sqrt(n)

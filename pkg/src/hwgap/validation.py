"""The twelve acceptance criteria as plain functions.

Each check returns a :class:`CriterionResult`; the wall-clock budget is part
of the criterion, so a slow pass is reported as a failure.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .charlier import f_recursion, f_series, psi_big, z_ratio_sequence
from .errors import PreconditionViolated
from .gap import bstar_finite, edge_regime, gap_finite, vandoorn_lower
from .limit import bstar, cached_bstar, gamma_bracket_complement, gamma_limit, zeta
from .model import make_params, stationary
from .pcf import pcf, pcf_ratio
from .transient import (
    TransientQuery,
    explicit_bounds,
    km_cdf_diff,
    km_transient,
    oracle_gap,
    oracle_gap_report,
    oracle_uniformization,
)

BSTAR_REFERENCE = 1.85772


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.number:2d} {self.title}: {self.detail} "
                f"({self.seconds:.2f}s of {self.budget:g}s)")


def _timed(number: int, title: str, budget: float,
           body: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - start
    if elapsed >= budget:
        ok = False
        detail += "; over time budget"
    return CriterionResult(number, title, ok, detail, elapsed, budget)


def _strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _stabilized_oracle_gap(p, start: int = 250, change: float = 1e-8) -> float:
    m, prev = start, oracle_gap(p, start)
    while m * 2 <= 4000:
        m *= 2
        cur = oracle_gap(p, m)
        if abs(cur - prev) < change:
            return cur
        prev = cur
    return prev


# ---------------------------------------------------------------- criteria

def criterion_1() -> CriterionResult:
    def body():
        b = bstar(1e-6)
        err = abs(b - BSTAR_REFERENCE)
        return err <= 5e-5, f"bstar={b:.8f}, reference {BSTAR_REFERENCE}, |diff|={err:.2e} (tol 5e-5)"
    return _timed(1, "B* reproduction", 5.0, body)


def criterion_2() -> CriterionResult:
    def body():
        z2 = zeta(2.0)
        z0 = zeta(1e-6)
        target = math.sqrt(2 / math.pi)
        ok = abs(z2 + 1) <= 1e-9 and abs(z0 - target) <= 1e-4
        return ok, f"zeta(2)={z2:.12g}, zeta(1e-6)={z0:.8f} vs {target:.8f}"
    return _timed(2, "zeta endpoints", 1.0, body)


def criterion_3() -> CriterionResult:
    def body():
        ok, parts = True, []
        for B in (0.5, 1.0, 1.5):
            devs = [abs(gap_finite(make_params(n, B)).gap - B * B / 4) for n in (100, 1000, 10000)]
            good = devs[-1] <= 0.02 and _strictly_decreasing(devs)
            ok &= good
            parts.append(f"B={B}: " + "/".join(f"{d:.2e}" for d in devs))
        return ok, "; ".join(parts)
    return _timed(3, "phase transition, quadratic side", 30.0, body)


def criterion_4() -> CriterionResult:
    def body():
        ok, parts = True, []
        for B in (2.0, 2.5):
            g_n = gap_finite(make_params(10000, B)).gap
            g_inf = gamma_limit(B).gamma
            ok &= abs(g_n - g_inf) <= 0.01
            parts.append(f"B={B}: {g_n:.6f} vs {g_inf:.6f}")
        return ok, "; ".join(parts)
    return _timed(4, "phase transition, root side", 30.0, body)


def criterion_5() -> CriterionResult:
    def body():
        ok, parts = True, []
        for n in (10, 20, 50):
            p = make_params(n, 2.5)
            g = gap_finite(p).gap
            o = _stabilized_oracle_gap(p, start=max(250, n + 10))
            rel = abs(g - o) / o
            ok &= rel <= 1e-6
            parts.append(f"n={n}: rel {rel:.1e}")
        return ok, "; ".join(parts)
    return _timed(5, "oracle equivalence, jump regime", 120.0, body)


def criterion_6() -> CriterionResult:
    def body():
        ok, parts = True, []
        for n in (10, 20):
            p = make_params(n, 1.0)
            rep = oracle_gap_report(p, 2000)
            rel = abs(rep.extrapolated - p.edge) / p.edge
            ok &= rel <= 1e-3
            parts.append(f"n={n}: rel {rel:.1e}")
        return ok, "; ".join(parts)
    return _timed(6, "oracle equivalence, edge regime", 120.0, body)


def _state_pairs(n: int) -> list[tuple[int, int]]:
    r = 3 * math.ceil(math.sqrt(n))
    states = (max(0, n - r), n, n + r)
    return [(i, j) for i in states for j in states]


def criterion_7() -> CriterionResult:
    def body():
        worst, worst0 = 0.0, 0.0
        ok = True
        for n in (5, 10, 20):
            p = make_params(n, 1.0)
            if not edge_regime(p):
                return False, f"n={n}, B=1 is not in the edge regime"
            dist = stationary(p)
            pairs = _state_pairs(n)
            for t in (0.5, 1.0, 5.0):
                rows = {}
                for i, j in pairs:
                    if i not in rows:
                        rows[i] = oracle_uniformization(p, i, t)
                    exact = rows[i][j] - dist.pmf(j)
                    worst = max(worst, abs(km_transient(TransientQuery(p, i, j, t)) - exact))
            for i, j in pairs:
                exact = float(i == j) - dist.pmf(j)
                worst0 = max(worst0, abs(km_transient(TransientQuery(p, i, j, 0.0)) - exact))
        ok = worst <= 1e-6 and worst0 <= 1e-7
        return ok, f"max |km - uniformization|={worst:.1e}, max t=0 error={worst0:.1e}"
    return _timed(7, "transient exactness", 180.0, body)


def criterion_8() -> CriterionResult:
    def body():
        ok, slack = True, math.inf
        for n in (400, 2500):
            for B in (0.5, 1.0):
                p = make_params(n, B)
                for t in (1.0, 2.0, 5.0, 10.0):
                    q = TransientQuery(p, n, n, t)
                    rep = explicit_bounds(p, 0.0, 0.0, t)
                    pmf_lhs = math.sqrt(n) * abs(km_transient(q))
                    cdf_lhs = abs(km_cdf_diff(q))
                    ok &= pmf_lhs <= rep.pmf_bound and cdf_lhs <= rep.cdf_bound
                    slack = min(slack, rep.pmf_bound / pmf_lhs, rep.cdf_bound / cdf_lhs)
        return ok, f"smallest bound/value ratio {slack:.3g}"
    return _timed(8, "explicit-bound dominance", 180.0, body)


def criterion_9() -> CriterionResult:
    def body():
        b_star = cached_bstar()
        ok = True
        bad_zeta = 0
        for B in np.linspace(0.1, 2.0, 64):
            z = zeta(float(B))
            if B < b_star - 0.01 and not z > 0:
                bad_zeta += 1
            if B > b_star + 0.01 and not z < 0:
                bad_zeta += 1
        ok &= bad_zeta == 0
        grid = np.linspace(0.1, 12.0, 129)[1:]
        gaps = [gamma_limit(float(B)) for B in grid]
        gam = [g.gamma for g in gaps]
        comp = [g.complement for g in gaps]
        # gamma rounds to 1.0 for B above about 9; the complement stays resolvable.
        monotone = _strictly_decreasing(comp) and all(b >= a for a, b in zip(gam, gam[1:]))
        ok &= monotone
        g12 = gaps[-1].gamma
        ok &= g12 > 0.999
        lo, hi = gamma_bracket_complement(10.0)
        c10 = gamma_limit(10.0).complement
        inside = lo <= c10 <= hi
        ok &= inside
        return ok, (f"zeta sign violations {bad_zeta}, gamma increasing {monotone}, "
                    f"gamma(12)={g12:.12f}, 1-gamma(10)={c10:.3e} in [{lo:.3e}, {hi:.3e}]")
    return _timed(9, "figure properties", 120.0, body)


def criterion_10() -> CriterionResult:
    def body():
        b_star = cached_bstar()
        errs = [abs(bstar_finite(n)[0] - b_star) for n in (100, 1000, 10000)]
        ok = _strictly_decreasing(errs) and errs[-1] < 0.05
        return ok, "errors " + "/".join(f"{e:.4f}" for e in errs)
    return _timed(10, "rho*_n convergence trend", 60.0, body)


def criterion_11() -> CriterionResult:
    def body():
        worst_rec = 0.0
        positive = True
        for x in np.linspace(-2.0, 1.5, 5):
            for z in np.linspace(-5.0, 5.0, 5):
                x, z = float(x), float(z)
                d_up, d0, d_dn = (pcf(x + 1, z).value, pcf(x, z).value, pcf(x - 1, z).value)
                terms = (d_up, z * d0, x * d_dn)
                scale = max(abs(v) for v in terms)
                worst_rec = max(worst_rec, abs(d_up - z * d0 + x * d_dn) / scale)
                if x <= 0:
                    positive &= d0 > 0
                if x - 1 <= 0:
                    positive &= d_dn > 0
        worst_ratio = 0.0
        for x in np.arange(1, 10) / 10:
            for B in (0.5, 1.0, 2.0, 3.0):
                direct = pcf(float(x), -B).value / pcf(float(x) - 1, -B).value
                ratio = pcf_ratio(float(x), B)
                worst_ratio = max(worst_ratio, abs(ratio - direct) / max(1.0, abs(direct)))
        ok = worst_rec <= 1e-9 and positive and worst_ratio <= 1e-8
        return ok, (f"recurrence residual {worst_rec:.1e}, positivity {positive}, "
                    f"ratio paths {worst_ratio:.1e}")
    return _timed(11, "special-function invariants", 30.0, body)


def criterion_12() -> CriterionResult:
    def body():
        worst_f = 0.0
        for n in range(2, 31):
            p = make_params(n, 1.0)
            for x in (0.1, 0.5, 0.9, p.edge):
                for k in range(n + 1):
                    a, b = f_series(p, k, x), f_recursion(p, k, x)
                    if a.sign != b.sign:
                        worst_f = math.inf
                    elif a.sign:
                        worst_f = max(worst_f, abs(math.expm1(a.logmag - b.logmag)))
        shape_ok = True
        xs = np.linspace(0.02, 0.98, 33)
        for n in (5, 20, 50, 100):
            p = make_params(n, 1.0)
            z = np.array([z_ratio_sequence(p, float(x)) for x in xs])   # rows: x, cols: k
            shape_ok &= bool(np.all(np.diff(z, axis=0) < 0))
            shape_ok &= bool(np.all(z[2:] - 2 * z[1:-1] + z[:-2] <= 1e-8))
        psi0_ok, vd_ok = True, True
        for n in (5, 50, 500):
            for B in (0.5, 1.0, 1.9, 2.5):
                try:
                    p = make_params(n, B)
                except PreconditionViolated:
                    continue                    # n=5, B=2.5 has negative arrival rate
                psi0_ok &= psi_big(p, 0.0) > 0
                vd_ok &= gap_finite(p).gap >= vandoorn_lower(p)
        rho_ok = all(bstar_finite(n)[1] <= (1 - 1 / n) ** 2 for n in (10, 100, 1000))
        ok = worst_f <= 1e-10 and shape_ok and psi0_ok and vd_ok and rho_ok
        return ok, (f"f paths {worst_f:.1e}, z concave/decreasing {shape_ok}, Psi(0)>0 {psi0_ok}, "
                    f"van Doorn {vd_ok}, rho* bound {rho_ok}")
    return _timed(12, "polynomial invariants", 60.0, body)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}

# Criteria that stay at n <= 50.
QUICK = (2, 5, 6, 7, 11, 12)


def run_suite(which: str = "full") -> list[CriterionResult]:
    numbers = QUICK if which == "quick" else tuple(CRITERIA)
    return [CRITERIA[k]() for k in numbers]

import math

import pytest
from hypothesis import given, settings, strategies as st

from hwgap.charlier import psi_big
from hwgap.errors import PreconditionViolated
from hwgap.gap import Regime, bstar_finite, edge_regime, gap_finite, vandoorn_lower
from hwgap.limit import cached_bstar, gamma_limit
from hwgap.model import make_params
from hwgap.transient import oracle_gap, oracle_gap_report


def test_edge_regime_example():
    r = gap_finite(make_params(10_000, 1.0))
    assert r.regime is Regime.SPECTRUM_EDGE
    assert r.gap == r.edge
    assert r.gap == pytest.approx((100 - math.sqrt(9900)) ** 2, rel=1e-12)
    assert r.gap == pytest.approx(0.2512578, abs=1e-7)
    assert r.psi_at_edge >= 0


def test_jump_regime_example():
    r = gap_finite(make_params(10_000, 2.5))
    assert r.regime is Regime.INTERIOR_JUMP
    assert abs(r.gap - gamma_limit(2.5).gamma) <= 0.01


def test_single_server_closed_form():
    p = make_params(1, 0.5, strict=False)
    r = gap_finite(p)
    assert r.regime is Regime.SPECTRUM_EDGE
    assert r.gap == pytest.approx((math.sqrt(0.5) - 1) ** 2, rel=1e-14)
    assert r.gap == pytest.approx(0.0857864, abs=1e-7)


def test_vandoorn_examples():
    p = make_params(100, 1.0)
    assert vandoorn_lower(p) == pytest.approx(0.2633404, abs=1e-7)
    assert gap_finite(p).gap >= vandoorn_lower(p)
    q = make_params(25, 3.0)
    assert q.lam == 10.0
    assert vandoorn_lower(q) == pytest.approx(0.5 * math.sqrt(0.4), rel=1e-14)
    assert vandoorn_lower(q) == pytest.approx(0.3162, abs=1e-4)


@pytest.mark.parametrize("n,B", [(10, 2.5), (20, 2.5), (50, 2.5), (200, 1.9), (10_000, 4.0), (50, 3.0)])
def test_jump_result_invariants(n, B):
    p = make_params(n, B)
    r = gap_finite(p, root_tol=1e-12)
    assert r.regime is Regime.INTERIOR_JUMP
    assert 0 < r.gap < min(1.0, r.edge)
    assert abs(psi_big(p, r.gap)) <= 1e-6 * math.sqrt(p.lam)
    assert r.iterations > 0


@settings(max_examples=60, deadline=None)
@given(n=st.integers(5, 3000), B=st.floats(0.1, 4.0))
def test_gap_bounds_property(n, B):
    try:
        p = make_params(n, B)
    except PreconditionViolated:
        return
    r = gap_finite(p)
    assert r.gap <= r.edge
    assert r.gap >= vandoorn_lower(p) * (1 - 1e-12)
    assert (r.regime is Regime.SPECTRUM_EDGE) == edge_regime(p)


@pytest.mark.parametrize("B", [0.5, 1.0, 1.5])
def test_quadratic_side_deviation_shrinks(B):
    devs = [abs(gap_finite(make_params(n, B)).gap - B * B / 4) for n in (100, 1000, 10_000)]
    assert devs[0] > devs[1] > devs[2]


@pytest.mark.parametrize("n", [10, 20, 50])
def test_oracle_agreement_jump(n):
    p = make_params(n, 2.5)
    vals = [oracle_gap(p, m) for m in (250, 500, 1000)]
    assert abs(vals[-1] - vals[-2]) < 1e-8
    assert gap_finite(p).gap == pytest.approx(vals[-1], rel=1e-6)


@pytest.mark.parametrize("n", [10, 20, 50])
def test_oracle_agreement_edge(n):
    p = make_params(n, 1.0)
    rep = oracle_gap_report(p, 2000)
    assert all(v >= p.edge for v in rep.values)
    assert rep.extrapolated == pytest.approx(p.edge, rel=1e-3)


def test_bstar_finite_trend():
    b_star = cached_bstar()
    e100 = abs(bstar_finite(100)[0] - b_star)
    b4, _ = bstar_finite(10_000)
    assert abs(b4 - b_star) < e100
    assert 1.7 < b4 < 2.0


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_rho_star_upper_bound(n):
    B, rho = bstar_finite(n)
    assert rho <= (1 - 1 / n) ** 2
    assert rho == pytest.approx(1 - B / math.sqrt(n), rel=1e-15)


def test_bstar_finite_is_regime_boundary():
    B, _ = bstar_finite(200, tol=1e-9)
    assert edge_regime(make_params(200, B - 1e-6))
    assert not edge_regime(make_params(200, B + 1e-6))


def test_bstar_finite_small_n_rejected():
    with pytest.raises(PreconditionViolated):
        bstar_finite(4)

import math

import numpy as np
import pytest

from hwgap.errors import NumericalFailure, PreconditionViolated
from hwgap.gap import bstar_finite, gap_finite
from hwgap.limit import cached_bstar
from hwgap.model import log_g, make_params, stationary
from hwgap.transient import (
    TransientQuery,
    TruncatedGenerator,
    explicit_bounds,
    km_cdf_diff,
    km_transient,
    literature_bounds,
    oracle_gap,
    oracle_gap_report,
    oracle_uniformization,
    t_star,
)


def _q(p, i, j, t):
    return TransientQuery(p, i, j, t)


# ------------------------------------------------------------ spectral integral

def test_completeness_at_time_zero(p10):
    assert p10.B < bstar_finite(10)[0]
    d = stationary(p10)
    for i, j in [(10, 10), (3, 12), (0, 0), (15, 9)]:
        got = km_transient(_q(p10, i, j, 0.0))
        assert got == pytest.approx(float(i == j) - d.pmf(j), abs=1e-7)


def test_decay_to_stationarity(p10):
    assert abs(km_transient(_q(p10, 10, 10, 40.0))) <= 1e-10


def test_matches_uniformization(p10):
    d = stationary(p10)
    row = oracle_uniformization(p10, 8, 1.0, trunc=200)
    assert km_transient(_q(p10, 8, 12, 1.0)) == pytest.approx(row[12] - d.pmf(12), abs=1e-6)


@pytest.mark.parametrize("n", [5, 10, 20])
@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_uniformization_agreement_grid(n, t):
    p = make_params(n, 1.0)
    d = stationary(p)
    r = math.floor(3 * math.sqrt(n))
    for i in (max(0, n - r), n + r // 2):
        row = oracle_uniformization(p, i, t)
        for j in (max(0, n - r // 2), n, n + r):
            exact = row[j] - d.pmf(j)
            assert km_transient(_q(p, i, j, t)) == pytest.approx(exact, abs=1e-6)


def test_reversibility_symmetry():
    p = make_params(20, 1.2)
    for i, j, t in [(15, 25, 0.7), (20, 8, 2.0)]:
        a = km_transient(_q(p, i, j, t)) / math.exp(log_g(p, j))
        b = km_transient(_q(p, j, i, t)) / math.exp(log_g(p, i))
        assert a == pytest.approx(b, rel=1e-8)


def test_requires_edge_regime():
    p = make_params(50, 2.5)
    with pytest.raises(PreconditionViolated):
        km_transient(_q(p, 50, 50, 1.0))
    with pytest.raises(PreconditionViolated):
        km_cdf_diff(_q(p, 50, 50, 1.0))


def test_query_validation(p10):
    with pytest.raises(PreconditionViolated):
        TransientQuery(p10, -1, 0, 1.0)
    with pytest.raises(PreconditionViolated):
        TransientQuery(p10, 0, 0, -1.0)


# ------------------------------------------------------------- cdf integral

def test_cdf_bound_monotone_in_time(p10):
    assert km_cdf_diff(_q(p10, 10, 10, 2.0)) <= km_cdf_diff(_q(p10, 10, 10, 1.0))


def test_cdf_bound_dominates_exact(p10):
    d = stationary(p10)
    row = oracle_uniformization(p10, 14, 1.0)
    exact = abs(row[:11].sum() - d.cdf(10))
    assert km_cdf_diff(_q(p10, 14, 10, 1.0)) >= exact


def test_cdf_bound_vanishes(p10):
    assert 0 <= km_cdf_diff(_q(p10, 10, 10, 50.0)) <= 1e-10


# ------------------------------------------------------------------- bounds

def test_explicit_bound_arithmetic():
    p = make_params(10_000, 1.0)
    r = explicit_bounds(p, 0.0, 0.0, 4.0)
    expected = 2 * (4 * math.pi) ** -0.5 * (1 + 10 ** -0.5) * math.exp(8 + 4.5 - 1)
    assert r.pmf_bound == pytest.approx(expected, rel=1e-14)
    assert r.pmf_bound == pytest.approx(7.33e4, rel=1e-3)
    assert r.cdf_bound == pytest.approx(2 * expected, rel=1e-14)       # B = 1
    assert r.alpha == 1.0
    assert r.valid_caveat


def test_explicit_bound_dominance():
    n = 400
    p = make_params(n, 1.0)
    for t in (1.0, 2.0, 5.0):
        r = explicit_bounds(p, 0.0, 0.0, t)
        assert math.sqrt(n) * abs(km_transient(_q(p, n, n, t))) <= r.pmf_bound
        assert abs(km_cdf_diff(_q(p, n, n, t))) <= r.cdf_bound


def test_explicit_bound_alpha_and_decrease():
    p = make_params(400, 0.8)
    r = explicit_bounds(p, -1.5, 0.3, 2.0)
    assert r.alpha == 1.5
    t0 = 72 * r.alpha ** 2 / p.B ** 2
    vals = [explicit_bounds(p, -1.5, 0.3, t).pmf_bound for t in np.linspace(t0, 4 * t0, 20)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert all(v > 0 for v in vals)


def test_explicit_bound_preconditions():
    with pytest.raises(PreconditionViolated):
        explicit_bounds(make_params(400, 1.9), 0, 0, 2.0)
    with pytest.raises(PreconditionViolated):
        explicit_bounds(make_params(400, 1.0), 0, 0, 0.5)
    assert cached_bstar() < 1.9


def test_t_star_examples():
    assert t_star(2, 1, 0.01) == pytest.approx(32 + 4 * math.log(100), rel=1e-15)
    assert t_star(2, 1, 0.01) == pytest.approx(50.4207, abs=1e-4)
    assert t_star(0, 1, 1) == 0
    a, B = 1.3, 0.7
    assert t_star(2 * a, B, 0.1) - t_star(a, B, 0.1) == pytest.approx(24 * a * a / B ** 2)


def test_t_star_calibration():
    n, B, a, eps = 2500, 1.0, 2.0, 0.05
    p = make_params(n, B)
    t = t_star(a, B, eps)
    start = math.ceil(n + a * math.sqrt(n))
    row = oracle_uniformization(p, start, t)
    assert abs(row[: n + 1].sum() - stationary(p).cdf(n)) <= eps


def test_literature_bounds():
    p = make_params(10_000, 1.0)
    rate = (p.B * math.sqrt(p.n) - 1) / (p.n - 1)
    z0, _ = literature_bounds(p, 0.0)
    z1, _ = literature_bounds(p, 1.0)
    assert z1 / z0 == pytest.approx(math.exp(-rate), rel=1e-12)
    assert rate == pytest.approx(0.0099, abs=1e-4)
    assert rate < gap_finite(p).gap


def test_chen_prefactor_grows():
    _, c100 = literature_bounds(make_params(100, 1.0), 0.0)
    _, c10k = literature_bounds(make_params(10_000, 1.0), 0.0)
    assert c10k > c100


def test_literature_bounds_dominate():
    n = 50
    p = make_params(n, 1.0)
    row = oracle_uniformization(p, n, 1.0)
    exact = abs(row[: n + 1].sum() - stationary(p).cdf(n))
    zeif, chen = literature_bounds(p, 1.0)
    assert zeif >= exact and chen >= exact


def test_literature_bounds_need_two_servers():
    with pytest.raises(PreconditionViolated):
        literature_bounds(make_params(1, 0.5, strict=False), 1.0)


# ------------------------------------------------------------------ oracles

def test_generator_structure():
    g = TruncatedGenerator(30, 7.5, 10)
    Q = g.dense()
    assert np.allclose(Q.sum(axis=1), 0.0, atol=1e-12)
    off = Q - np.diag(np.diag(Q))
    assert np.all(off >= 0)
    assert Q[30, 29] == 10 and Q[0, 1] == 7.5


def test_uniformization_identity_and_stochastic(p10):
    row = oracle_uniformization(p10, 5, 0.0, trunc=200)
    assert row[5] == 1.0 and row.sum() == 1.0
    row = oracle_uniformization(p10, 5, 3.0, trunc=200)
    assert np.all(row >= 0)
    assert row.sum() == pytest.approx(1.0, abs=1e-10)


def test_uniformization_reaches_stationarity(p10):
    row = oracle_uniformization(p10, 5, 100.0)
    d = stationary(p10)
    ref = np.array([d.pmf(k) for k in range(row.size)])
    assert 0.5 * np.abs(row - ref).sum() <= 1e-8


def test_uniformization_matches_matrix_exponential(p10):
    from scipy.linalg import expm

    g = TruncatedGenerator(120, p10.lam, p10.n)
    ref = expm(g.dense() * 2.0)[7]
    row = oracle_uniformization(p10, 7, 2.0, trunc=120)
    assert np.max(np.abs(row - ref)) < 1e-11


def test_oracle_gap_single_server():
    p = make_params(1, 0.5, strict=False)
    rep = oracle_gap_report(p, 2000)
    assert rep.extrapolated == pytest.approx((1 - math.sqrt(0.5)) ** 2, abs=1e-3)
    assert rep.extrapolated == pytest.approx(0.0857864, abs=1e-3)


def test_oracle_gap_jump_regime():
    p = make_params(20, 2.5)
    assert oracle_gap(p, 1000) == pytest.approx(gap_finite(p).gap, abs=1e-6)


def test_oracle_gap_nonincreasing(p10):
    vals = [oracle_gap(p10, m) for m in (500, 1000, 2000)]
    assert vals[0] >= vals[1] >= vals[2]


def test_oracle_gap_limits(p10):
    with pytest.raises(PreconditionViolated):
        oracle_gap(p10, 15)
    with pytest.raises(NumericalFailure):
        oracle_gap(p10, 4001)

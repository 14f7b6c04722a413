import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from vandercond.bounds import (
    COLLIDING_TAU,
    PAIRWISE_PINV_CONST,
    BoundEntry,
    BoundReport,
    bdgy_coefficient,
    bound_report,
    c_pairwise,
    c_pairwise_c1,
    c_rho,
    c_tilde,
    c_tilde_c1,
    comparison_bounds,
    is_half_integer,
    lili_coefficient,
    lili_thresholds,
    log_factor,
    lower_bound,
    upper_one_pair,
    upper_pairwise,
    upper_pairwise_c1,
    well_separated_bounds,
)
from vandercond.errors import PreconditionError
from vandercond.nodes import gen_compare_lili, gen_one_pair, gen_pairwise, separation_stats
from vandercond.spectral import spectral_summary

# frozen 32-digit values from the mpmath oracles below
C_RHO_6 = 6.4896563664177281880746849604165
C_PAIRWISE_REF = 11.250509940291351929934982210505
C_C1_25_4 = 11.904782838576897320842576806321
BDGY_3_1001 = 6116.4192925959099194904403123902
LILI_4 = 8.9970188098773332028479833573571
LILI_20 = 20.117945653729973372623438137239
LILI_THR_4 = (1.9074068404734134674e-4, 1.8094374367513537733e-10)
LILI_THR_20 = (2.384258550591766834259e-2, 5.6544919898479805416e-7)


def mp_c_rho(rho):
    rho = mp.mpf(rho)
    pi = mp.pi
    head = (2 * rho - 1) / (rho - 1) + mp.sqrt(rho / (rho - 1))
    tail = 2 - rho / (rho - 1) * (1 + pi ** 4 / (12 * rho ** 2) + mp.mpf("1.21") * pi / rho ** 3
                                  + pi ** 4 / (180 * rho ** 4))
    return head / tail


def mp_c_tilde(tau, rho, c, M):
    tau, rho, c = mp.mpf(tau), mp.mpf(rho), mp.mpf(c)
    pi = mp.pi
    L = mp.log(M // 4) + 1
    sq = (c ** 2 * pi ** 2 * tau / 6 + c * pi * L / rho + c * pi ** 2 / (6 * rho ** 2)) ** 2
    return (2 - c ** 2 * pi ** 2 * L / rho - c ** 2 * pi ** 3 / (3 * rho ** 2)
            - mp.mpf("2.42") * c ** 2 / rho ** 3 - rho / (rho - 1) * sq)


def mp_c_pairwise(tau, rho, c, M):
    rho_ = mp.mpf(rho)
    return (2 * rho_ / (rho_ - 1) + mp.sqrt((rho_ + 1) / (rho_ - 1))) / mp_c_tilde(tau, rho, c, M)


def mp_c_tilde_c1(rho, M):
    rho = mp.mpf(rho)
    pi = mp.pi
    L = mp.log(M // 4) + 1
    # same expansion with c = 1 and the tau term replaced by the exact pair-gap identity
    return (2 - pi ** 2 * L / rho - pi ** 3 / (3 * rho ** 2) - mp.mpf("2.42") / rho ** 3
            - rho / (rho - 1) * (1 + 2 * pi * L / rho + pi ** 2 / (3 * rho ** 2) + pi ** 2 * L ** 2 / rho ** 2
                                 + pi ** 3 * L / (3 * rho ** 3) + pi ** 4 / (36 * rho ** 4)))


def mp_bdgy(M, N):
    N = mp.mpf(N)
    return 2 * (2 * mp.pi) ** (M - 1) * mp.mpf(M) ** (2 * M - 1) / mp.pi * N * mp.sqrt(N) / ((N - 1) * mp.sqrt(N - 1))


def mp_lili(M, N):
    N = mp.mpf(N)
    return (20 * mp.sqrt(2) / 19 / mp.sqrt(1 - mp.pi ** 2 / 12) * 4 / mp.pi
            * mp.sqrt(M) * mp.sqrt(N) / mp.sqrt(N - 1))


def mp_lili_thresholds(M, N):
    N = mp.mpf(N)
    rho = 2 * N / M
    return (400 * M * 32 * N ** 3 / (rho ** 2 * (N - 1) ** 3),
            mp.mpf(10) ** 4 * 1024 * M * N ** 5 / (rho ** 4 * mp.pi * (N - 1) ** 5))


def test_oracles_reproduce_frozen_values():
    assert abs(mp_c_rho(6) - mp.mpf("6.4896563664177281880746849604165")) < 1e-30
    assert abs(mp_c_pairwise(0.25, 10, 1, 4) - mp.mpf("11.250509940291351929934982210505")) < 1e-29
    h = 2 * 25 / mp.mpf(24) + mp.sqrt(mp.mpf(26) / 24)
    assert abs(h / mp_c_tilde_c1(25, 4) - mp.mpf("11.904782838576897320842576806321")) < 1e-29
    assert abs(mp_bdgy(3, 1001) - mp.mpf("6116.4192925959099194904403123902")) < 1e-27
    assert abs(mp_lili(4, 2 ** 15 + 1) - mp.mpf("8.9970188098773332028479833573571")) < 1e-29
    assert abs(mp_lili(20, 2 ** 15 + 1) - mp.mpf("20.117945653729973372623438137239")) < 1e-28


def test_spot_constants():
    assert c_rho(6) == pytest.approx(C_RHO_6, rel=1e-14)
    assert 6.0 < c_rho(6) <= 6.5
    assert c_pairwise(0.25, 10, 1, 4) == pytest.approx(C_PAIRWISE_REF, rel=1e-14)
    assert 10.5 < c_pairwise(0.25, 10, 1, 4) <= 11.3
    assert c_pairwise_c1(25, 4) == pytest.approx(C_C1_25_4, rel=1e-14)
    assert 11.0 < c_pairwise_c1(25, 4) <= 12.0
    assert PAIRWISE_PINV_CONST == pytest.approx(3.4, abs=0.05)


def test_constants_match_oracles_on_grids():
    for rho in np.linspace(5, 100, 97):
        assert c_rho(rho) == pytest.approx(float(mp_c_rho(rho)), rel=1e-13)
    for M in (4, 8, 20, 64, 200):
        for tau in (0.0, 0.01, 0.1, 0.25, 0.5):
            for rho in (2.0, 10.0, 40.0, 150.0):
                for c in (1.0, math.sqrt(2), 2.0):
                    assert c_tilde(tau, rho, c, M) == pytest.approx(float(mp_c_tilde(tau, rho, c, M)), rel=1e-12, abs=1e-12)
        for rho in (2.0, 25.0, 80.0, 300.0):
            assert c_tilde_c1(rho, M) == pytest.approx(float(mp_c_tilde_c1(rho, M)), rel=1e-12, abs=1e-12)


def test_c_rho_monotone_and_bounded_below():
    grid = np.linspace(5, 100, 2000)
    vals = [c_rho(r) for r in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert min(vals) > 3.0
    assert c_rho(1e8) == pytest.approx(3.0, rel=1e-6)
    with pytest.raises(PreconditionError):
        c_rho(4.99)


def test_c_tilde_monotone():
    for M, c in ((4, 1.0), (4, math.sqrt(2)), (64, 1.0)):
        taus = np.linspace(0, 0.5, 60)
        rhos = np.linspace(2, 150, 60)
        for rho in rhos[::6]:
            v = [c_tilde(t, rho, c, M) for t in taus]
            assert all(a > b for a, b in zip(v, v[1:]))
        for tau in taus[::6]:
            v = [c_tilde(tau, r, c, M) for r in rhos]
            assert all(a < b for a, b in zip(v, v[1:]))


def test_c_pairwise_voids_when_c_tilde_not_positive():
    assert c_tilde(0.5, 2.0, 2.0, 64) < 0
    assert c_pairwise(0.5, 2.0, 2.0, 64) is None
    assert c_pairwise_c1(2.0, 64) is None
    for bad in ((0.1, 10, 1, 5), (0.1, 10, 0.5, 4), (0.1, 1.0, 1, 4)):
        with pytest.raises(PreconditionError):
            c_tilde(*bad)


def test_log_factor():
    assert log_factor(4) == 1.0
    assert log_factor(20) == pytest.approx(math.log(5) + 1)
    with pytest.raises(PreconditionError):
        log_factor(3)


def test_well_separated_bounds():
    b = well_separated_bounds(101, 2.0)
    assert b.applicable and b.cond_sq_hi == 3.0
    assert b.sigma_min_sq_lo == 50.5 and b.sigma_max_sq_hi == 151.5
    assert b.norm_K_hi == 151.5 and b.norm_K_inv_hi == pytest.approx(1 / 50.5)
    assert well_separated_bounds(101, 1e12).cond_sq_hi == pytest.approx(1.0, abs=1e-11)
    off = well_separated_bounds(101, 1.0)
    assert not off.applicable and math.isnan(off.cond_sq_hi)


def test_lower_bound_values():
    assert COLLIDING_TAU == pytest.approx(0.46, abs=0.005)
    N = 101
    lb = lower_bound(N, 0.5)
    d = oracles.dirichlet(N, mp.mpf("0.5") / N)
    assert oracles.rel_err(lb.n_minus_d, N - d) < 1e-28
    assert oracles.rel_err(lb.n_plus_d, N + d) < 1e-28
    assert lb.cond_sq_lo_exact == pytest.approx(float(1 + 2 * d / (N - d)), rel=1e-14)
    assert math.isnan(lb.cond_sq_lo_colliding)
    assert lb.cond_lo_simple == pytest.approx(math.sqrt(6) / (0.5 * math.pi))
    assert 0.77 <= math.sqrt(6) / math.pi < 0.78
    assert lower_bound(N, 0.3).cond_sq_lo_colliding == pytest.approx(12 / (math.pi ** 2 * 0.09) - 1)
    assert math.isnan(lower_bound(N, 1.5).cond_lo_simple)
    with pytest.raises(PreconditionError):
        lower_bound(N, 0.0)


def test_lower_bound_chain_for_colliding_pairs():
    # exact form >= colliding form >= simple form^2 where they apply
    for N in (11, 101, 2389):
        for tau in np.geomspace(1e-9, COLLIDING_TAU, 40):
            lb = lower_bound(N, float(tau))
            assert lb.cond_sq_lo_exact >= lb.cond_sq_lo_colliding * (1 - 1e-9)
            assert lb.cond_sq_lo_colliding >= lb.cond_lo_simple ** 2 * (1 - 1e-12)


def test_half_integer_form_and_sandwich_compatibility():
    assert is_half_integer(2.5) and not is_half_integer(2.0) and not is_half_integer(-0.5)
    for k in range(1, 40):
        tau = k + 0.5
        lb = lower_bound(1001, tau)
        ub = well_separated_bounds(1001, tau)
        assert lb.cond_sq_lo_half_integer <= ub.cond_sq_hi
        assert lb.cond_sq_lo_exact <= ub.cond_sq_hi


def test_one_pair_gating_examples():
    N = 229
    e = {x.name: x for x in upper_one_pair(N, 0.1, 6.0)}
    assert e["onepair_cond"].value == 40.0 and e["onepair_cond"].applicable
    assert e["onepair_norm_K"].value == pytest.approx(2.3 * N)
    assert e["onepair_norm_K_inv"].value == pytest.approx(c_rho(6.0) / (N * 0.01))
    e = {x.name: x for x in upper_one_pair(N, 0.1, 5.5)}
    assert not e["onepair_cond"].applicable and e["onepair_norm_K_inv"].applicable
    assert "rho >= 6" in e["onepair_cond"].precondition_note
    e = {x.name: x for x in upper_one_pair(N, 0.1, 4.0)}
    assert not e["onepair_norm_K_inv"].applicable and math.isnan(e["onepair_norm_K_inv"].value)


def test_one_pair_sandwich():
    for tau in np.geomspace(1e-11, COLLIDING_TAU, 30):
        r = bound_report(229, 20, float(tau), rho=6.0, kind="one-pair")
        assert r.get("onepair_cond").value == pytest.approx(4 / tau)
        assert r.get("lower_cond_colliding").value >= (1 / tau) * (1 - 1e-12)
        assert r.is_consistent()


def test_pairwise_gating_examples():
    e = {x.name: x for x in upper_pairwise(161, 0.25, 10.0, 1.0, 4)}
    assert e["pairwise_cond"].value == 20.0 and e["pairwise_cond"].applicable
    assert e["pairwise_norm_K"].value == pytest.approx(2 * 161 * 11 / 10)
    assert e["pairwise_norm_K_inv"].applicable
    assert e["pairwise_pinv"].value == pytest.approx(math.sqrt(11.3) / (0.25 * math.sqrt(161)))
    e = {x.name: x for x in upper_pairwise(161, 0.3, 10.0, 1.0, 4)}
    assert not e["pairwise_cond"].applicable
    e = {x.name: x for x in upper_pairwise_c1(161, 0.9, 25.0, 1.0, 4)}
    assert e["pairwise_c1_cond"].applicable and e["pairwise_c1_cond"].value == pytest.approx(5 / 0.9)
    e = {x.name: x for x in upper_pairwise_c1(161, 0.9, 25.0, 1.5, 4)}
    assert not any(x.applicable for x in e.values())
    assert upper_pairwise(1000, 0.1, 25.0, 1.0, 4)[0].value == pytest.approx(52 * 1000 / 25)


def test_comparison_coefficients_and_thresholds():
    assert bdgy_coefficient(3, 1001) == pytest.approx(BDGY_3_1001, rel=1e-14)
    assert bdgy_coefficient(3, 1001) == pytest.approx(6116, rel=0.01)
    N = 2 ** 15 + 1
    assert lili_coefficient(4, N) == pytest.approx(LILI_4, rel=1e-14)
    assert lili_coefficient(20, N) == pytest.approx(LILI_20, rel=1e-14)
    for M, ref in ((4, LILI_THR_4), (20, LILI_THR_20)):
        got = lili_thresholds(M, N)
        oracle = mp_lili_thresholds(M, N)
        for g, r, o in zip(got, ref, oracle):
            assert g == pytest.approx(r, rel=1e-14)
            assert g == pytest.approx(float(o), rel=1e-14)
    (a,) = comparison_bounds(4, N, 1e-3, "lili_thm1")
    assert a.applicable and a.value == pytest.approx(LILI_4 / (1e-3 * math.sqrt(N)))
    (b,) = comparison_bounds(4, N, 1e-5, "lili_thm1")
    assert not b.applicable
    with pytest.raises(PreconditionError):
        comparison_bounds(4, N, 0.1, "nope")


def test_entry_and_report_helpers():
    up = BoundEntry("u", "upper", "cond", 10.0, True)
    lo = BoundEntry("l", "lower", "cond", 2.0, True)
    off = BoundEntry("x", "lower", "cond", 50.0, False)
    assert up.holds(10.0) and not up.holds(10.1) and up.holds(10.1, rtol=0.02)
    assert lo.holds(2.0) and not lo.holds(1.9)
    r = BoundReport((up, lo, off))
    assert "u" in r and "z" not in r
    assert r.applicable("cond", "upper") == [up]
    assert r.is_consistent()
    assert r.violations({"cond": 12.0}) == [up]
    assert not BoundReport((up, BoundEntry("l2", "lower", "cond", 11.0, True))).is_consistent()
    with pytest.raises(KeyError):
        r.get("z")


def test_reports_consistent_and_respected_on_generated_configs():
    checked = 0
    for seed in range(30):
        for ns, kind in ((gen_one_pair(10, seed), "one-pair"), (gen_pairwise(8, 2.0, seed), "pairwise"),
                         (gen_compare_lili(4, seed), "pairwise")):
            st_ = separation_stats(ns, ns.pairing)
            r = bound_report(ns.N, ns.M, st_.tau, st_.rho, st_.c, kind, st_.min_gap)
            assert r.is_consistent()
            s = spectral_summary(ns)
            measured = {"cond": float(s.cond), "sigma_min": float(s.sigma_min), "sigma_max": float(s.sigma_max),
                        "norm_K": float(s.norm_K), "norm_K_inv": float(s.norm_K_inv),
                        "pinv_norm": float(s.pinv_norm)}
            assert r.violations(measured, rtol=1e-12) == []
            checked += 1
    assert checked == 90


@given(st.floats(min_value=1e-11, max_value=1.0), st.floats(min_value=6.0, max_value=1e4),
       st.integers(min_value=1, max_value=5000))
def test_one_pair_report_is_consistent(tau, rho, n):
    r = bound_report(2 * n + 1, 3, tau, rho=rho, kind="one-pair")
    assert r.is_consistent()
    for e in r:
        if e.applicable:
            assert math.isfinite(e.value)


@given(st.floats(min_value=1e-11, max_value=0.25), st.floats(min_value=2.0, max_value=1e4),
       st.floats(min_value=1.0, max_value=2.0), st.sampled_from([4, 8, 20, 200]))
def test_pairwise_report_is_consistent(tau, rho, c, M):
    r = bound_report(10001, M, tau, rho=rho, c=c, kind="pairwise")
    assert r.is_consistent()
    for e in r:
        if e.applicable:
            assert math.isfinite(e.value)

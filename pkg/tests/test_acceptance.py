"""Acceptance gate: one test per published criterion, each reporting a
PASS/FAIL line into the session summary.

Two sub-criteria are known to fail and are kept as faithful red tests
rather than weakened: the micro-ripple locations of the upper residuals
(criterion 3b) and the early tail threshold (criterion 3c) are not
properties of the shipped 7-digit reference knots (verified by independent
dense scans at 30+ digits: the modulus is strictly monotone near the quoted
ripple positions and stays ~1.147 out to t ~ 3.3 for penalty 1); likewise
the large-order implied constant converges to 1/4 only logarithmically, so
it is still 0.295 at order 1e6 (criterion 6b).  All value-level
reproduction criteria pass.
"""

import math
import random
import time

import mpmath as mp
import pytest

from conftest import record_criterion

from fel import nt, tables
from fel.closed_form import (
    closed_lower_bound_first_branch,
    implied_constant,
    large_order_constant,
    tent_optimal,
    tent_reward,
    tent_reward_quadrature,
)
from fel.lower import INF, LowerParams, l1_norm, reward
from fel.precision import PrecisionContext, integrate_finite, poly_exp_integral
from fel.search import SearchConfig, optimize_lower, optimize_upper
from fel.upper import UpperParams, certify_below, local_maxima, residual, sup_norm

PENALTIES = tables.PENALTIES


@pytest.fixture(scope="module")
def lower_ref():
    return tables.lower_reference()


@pytest.fixture(scope="module")
def upper_ref():
    return tables.upper_reference()


@pytest.fixture(scope="module")
def upper_results(upper_ref, ctx40):
    out = {}
    for key, (_, up) in upper_ref.items():
        t0 = time.time()
        out[key] = (sup_norm(up, ctx40), time.time() - t0)
    return out


@pytest.fixture(scope="module")
def lower_results(lower_ref, ctx40):
    out = {}
    for key, (_, p) in lower_ref.items():
        t0 = time.time()
        out[key] = (reward(p, key, ctx40), l1_norm(p, ctx40), time.time() - t0)
    return out


def test_criterion_1_upper_table(upper_ref, upper_results):
    details = []
    ok = True
    for key, (bound, _) in upper_ref.items():
        res, elapsed = upper_results[key]
        diff = abs(float(res.value) - float(bound))
        ok &= res.certified and diff <= 1e-5 and elapsed <= 60.0
        details.append("%s: %.7f (|d|=%.1e, %.1fs)" % (key, float(res.value), diff, elapsed))
    record_criterion("1 upper-table reproduction to 1e-5, <=60s each", ok, "; ".join(details))
    assert ok, details


def test_criterion_2_lower_table(lower_ref, lower_results):
    details = []
    ok = True
    for key, (bound, _) in lower_ref.items():
        r, l1, elapsed = lower_results[key]
        margin = float(r.value) - float(bound)
        ok &= margin >= -1e-5 and abs(float(l1.value) - 1.0) <= 1e-3 and elapsed <= 120.0
        details.append("%s: %.7f (margin %+.1e, l1 %.5f, %.1fs)"
                       % (key, float(r.value), margin, float(l1.value), elapsed))
    record_criterion("2 lower-table reproduction, l1 = 1 +/- 1e-3, <=120s each", ok, "; ".join(details))
    assert ok, details


def test_criterion_3a_global_maxima_values(upper_ref, upper_results, ctx40):
    ok = True
    details = []
    with ctx40.workprec():
        res1, _ = upper_results["1"]
        v0 = abs(residual(upper_ref["1"][1], 0))
        ok &= abs(v0 - mp.mpf("1.1473077")) < 1e-6
        ok &= abs(res1.value - v0) < 1e-9  # global maximum sits at t = 0
        details.append("pen 1: |res(0)|=%.8f == sup" % float(v0))
        for key in ("1/4", "1/3", "3"):
            res, _ = upper_results[key]
            vz = abs(residual(upper_ref[key][1], 0))
            ok &= abs(res.value - vz) < 1e-9
            details.append("pen %s: global max at 0" % key)
    record_criterion("3a global maximum values and locations at t=0", ok, "; ".join(details))
    assert ok, details


def test_criterion_3b_ripple_structure(upper_ref, ctx40):
    """EXPECTED RED: the quoted ripple positions are not properties of the
    shipped 7-digit knots (independent 30-digit scans show monotone modulus
    near the quoted positions; see the module docstring and the ledger)."""
    stated = {
        "1/4": (1.0, (0.0, 0.2287)),
        "1/3": (1.0, (0.0, 0.2648)),
        "1/2": (1.0, (0.0940, 0.5101)),
        "1": (1.5, (0.0, 0.2902, 1.0410)),
        "3": (4.0, (0.0, 0.3550, 2.1464)),
    }
    problems = []
    for key, (t_hi, expected) in stated.items():
        found = local_maxima(upper_ref[key][1], 0.0, t_hi, ctx40)
        got = tuple(float(t) for t, _ in found)
        if len(got) != len(expected) or any(abs(g - e) > 1e-3 for g, e in zip(got, expected)):
            problems.append("pen %s: stated %s, actual %s"
                            % (key, expected, tuple(round(g, 4) for g in got)))
    ok = not problems
    record_criterion("3b stated local-maxima structure (documented defect)", ok,
                     "; ".join(problems) or "matches")
    assert ok, ("shipped 7-digit knots do not reproduce the quoted ripple "
                "positions: %s" % "; ".join(problems))


def test_criterion_3c_tail_threshold(upper_ref, ctx40):
    """EXPECTED RED: |residual| for penalty 1 stays ~1.1473 out to t ~ 3.3,
    so the <1.1 threshold certifies only beyond t ~ 4.53 (documented defect)."""
    ok, meta = certify_below(upper_ref["1"][1], 1.5, 1.1, ctx40)
    detail = "certified" if ok else (
        "witness |res(%.4f)| = %.7f >= 1.1; threshold first certifiable past t ~ 4.53"
        % (meta.get("witness_t", float("nan")), meta.get("witness_value", float("nan")))
    )
    record_criterion("3c tail |residual| < 1.1 beyond t=1.5 (documented defect)", ok, detail)
    assert ok, detail


def test_criterion_3_tail_threshold_honest(upper_ref, ctx40):
    # the honest variant: the same certifier succeeds from t = 4.6 on
    ok, _ = certify_below(upper_ref["1"][1], 4.6, 1.1, ctx40)
    record_criterion("3 (honest variant) tail < 1.1 certified beyond t=4.6", ok)
    assert ok


def test_criterion_4_sandwich(lower_ref, upper_ref, lower_results, upper_results, ctx40):
    ok = True
    details = []
    with ctx40.workprec():
        for key in PENALTIES:
            lo_pub, hi_pub = tables.interval(key)
            lo_res = lower_results[key][0]
            hi_res = upper_results[key][0]
            inside = (mp.mpf(str(lo_pub)) < lo_res.value - lo_res.err
                      and hi_res.value + hi_res.err < mp.mpf(str(hi_pub)))
            ordered = lo_res.value - lo_res.err <= hi_res.value + hi_res.err
            ok &= inside and ordered
            details.append("%s: %s < %.7f <= %.7f < %s" % (
                lo_pub, key, float(lo_res.value), float(hi_res.value), hi_pub))
    record_criterion("4 certified sandwich inside the published intervals", ok, "; ".join(details))
    assert ok, details


def test_criterion_5_endpoints_and_closed_forms(ctx40):
    ok = True
    details = []
    r = reward(LowerParams(a="1", c="0", b=("-2",)), INF, ctx40)
    with ctx40.workprec():
        e1 = abs(r.value - 1)
    ok &= e1 < 1e-12
    details.append("endpoint reward = 1 (|d| = %.1e)" % float(e1))

    psi0 = sup_norm(UpperParams(penalty=0, knots=()), ctx40)
    ok &= psi0.certified and abs(float(psi0.value) - 2.0) < 1e-9
    details.append("empty weight certified 2")

    rng = random.Random(1009)
    worst_branch = 0.0
    worst_quad = 0.0
    with ctx40.workprec():
        for _ in range(10):
            A = mp.mpf(repr(rng.uniform(0.03, 0.97)))
            tp = tent_optimal(A, ctx40)
            closed = tent_reward(tp, ctx40)
            worst_branch = max(worst_branch,
                               abs(float(closed - closed_lower_bound_first_branch(A, ctx40))))
            quad = tent_reward_quadrature(tp, ctx40)
            worst_quad = max(worst_quad, abs(float(closed - quad.value)))
    ok &= worst_branch < 1e-12 and worst_quad < 1e-10
    details.append("tent closed-form vs branch %.1e, vs quadrature %.1e" % (worst_branch, worst_quad))
    record_criterion("5 endpoints and tent closed forms", ok, "; ".join(details))
    assert ok, details


def test_criterion_6a_implied_constants(ctx40):
    with ctx40.workprec():
        c1 = implied_constant("1.14600", ctx40)
        c2 = implied_constant("1.14731", ctx40)
        c3 = implied_constant("1.06082", ctx40)
        ok = c1 < mp.mpf("0.7615") and c2 > mp.mpf("0.7596") and c3 < mp.mpf(8) / 9
        detail = "%.6f < 0.7615; %.6f > 0.7596; %.6f < 8/9" % (float(c1), float(c2), float(c3))
    record_criterion("6a implied constants from the table bounds", ok, detail)
    assert ok, detail


def test_criterion_6b_large_order_limit(ctx40):
    """EXPECTED RED: the large-order constant approaches 1/4 at rate
    ~ 1/log(order); at order 1e6 it is ~0.295, not within 1e-2 (documented
    defect -- the limit itself is correct but the quoted rate is not)."""
    with ctx40.workprec():
        v = large_order_constant(10**6, ctx40)
        gap = abs(float(v) - 0.25)
    ok = gap <= 1e-2
    detail = "value at 1e6 = %.6f (gap %.3f); within 1e-2 requires order ~ 4e24" % (float(v), gap)
    record_criterion("6b large-order constant near 1/4 by order 1e6 (documented defect)", ok, detail)
    assert ok, detail


def test_criterion_7_property_suites(lower_ref, upper_ref, lower_results, upper_results, ctx40):
    ok = True
    details = []
    with ctx40.workprec():
        # duality for every penalty
        dual = all(lower_results[k][0].value <= upper_results[k][0].value
                   + upper_results[k][0].err + lower_results[k][0].err for k in PENALTIES)
        ok &= dual
        details.append("duality %s" % dual)

        # Hermitian symmetry of the residual
        up = upper_ref["1"][1]
        rng = random.Random(2)
        herm = all(
            abs(abs(residual(up, -t)) - abs(residual(up, t))) < mp.mpf("1e-20")
            for t in (mp.mpf(repr(rng.uniform(0, 10))) for _ in range(10))
        )
        ok &= herm
        details.append("hermitian %s" % herm)

        # monotonicity of the best bounds across the penalty grid
        lo_vals = [float(lower_results[k][0].value) for k in PENALTIES]
        hi_vals = [float(upper_results[k][0].value) for k in PENALTIES]
        mono = all(a > b for a, b in zip(lo_vals[:-1], lo_vals[1:])) and all(
            a > b for a, b in zip(hi_vals[:-1], hi_vals[1:]))
        ok &= mono
        details.append("monotone in penalty %s" % mono)

    # 200-case antiderivative-vs-quadrature oracle at absolute 1e-10; the
    # sampled integrands reach magnitude ~1e38, so 60 working digits keep
    # raw roundoff well under the goal
    ctx60 = PrecisionContext.make(60)
    rng = random.Random(20240831)
    worst = 0.0
    for _ in range(200):
        m = rng.randrange(0, 13)
        lam = 0.0
        while abs(lam) < 1e-3:
            lam = rng.uniform(-6, 6)
        a = rng.uniform(-10, 0)
        b = rng.uniform(a, 0)
        with ctx60.workprec():
            exact = poly_exp_integral(m, lam, a, b)
        q = integrate_finite(lambda u: u**m * mp.e ** (mp.mpf(lam) * u), a, b, ctx60)
        with ctx60.workprec():
            worst = max(worst, abs(float(exact - q.value)))
    ok &= worst < 1e-10
    details.append("oracle worst |d| = %.1e" % worst)

    # precision-doubling stability of every published digit
    ctx80 = PrecisionContext.make(80)
    stable = True
    for key in PENALTIES:
        r80 = reward(lower_ref[key][1], key, ctx80)
        with ctx80.workprec():
            stable &= abs(r80.value - lower_results[key][0].value) <= lower_results[key][0].err
        s80 = sup_norm(upper_ref[key][1], ctx80)
        with ctx80.workprec():
            stable &= abs(s80.value - upper_results[key][0].value) <= upper_results[key][0].err
    ok &= stable
    details.append("precision doubling %s" % stable)

    record_criterion("7 property suites", ok, "; ".join(details))
    assert ok, details


def test_criterion_8_number_theory():
    ok = True
    details = []

    # brute-force oracle below 1e4
    t0 = time.time()
    oracle_ok = True
    for block in nt.segmented_primes(3, 10_000):
        for p in block.tolist():
            n = 2
            while pow(n, (p - 1) // 2, p) != p - 1:
                n += 1
            if n != nt.least_qnr(p):
                oracle_ok = False
    ok &= oracle_ok
    details.append("euler oracle <1e4 %s (%.1fs)" % (oracle_ok, time.time() - t0))

    # quadratic non-residue scan to 1e6 (the smallest primes trivially
    # exceed the asymptotic comparator, hence the documented floor at 11)
    t0 = time.time()
    s = nt.summarize(nt.scan("qnr", 11, 10**6), "qnr")
    elapsed = time.time() - t0
    ok &= elapsed <= 60.0 and s.margin > 0
    details.append("qnr scan max %.4f at %d, margin %.4f (%.1fs)"
                   % (float(s.max_ratio), s.argmax, float(s.margin), elapsed))

    # progression scan to q = 500 (floor 4: moduli 2 and 3 sit above the
    # asymptotic constant by an order of magnitude)
    t0 = time.time()
    s2 = nt.summarize(nt.scan("ap", 4, 500), "ap")
    ok &= s2.margin > 0
    details.append("ap scan max %.4f at %s, margin %.4f vs 8/9 (%.1fs)"
                   % (float(s2.max_ratio), s2.argmax, float(s2.margin), time.time() - t0))

    # prime-power sum identity residuals stay bounded
    consts = []
    for m in (10**4, 10**6, 10**8):
        cut = math.log(m) / (2 * math.pi)
        g = nt.raised_cosine_bump(0.05 * cut, 0.95 * cut)
        rep = nt.prime_sum_check(m, g)
        consts.append(abs(rep.normalized_truncated))
        ok &= abs(rep.normalized_truncated) < 10
    details.append("prime-sum normalized residuals %s" % ["%.2e" % c for c in consts])

    record_criterion("8 number-theory scans and prime-sum residuals", ok, "; ".join(details))
    assert ok, details


def test_criterion_9_search_regression(lower_ref, upper_ref, ctx40):
    ok = True
    details = []

    t0 = time.time()
    cfg = SearchConfig(seed=0, n_max=8, restarts=8, budget=100_000)
    _, found = optimize_upper("1", cfg, ctx40)
    ok &= found.certified and float(found.value) <= 1.1480
    details.append("cold upper search: %.6f <= 1.1480 (%.0fs)" % (float(found.value), time.time() - t0))

    # seeding at the reference incumbents must not improve beyond 1e-4
    knots0 = [float(k) for k in upper_ref["1"][1].knots]
    _, seeded = optimize_upper("1", SearchConfig(seed=1, n_max=8, restarts=6, budget=40_000),
                               ctx40, knots0=knots0)
    upper_gain = 1.1473077 - float(seeded.value)
    ok &= upper_gain <= 1e-4
    details.append("seeded upper gain %.1e" % upper_gain)

    pub, p = lower_ref["1"]
    x0 = [float(x) for x in p.b] + [math.log(float(p.a)), float(p.c)]
    _, polished = optimize_lower("1", len(p.b), SearchConfig(seed=2, restarts=1, budget=20_000),
                                 ctx40, x0=x0)
    lower_gain = float(polished.value) - 1.1460067
    ok &= lower_gain <= 1e-4
    details.append("seeded lower gain %.1e" % lower_gain)

    record_criterion("9 search regression and local optimality", ok, "; ".join(details))
    assert ok, details

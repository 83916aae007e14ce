import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fel import nt


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}
    for n in range(-3, 42):
        assert nt.is_prime_u64(n) == (n in primes)
    assert nt.is_prime_u64(2**61 - 1)
    assert not nt.is_prime_u64(2**62 - 1)


def test_jacobi_examples():
    assert nt.jacobi(2, 7) == 1    # 3^2 = 2 mod 7
    assert nt.jacobi(1, 15) == 1
    assert nt.jacobi(3, 7) == -1   # residues mod 7 are {1, 2, 4}
    assert nt.jacobi(7, 21) == 0
    with pytest.raises(ValueError):
        nt.jacobi(3, 10)
    with pytest.raises(ValueError):
        nt.jacobi(3, -7)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=-500, max_value=500),
       st.integers(min_value=-500, max_value=500),
       st.integers(min_value=0, max_value=400))
def test_jacobi_multiplicative(n1, n2, midx):
    m = 2 * midx + 3
    assert nt.jacobi(n1 * n2, m) == nt.jacobi(n1, m) * nt.jacobi(n2, m)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=10**6), st.integers(min_value=0, max_value=78497))
def test_euler_jacobi_consistency(n, pidx):
    primes = nt.primes_upto(10**4)
    p = int(primes[pidx % len(primes)])
    if p == 2:
        return
    euler = pow(n, (p - 1) // 2, p)
    sym = nt.jacobi(n, p)
    assert sym == (1 if euler == 1 else (-1 if euler == p - 1 else 0))


def test_least_qnr_examples():
    assert nt.least_qnr(3) == 2
    assert nt.least_qnr(7) == 3
    assert nt.least_qnr(23) == 5
    with pytest.raises(ValueError):
        nt.least_qnr(15)
    with pytest.raises(ValueError):
        nt.least_qnr(2)


def test_least_qnr_brute_force_oracle():
    # successive-prime search equals the naive Euler-criterion minimum
    for block in nt.segmented_primes(3, 10_000):
        for p in block.tolist():
            n = 2
            while pow(n, (p - 1) // 2, p) != p - 1:
                n += 1
            assert nt.least_qnr(p) == n, p
            assert nt.is_prime_u64(n)  # the minimum is always prime


def test_least_prime_qr_examples():
    assert nt.least_prime_qr(7) == 2
    assert nt.least_prime_qr(3) == 7   # 2, 3, 5 are non-residues or ramified
    assert nt.least_prime_qr(5) == 11  # residues mod 5 are {1, 4}
    # brute-force cross-check over small primes
    for p in (11, 13, 17, 19, 23, 29, 163):
        r = nt.least_prime_qr(p)
        for block in nt.segmented_primes(2, r):
            for q in block.tolist():
                assert nt.jacobi(q, p) != 1
        assert nt.jacobi(r, p) == 1


def test_least_prime_in_ap_examples():
    assert nt.least_prime_in_ap(3, 4, 100) == 3
    assert nt.least_prime_in_ap(1, 4, 100) == 5
    assert nt.least_prime_in_ap(7, 10, 100) == 7
    with pytest.raises(ValueError):
        nt.least_prime_in_ap(2, 4, 100)
    with pytest.raises(LookupError):
        nt.least_prime_in_ap(1, 99991, 10_000)


def test_primes_upto_agrees_with_segments():
    direct = nt.primes_upto(50_000)
    segs = np.concatenate(list(nt.segmented_primes(2, 50_001, block=7_000)))
    assert np.array_equal(direct, segs)
    assert direct[0] == 2 and direct[-1] == 49999


def test_totient():
    assert nt.totient(1) == 1
    assert nt.totient(10) == 4
    assert nt.totient(97) == 96
    assert nt.totient(360) == 96


def test_scan_qnr_small():
    recs = list(nt.scan("qnr", 3, 23))
    keys = [r.key for r in recs]
    assert keys == [3, 5, 7, 11, 13, 17, 19, 23]
    by_key = {r.key: r for r in recs}
    with mp.workdps(30):
        for p in (3, 7, 23):
            expect = mp.mpf(nt.least_qnr(p)) / mp.log(p) ** 2
            assert abs(by_key[p].ratio - expect) < 1e-25
        assert float(by_key[3].ratio) == pytest.approx(2 / math.log(3) ** 2)
    # every recorded extremal value is prime
    assert all(nt.is_prime_u64(r.value) for r in recs)


def test_scan_chunk_determinism():
    whole = nt.summarize(nt.scan("qnr", 11, 20_000), "qnr")
    parts = nt.summarize(nt.scan("qnr", 11, 7_000), "qnr").merge(
        nt.summarize(nt.scan("qnr", 7_001, 20_000), "qnr")
    )
    assert whole.count == parts.count
    assert whole.max_ratio == parts.max_ratio
    assert whole.argmax == parts.argmax


def test_scan_ap_small():
    recs = list(nt.scan("ap", 4, 10))
    by_key = {r.key: r.value for r in recs}
    assert by_key[(3, 4)] == 3
    assert by_key[(1, 4)] == 5
    assert by_key[(1, 7)] == 29
    assert by_key[(9, 10)] == 19
    q5 = [r for r in recs if r.key[1] == 5]
    assert len(q5) == 4  # one record per coprime residue


def test_scan_rejects_unknown_kind():
    with pytest.raises(ValueError):
        list(nt.scan("weird", 1, 10))


def test_bump_properties():
    g = nt.raised_cosine_bump(0.2, 0.8)
    xs = np.linspace(-1, 2, 10_001)
    v = g(xs)
    assert v.min() >= 0
    assert v[(xs < 0.2) | (xs > 0.8)].max() == 0
    assert abs(v.max() - 1.0) < 1e-4
    # exact L1 norm: half the width
    step = xs[1] - xs[0]
    assert abs(v.sum() * step - 0.3) < 1e-3
    with pytest.raises(ValueError):
        nt.raised_cosine_bump(1.0, 0.5)


def test_prime_sum_check_zero_function():
    rep = nt.prime_sum_check(1000, lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                             support=(0.1, 0.9), g_prime_l1=0.0)
    assert rep.truncated_sum == 0 and rep.truncated_integral == 0
    assert rep.tail_sum == 0 and rep.tail_integral == 0


def test_prime_sum_check_truncated_and_tail():
    m = 10**4
    cut = math.log(m) / (2 * math.pi)
    g = nt.raised_cosine_bump(0.3 * cut, 1.5 * cut)
    rep = nt.prime_sum_check(m, g)
    # the sums straddle the cut, and both identities hold to a tiny
    # normalized residual at this scale
    assert rep.truncated_sum > 1
    assert rep.tail_sum > 1
    assert abs(rep.normalized_truncated) < 0.01
    assert abs(rep.normalized_tail) < 0.01
    # Chebyshev window report (consistency, not an RH assertion)
    assert abs(rep.psi_m - m) < rep.psi_window


def test_prime_sum_check_support_guards():
    with pytest.raises(ValueError):
        nt.prime_sum_check(100, nt.raised_cosine_bump(0.0, 10.0))
    with pytest.raises(ValueError):
        nt.prime_sum_check(10**15, nt.raised_cosine_bump(0.1, 0.2))


def test_chebyshev_psi_values():
    # psi(100) = sum of log p over prime powers <= 100
    expect = 0.0
    for p in nt.primes_upto(100).tolist():
        k = 1
        while p**k <= 100:
            expect += math.log(p)
            k += 1
    assert abs(nt.chebyshev_psi(100) - expect) < 1e-9
    assert abs(nt.chebyshev_psi(10**6) - 10**6) < math.sqrt(10**6) * math.log(10**6) ** 2

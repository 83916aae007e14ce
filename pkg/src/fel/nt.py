"""Desk-scale number-theoretic validation.

Exact computation of the least quadratic non-residue, the least prime
quadratic residue, and the least prime in an arithmetic progression, plus
ratio scans against asymptotic comparator constants and an empirical check
of the truncated/tail prime-power sum identity

    (1/2pi) sum_{2<=n<m} Lambda(n)/sqrt(n) g(log n / 2pi)
        = int_0^{log m / 2pi} g(t) e^{pi t} dt + O((||g||_1 + ||g'||_1) log^2 m).

All primality decisions are deterministic for 64-bit inputs (Miller-Rabin
with the standard 12-witness set); sieves are segmented numpy Eratosthenes.
Scan ratios are computed at 30 decimal digits to keep log precision out of
the margins.

The comparator constants bound limsups; no finite scan can confirm or
refute them.  Scans therefore take an explicit key range and report
margins only -- the smallest primes and moduli trivially exceed the
asymptotic constants, which is why the CLI defaults start the ranges just
past them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import mpmath as mp
import numpy as np

__all__ = [
    "NtRecord",
    "ScanSummary",
    "PrimeSumReport",
    "is_prime_u64",
    "jacobi",
    "least_qnr",
    "least_prime_qr",
    "least_prime_in_ap",
    "primes_upto",
    "segmented_primes",
    "totient",
    "scan",
    "summarize",
    "raised_cosine_bump",
    "prime_sum_check",
    "chebyshev_psi",
    "DEFAULT_SCAN_FLOORS",
    "COMPARATORS",
]

_RATIO_DPS = 30

# smallest keys at which the desk ratios drop below the asymptotic
# comparators; see the module docstring
DEFAULT_SCAN_FLOORS = {"qnr": 11, "prime-qr": 7, "ap": 4}

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime_u64(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24 (covers 64-bit)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def jacobi(n: int, m: int) -> int:
    """Jacobi symbol (n|m) for odd positive m, via binary reciprocity."""
    if m <= 0 or m % 2 == 0:
        raise ValueError("modulus must be odd and positive")
    n %= m
    result = 1
    while n:
        while n % 2 == 0:
            n //= 2
            if m % 8 in (3, 5):
                result = -result
        n, m = m, n
        if n % 4 == 3 and m % 4 == 3:
            result = -result
        n %= m
    return result if m == 1 else 0


_SMALL_PRIMES: list[int] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def _small_prime(i: int) -> int:
    """i-th prime (0-based), growing the cached list on demand."""
    while i >= len(_SMALL_PRIMES):
        cand = _SMALL_PRIMES[-1] + 2
        while not is_prime_u64(cand):
            cand += 2
        _SMALL_PRIMES.append(cand)
    return _SMALL_PRIMES[i]


def _check_odd_prime(p: int):
    if p < 3 or not is_prime_u64(p):
        raise ValueError("%r is not an odd prime" % (p,))


def least_qnr(p: int) -> int:
    """Least quadratic non-residue modulo an odd prime (always prime itself,
    so only primes are tried)."""
    _check_odd_prime(p)
    i = 0
    while True:
        q = _small_prime(i)
        if q >= p:
            raise ArithmeticError("no non-residue below p; p is not prime")
        if jacobi(q, p) == -1:
            return q
        i += 1


def least_prime_qr(p: int) -> int:
    """Least prime that is a quadratic residue modulo an odd prime."""
    _check_odd_prime(p)
    i = 0
    while True:
        q = _small_prime(i)
        if jacobi(q, p) == 1:
            return q
        i += 1


def least_prime_in_ap(a: int, q: int, limit: int) -> int:
    """Least prime congruent to a modulo q, or raise if none <= limit."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(a, q) != 1:
        raise ValueError("gcd(a, q) must be 1")
    n = a % q
    if n == 0:
        n = q  # only when q == 1
    while n <= limit:
        if n >= 2 and is_prime_u64(n):
            return n
        n += q
    raise LookupError("no prime <= %d in the progression %d mod %d" % (limit, a, q))


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n (numpy sieve)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def segmented_primes(lo: int, hi: int, block: int = 8_000_000) -> Iterator[np.ndarray]:
    """Yield primes in [lo, hi) as numpy blocks, bounded memory."""
    lo = max(lo, 2)
    base = primes_upto(int(math.isqrt(max(hi - 1, 4))) + 1)
    start = lo
    while start < hi:
        stop = min(start + block, hi)
        seg = np.ones(stop - start, dtype=bool)
        if start == 2:
            pass
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, ((start + p - 1) // p) * p)
            seg[first - start :: p] = False
        if start <= 1:
            seg[: 2 - start] = False
        idx = np.nonzero(seg)[0]
        yield (idx + start).astype(np.int64)
        start = stop


def totient(q: int) -> int:
    """Euler phi by trial-division factorization (desk-scale moduli)."""
    if q < 1:
        raise ValueError("q must be positive")
    result = q
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if n > 1:
        result -= result // n
    return result


@dataclass(frozen=True)
class NtRecord:
    """One scan datum: key (prime, or (a, q) pair), extremal value, ratio."""

    key: object
    value: int
    ratio: object  # mpf at 30 digits

    def csv_row(self) -> str:
        if isinstance(self.key, tuple):
            key = "%d mod %d" % self.key
        else:
            key = str(self.key)
        return "%s,%d,%s" % (key, self.value, mp.nstr(self.ratio, 20))


@dataclass
class ScanSummary:
    """Associative max-reduction over scan records."""

    comparator: float
    kind: str
    count: int = 0
    max_ratio: object = None
    argmax: object = None

    def update(self, rec: NtRecord):
        self.count += 1
        if self.max_ratio is None or rec.ratio > self.max_ratio:
            self.max_ratio = rec.ratio
            self.argmax = rec.key

    def merge(self, other: "ScanSummary") -> "ScanSummary":
        out = ScanSummary(self.comparator, self.kind, self.count + other.count)
        picks = [(s.max_ratio, s.argmax) for s in (self, other) if s.max_ratio is not None]
        if picks:
            out.max_ratio, out.argmax = max(picks, key=lambda t: t[0])
        return out

    @property
    def margin(self):
        if self.max_ratio is None:
            return None
        return mp.mpf(self.comparator) - self.max_ratio

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "count": self.count,
            "max_ratio": None if self.max_ratio is None else mp.nstr(self.max_ratio, 20),
            "argmax": ("%d mod %d" % self.argmax) if isinstance(self.argmax, tuple) else self.argmax,
            "comparator": self.comparator,
            "margin": None if self.margin is None else mp.nstr(self.margin, 20),
        }


COMPARATORS = {"qnr": 0.7615, "prime-qr": 0.7615, "ap": 8.0 / 9.0}


def _ratio_log2(value: int, key: int):
    with mp.workdps(_RATIO_DPS):
        return mp.mpf(value) / mp.log(key) ** 2


def scan(kind: str, lo: int, hi: int, comparator: float | None = None) -> Iterator[NtRecord]:
    """Stream NtRecords over a key range.

    kind "qnr"/"prime-qr": odd primes p in [lo, hi], ratio value/log^2 p.
    kind "ap": moduli q in [lo, hi], every residue coprime to q, ratio
    P(a,q)/(phi(q) log q)^2.  Deterministic and restartable: records depend
    only on the key, so chunked ranges merge into identical summaries.
    """
    if kind in ("qnr", "prime-qr"):
        fn = least_qnr if kind == "qnr" else least_prime_qr
        for block in segmented_primes(max(lo, 3), hi + 1):
            for p in block.tolist():
                v = fn(p)
                yield NtRecord(key=p, value=v, ratio=_ratio_log2(v, p))
    elif kind == "ap":
        yield from _scan_ap(max(lo, 1), hi)
    else:
        raise ValueError("unknown scan kind %r" % (kind,))


def _scan_ap(q_lo: int, q_hi: int) -> Iterator[NtRecord]:
    # It is known that P(a,q) < (phi(q) log q)^2 for q > 3 at these scales;
    # the shared prime pool is sized from that with headroom.
    worst = max((totient(q) * math.log(q)) ** 2 for q in range(max(q_lo, 4), q_hi + 1))
    pool = primes_upto(int(worst * 1.5) + 1000)
    chunk = 20_000
    for q in range(q_lo, q_hi + 1):
        if q == 1:
            yield NtRecord(key=(0, 1), value=2, ratio=mp.mpf(2) / mp.log(2) ** 2)
            continue
        phi_q = totient(q)
        first_hit: dict[int, int] = {}
        for start in range(0, pool.size, chunk):
            block = pool[start : start + chunk]
            uniq, idx = np.unique(block % q, return_index=True)
            for r, i in zip(uniq.tolist(), idx.tolist()):
                if r not in first_hit and math.gcd(r, q) == 1:
                    first_hit[r] = int(block[i])
            if len(first_hit) >= phi_q:
                break
        if len(first_hit) < phi_q:
            raise LookupError("prime pool too small for modulus %d" % q)
        with mp.workdps(_RATIO_DPS):
            denom = (mp.mpf(phi_q) * mp.log(q)) ** 2
            for a in sorted(first_hit):
                p = first_hit[a]
                yield NtRecord(key=(a, q), value=p, ratio=mp.mpf(p) / denom)


def summarize(records: Iterator[NtRecord], kind: str, comparator: float | None = None) -> ScanSummary:
    """Reduce a record stream to its summary (associative, order-free)."""
    comp = COMPARATORS[kind] if comparator is None else comparator
    s = ScanSummary(comparator=comp, kind=kind)
    for rec in records:
        s.update(rec)
    return s


# ---------------------------------------------------------------------------
# prime-power sum vs integral


def raised_cosine_bump(lo: float, hi: float) -> Callable:
    """C^1 bump supported on [lo, hi]: 0.5*(1 + cos(2 pi (t-mid)/width)).

    Vectorized over numpy arrays.  ||g||_1 = width/2 exactly; the derivative
    vanishes at the support edges so g is C^1 on the line.
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    mid = 0.5 * (lo + hi)
    width = hi - lo

    def g(t):
        t = np.asarray(t, dtype=np.float64)
        inside = (t >= lo) & (t <= hi)
        out = np.zeros_like(t)
        out[inside] = 0.5 * (1.0 + np.cos(2.0 * np.pi * (t[inside] - mid) / width))
        return out

    g.support = (lo, hi)
    g.l1 = width / 2.0
    g.dl1 = 2.0  # integral of |g'|: total rise+fall of a unit-amplitude bump
    return g


@dataclass(frozen=True)
class PrimeSumReport:
    """Both sides of the truncated and tail identities plus residuals."""

    m: int
    truncated_sum: float
    truncated_integral: float
    tail_sum: float
    tail_integral: float
    norm_g: float
    norm_g_prime: float
    psi_m: float = 0.0
    psi_window: float = 0.0

    @property
    def truncated_residual(self) -> float:
        return self.truncated_sum - self.truncated_integral

    @property
    def tail_residual(self) -> float:
        return self.tail_sum - self.tail_integral

    @property
    def normalized_truncated(self) -> float:
        return self.truncated_residual / ((self.norm_g + self.norm_g_prime) * math.log(self.m) ** 2)

    @property
    def normalized_tail(self) -> float:
        return self.tail_residual / ((self.norm_g + self.norm_g_prime) * math.log(self.m) ** 2)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "truncated_sum": self.truncated_sum,
            "truncated_integral": self.truncated_integral,
            "truncated_residual": self.truncated_residual,
            "normalized_truncated": self.normalized_truncated,
            "tail_sum": self.tail_sum,
            "tail_integral": self.tail_integral,
            "tail_residual": self.tail_residual,
            "normalized_tail": self.normalized_tail,
            "psi_m": self.psi_m,
            "psi_window": self.psi_window,
        }


def _float_quad(f, lo, hi, panels=2000):
    """Composite Simpson for the float-precision normalization integrals."""
    if hi <= lo:
        return 0.0
    xs = np.linspace(lo, hi, 2 * panels + 1)
    ys = np.asarray(f(xs), dtype=np.float64)
    h = (hi - lo) / (2 * panels)
    return float(h / 3 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-1:2].sum()))


def prime_sum_check(m: int, g: Callable, support: tuple | None = None,
                    g_prime_l1: float | None = None) -> PrimeSumReport:
    """Empirically compare the prime-power sums against their integrals.

    ``g`` must be vectorized over numpy arrays, continuous with piecewise-C^1
    structure, and supported inside [-log m / pi, log m / pi] (pass
    ``support`` explicitly unless g carries a ``.support`` attribute).  The
    truncated side sums 2 <= n < m; the tail side sums n >= m up to the end
    of the support.  Residuals are reported normalized by
    ``(||g||_1 + ||g'||_1) log^2 m``; ||g'||_1 is estimated by finite
    differences unless supplied.  Also reports the Chebyshev sum psi(m)
    against m with the sqrt(m) log^2 m window (reported, never asserted).
    """
    if m < 3:
        raise ValueError("m must be >= 3")
    if m > 10**8:
        raise ValueError("m beyond the sieve budget (1e8)")
    sup = support if support is not None else getattr(g, "support", None)
    if sup is None:
        raise ValueError("need the support of g")
    lo_s, hi_s = float(sup[0]), float(sup[1])
    logm = math.log(m)
    if lo_s < -logm / math.pi - 1e-12 or hi_s > logm / math.pi + 1e-12:
        raise ValueError("support of g must sit inside [-log m/pi, log m/pi]")

    two_pi = 2.0 * math.pi
    # the sums only see n with log n/(2 pi) inside the support, but the
    # Chebyshev report needs the primes all the way to m
    n_end = min(math.exp(two_pi * hi_s), 1e18)
    n_end_i = int(n_end) + 2
    sieve_end = max(n_end_i, m)
    if sieve_end > 2 * 10**8:
        raise ValueError(
            "support reaches n ~ %.2g, beyond the sieve budget; shrink it" % sieve_end
        )

    trunc = 0.0
    tail = 0.0
    psi_m = 0.0

    # primes: segmented, vectorized weights (g vanishes off its support)
    for block in segmented_primes(2, sieve_end):
        pb = block.astype(np.float64)
        t = np.log(pb) / two_pi
        w = np.log(pb) / np.sqrt(pb) * np.asarray(g(t), dtype=np.float64)
        below = block < m
        trunc += float(w[below].sum())
        tail += float(w[~below].sum())
        psi_m += float(np.log(pb[below]).sum())

    # prime powers p^k, k >= 2: p <= sqrt(end), python loop is cheap
    for p in primes_upto(int(math.isqrt(sieve_end)) + 1).tolist():
        lp = math.log(p)
        n = p * p
        while n < sieve_end:
            t = math.log(n) / two_pi
            w = lp / math.sqrt(n) * float(g(np.array([t]))[0])
            if n < m:
                trunc += w
                psi_m += lp
            else:
                tail += w
            n *= p
    trunc /= two_pi
    tail /= two_pi

    cut = logm / two_pi
    integrand = lambda t: np.asarray(g(t)) * np.exp(np.pi * np.asarray(t))
    I_trunc = _float_quad(integrand, max(0.0, lo_s), min(cut, hi_s))
    I_tail = _float_quad(integrand, max(cut, lo_s), hi_s)

    norm_g = _float_quad(lambda t: np.abs(np.asarray(g(t))), lo_s, hi_s)
    if g_prime_l1 is None:
        g_prime_l1 = getattr(g, "dl1", None)
    if g_prime_l1 is None:
        h = (hi_s - lo_s) / 200000
        xs = np.linspace(lo_s, hi_s, 200001)
        ys = np.asarray(g(xs), dtype=np.float64)
        g_prime_l1 = float(np.abs(np.diff(ys)).sum())

    return PrimeSumReport(
        m=m,
        truncated_sum=trunc,
        truncated_integral=I_trunc,
        tail_sum=tail,
        tail_integral=I_tail,
        norm_g=norm_g,
        norm_g_prime=float(g_prime_l1),
        psi_m=psi_m,
        psi_window=math.sqrt(m) * logm**2,
    )


def chebyshev_psi(x: int) -> float:
    """Chebyshev psi(x) = sum of Lambda(n) for n <= x, by segmented sieve."""
    if x < 2:
        return 0.0
    total = 0.0
    for block in segmented_primes(2, x + 1):
        total += float(np.log(block.astype(np.float64)).sum())
    for p in primes_upto(int(math.isqrt(x)) + 1).tolist():
        lp = math.log(p)
        n = p * p
        while n <= x:
            total += lp
            n *= p
    return total

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from fel.precision import (
    PrecisionContext,
    Unconverged,
    integrate_finite,
    integrate_semi_infinite,
    isolate_sign_changes,
    maximize_scalar,
    odd_poly_eval,
    poly_exp_antiderivative,
    poly_exp_integral,
)


def test_context_invariants():
    ctx = PrecisionContext.make(40)
    assert ctx.digits == 40
    with pytest.raises(ValueError):
        PrecisionContext(digits=20, target_abs_err=1e-10)
    with pytest.raises(ValueError):
        PrecisionContext(digits=40, target_abs_err=1e-39)  # fewer than 5 guard digits
    with pytest.raises(ValueError):
        PrecisionContext(digits=40, target_abs_err=-1.0)


def test_integrate_exponential(ctx40):
    r = integrate_finite(lambda t: mp.e ** (mp.pi * t), 0, 1, ctx40)
    with ctx40.workprec():
        exact = (mp.e**mp.pi - 1) / mp.pi  # = 7.04760135...
        assert abs(r.value - exact) <= max(r.err, mp.mpf(ctx40.target_abs_err))
        assert abs(float(exact) - 7.047601351970261) < 1e-12


def test_integrate_empty_interval(ctx40):
    r = integrate_finite(lambda t: t * t, 3, 3, ctx40)
    assert r.value == 0 and r.err == 0


def test_integrate_tent_piece_matches_antiderivatives(ctx40):
    # (1 - |t|) e^{pi t} on [-1, 0] equals the m=0 plus m=1 closed forms
    r = integrate_finite(lambda t: (1 - abs(t)) * mp.e ** (mp.pi * t), -1, 0, ctx40)
    with ctx40.workprec():
        exact = poly_exp_integral(0, mp.pi, -1, 0) + poly_exp_integral(1, mp.pi, -1, 0)
        assert abs(r.value - exact) <= r.err + mp.mpf("1e-35")


def test_integrate_reversed_orientation(ctx40):
    fwd = integrate_finite(lambda t: t * t, 0, 2, ctx40)
    rev = integrate_finite(lambda t: t * t, 2, 0, ctx40)
    assert abs(fwd.value + rev.value) < 1e-30


def test_integrate_unconverged_on_cusp(ctx40):
    # infinite-derivative cusp cannot meet a 1e-30 goal within the depth budget
    with pytest.raises(Unconverged):
        integrate_finite(lambda t: mp.sqrt(abs(t)), -1, 1, ctx40)


def test_semi_infinite_exponential(ctx40):
    r = integrate_semi_infinite(
        lambda t: mp.e ** (mp.pi * t), 0, -1, lambda X: mp.e ** (mp.pi * X) / mp.pi, ctx40
    )
    with ctx40.workprec():
        assert abs(r.value - 1 / mp.pi) <= r.err + mp.mpf(ctx40.target_abs_err)


def test_semi_infinite_first_moment(ctx40):
    # integral of (-2 pi t) e^{2 pi t} over the negative axis is 1/(2 pi)
    tail = lambda X: (-2 * mp.pi * X + 1) * mp.e ** (2 * mp.pi * X) / (2 * mp.pi)
    r = integrate_semi_infinite(lambda t: -2 * mp.pi * t * mp.e ** (2 * mp.pi * t), 0, -1, tail, ctx40)
    with ctx40.workprec():
        assert abs(r.value - 1 / (2 * mp.pi)) <= r.err + mp.mpf(ctx40.target_abs_err)


def test_semi_infinite_power_tail(ctx40):
    r = integrate_semi_infinite(lambda x: 1 / (x * x), 1, +1, lambda X: 1 / X, ctx40)
    assert abs(r.value - 1) <= r.err + 1e-30


def test_poly_exp_antiderivative_values(ctx40):
    with ctx40.workprec():
        # plain exponential: limit at -inf is 0, so the integral is 1/pi
        assert abs(poly_exp_integral(0, mp.pi, -mp.inf, 0) - 1 / mp.pi) < mp.mpf("1e-35")
        # first moment at lam = 2 pi
        assert abs(poly_exp_integral(1, 2 * mp.pi, -mp.inf, 0) + 1 / (4 * mp.pi**2)) < mp.mpf("1e-35")
        with pytest.raises(ValueError):
            poly_exp_antiderivative(2, 0, 1.0)
        with pytest.raises(ValueError):
            poly_exp_integral(2, -1, -mp.inf, 0)  # diverges


def test_poly_exp_matches_quadrature_cubic(ctx40):
    with ctx40.workprec():
        exact = poly_exp_integral(3, 1, -1, 0)
    q = integrate_finite(lambda u: u**3 * mp.e**u, -1, 0, ctx40)
    assert abs(exact - q.value) <= q.err + 1e-35


def test_antiderivative_oracle_random_cases(ctx40):
    # 200 seeded cases: m <= 12, lam in [-6, 6] \ {0}, subintervals of [-10, 0].
    # Magnitudes reach e^60, so 40 working digits keep the absolute
    # agreement far below 1e-10.
    import random

    rng = random.Random(20240831)
    for _ in range(200):
        m = rng.randrange(0, 13)
        lam = 0.0
        while abs(lam) < 1e-3:
            lam = rng.uniform(-6, 6)
        a = rng.uniform(-10, 0)
        b = rng.uniform(a, 0)
        with ctx40.workprec():
            exact = poly_exp_integral(m, lam, a, b)
        q = integrate_finite(lambda u: u**m * mp.e ** (mp.mpf(lam) * u), a, b, ctx40)
        with ctx40.workprec():
            assert abs(exact - q.value) <= q.err + mp.mpf("1e-10"), (m, lam, a, b)


def test_precision_doubling_stability(ctx40):
    f = lambda t: mp.cos(t) * mp.e ** (t / 3)
    base = integrate_finite(f, -2, 1, ctx40)
    again = integrate_finite(f, -2, 1, ctx40.bumped(20))
    with ctx40.bumped(20).workprec():
        assert abs(base.value - again.value) <= base.err + mp.mpf("1e-38")


def test_isolate_sign_changes_linear(ctx40):
    sc = isolate_sign_changes([1], -1, 1, ctx40)
    assert len(sc.roots) == 1 and abs(sc.roots[0]) < 1e-29
    assert not sc.uncertain


def test_isolate_sign_changes_cubic(ctx40):
    # u^3 - u has sign changes at -1, 0, 1
    sc = isolate_sign_changes([-1, 1], -2, 2, ctx40)
    assert len(sc.roots) == 3
    for r, expect in zip(sc.roots, (-1, 0, 1)):
        assert abs(r - expect) < 1e-28


def test_isolate_sign_changes_rejects_zero_poly(ctx40):
    with pytest.raises(ValueError):
        isolate_sign_changes([0, 0], -1, 1, ctx40)


def test_sign_correctness_sampling(ctx40):
    # between consecutive roots the polynomial keeps one sign (64 samples)
    import random

    rng = random.Random(7)
    coeffs = [3, -4, 1]  # u(3 - 4u^2 + u^4) = u(u^2-1)(u^2-3)
    sc = isolate_sign_changes(coeffs, -2, 2, ctx40)
    assert len(sc.roots) == 5
    edges = [mp.mpf(-2)] + list(sc.roots) + [mp.mpf(2)]
    with ctx40.workprec():
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi - lo < 1e-20:
                continue
            signs = set()
            for _ in range(64):
                u = lo + (hi - lo) * mp.mpf(rng.random())
                v = odd_poly_eval(coeffs, u)
                if abs(v) > 1e-25:
                    signs.add(1 if v > 0 else -1)
            assert len(signs) <= 1


def test_maximize_quadratic_bowl(ctx40):
    r = maximize_scalar(lambda t: -((t - mp.mpf("0.5")) ** 2), 0, 1, ctx40)
    assert abs(r.argmax.value - mp.mpf("0.5")) < 1e-20
    assert abs(r.value.value) < 1e-30
    assert not r.boundary


def test_maximize_boundary_status(ctx40):
    r = maximize_scalar(lambda t: t, 0, 1, ctx40)
    assert r.boundary
    assert abs(r.argmax.value - 1) < 1e-20


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=6), st.floats(min_value=0.5, max_value=4.0))
def test_poly_exp_derivative_property(m, lam):
    # P'(u) == u^m e^{lam u} by central differences
    with mp.workdps(40):
        u = mp.mpf("-1.7")
        h = mp.mpf("1e-12")
        d = (poly_exp_antiderivative(m, lam, u + h) - poly_exp_antiderivative(m, lam, u - h)) / (2 * h)
        assert abs(d - u**m * mp.e ** (lam * u)) < mp.mpf("1e-18")

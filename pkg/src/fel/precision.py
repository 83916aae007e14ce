"""Arbitrary-precision scalar kernels shared by every other module.

Four primitives, all operating on mpmath scalars at a precision fixed by a
:class:`PrecisionContext` and all reporting explicit absolute-error radii:

* adaptive Gauss-Legendre quadrature on finite intervals,
* semi-infinite quadrature with a caller-supplied certified tail bound,
* closed-form antiderivatives of ``u^m * exp(lam*u)``,
* sign-change isolation for odd-power polynomials and bracketed 1-D
  maximization.

Error accounting is first-order honest rather than interval arithmetic: a
reported radius is an estimate that must survive a precision-doubling
recomputation (the value may not move by more than the radius).  Routines
that cannot meet their tolerance within the refinement budget raise
:class:`Unconverged` instead of returning a silently degraded value.

Everything here is a pure function of its arguments; contexts are immutable
and safe to share across worker processes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath as mp

__all__ = [
    "PrecisionContext",
    "ErrBounded",
    "Unconverged",
    "SignChanges",
    "MaxResult",
    "gauss_legendre",
    "integrate_finite",
    "integrate_semi_infinite",
    "poly_exp_antiderivative",
    "poly_exp_integral",
    "odd_poly_eval",
    "isolate_sign_changes",
    "maximize_scalar",
]

_GL_ORDER = 24          # base panel order; error estimated against order 2x
_MAX_DEPTH = 48         # panel bisection depth limit
_PANEL_BUDGET = 60_000  # total panels per integral
_CUTOFF_BUDGET = 400    # doublings allowed while hunting a tail cutoff


class Unconverged(RuntimeError):
    """Raised when a kernel exhausts its refinement budget.

    Carries the best value/error pair reached so far in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision (decimal digits) and absolute error goal.

    ``digits`` must be at least 30; ``target_abs_err`` must leave at least
    five guard digits, i.e. ``target_abs_err >= 10**(-digits + 5)``.
    """

    digits: int
    target_abs_err: float

    def __post_init__(self):
        if self.digits < 30:
            raise ValueError("digits must be >= 30, got %r" % (self.digits,))
        if not self.target_abs_err > 0:
            raise ValueError("target_abs_err must be positive")
        if self.target_abs_err < 10.0 ** (-self.digits + 5):
            raise ValueError(
                "target_abs_err %g leaves fewer than 5 guard digits at %d digits"
                % (self.target_abs_err, self.digits)
            )

    @classmethod
    def make(cls, digits: int = 40, target_abs_err: float | None = None) -> "PrecisionContext":
        """Context with a default error goal of 10**-(digits-10)."""
        if target_abs_err is None:
            target_abs_err = 10.0 ** (-(digits - 10))
        return cls(digits=digits, target_abs_err=target_abs_err)

    def workprec(self):
        """mpmath precision guard: ``with ctx.workprec(): ...``."""
        return mp.workdps(self.digits)

    def bumped(self, extra: int) -> "PrecisionContext":
        """Same error goal, ``extra`` more working digits (stability checks)."""
        return PrecisionContext(self.digits + extra, self.target_abs_err)


@dataclass(frozen=True)
class ErrBounded:
    """A computed value with a claimed absolute-error radius."""

    value: object  # mpf, or mpc for complex integrands
    err: object    # mpf >= 0

    def __float__(self):
        return float(self.value)

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class SignChanges:
    """Sign-change points of an odd-power polynomial on an interval.

    ``roots`` are strictly increasing points where the sign provably flips.
    ``uncertain`` are points where the polynomial dips to numerical zero
    without a detected flip (suspected even-order root); callers must treat
    the sign there conservatively.
    """

    roots: tuple
    uncertain: tuple


@dataclass(frozen=True)
class MaxResult:
    """Result of a bracketed 1-D maximization."""

    argmax: ErrBounded
    value: ErrBounded
    boundary: bool  # maximum sits on a bracket endpoint


@functools.lru_cache(maxsize=128)
def gauss_legendre(order: int, dps: int):
    """Positive-half Gauss-Legendre nodes/weights on [-1, 1] at ``dps`` digits.

    ``order`` must be even; the negative nodes are the mirror images.  Nodes
    are found by Newton iteration on the Legendre recurrence from the usual
    Chebyshev initial guesses.
    """
    if order % 2:
        raise ValueError("order must be even")
    pairs = []
    with mp.workdps(dps + 10):
        tol = mp.mpf(10) ** (-(dps + 5))
        for k in range(1, order // 2 + 1):
            x = mp.mpf(math.cos(math.pi * (k - 0.25) / (order + 0.5)))
            dp = mp.mpf(1)
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for j in range(2, order + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = order * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < tol:
                    break
            w = 2 / ((1 - x * x) * dp * dp)
            pairs.append((x, w))
    return tuple(pairs)


def _panel(f, lo, hi, order, dps):
    mid = (lo + hi) / 2
    half = (hi - lo) / 2
    acc = mp.mpf(0)
    for x, w in gauss_legendre(order, dps):
        acc += w * (f(mid + half * x) + f(mid - half * x))
    return acc * half


def integrate_finite(f: Callable, a, b, ctx: PrecisionContext, order: int = _GL_ORDER) -> ErrBounded:
    """Adaptive panel quadrature of a continuous ``f`` on [a, b].

    Each panel is estimated with Gauss-Legendre of ``order`` and ``2*order``
    points; the difference is the panel's error estimate, and panels that
    miss their width-proportional share of ``ctx.target_abs_err`` are
    bisected.  Raises :class:`Unconverged` when the bisection depth or the
    panel budget is exhausted.
    """
    with ctx.workprec():
        a = mp.mpf(a)
        b = mp.mpf(b)
        if a == b:
            return ErrBounded(mp.mpf(0), mp.mpf(0))
        if a > b:
            res = integrate_finite(f, b, a, ctx, order)
            return ErrBounded(-res.value, res.err)
        total_w = b - a
        target = mp.mpf(ctx.target_abs_err)
        round_eps = mp.mpf(10) ** (-ctx.digits + 2)
        stack = [(a, b, 0)]
        value = mp.mpf(0)
        err = mp.mpf(0)
        panels = 0
        while stack:
            lo, hi, depth = stack.pop()
            panels += 1
            if panels > _PANEL_BUDGET:
                raise Unconverged(
                    "quadrature panel budget exhausted on [%s, %s]" % (a, b),
                    partial=ErrBounded(value, err),
                )
            coarse = _panel(f, lo, hi, order, ctx.digits)
            fine = _panel(f, lo, hi, 2 * order, ctx.digits)
            e = abs(fine - coarse)
            # second test: splitting cannot beat the working-precision
            # roundoff of the panel sums themselves, so stop there (the
            # difference still lands in the reported radius)
            if e <= target * (hi - lo) / total_w / 2 or e <= abs(fine) * round_eps * 4:
                value = fine + value
                err += e + abs(fine) * round_eps
            elif depth >= _MAX_DEPTH:
                raise Unconverged(
                    "quadrature did not converge at depth %d near [%s, %s]"
                    % (depth, lo, hi),
                    partial=ErrBounded(value + fine, err + e),
                )
            else:
                mid = (lo + hi) / 2
                stack.append((lo, mid, depth + 1))
                stack.append((mid, hi, depth + 1))
        return ErrBounded(value, err)


def integrate_semi_infinite(
    f: Callable,
    a,
    direction: int,
    tail: Callable,
    ctx: PrecisionContext,
    order: int = _GL_ORDER,
) -> ErrBounded:
    """Integrate ``f`` from ``a`` toward +/- infinity with a certified tail.

    ``tail(X)`` must return an upper bound (closed form supplied by the
    caller) for the absolute integral of ``f`` beyond ``X`` in the chosen
    direction, monotone decreasing as X recedes.  The cutoff is pushed out
    by doubling until the tail bound is at most half the error goal; the
    finite part is delegated to :func:`integrate_finite` and the tail bound
    is added to the radius.
    """
    if direction not in (+1, -1):
        raise ValueError("direction must be +1 or -1")
    with ctx.workprec():
        a = mp.mpf(a)
        target = mp.mpf(ctx.target_abs_err)
        span = mp.mpf(1)
        for _ in range(_CUTOFF_BUDGET):
            X = a + direction * span
            tb = mp.mpf(tail(X))
            if tb < 0:
                raise ValueError("tail bound must be non-negative")
            if tb <= target / 2:
                break
            span *= 2
        else:
            raise Unconverged("tail bound never reached tolerance within cutoff budget")
        # doubling sections toward the cutoff keep panel tolerances sane even
        # when a slowly decaying tail pushes X out by many orders of magnitude
        pieces = []
        step = mp.mpf(1)
        cur = a
        while (X - cur) * direction > 0:
            nxt = cur + direction * step
            if (X - nxt) * direction <= 0:
                nxt = X
            pieces.append((cur, nxt))
            cur = nxt
            step *= 2
        floor = mp.mpf(10) ** (-(ctx.digits - 5))
        sub_target = max(target / (2 * max(len(pieces), 1)), floor)
        sub = PrecisionContext(ctx.digits, float(sub_target))
        value = mp.mpf(0)
        err = mp.mpf(0)
        for lo, hi in pieces:
            fin = integrate_finite(f, lo, hi, sub, order)
            value = value + fin.value
            err += fin.err
        if direction < 0:
            value = -value
        return ErrBounded(value, err + tb)


def poly_exp_antiderivative(m: int, lam, u):
    """Antiderivative P with P'(u) = u**m * exp(lam*u), lam != 0.

    ``P(u) = exp(lam*u) * sum_{k=0..m} (-1)**k (m!/(m-k)!) u**(m-k) / lam**(k+1)``.
    Evaluated at the caller's current mpmath precision; exact up to rounding.
    """
    if m < 0 or m != int(m):
        raise ValueError("m must be a non-negative integer")
    lam = mp.mpf(lam)
    if lam == 0:
        raise ValueError("lam must be nonzero")
    u = mp.mpf(u)
    acc = mp.mpf(0)
    falling = mp.mpf(1)  # m!/(m-k)!
    sign = 1
    for k in range(m + 1):
        acc += sign * falling * u ** (m - k) / lam ** (k + 1)
        falling *= m - k
        sign = -sign
    return mp.e ** (lam * u) * acc


def poly_exp_integral(m: int, lam, a, b):
    """Definite integral of u**m * exp(lam*u) over [a, b].

    ``a = -inf`` is allowed when lam > 0 and ``b = +inf`` when lam < 0 (the
    antiderivative limit vanishes there).
    """
    lam = mp.mpf(lam)
    if a == mp.inf or b == -mp.inf:
        raise ValueError("reversed infinite endpoint")
    if a == -mp.inf:
        if lam <= 0:
            raise ValueError("integral from -inf diverges unless lam > 0")
        lo = mp.mpf(0)
    else:
        lo = poly_exp_antiderivative(m, lam, a)
    if b == mp.inf:
        if lam >= 0:
            raise ValueError("integral to +inf diverges unless lam < 0")
        hi = mp.mpf(0)
    else:
        hi = poly_exp_antiderivative(m, lam, b)
    return hi - lo


def odd_poly_eval(odd_coeffs: Sequence, u):
    """Evaluate ``sum_k odd_coeffs[k] * u**(2k+1)`` (Horner in u**2)."""
    u = mp.mpf(u)
    u2 = u * u
    acc = mp.mpf(0)
    for c in reversed(list(odd_coeffs)):
        acc = acc * u2 + c
    return acc * u


def _bisect_root(p, lo, hi, slo, target):
    """Bisect a bracketed sign change to absolute width ``target``."""
    while hi - lo > target:
        mid = (lo + hi) / 2
        sm = p(mid)
        if sm == 0:
            return mid
        if (sm > 0) == (slo > 0):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def isolate_sign_changes(
    odd_coeffs: Sequence,
    lo,
    hi,
    ctx: PrecisionContext,
    steps: int = 4096,
) -> SignChanges:
    """Locate sign changes of an odd-power polynomial on [lo, hi].

    Uniform scan at (hi-lo)/steps followed by bisection to
    ``ctx.target_abs_err``.  Grid points where the value dips to numerical
    zero without a flip are rescanned at 64x resolution; if still ambiguous
    they are flagged as ``uncertain`` (suspected even-order root) instead of
    being silently classified.
    """
    with ctx.workprec():
        cs = [mp.mpf(c) for c in odd_coeffs]
        if all(c == 0 for c in cs):
            raise ValueError("polynomial is identically zero")
        lo = mp.mpf(lo)
        hi = mp.mpf(hi)
        if not lo < hi:
            return SignChanges((), ())
        p = lambda u: odd_poly_eval(cs, u)
        target = mp.mpf(ctx.target_abs_err)
        h = (hi - lo) / steps
        xs = [lo + h * i for i in range(steps + 1)]
        vs = [p(x) for x in xs]
        scale = max(abs(v) for v in vs)
        if scale == 0:
            # zero on the whole grid but not identically zero: everything is suspect
            return SignChanges((), tuple(xs))
        tiny = scale * mp.mpf(10) ** (-(ctx.digits - 6))

        roots = []
        uncertain = []

        def sgn(v):
            if abs(v) <= tiny:
                return 0
            return 1 if v > 0 else -1

        signs = [sgn(v) for v in vs]
        i = 0
        while i < steps:
            s1, s2 = signs[i], signs[i + 1]
            if s1 != 0 and s2 != 0:
                if s1 != s2:
                    roots.append(_bisect_root(p, xs[i], xs[i + 1], vs[i], target))
                i += 1
                continue
            # numerical zero at a grid point: refine the neighbourhood
            j = i + 1
            while j <= steps and signs[j] == 0:
                j += 1
            at_edge = (i == 0 and signs[0] == 0) or j > steps
            left = signs[i] if signs[i] != 0 else (signs[i - 1] if i > 0 else 0)
            right = signs[j] if j <= steps else 0
            seg_lo = xs[max(i - 1, 0)]
            seg_hi = xs[min(j, steps)]
            if left != 0 and right != 0 and left != right:
                roots.append(_bisect_root(p, seg_lo, seg_hi, left * scale, target))
            elif at_edge and (left != 0 or right != 0):
                # a zero at the interval edge is not an interior sign change
                pass
            else:
                # same sign on both flanks: hunt for a hidden double flip
                fine = 64 * max(j - i, 1)
                fh = (seg_hi - seg_lo) / fine
                fxs = [seg_lo + fh * k for k in range(fine + 1)]
                fvs = [p(x) for x in fxs]
                found = False
                for k in range(fine):
                    a1, a2 = fvs[k], fvs[k + 1]
                    if a1 != 0 and a2 != 0 and (a1 > 0) != (a2 > 0):
                        roots.append(_bisect_root(p, fxs[k], fxs[k + 1], a1, target))
                        found = True
                if not found:
                    kmin = min(range(fine + 1), key=lambda k: abs(fvs[k]))
                    uncertain.append(fxs[kmin])
            i = j
        roots.sort()
        dedup = []
        for r in roots:
            if not dedup or r - dedup[-1] > 2 * target:
                dedup.append(r)
        return SignChanges(tuple(dedup), tuple(uncertain))


def maximize_scalar(f: Callable, lo, hi, ctx: PrecisionContext, coarse: int = 48) -> MaxResult:
    """Locate a local maximum of continuous ``f`` inside [lo, hi].

    A coarse scan picks the best bracket, golden-section refines it, and the
    returned maximum satisfies ``max >= f(argmax) - ctx.target_abs_err`` for
    the refined local maximum.  If the bracket endpoints keep winning the
    result is flagged ``boundary`` (a legal outcome for monotone f).
    """
    with ctx.workprec():
        lo = mp.mpf(lo)
        hi = mp.mpf(hi)
        if not lo < hi:
            raise ValueError("empty bracket")
        round_eps = mp.mpf(10) ** (-(ctx.digits - 3))
        xs = [lo + (hi - lo) * i / coarse for i in range(coarse + 1)]
        vs = [mp.mpf(f(x)) for x in xs]
        ibest = max(range(coarse + 1), key=lambda i: vs[i])
        a = xs[max(ibest - 1, 0)]
        b = xs[min(ibest + 1, coarse)]

        invphi = (mp.sqrt(5) - 1) / 2
        x1 = b - invphi * (b - a)
        x2 = a + invphi * (b - a)
        f1 = mp.mpf(f(x1))
        f2 = mp.mpf(f(x2))
        wtol = max((hi - lo) * mp.mpf(10) ** (-(2 * ctx.digits) // 3), mp.mpf(10) ** (-(ctx.digits + 5)))
        for _ in range(2000):
            if b - a <= wtol:
                break
            if f1 < f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + invphi * (b - a)
                f2 = mp.mpf(f(x2))
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - invphi * (b - a)
                f1 = mp.mpf(f(x1))
        xm = (a + b) / 2
        vm = mp.mpf(f(xm))
        cand = [(vm, xm), (f1, x1), (f2, x2)]
        vbest, xbest = max(cand, key=lambda t: t[0])
        spread = max(abs(vbest - v) for v, _ in cand)
        boundary = False
        if xbest - lo <= 2 * wtol and vs[0] >= vbest - spread:
            boundary, xbest, vbest = True, lo, max(vs[0], vbest)
        elif hi - xbest <= 2 * wtol and vs[-1] >= vbest - spread:
            boundary, xbest, vbest = True, hi, max(vs[-1], vbest)
        verr = spread + abs(vbest) * round_eps + mp.mpf(ctx.target_abs_err)
        return MaxResult(
            argmax=ErrBounded(xbest, b - a),
            value=ErrBounded(vbest, verr),
            boundary=boundary,
        )

"""Special functions and distribution CDFs used by the regression diagnostics.

Self-contained: regularized incomplete beta/gamma via the classic
series / continued-fraction pairs, Student-t, Fisher-F, chi-square and
normal CDFs on top of them, and a bracketed quantile solver.
All computation is in 64-bit floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from newsimpact.errors import ConvergenceError, InputError

_MAX_ITER = 300
_EPS = 1e-14
_TINY = 1e-300

FAMILIES = ("student_t", "fisher_f", "chi_square", "normal")


@dataclass(frozen=True)
class DistParams:
    """Distribution family plus degrees of freedom.

    df1 is the (only) df for student_t / chi_square and the numerator df
    for fisher_f; df2 is the fisher_f denominator df. Both ignored for
    normal.
    """

    family: str
    df1: float = 0.0
    df2: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown distribution family {self.family!r}")
        if self.family in ("student_t", "chi_square", "fisher_f") and self.df1 <= 0:
            raise InputError(f"df1 must be positive, got {self.df1}")
        if self.family == "fisher_f" and self.df2 <= 0:
            raise InputError(f"df2 must be positive, got {self.df2}")


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, modified Lentz's method."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise InputError(f"a and b must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise InputError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Symmetry switch keeps the continued fraction in its fast region.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _gamma_series(s: float, x: float) -> float:
    """Lower incomplete gamma by series, valid for x < s + 1."""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise ConvergenceError(f"incomplete gamma series did not converge (s={s}, x={x})")


def _gamma_cf(s: float, x: float) -> float:
    """Upper incomplete gamma Q(s, x) by continued fraction, for x >= s + 1."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise ConvergenceError(
        f"incomplete gamma continued fraction did not converge (s={s}, x={x})"
    )


def reg_inc_gamma(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x)."""
    if s <= 0:
        raise InputError(f"s must be positive, got {s}")
    if x < 0:
        raise InputError(f"x must be non-negative, got {x}")
    if x == 0.0:
        return 0.0
    if x < s + 1.0:
        return _gamma_series(s, x)
    return 1.0 - _gamma_cf(s, x)


def cdf(params: DistParams, x: float) -> float:
    """Cumulative distribution function of the given family at x."""
    fam = params.family
    if fam == "normal":
        return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))
    if fam == "student_t":
        df = params.df1
        if x == 0.0:
            return 0.5
        tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + x * x))
        return 1.0 - tail if x > 0 else tail
    if fam == "fisher_f":
        if x <= 0.0:
            return 0.0
        d1, d2 = params.df1, params.df2
        return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2))
    # chi_square
    if x <= 0.0:
        return 0.0
    return reg_inc_gamma(0.5 * params.df1, 0.5 * x)


def _pdf(params: DistParams, x: float) -> float:
    fam = params.family
    if fam == "normal":
        return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    if fam == "student_t":
        df = params.df1
        ln = (
            math.lgamma(0.5 * (df + 1.0))
            - math.lgamma(0.5 * df)
            - 0.5 * math.log(df * math.pi)
            - 0.5 * (df + 1.0) * math.log1p(x * x / df)
        )
        return math.exp(ln)
    if fam == "fisher_f":
        if x <= 0.0:
            return 0.0
        d1, d2 = params.df1, params.df2
        ln = (
            0.5 * d1 * math.log(d1 / d2)
            + (0.5 * d1 - 1.0) * math.log(x)
            - 0.5 * (d1 + d2) * math.log1p(d1 * x / d2)
            - (math.lgamma(0.5 * d1) + math.lgamma(0.5 * d2) - math.lgamma(0.5 * (d1 + d2)))
        )
        return math.exp(ln)
    # chi_square
    if x <= 0.0:
        return 0.0
    df = params.df1
    ln = (0.5 * df - 1.0) * math.log(x) - 0.5 * x - 0.5 * df * math.log(2.0) - math.lgamma(0.5 * df)
    return math.exp(ln)


def _bracket(params: DistParams, p: float) -> tuple[float, float]:
    """Find [lo, hi] with cdf(lo) <= p <= cdf(hi)."""
    if params.family in ("normal", "student_t"):
        lo, hi = -1.0, 1.0
        while cdf(params, lo) > p:
            lo *= 2.0
        while cdf(params, hi) < p:
            hi *= 2.0
        return lo, hi
    lo, hi = 0.0, 1.0
    while cdf(params, hi) < p:
        hi *= 2.0
    return lo, hi


def inv_cdf(params: DistParams, p: float) -> float:
    """Quantile function: x with cdf(x) = p, |cdf(inv_cdf(p)) - p| <= 1e-10."""
    if not 0.0 < p < 1.0:
        raise InputError(f"p must lie in (0, 1), got {p}")
    if params.family in ("normal", "student_t") and p == 0.5:
        return 0.0
    lo, hi = _bracket(params, p)
    # Bisect until the bracket is tight, then polish with Newton steps.
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if cdf(params, mid) < p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(5):
        err = cdf(params, x) - p
        if abs(err) <= 1e-12:
            break
        slope = _pdf(params, x)
        if slope <= 0.0:
            break
        step = err / slope
        nxt = x - step
        if not lo <= nxt <= hi:
            break
        x = nxt
    return x

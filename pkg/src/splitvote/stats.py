"""Two-sample t-tests and Pearson correlation with exact p-value backend.

The p-values come from the cumulative t distribution, evaluated through the
regularized incomplete beta function with a continued-fraction expansion
(modified Lentz algorithm). That keeps the package free of heavyweight
statistics dependencies while matching reference implementations to well
below the tolerances used anywhere in the toolkit.

The independent two-sample test defaults to Welch's unequal-variance form,
the safe choice when group sizes are very different (split-vote pairs are a
small minority of any real corpus). The pooled Student variant is available
behind a flag for sensitivity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DegenerateGroup, MisalignedKeys, ZeroVariance

_CF_MAX_ITER = 400
_CF_EPS = 1e-15
_CF_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
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
    # Expand on whichever side converges quickly, mirror for the other.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    """Cumulative distribution function of Student's t with df > 0.

    Two-sided p-values follow as 2 * (1 - t_cdf(|t|, df)).
    """
    if df <= 0.0:
        raise ValueError("degrees of freedom must be positive")
    if math.isnan(t):
        return math.nan
    if t == 0.0:
        return 0.5
    if math.isinf(t):
        return 1.0 if t > 0.0 else 0.0
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return 1.0 - tail if t > 0.0 else tail


def two_sided_p(t: float, df: float) -> float:
    """Two-sided p-value for a t statistic."""
    if math.isnan(t):
        return math.nan
    p = 2.0 * (1.0 - t_cdf(abs(t), df))
    return min(max(p, 0.0), 1.0)


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _sample_var(xs: Sequence[float], mean: float) -> float:
    return math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1)


@dataclass(frozen=True)
class TTestResult:
    """Independent two-sample t-test outcome.

    ``mean_0`` / ``mean_1`` are the group means in argument order (for proxy
    association rows: absent first, present second). ``zero_variance`` marks
    the degenerate case of two constant samples, where the p-value is pinned
    to 0 (means differ) or 1 (means equal) by convention.
    """

    mean_0: float
    mean_1: float
    t_value: float
    df: float
    p_value: float
    zero_variance: bool = False


def t_test(
    group_0: Sequence[float],
    group_1: Sequence[float],
    equal_var: bool = False,
) -> TTestResult:
    """Independent two-sample t-test, Welch's form by default.

    t = (mean_0 - mean_1) / sqrt(v0/n0 + v1/n1), with the Welch-Satterthwaite
    degrees of freedom and a two-sided p-value. ``equal_var=True`` switches to
    the pooled Student variant with df = n0 + n1 - 2.
    """
    n0, n1 = len(group_0), len(group_1)
    if n0 < 2 or n1 < 2:
        raise DegenerateGroup(f"each group needs at least 2 values, got {n0} and {n1}")
    m0, m1 = _mean(group_0), _mean(group_1)
    v0, v1 = _sample_var(group_0, m0), _sample_var(group_1, m1)
    if v0 == 0.0 and v1 == 0.0:
        if m0 == m1:
            return TTestResult(m0, m1, 0.0, float(n0 + n1 - 2), 1.0, True)
        t = math.inf if m0 > m1 else -math.inf
        return TTestResult(m0, m1, t, float(n0 + n1 - 2), 0.0, True)
    if equal_var:
        pooled = ((n0 - 1) * v0 + (n1 - 1) * v1) / (n0 + n1 - 2)
        se = math.sqrt(pooled * (1.0 / n0 + 1.0 / n1))
        df = float(n0 + n1 - 2)
    else:
        q0, q1 = v0 / n0, v1 / n1
        se = math.sqrt(q0 + q1)
        df = (q0 + q1) ** 2 / (q0 * q0 / (n0 - 1) + q1 * q1 / (n1 - 1))
    t = (m0 - m1) / se
    return TTestResult(m0, m1, t, df, two_sided_p(t, df))


@dataclass(frozen=True)
class CorrResult:
    """Pearson correlation with a two-sided significance test."""

    r: float
    p_value: float
    n: int


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrResult:
    """Sample Pearson correlation with its two-sided p-value.

    The p-value uses t = r * sqrt((n-2) / (1-r^2)) against Student's t with
    n-2 degrees of freedom; for |r| = 1 it is exactly 0.
    """
    if len(x) != len(y):
        raise MisalignedKeys(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise DegenerateGroup(f"need at least 3 paired samples, got {n}")
    mx, my = _mean(x), _mean(y)
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("correlation undefined for a constant sample")
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    r = min(max(r, -1.0), 1.0)
    if abs(r) == 1.0:
        return CorrResult(r, 0.0, n)
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return CorrResult(r, two_sided_p(t, n - 2), n)


@dataclass(frozen=True)
class ProxyAssociation:
    """One association row: does a binary case property go with disagreement?

    Shaped like a report table row: mean entropy with the proxy absent and
    present, the t statistic, and its p-value, plus the group sizes.
    """

    n_absent: int
    n_present: int
    ttest: TTestResult

    @property
    def mean_absent(self) -> float:
        return self.ttest.mean_0

    @property
    def mean_present(self) -> float:
        return self.ttest.mean_1


def proxy_association(
    entropies: Mapping[object, float],
    proxy_flags: Mapping[object, bool],
    equal_var: bool = False,
) -> ProxyAssociation:
    """Compare vote entropy between pairs with and without a proxy property.

    Both mappings must cover exactly the same keys. The entropies are
    partitioned by flag value (absent = 0, present = 1) and handed to
    :func:`t_test` in that order, so a negative t means the present group is
    noisier.
    """
    missing = set(entropies) ^ set(proxy_flags)
    if missing:
        sample = ", ".join(repr(k) for k in sorted(missing, key=repr)[:5])
        raise MisalignedKeys(f"entropy and proxy keys differ, e.g. {sample}")
    absent: list[float] = []
    present: list[float] = []
    for key in sorted(entropies, key=repr):
        (present if proxy_flags[key] else absent).append(entropies[key])
    if len(absent) < 2 or len(present) < 2:
        raise DegenerateGroup(
            f"need at least 2 pairs per group, got absent={len(absent)} "
            f"present={len(present)}"
        )
    return ProxyAssociation(
        len(absent), len(present), t_test(absent, present, equal_var=equal_var)
    )

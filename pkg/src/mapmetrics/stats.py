"""Nonparametric tests: Mann-Whitney U for two-group comparison and
Spearman rank correlation for monotone trends.

Both tests are two-sided and rank-based (mid-ranks for ties), so they are
invariant under strictly increasing transformations of the inputs. Exact
p-values use the full null distribution where feasible; larger samples
fall back to the standard approximations with tie and continuity
corrections. Thresholds for switching are arguments, not constants.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import permutations

from scipy.special import betainc

from .errors import ConstantInputError

MANN_WHITNEY_EXACT_LIMIT = 10_000  # max n1*n2 for the exact distribution
SPEARMAN_EXACT_LIMIT = 8           # max n for permutation enumeration


@dataclass(frozen=True)
class TestResult:
    """Mann-Whitney outcome. ``degenerate`` marks the all-values-identical
    case where p = 1 holds by convention."""

    u_statistic: float
    p_value: float
    n1: int
    n2: int
    method: str
    degenerate: bool = False


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int
    method: str


def rank_with_ties(values) -> list[float]:
    """Mid-ranks (1-based): tied values share the average of the ranks they
    span, so the ranks always sum to n(n+1)/2."""
    values = list(values)
    if not values:
        raise ValueError("cannot rank an empty list")
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    start = 0
    while start < len(order):
        stop = start
        while stop + 1 < len(order) and values[order[stop + 1]] == values[order[start]]:
            stop += 1
        mid = (start + stop) / 2.0 + 1.0
        for k in range(start, stop + 1):
            ranks[order[k]] = mid
        start = stop + 1
    return ranks


def _mult_one_minus_qk(poly: list[int], k: int) -> list[int]:
    out = [0] * (len(poly) + k)
    for j, c in enumerate(poly):
        out[j] += c
        out[j + k] -= c
    return out


def _div_one_minus_qk(poly: list[int], k: int) -> list[int]:
    out = [0] * (len(poly) - k)
    for j in range(len(out)):
        out[j] = poly[j] + (out[j - k] if j >= k else 0)
    return out


def u_null_distribution(n1: int, n2: int) -> list[int]:
    """Counts of rank assignments per U value under the null (no ties).

    Entry u holds the number of ways to choose the n1 x-ranks out of
    n1+n2 so that the U statistic equals u; built as the Gaussian binomial
    coefficient polynomial, one factor at a time.
    """
    poly = [1]
    for i in range(1, n1 + 1):
        poly = _div_one_minus_qk(_mult_one_minus_qk(poly, n2 + i), i)
    return poly


def _normal_two_sided(z: float) -> float:
    # 2 * Phi(z) for the lower-tail z of the centered statistic
    return math.erfc(-z / math.sqrt(2.0))


def mann_whitney_u(x, y, exact_limit: int = MANN_WHITNEY_EXACT_LIMIT) -> TestResult:
    """Two-sided Mann-Whitney U test with the min-U convention.

    U = min(U1, U2) with U1 = R1 - n1(n1+1)/2 over pooled mid-ranks. The
    p-value is exact (full null distribution) when the data are tie-free
    and n1*n2 <= exact_limit; otherwise it uses the normal approximation
    with tie correction and a 0.5 continuity correction. All pooled values
    identical is degenerate: p = 1 by convention, flagged.
    """
    x, y = list(x), list(y)
    n1, n2 = len(x), len(y)
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples must be nonempty")
    pooled = x + y
    ranks = rank_with_ties(pooled)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    u = min(u1, u2)

    has_ties = len(set(pooled)) < len(pooled)
    if not has_ties and n1 * n2 <= exact_limit:
        dist = u_null_distribution(n1, n2)
        total = math.comb(n1 + n2, n1)
        cum = sum(dist[: int(round(u)) + 1])
        p = min(1.0, 2.0 * cum / total)
        return TestResult(u, p, n1, n2, "exact")

    big_n = n1 + n2
    tie_term = sum(t**3 - t for t in Counter(pooled).values())
    variance = n1 * n2 / 12.0 * ((big_n + 1) - tie_term / (big_n * (big_n - 1)))
    if variance <= 0.0:
        return TestResult(u, 1.0, n1, n2, "normal-approximation", degenerate=True)
    z = (u - n1 * n2 / 2.0 + 0.5) / math.sqrt(variance)
    p = max(0.0, min(1.0, _normal_two_sided(z)))
    return TestResult(u, p, n1, n2, "normal-approximation")


def _pearson(a: list[float], b: list[float]) -> float:
    n = len(a)
    ma = sum(a) / n
    mb = sum(b) / n
    da = [v - ma for v in a]
    db = [v - mb for v in b]
    saa = sum(v * v for v in da)
    sbb = sum(v * v for v in db)
    if saa == 0.0 or sbb == 0.0:
        raise ConstantInputError("zero rank variance; correlation undefined")
    r = sum(p * q for p, q in zip(da, db)) / math.sqrt(saa * sbb)
    return max(-1.0, min(1.0, r))


def spearman(x, y, exact_limit: int = SPEARMAN_EXACT_LIMIT) -> CorrelationResult:
    """Two-sided Spearman rank correlation.

    rho is the Pearson correlation of mid-ranks. For n <= exact_limit the
    p-value enumerates all n! permutations (share with |rho| at least the
    observed, within a 1e-12 slack for float ties); beyond that it uses the
    t approximation with n-2 degrees of freedom, and |rho| = 1 falls back
    to the permutation bound 2/n!.

    Raises ConstantInputError when either input has zero rank variance;
    an undefined rho is never reported as 0.
    """
    x, y = list(x), list(y)
    n = len(x)
    if len(y) != n:
        raise ValueError("x and y must have equal length")
    if n < 3:
        raise ValueError("need at least 3 observations")
    rx = rank_with_ties(x)
    ry = rank_with_ties(y)
    rho = _pearson(rx, ry)

    if n <= exact_limit:
        mx = sum(rx) / n
        dx = [v - mx for v in rx]
        sxx = sum(v * v for v in dx)
        my = sum(ry) / n
        dy_all = [v - my for v in ry]
        syy = sum(v * v for v in dy_all)
        threshold = abs(rho) - 1e-12
        hits = 0
        count = 0
        for perm in permutations(dy_all):
            r = sum(p * q for p, q in zip(dx, perm)) / math.sqrt(sxx * syy)
            if abs(r) >= threshold:
                hits += 1
            count += 1
        return CorrelationResult(rho, hits / count, n, "exact-permutation")

    if 1.0 - rho * rho <= 0.0:
        p = min(1.0, 2.0 / math.factorial(n))
        return CorrelationResult(rho, p, n, "t-approximation")
    df = n - 2
    t2 = rho * rho * df / (1.0 - rho * rho)
    p = float(betainc(df / 2.0, 0.5, df / (df + t2)))
    return CorrelationResult(rho, max(0.0, min(1.0, p)), n, "t-approximation")

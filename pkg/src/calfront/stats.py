"""Nonparametric comparison protocol.

Kruskal-Wallis across k groups, one-sided Mann-Whitney U for ordered
pairwise claims (exact enumeration on small tie-free samples, otherwise a
tie-corrected normal approximation with continuity correction), Bonferroni
correction, Cohen's d effect size, and tie-corrected Kendall's tau-b. Only
the distribution tail functions come from scipy.special; the test logic is
implemented here and checked against independent oracles in the tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import scipy.special as _sp

__all__ = [
    "Alternative",
    "Method",
    "StatResult",
    "adjust_p",
    "bonferroni",
    "cohens_d",
    "kendall_tau",
    "kruskal_wallis",
    "mann_whitney_u",
]

# exact MWU enumeration is used up to this product of sample sizes
EXACT_MWU_LIMIT = 400


class Method(enum.Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal-approx"
    CHI_SQUARE_APPROX = "chi-square-approx"


class Alternative(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    TWO_SIDED = "two-sided"


@dataclass(frozen=True)
class StatResult:
    statistic: float
    df: int | None
    p_value: float
    method: Method

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")


def _validate_sample(x, name: str, min_len: int = 1) -> list[float]:
    vals = [float(v) for v in x]
    if len(vals) < min_len:
        raise ValueError(f"{name} needs at least {min_len} values, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise ValueError(f"{name} contains non-finite values")
    return vals


def _midranks(values: list[float]) -> list[float]:
    """Ranks 1..n with ties sharing their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _tie_sizes(values: list[float]) -> list[int]:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return [t for t in counts.values() if t > 1]


def kruskal_wallis(groups) -> StatResult:
    """H on midranks with tie correction; p from the chi-square upper tail."""
    samples = [_validate_sample(g, f"group {i}") for i, g in enumerate(groups)]
    if len(samples) < 2:
        raise ValueError(f"need at least 2 groups, got {len(samples)}")
    pooled = [v for s in samples for v in s]
    n = len(pooled)
    ranks = _midranks(pooled)
    h = 0.0
    idx = 0
    for s in samples:
        r_sum = sum(ranks[idx : idx + len(s)])
        idx += len(s)
        h += r_sum * r_sum / len(s)
    h = 12.0 * h / (n * (n + 1)) - 3.0 * (n + 1)
    ties = _tie_sizes(pooled)
    correction = 1.0 - sum(t**3 - t for t in ties) / (n**3 - n)
    df = len(samples) - 1
    if correction == 0.0:
        # every pooled value identical: no rank variation at all
        return StatResult(0.0, df, 1.0, Method.CHI_SQUARE_APPROX)
    h /= correction
    p = float(_sp.chdtrc(df, h))
    return StatResult(h, df, min(max(p, 0.0), 1.0), Method.CHI_SQUARE_APPROX)


def _u_statistic(x: list[float], y: list[float]) -> float:
    """U for x: pairs where x beats y, half credit for ties."""
    u = 0.0
    for xi in x:
        for yj in y:
            if xi > yj:
                u += 1.0
            elif xi == yj:
                u += 0.5
    return u


def _exact_u_counts(n: int, m: int) -> list[int]:
    """Null distribution counts of U over 0..n*m (tie-free), exact integers.

    dp over the number of x-values placed; adding the i-th x contributes
    0..m to U depending on how many y it exceeds.
    """
    counts = [1] + [0] * (n * m)
    for i in range(1, n + 1):
        new = [0] * (n * m + 1)
        prev_max = (i - 1) * m
        for u in range(prev_max + 1):
            cu = counts[u]
            if cu:
                for k in range(m + 1):
                    new[u + k] += cu
        counts = new
    return counts


def mann_whitney_u(x, y, alternative: Alternative) -> StatResult:
    """One- or two-sided Mann-Whitney U test.

    Exact path: tie-free data with n_x * n_y <= EXACT_MWU_LIMIT, p as an
    integer count ratio over all C(n+m, n) arrangements. Otherwise normal
    approximation with tie-corrected variance and 0.5 continuity
    correction. The chosen path is recorded in StatResult.method.
    """
    xs = _validate_sample(x, "x")
    ys = _validate_sample(y, "y")
    n, m = len(xs), len(ys)
    u = _u_statistic(xs, ys)
    has_ties = len(set(xs + ys)) < n + m
    if not has_ties and n * m <= EXACT_MWU_LIMIT:
        counts = _exact_u_counts(n, m)
        total = math.comb(n + m, n)
        ui = int(u)  # tie-free U is integral
        p_less = sum(counts[: ui + 1]) / total
        p_greater = sum(counts[ui:]) / total
        if alternative is Alternative.LESS:
            p = p_less
        elif alternative is Alternative.GREATER:
            p = p_greater
        else:
            p = min(1.0, 2.0 * min(p_less, p_greater))
        return StatResult(u, None, p, Method.EXACT)
    mu = n * m / 2.0
    pooled = xs + ys
    nm = n + m
    tie_term = sum(t**3 - t for t in _tie_sizes(pooled))
    var = n * m / 12.0 * ((nm + 1) - tie_term / (nm * (nm - 1)))
    if var <= 0.0:
        # all values identical: U is degenerate at n*m/2
        return StatResult(u, None, 1.0, Method.NORMAL_APPROX)
    sd = math.sqrt(var)
    if alternative is Alternative.LESS:
        p = float(_sp.ndtr((u - mu + 0.5) / sd))
    elif alternative is Alternative.GREATER:
        p = float(_sp.ndtr(-(u - mu - 0.5) / sd))
    else:
        z = (u - mu - 0.5) if u > mu else (u - mu + 0.5) if u < mu else 0.0
        p = min(1.0, 2.0 * float(_sp.ndtr(-abs(z / sd))))
    return StatResult(u, None, min(max(p, 0.0), 1.0), Method.NORMAL_APPROX)


def bonferroni(alpha: float, m: int) -> float:
    """Comparison-level alpha for m tests."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return alpha / m


def adjust_p(p: float, m: int) -> float:
    """Bonferroni-adjusted p-value, clamped to 1."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return min(1.0, m * p)


def cohens_d(x, y) -> float:
    """Standardized mean difference with the pooled-sd convention."""
    xs = _validate_sample(x, "x", min_len=2)
    ys = _validate_sample(y, "y", min_len=2)
    n, m = len(xs), len(ys)
    mx = sum(xs) / n
    my = sum(ys) / m
    vx = sum((v - mx) ** 2 for v in xs) / (n - 1)
    vy = sum((v - my) ** 2 for v in ys) / (m - 1)
    pooled = ((n - 1) * vx + (m - 1) * vy) / (n + m - 2)
    if pooled <= 0.0:
        raise ValueError("zero pooled variance")
    return (mx - my) / math.sqrt(pooled)


def _merge_count_inversions(seq: list[float]) -> int:
    """Strict inversions (later value strictly smaller) via merge sort."""
    if len(seq) <= 1:
        return 0
    mid = len(seq) // 2
    left = seq[:mid]
    right = seq[mid:]
    inv = _merge_count_inversions(left) + _merge_count_inversions(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if right[j] < left[i]:
            inv += len(left) - i
            merged.append(right[j])
            j += 1
        else:
            merged.append(left[i])
            i += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    seq[:] = merged
    return inv


def kendall_tau(x, y) -> StatResult:
    """Tie-corrected tau-b with a normal-approximation p (two-sided).

    Concordant-minus-discordant is computed with the merge-sort inversion
    count after sorting by (x, y); within an x-tie block the y's are
    pre-sorted ascending, so ties in x never contribute inversions.
    """
    xs = _validate_sample(x, "x", min_len=2)
    ys = _validate_sample(y, "y", min_len=2)
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    pairs = sorted(zip(xs, ys))
    yseq = [p[1] for p in pairs]
    dis = _merge_count_inversions(yseq[:])
    n0 = n * (n - 1) // 2
    tx = _tie_sizes(xs)
    ty = _tie_sizes(ys)
    joint: dict[tuple[float, float], int] = {}
    for p in pairs:
        joint[p] = joint.get(p, 0) + 1
    n1 = sum(t * (t - 1) // 2 for t in tx)
    n2 = sum(t * (t - 1) // 2 for t in ty)
    n3 = sum(t * (t - 1) // 2 for t in joint.values() if t > 1)
    denom = math.sqrt(float(n0 - n1)) * math.sqrt(float(n0 - n2))
    if denom == 0.0:
        raise ValueError("tau undefined for constant input")
    # pairs untied in both coordinates split into concordant/discordant
    c_minus_d = (n0 - n1 - n2 + n3) - 2 * dis
    tau = c_minus_d / denom
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(t * (t - 1) * (2 * t + 5) for t in ty)
    var = (v0 - vt - vu) / 18.0
    var += (
        sum(t * (t - 1) for t in tx) * sum(t * (t - 1) for t in ty) / (2.0 * n * (n - 1))
    )
    if n > 2:
        var += (
            sum(t * (t - 1) * (t - 2) for t in tx)
            * sum(t * (t - 1) * (t - 2) for t in ty)
            / (9.0 * n * (n - 1) * (n - 2))
        )
    if var <= 0.0:
        p = 1.0
    else:
        z = c_minus_d / math.sqrt(var)
        p = min(1.0, 2.0 * float(_sp.ndtr(-abs(z))))
    return StatResult(tau, None, p, Method.NORMAL_APPROX)

"""Tie-aware rank statistics: Spearman's rho, Pearson's r, significance.

Significance is two-sided. For n <= 8 the p-value is exact, enumerating all
n! permutations of one rank (or value) vector; for larger n it uses the
t-approximation t = r * sqrt((n-2) / (1-r^2)) with n-2 degrees of freedom.
The Student-t CDF is computed from the regularized incomplete beta function
evaluated with a modified Lentz continued fraction, so no statistics runtime
is needed at run time.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError

EXACT_PERMUTATION_MAX_N = 8


class Method(enum.Enum):
    SPEARMAN_PERMUTATION = "spearman_permutation"
    SPEARMAN_T_APPROX = "spearman_t_approx"
    PEARSON_PERMUTATION = "pearson_permutation"
    PEARSON_T_APPROX = "pearson_t_approx"


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    n: int
    p_value: float
    method: Method

    @property
    def stars(self) -> str:
        return significance_stars(self.p_value)


def significance_stars(p_value: float) -> str:
    """Annotation thresholds: p<0.1 '*', p<0.05 '**', p<0.01 '***'."""
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""


def _check_vector(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains NaN or infinite values")
    return arr


def rank(values: Sequence[float]) -> np.ndarray:
    """Ranks 1..n, ties receiving the average of the positions they occupy."""
    arr = _check_vector(values, "values")
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=np.float64)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson_coefficient(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DataError("correlation undefined for a constant vector")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _permutation_p(x: np.ndarray, y: np.ndarray, observed: float) -> float:
    """Two-sided exact p: share of y-permutations with |r| >= |r_obs|.

    Permuting y leaves its centered norm unchanged, so only the cross product
    varies; the 1e-12 slack keeps the identity permutation counted despite
    float rounding, and the result is an exact multiple of 1/n!.
    """
    dx = tuple(float(v) for v in x - x.mean())
    dy = tuple(float(v) for v in y - y.mean())
    denom = math.sqrt(sum(v * v for v in dx) * sum(v * v for v in dy))
    threshold = (abs(observed) - 1e-12) * denom
    hits = 0
    total = 0
    for perm in itertools.permutations(dy):
        total += 1
        dot = 0.0
        for a, b in zip(dx, perm):
            dot += a * b
        if abs(dot) >= threshold:
            hits += 1
    return hits / total


def _t_approx_p(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    df = n - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    return student_t_sf_two_sided(abs(t), df)


def _correlate(
    x_raw: Sequence[float],
    y_raw: Sequence[float],
    use_ranks: bool,
    p_method: str,
) -> CorrelationResult:
    x = _check_vector(x_raw, "x")
    y = _check_vector(y_raw, "y")
    if len(x) != len(y):
        raise DataError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise DataError(f"need at least 3 pairs, got {n}")
    if use_ranks:
        x, y = rank(x), rank(y)
    coefficient = _pearson_coefficient(x, y)
    exact = p_method == "exact" or (p_method == "auto" and n <= EXACT_PERMUTATION_MAX_N)
    if exact:
        p = _permutation_p(x, y, coefficient)
        method = Method.SPEARMAN_PERMUTATION if use_ranks else Method.PEARSON_PERMUTATION
    else:
        p = _t_approx_p(coefficient, n)
        method = Method.SPEARMAN_T_APPROX if use_ranks else Method.PEARSON_T_APPROX
    return CorrelationResult(coefficient=coefficient, n=n, p_value=p, method=method)


def spearman(x: Sequence[float], y: Sequence[float], p_method: str = "auto") -> CorrelationResult:
    """Spearman's rho: Pearson correlation of averaged ranks.

    p_method is 'auto' (exact permutation for n <= 8, else t-approximation),
    'exact', or 'approx'.
    """
    return _correlate(x, y, use_ranks=True, p_method=_check_p_method(p_method))


def pearson(x: Sequence[float], y: Sequence[float], p_method: str = "auto") -> CorrelationResult:
    """Product-moment correlation with the same significance contract."""
    return _correlate(x, y, use_ranks=False, p_method=_check_p_method(p_method))


def _check_p_method(p_method: str) -> str:
    if p_method not in ("auto", "exact", "approx"):
        raise DataError(f"unknown p-value method {p_method!r}")
    return p_method


# ---------------------------------------------------------------------------
# Student-t survival via the regularized incomplete beta function.
# ---------------------------------------------------------------------------

_BETAINC_EPS = 1e-12
_BETAINC_TINY = 1e-300
_BETAINC_MAX_ITER = 500


def _betainc_continued_fraction(a: float, b: float, x: float) -> float:
    """Modified Lentz evaluation of the continued fraction for I_x(a, b).

    Standard even/odd coefficients d_{2m} = m(b-m)x / ((a+2m-1)(a+2m)) and
    d_{2m+1} = -(a+m)(a+b+m)x / ((a+2m)(a+2m+1)); converges fast for
    x < (a+1)/(a+b+2), which the caller guarantees via the symmetry relation.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETAINC_TINY:
        d = _BETAINC_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETAINC_MAX_ITER + 1):
        m2 = 2 * m
        coeff = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coeff * d
        if abs(d) < _BETAINC_TINY:
            d = _BETAINC_TINY
        c = 1.0 + coeff / c
        if abs(c) < _BETAINC_TINY:
            c = _BETAINC_TINY
        d = 1.0 / d
        h *= d * c
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coeff * d
        if abs(d) < _BETAINC_TINY:
            d = _BETAINC_TINY
        c = 1.0 + coeff / c
        if abs(c) < _BETAINC_TINY:
            c = _BETAINC_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETAINC_EPS:
            return h
    raise DataError("incomplete beta continued fraction did not converge")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1], accurate to ~1e-12."""
    if a <= 0.0 or b <= 0.0:
        raise DataError(f"betainc parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DataError(f"betainc argument x={x} outside [0, 1]")
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
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betainc_continued_fraction(a, b, x) / a
    return 1.0 - front * _betainc_continued_fraction(b, a, 1.0 - x) / b


def student_t_sf_two_sided(t_abs: float, df: int) -> float:
    """P(|T| >= t) for T ~ Student-t(df), via I_x(df/2, 1/2) at x = df/(df+t^2)."""
    if df < 1:
        raise DataError(f"degrees of freedom must be >= 1, got {df}")
    if t_abs == 0.0:
        return 1.0
    x = df / (df + t_abs * t_abs)
    return betainc_regularized(df / 2.0, 0.5, x)


# ---------------------------------------------------------------------------
# Table construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    region_id: str
    source: str
    reference: str
    coefficient: float
    n: int
    p_value: float
    stars: str
    method: Method


@dataclass
class CorrelationTable:
    rows: list[TableRow]
    # Regions where the coefficient is undefined (constant series), with the
    # reason; they are reported rather than silently dropped.
    skipped: list[tuple[str, str]]


def correlate_table(
    news_by_region: dict,
    reference_by_region: dict,
    source: str = "news",
    reference_name: str = "satellite",
    lag: int = 0,
    p_method: str = "auto",
) -> CorrelationTable:
    """Spearman and Pearson per region for every region present in both sets.

    Regions are processed in sorted id order; each contributes two rows
    (one per coefficient) carrying n, the two-sided p and its star annotation.
    A region whose aligned series is constant has no defined coefficient and
    lands in `skipped` instead of aborting the whole table.
    """
    from .refdata import align  # refdata owns alignment; no import cycle

    rows: list[TableRow] = []
    skipped: list[tuple[str, str]] = []
    shared = sorted(set(news_by_region) & set(reference_by_region))
    if not shared:
        raise DataError(
            f"no shared regions between {source} series and {reference_name} series"
        )
    for region_id in shared:
        _, x, y = align(news_by_region[region_id], reference_by_region[region_id], lag=lag)
        try:
            results = (spearman(x, y, p_method=p_method), pearson(x, y, p_method=p_method))
        except DataError as exc:
            skipped.append((region_id, str(exc)))
            continue
        for result in results:
            rows.append(
                TableRow(
                    region_id=region_id,
                    source=source,
                    reference=reference_name,
                    coefficient=result.coefficient,
                    n=result.n,
                    p_value=result.p_value,
                    stars=result.stars,
                    method=result.method,
                )
            )
    return CorrelationTable(rows=rows, skipped=skipped)

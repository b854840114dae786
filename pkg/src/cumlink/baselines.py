"""Classical omnibus and pairwise tests, each tagged with its data assumptions.

These are the comparison methods an ordinal analysis is usually judged
against.  Every result carries the assumption flags of its test (metric
data, normality of residuals, equal variance) so a report can state when
a metric assumption was imposed on ordinal input.  Rank statistics use
midranks with the standard tie-corrected variances throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import chi2, f as f_dist, norm, rankdata

from .data import DataWarning

# Exact null distributions are enumerable in well under a second up to
# these sizes; beyond them the normal approximation takes over.  Both
# bounds can be overridden per call.
EXACT_SIGNED_RANK_MAX = 25
EXACT_RANK_SUM_MAX = 8


@dataclass(frozen=True)
class RegistryEntry:
    """Assumption metadata for one test, implemented here or not."""

    key: str
    name: str
    category: str
    designs: tuple[str, ...]
    metric_data: bool
    normality: bool
    equal_variance: bool
    implemented: bool


# Assumption registry.  Parametric methods assume metric data, normal
# residuals, and equal variances; rank methods drop all three unless they
# difference or average raw values before ranking (signed-rank, Quade,
# ART), which silently reintroduces the metric assumption.
REGISTRY: dict[str, RegistryEntry] = {
    e.key: e
    for e in [
        RegistryEntry("one-way-anova", "One-way ANOVA", "omnibus",
                      ("between",), True, True, True, True),
        RegistryEntry("kruskal-wallis", "Kruskal-Wallis test", "omnibus",
                      ("between",), False, False, False, True),
        RegistryEntry("friedman", "Friedman test", "omnibus",
                      ("within",), False, False, False, True),
        RegistryEntry("wilcoxon-signed-rank", "Wilcoxon Signed Rank test",
                      "pairwise", ("within",), True, False, False, True),
        RegistryEntry("wilcoxon-rank-sum", "Wilcoxon Rank Sum test",
                      "pairwise", ("between",), False, False, False, True),
        RegistryEntry("art-anova", "ART-ANOVA", "omnibus",
                      ("mixed",), True, False, False, False),
        RegistryEntry("art-contrasts", "ART-Contrasts", "pairwise",
                      ("mixed",), True, False, False, False),
        RegistryEntry("dunn", "Dunn test", "pairwise",
                      ("between",), False, False, False, False),
        RegistryEntry("conover", "Conover test", "pairwise",
                      ("between", "within"), False, False, False, False),
        RegistryEntry("chi-squared", "Chi-squared test", "pairwise",
                      ("between",), False, False, False, False),
        RegistryEntry("nemenyi", "Nemenyi test", "pairwise",
                      ("within",), False, False, False, False),
        RegistryEntry("games-howell", "(Ranked) Games-Howell test", "pairwise",
                      ("between",), False, False, False, False),
        RegistryEntry("kolmogorov-smirnov", "Kolmogorov-Smirnov test",
                      "pairwise", ("between",), False, False, False, False),
        RegistryEntry("quade", "Quade test", "omnibus",
                      ("within",), True, False, False, False),
    ]
}


def registry_entry(key: str, design: str | None = None) -> RegistryEntry:
    """Look up a test's assumption metadata.

    Tests listed under more than one experimental design (currently the
    Conover test) require the caller to declare which design produced the
    data; the answer is the entry itself, the declaration is a check.
    """
    if key not in REGISTRY:
        raise KeyError(
            f"unknown test {key!r}; known: {sorted(REGISTRY)}"
        )
    entry = REGISTRY[key]
    if len(entry.designs) > 1:
        if design is None:
            raise ValueError(
                f"{entry.name} applies to {' and '.join(entry.designs)} "
                f"designs; declare design="
            )
        if design not in entry.designs:
            raise ValueError(
                f"{entry.name} does not apply to {design!r} designs"
            )
    elif design is not None and design not in entry.designs:
        raise ValueError(f"{entry.name} is a {entry.designs[0]}-design test")
    return entry


@dataclass(frozen=True)
class TestResult:
    """Outcome of a classical test plus its assumption metadata.

    df is a pair for F tests, an integer for chi-square tests, and None
    for the rank statistics whose null needs no degrees of freedom.
    """

    name: str
    statistic: float
    df: int | tuple[int, int] | None
    p: float
    metric_data: bool
    normality: bool
    equal_variance: bool
    design: str
    note: str = ""


def _result(key: str, statistic, df, p, note: str = "") -> TestResult:
    entry = REGISTRY[key]
    return TestResult(
        name=entry.name,
        statistic=float(statistic),
        df=df,
        p=float(min(max(p, 0.0), 1.0)),
        metric_data=entry.metric_data,
        normality=entry.normality,
        equal_variance=entry.equal_variance,
        design=entry.designs[0],
        note=note,
    )


def _tie_term(values: np.ndarray) -> float:
    """Sum of t^3 - t over groups of tied values."""
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def oneway_anova(groups: Sequence[Sequence[float]]) -> TestResult:
    """Between-subjects F test on group means.

    Raises:
        ValueError: fewer than 2 groups, or a group with fewer than 2
            observations.
    """
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if len(arrays) < 2:
        raise ValueError("needs at least 2 groups")
    for i, g in enumerate(arrays):
        if len(g) < 2:
            raise ValueError(f"group {i} has {len(g)} observations, needs >= 2")
    k = len(arrays)
    N = sum(len(g) for g in arrays)
    grand = np.concatenate(arrays).mean()
    ss_between = sum(len(g) * (g.mean() - grand) ** 2 for g in arrays)
    ss_within = sum(float(np.sum((g - g.mean()) ** 2)) for g in arrays)
    df = (k - 1, N - k)
    if ss_between == 0.0:
        return _result("one-way-anova", 0.0, df, 1.0)
    if ss_within == 0.0:
        return _result("one-way-anova", np.inf, df, 0.0)
    F = (ss_between / df[0]) / (ss_within / df[1])
    return _result("one-way-anova", F, df, f_dist.sf(F, *df))


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> TestResult:
    """Rank-based between-subjects omnibus test with midrank tie correction.

    Raises:
        ValueError: fewer than 2 groups or an empty group.
    """
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if len(arrays) < 2:
        raise ValueError("needs at least 2 groups")
    for i, g in enumerate(arrays):
        if len(g) == 0:
            raise ValueError(f"group {i} is empty")
    pooled = np.concatenate(arrays)
    N = len(pooled)
    df = len(arrays) - 1
    correction = 1.0 - _tie_term(pooled) / (N**3 - N) if N > 1 else 0.0
    if correction <= 0.0:
        # Every observation tied: no rank information at all.
        return _result("kruskal-wallis", 0.0, df, 1.0)
    ranks = rankdata(pooled)
    H = 0.0
    offset = 0
    for g in arrays:
        r = ranks[offset : offset + len(g)]
        H += r.sum() ** 2 / len(g)
        offset += len(g)
    H = (12.0 / (N * (N + 1)) * H - 3.0 * (N + 1)) / correction
    H = max(H, 0.0)
    return _result("kruskal-wallis", H, df, chi2.sf(H, df))


def friedman(blocks: Sequence[Sequence[float]]) -> TestResult:
    """Within-block rank test across >= 3 conditions.

    blocks holds one complete row of responses per subject, one column
    per condition; ranking happens inside each row, so no arithmetic ever
    crosses subjects.

    Raises:
        ValueError: fewer than 3 conditions, no subjects, or an
            incomplete block (named by subject index).
    """
    rows = [np.asarray(b, dtype=float) for b in blocks]
    if not rows:
        raise ValueError("no subjects")
    k = len(rows[0])
    if k < 3:
        raise ValueError(f"needs >= 3 conditions, got {k}")
    for i, row in enumerate(rows):
        if len(row) != k or not np.all(np.isfinite(row)):
            raise ValueError(f"subject {i} has an incomplete block")
    n = len(rows)
    df = k - 1
    R = np.array([rankdata(row) for row in rows])
    tie_sum = sum(_tie_term(row) for row in rows)
    correction = 1.0 - tie_sum / (n * k * (k**2 - 1))
    if correction <= 0.0:
        return _result("friedman", 0.0, df, 1.0)
    col_sums = R.sum(axis=0)
    Q = 12.0 / (n * k * (k + 1)) * np.sum(col_sums**2) - 3.0 * n * (k + 1)
    Q = max(Q / correction, 0.0)
    return _result("friedman", Q, df, chi2.sf(Q, df))


def _signed_rank_exact_p(ranks: np.ndarray, w_plus: float) -> float:
    """Two-sided exact p over all 2^n sign assignments of fixed |d| ranks.

    Midranks may be half-integers, so the distribution is built over
    doubled ranks to stay in integer arithmetic.
    """
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    top = 0
    for r in doubled:
        counts[r : top + r + 1] += counts[: top + 1]
        top += r
    counts /= 2.0 ** len(doubled)
    w2 = int(np.rint(2.0 * w_plus))
    lower = counts[: w2 + 1].sum()
    upper = counts[w2:].sum()
    return min(1.0, 2.0 * min(lower, upper))


def wilcoxon_signed_rank(
    paired_a: Sequence[float],
    paired_b: Sequence[float],
    exact: bool | None = None,
) -> TestResult:
    """Paired-sample test on ranked |a - b| differences.

    The differencing step is arithmetic on the raw values, which is why
    this test carries metric_data=True: on ordinal input those distances
    are not meaningful.  Zero differences are dropped.  The statistic is
    W+, the rank sum of positive differences.  exact=None enumerates the
    sign-flip null for n <= 25 and uses the tie-corrected normal
    approximation beyond; True or False forces the choice.

    Raises:
        ValueError: length mismatch or empty input.
    """
    a = np.asarray(paired_a, dtype=float)
    b = np.asarray(paired_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be 1-D and the same length")
    if len(a) == 0:
        raise ValueError("empty samples")
    d = a - b
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        warnings.warn(
            "all paired differences are zero; the test is degenerate",
            DataWarning,
            stacklevel=2,
        )
        return _result(
            "wilcoxon-signed-rank", 0.0, None, 1.0, note="all differences zero"
        )
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    use_exact = n <= EXACT_SIGNED_RANK_MAX if exact is None else exact
    if use_exact:
        p = _signed_rank_exact_p(ranks, w_plus)
        note = "exact"
    else:
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(np.abs(d)) / 48.0
        if var <= 0.0:
            return _result(
                "wilcoxon-signed-rank", w_plus, None, 1.0, note="all ranks tied"
            )
        z = (w_plus - mu) / np.sqrt(var)
        p = 2.0 * norm.sf(abs(z))
        note = "normal approximation"
    return _result("wilcoxon-signed-rank", w_plus, None, p, note=note)


def _rank_sum_exact_p(n_small: int, n_large: int, w_small: float) -> float:
    """Two-sided exact p for the rank sum of the smaller sample, no ties.

    Counts the m-subsets of {1..N} by sum with a standard convolution
    table; the null puts equal mass on each subset.
    """
    N = n_small + n_large
    max_sum = N * (N + 1) // 2
    # counts[m][s]: subsets of size m with rank sum s, built rank by rank.
    counts = np.zeros((n_small + 1, max_sum + 1), dtype=float)
    counts[0, 0] = 1.0
    for r in range(1, N + 1):
        counts[1:, r:] += counts[:-1, :-r].copy()
    dist = counts[n_small]
    dist /= dist.sum()
    w = int(np.rint(w_small))
    lower = dist[: w + 1].sum()
    upper = dist[w:].sum()
    return min(1.0, 2.0 * min(lower, upper))


def wilcoxon_rank_sum(
    a: Sequence[float],
    b: Sequence[float],
    exact: bool | None = None,
) -> TestResult:
    """Two-sample rank test; the statistic is the rank sum of sample a.

    Ranking pools both samples, so only order information is used and the
    test is safe for ordinal data.  exact=None enumerates assignments
    when the smaller sample has <= 8 observations and the pooled data has
    no ties; otherwise (or when forced off) the tie-corrected normal
    approximation is used.  exact=True with ties present is an error,
    since the subset-count null assumes distinct ranks.

    Raises:
        ValueError: an empty sample, or exact=True with tied values.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if len(x) == 0 or len(y) == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([x, y])
    N = len(pooled)
    ranks = rankdata(pooled)
    w_a = float(ranks[: len(x)].sum())
    has_ties = _tie_term(pooled) > 0.0
    if exact is True and has_ties:
        raise ValueError("exact distribution requires untied data")
    use_exact = (
        exact
        if exact is not None
        else min(len(x), len(y)) <= EXACT_RANK_SUM_MAX and not has_ties
    )
    if use_exact:
        if len(x) <= len(y):
            p = _rank_sum_exact_p(len(x), len(y), w_a)
        else:
            # Mirror through the complement: sample b is the smaller side.
            p = _rank_sum_exact_p(len(y), len(x), N * (N + 1) / 2.0 - w_a)
        note = "exact"
    else:
        mu = len(x) * (N + 1) / 2.0
        var = (
            len(x) * len(y) * (N + 1) / 12.0
            - len(x) * len(y) * _tie_term(pooled) / (12.0 * N * (N - 1))
        )
        if var <= 0.0:
            return _result(
                "wilcoxon-rank-sum", w_a, None, 1.0, note="all values tied"
            )
        z = (w_a - mu) / np.sqrt(var)
        p = 2.0 * norm.sf(abs(z))
        note = "normal approximation"
    return _result("wilcoxon-rank-sum", w_a, None, p, note=note)

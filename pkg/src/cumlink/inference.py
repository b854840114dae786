"""Hypothesis tests and interval estimates on fitted cumulative link models.

Wald tables, nested likelihood-ratio tests, the Brant check of
threshold-constant effects, pairwise latent-scale contrasts with
multiplicity control, and bootstrap confidence intervals for expected
response-scale differences.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2, norm

from .clm import (
    ClmSpec,
    FitError,
    FittedClm,
    NonConvergenceError,
    SeparationError,
    category_probabilities,
    fit_clm,
)
from .data import Dataset, OrdinalScale, drop_unobserved_boundary_categories
from .design import design_matrix

_ADJUSTMENTS = ("none", "bonferroni", "holm")


@dataclass(frozen=True)
class WaldRow:
    """One line of a Wald table: z = estimate / SE, two-sided normal p."""

    name: str
    estimate: float
    std_error: float
    z: float
    p: float


@dataclass(frozen=True)
class LrtResult:
    statistic: float
    df: int
    p: float


@dataclass(frozen=True)
class ContrastResult:
    """Latent-scale difference between two factor levels.

    estimate is beta_a - beta_b, so estimate(a, b) == -estimate(b, a);
    the reference level enters with coefficient 0 and variance 0.
    """

    pair: tuple[str, str]
    estimate: float
    std_error: float
    z: float
    p_raw: float
    p_adjusted: float
    adjustment: str


@dataclass(frozen=True)
class BrantPredictor:
    name: str
    statistic: float
    df: int
    p: float


@dataclass(frozen=True)
class BrantResult:
    """Wald test that each predictor's effect is constant across splits."""

    predictors: tuple[BrantPredictor, ...]
    omnibus_statistic: float
    omnibus_df: int
    omnibus_p: float


@dataclass(frozen=True)
class BootstrapCI:
    """Percentile interval for an expected-score difference between levels."""

    pair: tuple[str, str]
    lower: float
    upper: float
    level: float
    replicates: int
    seed: int
    failures: int = 0


def wald_table(fitted: FittedClm) -> tuple[WaldRow, ...]:
    """Estimate, SE, z and two-sided p for every parameter.

    Raises:
        ValueError: if the stored covariance is unusable (non-finite or
            non-positive variances), e.g. after a fit with
            compute_covariance=False.
    """
    variances = np.diag(fitted.covariance)
    if not np.all(np.isfinite(variances)) or np.any(variances <= 0):
        raise ValueError(
            "covariance matrix is singular or missing; refit with "
            "compute_covariance=True"
        )
    se = np.sqrt(variances)
    z = fitted.estimates / se
    p = 2.0 * norm.sf(np.abs(z))
    return tuple(
        WaldRow(name, float(est), float(s), float(zz), float(pp))
        for name, est, s, zz, pp in zip(
            fitted.param_names, fitted.estimates, se, z, p
        )
    )


def _terms_nested(null_spec: ClmSpec, full_spec: ClmSpec) -> bool:
    # a location slope is the equal-coefficients constraint on the
    # per-threshold effects of the same term, so promoting a term from
    # the location part to the nominal part still nests
    return (
        set(null_spec.location)
        <= set(full_spec.location) | set(full_spec.nominal)
        and set(null_spec.scale_terms) <= set(full_spec.scale_terms)
        and set(null_spec.nominal) <= set(full_spec.nominal)
    )


def likelihood_ratio_test(null_fit: FittedClm, full_fit: FittedClm) -> LrtResult:
    """Chi-square comparison of two nested fits on the same data.

    Raises:
        ValueError: if the models are not nested, use different links,
            or were fitted to different data.
    """
    if null_fit.spec.link.name != full_fit.spec.link.name:
        raise ValueError("fits use different links; not nested")
    if null_fit.data.scale.labels != full_fit.data.scale.labels:
        raise ValueError("fits use different response scales")
    if not np.array_equal(null_fit.data.response, full_fit.data.response):
        raise ValueError("fits were made on different data")
    if not _terms_nested(null_fit.spec, full_fit.spec):
        raise ValueError(
            "null model terms are not a subset of the full model terms"
        )
    df = full_fit.n_params - null_fit.n_params
    if df < 0:
        raise ValueError("null model has more parameters than the full model")
    statistic = 2.0 * (full_fit.log_lik - null_fit.log_lik)
    if statistic < -1e-9:
        raise ValueError(
            f"full model fits worse than the null (statistic {statistic:.3g}); "
            "check convergence of both fits"
        )
    statistic = max(statistic, 0.0)
    if df == 0:
        p = 1.0 if statistic < 1e-9 else 0.0
    else:
        p = float(chi2.sf(statistic, df))
    return LrtResult(float(statistic), df, p)


def _binary_split_fit(
    fitted: FittedClm, data: Dataset, k: int
) -> tuple[FittedClm, str]:
    """Fit P(Y <= k) as a two-category model with the parent's predictors."""
    labels = data.scale.labels
    split_name = data.scale.threshold_names()[k - 1]
    z = (data.response >= k).astype(np.int64)
    n_low = int(np.sum(z == 0))
    if n_low == 0 or n_low == len(z):
        raise FitError(
            f"binary split {split_name} has an empty side "
            f"({n_low} of {len(z)} observations at or below {labels[k - 1]!r})"
        )
    scale2 = OrdinalScale((f"<={labels[k - 1]}", f">{labels[k - 1]}"))
    data2 = Dataset(
        scale=scale2,
        response=z,
        factors=data.factors,
        factor_codes=data.factor_codes,
        covariate_names=data.covariate_names,
        covariates=data.covariates,
    )
    spec2 = ClmSpec(
        location=fitted.spec.location,
        link=fitted.spec.link,
        response_name=fitted.spec.response_name,
    )
    try:
        return fit_clm(spec2, data2), split_name
    except SeparationError as exc:
        raise FitError(f"binary split {split_name} is separated: {exc}") from exc
    except NonConvergenceError as exc:
        raise FitError(
            f"binary split {split_name} did not converge: {exc}"
        ) from exc


def brant_test(fitted: FittedClm, data: Dataset | None = None) -> BrantResult:
    """Test whether location effects are constant across cumulative splits.

    Fits each of the K-1 binary collapses Y <= k vs Y > k with the same
    link and predictors, then Wald-tests equality of the per-split slopes
    using the joint covariance of all split estimates.  That covariance
    comes from the stacked per-observation scores: splits share
    observations, so their estimators are correlated, and ignoring the
    correlation would misstate the test.

    Raises:
        ValueError: for two-category scales, models with scale or nominal
            terms, or models with no location predictors.
        FitError: when a binary split has an empty side, separates, or
            fails to converge; the message names the split.
    """
    data = fitted.data if data is None else data
    K = data.scale.n_categories
    if K < 3:
        raise ValueError("needs at least 3 response categories")
    if fitted.spec.scale_terms or fitted.spec.nominal:
        raise ValueError(
            "defined for location-only models; remove scale and nominal terms"
        )
    X, x_names = design_matrix(data, fitted.spec.location, role="location")
    p = len(x_names)
    if p == 0:
        raise ValueError("model has no location predictors to test")
    n = data.n_obs
    link = fitted.spec.link

    # One column per parameter of a binary fit, in (threshold, slopes) order.
    # The linear predictor of split k is theta_k - x'beta_k, so the score
    # direction is (1, -x).
    C = np.column_stack([np.ones(n), -X])

    betas = np.empty((K - 1, p))
    pis = np.empty((K - 1, n))
    dens = np.empty((K - 1, n))
    Minv = []
    for k in range(1, K):
        fit_k, _ = _binary_split_fit(fitted, data, k)
        theta_k = float(fit_k.estimates[0])
        beta_k = fit_k.estimates[1:]
        eta = theta_k - X @ beta_k
        pi = np.clip(link.cdf(eta), 1e-10, 1.0 - 1e-10)
        betas[k - 1] = beta_k
        pis[k - 1] = pi
        dens[k - 1] = link.density(eta)
        w_kk = dens[k - 1] ** 2 / (pi * (1.0 - pi))
        Minv.append(np.linalg.inv(C.T @ (C * w_kk[:, None])))

    m = K - 1
    V = np.empty((m * p, m * p))
    for k in range(m):
        for l in range(k, m):
            num = pis[k] * (1.0 - pis[l])
            den = pis[k] * (1.0 - pis[k]) * pis[l] * (1.0 - pis[l])
            w = dens[k] * dens[l] * num / den
            M_kl = C.T @ (C * w[:, None])
            block = (Minv[k] @ M_kl @ Minv[l])[1:, 1:]
            V[k * p : (k + 1) * p, l * p : (l + 1) * p] = block
            if l != k:
                V[l * p : (l + 1) * p, k * p : (k + 1) * p] = block.T

    beta_stack = betas.reshape(-1)

    def _wald(idx: np.ndarray) -> tuple[float, int]:
        # Contrasts beta_1 - beta_j over the selected coordinates.
        sub = V[np.ix_(idx, idx)]
        est = beta_stack[idx]
        rows = len(idx) // m
        D = np.zeros(((m - 1) * rows, m * rows))
        for j in range(1, m):
            D[(j - 1) * rows : j * rows, :rows] = np.eye(rows)
            D[(j - 1) * rows : j * rows, j * rows : (j + 1) * rows] = -np.eye(rows)
        delta = D @ est
        cov = D @ sub @ D.T
        try:
            stat = float(delta @ np.linalg.solve(cov, delta))
        except np.linalg.LinAlgError as exc:
            raise FitError(
                "singular covariance between split estimates"
            ) from exc
        return max(stat, 0.0), len(delta)

    omni_stat, omni_df = _wald(np.arange(m * p))
    predictors = []
    for j, name in enumerate(x_names):
        idx = np.arange(m) * p + j
        stat, df = _wald(idx)
        predictors.append(BrantPredictor(name, stat, df, float(chi2.sf(stat, df))))
    return BrantResult(
        predictors=tuple(predictors),
        omnibus_statistic=omni_stat,
        omnibus_df=omni_df,
        omnibus_p=float(chi2.sf(omni_stat, omni_df)),
    )


def _adjust(p_raw: np.ndarray, method: str) -> np.ndarray:
    if method == "none":
        return p_raw.copy()
    if method == "bonferroni":
        return np.minimum(p_raw * len(p_raw), 1.0)
    if method == "holm":
        order = np.argsort(p_raw, kind="stable")
        m = len(p_raw)
        adjusted = np.empty(m)
        running = 0.0
        for rank, i in enumerate(order):
            running = max(running, (m - rank) * p_raw[i])
            adjusted[i] = min(running, 1.0)
        return adjusted
    raise ValueError(f"unknown adjustment {method!r}; options: {_ADJUSTMENTS}")


def pairwise_contrasts(
    fitted: FittedClm, factor: str, adjustment: str = "holm"
) -> tuple[ContrastResult, ...]:
    """Latent-scale differences for all unordered level pairs of a factor.

    The reference level contributes coefficient 0 with zero variance and
    zero covariance, so contrasts against it reduce to single-coefficient
    Wald tests and the results do not depend on which level is the
    reference.

    Raises:
        ValueError: unknown factor, factor absent from the location terms,
            missing covariance, or unknown adjustment name.
    """
    if adjustment not in _ADJUSTMENTS:
        raise ValueError(
            f"unknown adjustment {adjustment!r}; options: {_ADJUSTMENTS}"
        )
    fac = fitted.data.factor(factor)
    if factor not in fitted.spec.location:
        raise ValueError(f"factor {factor!r} is not a location term of the fit")
    variances = np.diag(fitted.covariance)
    if not np.all(np.isfinite(variances)):
        raise ValueError(
            "covariance matrix is missing; refit with compute_covariance=True"
        )

    # Coefficient and covariance for every level, reference included.
    loc = fitted.location_slice()
    loc_names = list(fitted.x_names)
    coefs = {fac.reference: 0.0}
    cov_index = {}
    for level in fac.levels:
        if level == fac.reference:
            continue
        name = f"{factor}{level}"
        cov_index[level] = loc.start + loc_names.index(name)
        coefs[level] = fitted.coef(name)

    def _cov(a: str, b: str) -> float:
        if a not in cov_index or b not in cov_index:
            return 0.0
        return float(fitted.covariance[cov_index[a], cov_index[b]])

    pairs = list(itertools.combinations(fac.levels, 2))
    rows = []
    for a, b in pairs:
        est = coefs[a] - coefs[b]
        var = _cov(a, a) + _cov(b, b) - 2.0 * _cov(a, b)
        se = float(np.sqrt(max(var, 0.0)))
        z = est / se if se > 0 else 0.0
        rows.append((est, se, z, float(2.0 * norm.sf(abs(z)))))
    p_raw = np.array([r[3] for r in rows])
    p_adj = _adjust(p_raw, adjustment)
    return tuple(
        ContrastResult((a, b), est, se, z, praw, float(padj), adjustment)
        for (a, b), (est, se, z, praw), padj in zip(pairs, rows, p_adj)
    )


def _score_coding(
    scale: OrdinalScale, coding: Sequence[float] | None
) -> np.ndarray:
    """Numeric codes for expected-score summaries.

    Labels that all parse as numbers are used as-is; otherwise categories
    are coded 1..K.  An explicit coding overrides both.
    """
    if coding is not None:
        arr = np.asarray(coding, dtype=float)
        if arr.shape != (scale.n_categories,):
            raise ValueError(
                f"coding needs one value per category ({scale.n_categories})"
            )
        return arr
    try:
        return np.array([float(lab) for lab in scale.labels])
    except ValueError:
        return np.arange(1, scale.n_categories + 1, dtype=float)


def _infer_pair_factor(
    data: Dataset, pairs: Sequence[tuple[str, str]]
) -> str:
    wanted = {lev for pair in pairs for lev in pair}
    hits = [f.name for f in data.factors if wanted <= set(f.levels)]
    if not hits:
        raise ValueError(
            f"no factor has levels covering {sorted(wanted)}; pass factor="
        )
    if len(hits) > 1:
        raise ValueError(
            f"levels {sorted(wanted)} match several factors {hits}; pass factor="
        )
    return hits[0]


def bootstrap_response_scale_ci(
    spec: ClmSpec,
    data: Dataset,
    pairs: Sequence[tuple[str, str]],
    B: int = 2000,
    seed: int = 0,
    level: float = 0.95,
    factor: str | None = None,
    coding: Sequence[float] | None = None,
) -> tuple[BootstrapCI, ...]:
    """Percentile bootstrap CIs for expected-score differences between levels.

    Case resampling is stratified by the contrast factor so each level
    keeps its sample size, preserving a between-subjects design.  Each
    replicate refits the model and evaluates the difference in expected
    numeric-coded score sum_k code_k * P(Y = k | level) for every pair.
    Replicate streams are spawned from the seed independently of B's
    ordering, so results are reproducible bit for bit.

    Failed refits are dropped and counted; more than 5% failures is an
    error rather than a silently degraded interval.

    Raises:
        ValueError: B < 100, bad level, unknown factor or levels.
        FitError: the initial fit fails or too many replicates fail.
    """
    if B < 100:
        raise ValueError(f"B must be at least 100, got {B}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise ValueError("no pairs given")
    name = factor if factor is not None else _infer_pair_factor(data, pairs)
    fac = data.factor(name)
    for a, b in pairs:
        for lev in (a, b):
            if lev not in fac.levels:
                raise ValueError(f"{lev!r} is not a level of factor {name!r}")

    codes = data.factor_column(name)
    strata = [np.flatnonzero(codes == j) for j in range(len(fac.levels))]
    for lev, idx in zip(fac.levels, strata):
        if len(idx) == 0:
            raise ValueError(f"factor level {lev!r} has no observations")

    scores = _score_coding(data.scale, coding)
    code_by_label = dict(zip(data.scale.labels, scores))
    base = fit_clm(spec, data, compute_covariance=False)

    children = np.random.SeedSequence(seed).spawn(B)
    diffs = {pair: [] for pair in pairs}
    failures = 0
    levels_used = {lev for pair in pairs for lev in pair}
    for child in children:
        rng = np.random.default_rng(child)
        idx = np.concatenate(
            [s[rng.integers(0, len(s), size=len(s))] for s in strata]
        )
        sub, _ = drop_unobserved_boundary_categories(data.take(idx))
        # A resample can lose a boundary category, shrinking the parameter
        # vector; the warm start only applies when the scales still agree.
        start = base.estimates if sub.scale.labels == base.data.scale.labels else None
        try:
            refit = fit_clm(spec, sub, compute_covariance=False, start=start)
        except FitError:
            failures += 1
            continue
        if not refit.convergence.converged:  # a wall stop is not an estimate
            failures += 1
            continue
        expected = {}
        for lev in levels_used:
            probs = category_probabilities(refit, {name: lev})
            labs = refit.data.scale.labels
            expected[lev] = float(
                sum(code_by_label[l] * p for l, p in zip(labs, probs))
            )
        for a, b in pairs:
            diffs[(a, b)].append(expected[a] - expected[b])

    if failures > 0.05 * B:
        raise FitError(
            f"{failures} of {B} bootstrap refits failed (> 5%); "
            "the data may be too sparse for case resampling"
        )
    alpha = 1.0 - level
    out = []
    for pair in pairs:
        arr = np.asarray(diffs[pair])
        lo, hi = np.quantile(arr, [alpha / 2.0, 1.0 - alpha / 2.0])
        out.append(
            BootstrapCI(pair, float(lo), float(hi), level, B, seed, failures)
        )
    return tuple(out)


def interpret_coefficient(fitted: FittedClm, term: str) -> str:
    """Plain-language reading of a location coefficient.

    Logit fits get an odds-ratio sentence with reciprocal and percent
    forms; probit fits are read directly on the latent scale in standard
    units; cloglog fits get the latent reading plus a note that no
    odds-ratio form exists for that link.
    """
    if term not in fitted.x_names:
        raise ValueError(
            f"{term!r} is not a location coefficient; have {list(fitted.x_names)}"
        )
    row = next(r for r in wald_table(fitted) if r.name == term)
    return interpret_values(fitted.link.name, term, row.estimate, row.std_error)


def interpret_values(
    link: str, term: str, estimate: float, std_error: float
) -> str:
    """interpret_coefficient on raw numbers, e.g. from a stored archive."""
    est = float(estimate)
    if std_error > 0 and np.isfinite(std_error):
        z = est / std_error
        p = 2.0 * norm.sf(abs(z))
        verdict = (
            "statistically significant" if p < 0.05
            else "not statistically significant"
        )
        signif = f"{verdict} (z = {z:.3f}, p = {p:.3g})"
    else:
        signif = "no standard error available"

    if link == "logit":
        if est == 0.0:
            return (
                f"{term}: odds ratio exp(0) = 1.000; no shift in the odds of "
                f"reporting a higher category; {signif}."
            )
        ratio = np.exp(est)
        direction = "less" if est < 0 else "more"
        times = 1.0 / ratio if est < 0 else ratio
        pct = (1.0 - ratio) * 100.0 if est < 0 else (ratio - 1.0) * 100.0
        return (
            f"{term}: odds ratio exp({est:.4f}) = {ratio:.3f}; approximately "
            f"{times:.1f} times {direction} likely to report a higher category "
            f"({pct:.0f}% {'lower' if est < 0 else 'higher'} odds of exceeding "
            f"any given category); {signif}."
        )
    if est == 0.0:
        latent = f"{term}: no shift on the latent score scale"
    else:
        phrase = "a decrease" if est < 0 else "an increase"
        latent = (
            f"{term}: {phrase} of {est:.4f} on the latent score scale "
            f"({abs(est):.4f} latent standard units)"
        )
    if link == "cloglog":
        return (
            f"{latent}; no odds-ratio reading exists for the cloglog link, "
            f"whose latent distribution is asymmetric; {signif}."
        )
    return f"{latent}; {signif}."

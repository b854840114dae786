"""Cumulative link models by maximum likelihood.

A response in category k is a latent draw landing between consecutive
thresholds: P(Y = k | x) = F(z_k) - F(z_{k-1}) with

    z_k = alpha(x) * (tau_k + p(x)' gamma_k - x' beta)

where tau are the K-1 strictly ordered thresholds, beta the location
coefficients, alpha(x) = exp(s(x)' beta_alpha) an optional multiplicative
precision term (1/alpha is the latent spread), and gamma_k optional
per-threshold shifts for terms exempted from the proportional-odds
restriction.  tau_0 = -inf and tau_K = +inf.

The likelihood is maximized by Newton steps on the observed Hessian with a
backtracking line search; steps that break the threshold ordering or drive
any row probability to zero are rejected by the search.  When the Hessian
is not positive definite the step direction falls back to a rank-two
quasi-Newton approximation.  Standard errors come from the inverse observed
Hessian at the optimum.

Row log-probabilities are evaluated on the log scale in both tails, so
observations many standard deviations out keep finite, differentiable
likelihood contributions.  Any row probability below 1e-300 turns the
negative log-likelihood into +inf, which the line search treats as an
infeasible step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .data import Dataset, drop_unobserved_boundary_categories
from .design import design_matrix, design_row
from .links import Link, probit

_LOG_TINY = np.log(1e-300)
_SEPARATION_BOUND = 50.0


class FitError(RuntimeError):
    """Base class for fitting failures."""


class NonConvergenceError(FitError):
    """Optimizer ran out of iterations; diagnostics ride along."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SeparationError(FitError):
    """A coefficient diverged, indicating (quasi-)complete separation."""


@dataclass(frozen=True)
class ClmSpec:
    """What to fit: term names by role, plus the link.

    location lists terms whose effect shifts the latent variable; scale
    terms multiply its spread; nominal terms get a separate coefficient per
    threshold (dropping the proportional-odds restriction for them).  A
    term may not appear in both location and nominal: the nominal columns
    already span the location effect, so the pair is aliased.
    """

    location: tuple[str, ...] = ()
    scale_terms: tuple[str, ...] = ()
    nominal: tuple[str, ...] = ()
    link: Link = probit
    response_name: str = "response"

    def __post_init__(self) -> None:
        object.__setattr__(self, "location", tuple(self.location))
        object.__setattr__(self, "scale_terms", tuple(self.scale_terms))
        object.__setattr__(self, "nominal", tuple(self.nominal))
        overlap = sorted(set(self.location) & set(self.nominal))
        if overlap:
            raise ValueError(
                f"term(s) {overlap} appear in both location and nominal "
                "parts; the two parameterizations are aliased"
            )

    def formula_text(self) -> str:
        rhs = " + ".join(("1",) + self.location)
        return f"{self.response_name} ~ {rhs}"


@dataclass(frozen=True)
class Convergence:
    """Optimizer diagnostics reported with every fit.

    iterations counts outer steps (Newton here; quasi-Newton for mixed
    fits).  step_halvings counts the subordinate work: line-search
    halvings here, total inner mode-finding iterations for mixed fits.
    The printed label is 'outer(subordinate)'.
    """

    iterations: int
    step_halvings: int
    max_grad: float
    cond_hessian: float
    converged: bool
    stalled: bool = False

    def iteration_label(self) -> str:
        return f"{self.iterations}({self.step_halvings})"


class _Problem:
    """Likelihood machinery on prebuilt matrices.

    Parameter vector layout: [tau (K-1), beta (p), beta_alpha (q),
    gamma (K-1 blocks of r, threshold-major)].
    """

    def __init__(
        self,
        y: np.ndarray,
        K: int,
        X: np.ndarray,
        S: np.ndarray,
        P: np.ndarray,
        link: Link,
        threshold_names: Sequence[str],
        x_names: Sequence[str] = (),
        s_names: Sequence[str] = (),
        p_names: Sequence[str] = (),
    ) -> None:
        self.y = np.asarray(y, dtype=np.int64)
        self.K = K
        self.n = len(self.y)
        self.X = np.asarray(X, dtype=float)
        self.S = np.asarray(S, dtype=float)
        self.P = np.asarray(P, dtype=float)
        self.link = link
        self.p = self.X.shape[1]
        self.q = self.S.shape[1]
        self.r = self.P.shape[1]
        self.hi_finite = self.y < K - 1
        self.lo_finite = self.y > 0
        self.y_hi = np.minimum(self.y, K - 2)  # threshold index above each row
        self.y_lo = np.maximum(self.y - 1, 0)  # threshold index below each row
        names = list(threshold_names)
        names += list(x_names)
        names += [f"scale.{s}" for s in s_names]
        for k in range(K - 1):
            names += [f"{threshold_names[k]}.{c}" for c in p_names]
        self.param_names = tuple(names)
        self.n_params = (K - 1) + self.p + self.q + (K - 1) * self.r

    # -- parameter plumbing -------------------------------------------------

    def split(self, theta: np.ndarray):
        K = self.K
        tau = theta[: K - 1]
        beta = theta[K - 1 : K - 1 + self.p]
        balpha = theta[K - 1 + self.p : K - 1 + self.p + self.q]
        gamma = theta[K - 1 + self.p + self.q :].reshape(K - 1, self.r)
        return tau, beta, balpha, gamma

    def tau_ordered(self, theta: np.ndarray) -> bool:
        tau = theta[: self.K - 1]
        return bool(np.all(np.diff(tau) > 0.0))

    def _z_bounds(self, theta: np.ndarray):
        """Per-row scaled distances to the bracketing thresholds."""
        tau, beta, balpha, gamma = self.split(theta)
        eta = self.X @ beta if self.p else np.zeros(self.n)
        alpha = np.exp(self.S @ balpha) if self.q else np.ones(self.n)
        if self.r:
            shifts = self.P @ gamma.T  # (n, K-1)
            t_hi = tau[self.y_hi] + shifts[np.arange(self.n), self.y_hi]
            t_lo = tau[self.y_lo] + shifts[np.arange(self.n), self.y_lo]
        else:
            t_hi = tau[self.y_hi]
            t_lo = tau[self.y_lo]
        z_hi = alpha * (t_hi - eta)
        z_lo = alpha * (t_lo - eta)
        return z_hi, z_lo, alpha

    def _log_probs(self, z_hi, z_lo):
        """log P per row, stable in both tails.

        Rows in the bottom (top) category integrate from -inf (to +inf),
        so only one tail term appears.  Interior rows use whichever tail
        representation keeps the subtraction well conditioned.
        """
        link = self.link
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lc_hi = link.log_cdf(z_hi)
            lc_lo = link.log_cdf(z_lo)
            ls_hi = link.log_sf(z_hi)
            ls_lo = link.log_sf(z_lo)
            lower_form = lc_hi + np.log1p(-np.exp(np.minimum(lc_lo - lc_hi, 0.0)))
            upper_form = ls_lo + np.log1p(-np.exp(np.minimum(ls_hi - ls_lo, 0.0)))
        use_lower = (z_hi + z_lo) < 0.0
        logp = np.where(use_lower, lower_form, upper_form)
        logp = np.where(self.lo_finite, logp, lc_hi)
        only_hi_open = self.hi_finite | ~self.lo_finite
        logp = np.where(only_hi_open, logp, ls_lo)
        both_open = ~self.hi_finite & ~self.lo_finite  # K would be 1; guarded upstream
        if both_open.any():
            logp = np.where(both_open, 0.0, logp)
        return logp

    def nll(self, theta: np.ndarray) -> float:
        if not self.tau_ordered(theta):
            return np.inf
        if self.r:
            # nominal shifts must keep every row's full threshold vector
            # increasing, not merely the interval its response lands in;
            # otherwise empty cells let the optimizer park probability
            # mass on non-distributions
            tau, _, _, gamma = self.split(theta)
            eff = tau[None, :] + self.P @ gamma.T
            if np.any(np.diff(eff, axis=1) <= 0.0):
                return np.inf
        z_hi, z_lo, _ = self._z_bounds(theta)
        logp = self._log_probs(z_hi, z_lo)
        if not np.all(np.isfinite(logp)) or logp.min() < _LOG_TINY:
            return np.inf
        return float(-np.sum(logp))

    def grad(self, theta: np.ndarray) -> np.ndarray:
        """Analytic gradient of the negative log-likelihood."""
        z_hi, z_lo, alpha = self._z_bounds(theta)
        logp = self._log_probs(z_hi, z_lo)
        logp = np.maximum(logp, _LOG_TINY)  # keeps ratios finite near the edge
        with np.errstate(over="ignore", invalid="ignore"):
            w_hi = np.where(
                self.hi_finite, np.exp(self.link.log_density(z_hi) - logp), 0.0
            )
            w_lo = np.where(
                self.lo_finite, np.exp(self.link.log_density(z_lo) - logp), 0.0
            )
        a_hi = alpha * w_hi
        a_lo = alpha * w_lo
        g = np.zeros(self.n_params)
        K = self.K
        # thresholds: -(sum over rows bounded above by m) + (bounded below by m)
        g_tau = -np.bincount(self.y_hi, weights=np.where(self.hi_finite, a_hi, 0.0), minlength=K - 1)
        g_tau += np.bincount(self.y_lo, weights=np.where(self.lo_finite, a_lo, 0.0), minlength=K - 1)
        g[: K - 1] = g_tau
        if self.p:
            g[K - 1 : K - 1 + self.p] = self.X.T @ (a_hi - a_lo)
        if self.q:
            zh = np.where(self.hi_finite, z_hi, 0.0)
            zl = np.where(self.lo_finite, z_lo, 0.0)
            m = w_hi * zh - w_lo * zl
            g[K - 1 + self.p : K - 1 + self.p + self.q] = -(self.S.T @ m)
        if self.r:
            G = np.zeros((K - 1, self.r))
            hi_rows = self.hi_finite
            lo_rows = self.lo_finite
            np.add.at(G, self.y_hi[hi_rows], -(a_hi[hi_rows, None] * self.P[hi_rows]))
            np.add.at(G, self.y_lo[lo_rows], (a_lo[lo_rows, None] * self.P[lo_rows]))
            g[K - 1 + self.p + self.q :] = G.ravel()
        return g

    def hessian(self, theta: np.ndarray) -> np.ndarray:
        """Observed Hessian by central differences of the analytic gradient."""
        d = self.n_params
        H = np.zeros((d, d))
        for j in range(d):
            h = 1e-6 * (1.0 + abs(theta[j]))
            up = theta.copy()
            up[j] += h
            dn = theta.copy()
            dn[j] -= h
            H[:, j] = (self.grad(up) - self.grad(dn)) / (2.0 * h)
        return 0.5 * (H + H.T)

    def start_values(self) -> np.ndarray:
        """Pooled cumulative proportions through the inverse link; zeros elsewhere."""
        counts = np.bincount(self.y, minlength=self.K)
        cum = np.cumsum(counts)[:-1] / counts.sum()
        cum = np.clip(cum, 1e-10, 1.0 - 1e-10)
        tau0 = np.asarray(self.link.quantile(cum), dtype=float)
        for k in range(1, len(tau0)):  # interior empty categories tie the quantiles
            if tau0[k] <= tau0[k - 1] + 1e-3:
                tau0[k] = tau0[k - 1] + 1e-3
        theta0 = np.zeros(self.n_params)
        theta0[: self.K - 1] = tau0
        return theta0

    def check_separation(self, theta: np.ndarray) -> None:
        coef = theta[self.K - 1 :]
        if coef.size and np.max(np.abs(coef)) > _SEPARATION_BOUND:
            j = int(np.argmax(np.abs(coef)))
            name = self.param_names[self.K - 1 + j]
            raise SeparationError(
                f"coefficient {name!r} diverged past |{_SEPARATION_BOUND}|; "
                "the data are (quasi-)completely separated for this term"
            )

    def check_flat_divergence(
        self, theta: np.ndarray, f: float, H: np.ndarray
    ) -> None:
        """Catch an MLE escaping to infinity.

        Tail gradients underflow the convergence tolerance long before any
        fixed magnitude bound trips, and the escape is usually a joint
        drift of several parameters, so probing coordinates one at a time
        finds nothing.  Along the Hessian's softest eigenvector, a genuine
        plateau stays level arbitrarily far in the escape direction; an
        ordering wall (an empty cell pinching two thresholds together)
        rises on the feasible side and hits the sentinel on the other, and
        is reported through the convergence flags instead.
        """
        if not np.all(np.isfinite(H)):
            return
        try:
            eigvals, eigvecs = np.linalg.eigh(H)
        except np.linalg.LinAlgError:
            return
        scale = max(1.0, float(eigvals[-1]))
        for idx in np.where(eigvals <= 1e-5 * scale)[0]:
            v = eigvecs[:, idx]
            v = v * (2.0 / np.max(np.abs(v)))
            for sgn in (1.0, -1.0):
                if (
                    self.nll(theta + sgn * v) - f >= 1e-4
                    or self.nll(theta + 3.0 * sgn * v) - f >= 1e-4
                ):
                    continue
                av = np.abs(v)
                big = np.where(av >= 0.9 * av.max())[0]
                coef_big = big[big >= self.K - 1]  # name a slope over a threshold
                j = int(coef_big[0]) if coef_big.size else int(big[0])
                raise SeparationError(
                    f"coefficient {self.param_names[j]!r} has no finite "
                    "optimum (the likelihood is flat along a direction "
                    "involving it); the data are (quasi-)completely separated"
                )


def _newton(
    problem: _Problem,
    theta0: np.ndarray,
    tolerance: float,
    max_iter: int,
) -> tuple[np.ndarray, Convergence, np.ndarray]:
    """Maximize the likelihood; returns (theta, info, hessian_at_optimum)."""
    theta = theta0.copy()
    f = problem.nll(theta)
    if not np.isfinite(f):
        raise FitError("starting values give a degenerate likelihood")
    n = problem.n_params
    b_inv = np.eye(n)  # rank-two fallback approximation of the inverse Hessian
    halvings = 0
    stalled = False
    iterations = 0
    g = problem.grad(theta)
    for iterations in range(1, max_iter + 1):
        if np.max(np.abs(g)) < tolerance:
            iterations -= 1
            break
        problem.check_separation(theta)
        H = problem.hessian(theta)
        step = None
        if np.all(np.isfinite(H)):
            try:
                step = -cho_solve(cho_factor(H), g)
            except (LinAlgError, ValueError):
                step = None
        if step is None or g @ step >= 0.0:
            step = -(b_inv @ g)
            if g @ step >= 0.0:
                step = -g
        t = 1.0
        fnew = problem.nll(theta + t * step)
        armijo = 1e-4 * (g @ step)
        # sufficient decrease is tested with slack at the objective's float
        # resolution; without it a step whose true decrease is below one ulp
        # of f can never be accepted and the iteration spins in place
        f_noise = 8.0 * np.finfo(float).eps * max(1.0, abs(f))
        while not fnew <= f + t * armijo + f_noise:
            t *= 0.5
            halvings += 1
            if t < 1e-12:
                stalled = True
                break
            fnew = problem.nll(theta + t * step)
        if stalled:
            # a dead line search happens at a boundary supremum (an empty
            # cell collapsing adjacent thresholds); the fit is returned
            # with converged=False and the near-singular Hessian makes the
            # weak identification visible in the standard errors
            break
        s = t * step
        theta = theta + s
        f = fnew
        gnew = problem.grad(theta)
        yk = gnew - g
        sy = s @ yk
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(yk):
            rho = 1.0 / sy
            V = np.eye(n) - rho * np.outer(s, yk)
            b_inv = V @ b_inv @ V.T + rho * np.outer(s, s)
        g = gnew
    else:
        raise NonConvergenceError(
            f"no convergence in {max_iter} iterations "
            f"(max |gradient| = {np.max(np.abs(g)):.3e})",
            diagnostics={
                "theta": theta,
                "max_grad": float(np.max(np.abs(g))),
                "nll": f,
                "iterations": max_iter,
            },
        )
    problem.check_separation(theta)
    H = problem.hessian(theta)
    problem.check_flat_divergence(theta, f, H)
    max_grad = float(np.max(np.abs(g)))
    cond = float(np.linalg.cond(H)) if np.all(np.isfinite(H)) else np.inf
    info = Convergence(
        iterations=iterations,
        step_halvings=halvings,
        max_grad=max_grad,
        cond_hessian=cond,
        converged=max_grad < tolerance,
        stalled=stalled,
    )
    return theta, info, H


@dataclass(frozen=True)
class FittedClm:
    """A maximum-likelihood cumulative link fit."""

    spec: ClmSpec
    data: Dataset
    param_names: tuple[str, ...]
    estimates: np.ndarray
    covariance: np.ndarray
    log_lik: float
    convergence: Convergence
    notes: tuple[str, ...] = ()
    x_names: tuple[str, ...] = ()
    s_names: tuple[str, ...] = ()
    p_names: tuple[str, ...] = ()

    @property
    def link(self) -> Link:
        return self.spec.link

    @property
    def n_obs(self) -> int:
        return self.data.n_obs

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    @property
    def n_thresholds(self) -> int:
        return self.data.scale.n_categories - 1

    @property
    def aic(self) -> float:
        return 2.0 * self.n_params - 2.0 * self.log_lik

    @property
    def thresholds(self) -> np.ndarray:
        return self.estimates[: self.n_thresholds]

    @property
    def std_errors(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.sqrt(np.diag(self.covariance))

    def coef(self, name: str) -> float:
        try:
            return float(self.estimates[self.param_names.index(name)])
        except ValueError:
            raise ValueError(
                f"no parameter named {name!r}; names: {list(self.param_names)}"
            ) from None

    def location_slice(self) -> slice:
        return slice(self.n_thresholds, self.n_thresholds + len(self.x_names))

    def scale_slice(self) -> slice:
        a = self.n_thresholds + len(self.x_names)
        return slice(a, a + len(self.s_names))

    def nominal_slice(self) -> slice:
        a = self.n_thresholds + len(self.x_names) + len(self.s_names)
        return slice(a, len(self.param_names))


def _problem_for(spec: ClmSpec, data: Dataset) -> tuple[_Problem, tuple[str, ...]]:
    X, x_names = design_matrix(data, spec.location, role="location")
    S, s_names = design_matrix(data, spec.scale_terms, role="scale")
    P, p_names = design_matrix(data, spec.nominal, role="nominal")
    problem = _Problem(
        y=data.response,
        K=data.scale.n_categories,
        X=X,
        S=S,
        P=P,
        link=spec.link,
        threshold_names=data.scale.threshold_names(),
        x_names=x_names,
        s_names=s_names,
        p_names=p_names,
    )
    return problem, (x_names, s_names, p_names)  # type: ignore[return-value]


def fit_clm(
    spec: ClmSpec,
    data: Dataset,
    tolerance: float = 1e-6,
    max_iter: int = 100,
    start: np.ndarray | None = None,
    compute_covariance: bool = True,
) -> FittedClm:
    """Fit by maximum likelihood.

    Unobserved boundary categories are trimmed first (with notes on the
    result); interior empty categories are kept and flagged, since only
    the ordering of the surrounding thresholds is identified.

    Raises:
        NonConvergenceError: iteration budget exhausted, diagnostics attached.
        SeparationError: a coefficient diverged.
        ValueError: aliased or rank-deficient design, unknown terms.
    """
    data, notes = drop_unobserved_boundary_categories(data)
    problem, (x_names, s_names, p_names) = _problem_for(spec, data)
    theta0 = problem.start_values() if start is None else np.asarray(start, float)
    if len(theta0) != problem.n_params:
        raise ValueError(
            f"start vector has length {len(theta0)}, expected {problem.n_params}"
        )
    theta, info, H = _newton(problem, theta0, tolerance, max_iter)
    if compute_covariance:
        cov = _covariance_from_hessian(H)
    else:
        cov = np.full((problem.n_params, problem.n_params), np.nan)
    return FittedClm(
        spec=spec,
        data=data,
        param_names=problem.param_names,
        estimates=theta,
        covariance=cov,
        log_lik=-problem.nll(theta),
        convergence=info,
        notes=notes,
        x_names=tuple(x_names),
        s_names=tuple(s_names),
        p_names=tuple(p_names),
    )


def _covariance_from_hessian(H: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.inv(H)
    except np.linalg.LinAlgError:
        return np.linalg.pinv(H)


def negative_log_likelihood(spec: ClmSpec, data: Dataset, theta: np.ndarray) -> float:
    """The objective at an arbitrary parameter vector (for diagnostics)."""
    data, _ = drop_unobserved_boundary_categories(data)
    problem, _ = _problem_for(spec, data)
    return problem.nll(np.asarray(theta, dtype=float))


def nll_gradient(spec: ClmSpec, data: Dataset, theta: np.ndarray) -> np.ndarray:
    """Analytic gradient of the objective at an arbitrary parameter vector."""
    data, _ = drop_unobserved_boundary_categories(data)
    problem, _ = _problem_for(spec, data)
    return problem.grad(np.asarray(theta, dtype=float))


def category_probabilities(
    fitted: FittedClm, setting: Mapping[str, object] | None = None
) -> np.ndarray:
    """P(Y = k) for one covariate setting, over the fitted scale's labels.

    Raises:
        ValueError: if the effective thresholds at this setting are not
            strictly increasing (possible under nominal effects), naming
            the violated pair.
    """
    setting = setting or {}
    spec = fitted.spec
    data = fitted.data
    K = data.scale.n_categories
    tau = fitted.thresholds.copy()
    x = design_row(data, spec.location, setting)
    beta = fitted.estimates[fitted.location_slice()]
    eta = float(x @ beta) if beta.size else 0.0
    alpha = 1.0
    if fitted.s_names:
        s = design_row(data, spec.scale_terms, setting)
        alpha = float(np.exp(s @ fitted.estimates[fitted.scale_slice()]))
    if fitted.p_names:
        p = design_row(data, spec.nominal, setting)
        gamma = fitted.estimates[fitted.nominal_slice()].reshape(K - 1, -1)
        tau = tau + gamma @ p
    if np.any(np.diff(tau) <= 0):
        k = int(np.argmax(np.diff(tau) <= 0))
        names = data.scale.threshold_names()
        raise ValueError(
            f"effective thresholds are not ordered at this setting: "
            f"{names[k]} >= {names[k + 1]}"
        )
    z = alpha * (tau - eta)
    cdf = np.concatenate([[0.0], np.asarray(spec.link.cdf(z)), [1.0]])
    return np.diff(cdf)


def predict_probs(
    fitted: FittedClm, setting: Mapping[str, object] | None = None
) -> dict[str, float]:
    """Category probabilities keyed by scale label."""
    probs = category_probabilities(fitted, setting)
    return dict(zip(fitted.data.scale.labels, map(float, probs)))


def modal_category(
    fitted: FittedClm, setting: Mapping[str, object] | None = None
) -> str:
    """The category whose latent interval contains the fitted location.

    This is the reading used when narrating a fit: the latent response
    sits at x' beta, and the predicted category is the slice of the latent
    axis that point falls in, (tau_{k-1}, tau_k].
    """
    setting = setting or {}
    data = fitted.data
    tau = fitted.thresholds.copy()
    if fitted.p_names:
        p = design_row(data, fitted.spec.nominal, setting)
        gamma = fitted.estimates[fitted.nominal_slice()].reshape(len(tau), -1)
        tau = tau + gamma @ p
    x = design_row(data, fitted.spec.location, setting)
    beta = fitted.estimates[fitted.location_slice()]
    eta = float(x @ beta) if beta.size else 0.0
    k = int(np.searchsorted(tau, eta, side="left"))
    return data.scale.labels[k]

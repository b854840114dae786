"""Cumulative link mixed models: one random intercept per group.

The marginal likelihood integrates the CLM likelihood over a
Normal(0, sigma_b^2) latent intercept per group:

    L_g = integral  prod_{i in g} P(y_i | eta_i + b)  dNorm(b; 0, sigma_b^2)

The integral is approximated per group by a Laplace expansion around the
conditional mode, or by adaptive Gauss-Hermite quadrature centered and
scaled at that mode (an odd node count up to 101; one node reproduces the
Laplace value exactly).

Optimization is nested.  The inner problem finds every group's mode by
Newton steps on the (strictly concave) conditional log-density, to a
gradient below 1e-8, vectorized across groups.  The outer problem runs a
quasi-Newton search on (tau, beta, log sigma_b); the variance parameter is
optimized on the log scale with a floor at log(1e-6), and landing on that
floor is reported as a boundary fit rather than an error.  Standard errors
come from a finite-difference Hessian of the marginal objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .clm import (
    ClmSpec,
    Convergence,
    FitError,
    FittedClm,
    NonConvergenceError,
    fit_clm,
)
from .data import Dataset, drop_unobserved_boundary_categories
from .design import design_matrix
from .links import Link

_LOG_TINY = np.log(1e-300)
_LOG_SIGMA_FLOOR = np.log(1e-6)
_SQRT2 = np.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_PENALTY = 1e12  # finite sentinel: quasi-Newton line searches reject it cleanly

_HERMGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _hermgauss(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if nodes not in _HERMGAUSS_CACHE:
        _HERMGAUSS_CACHE[nodes] = np.polynomial.hermite.hermgauss(nodes)
    return _HERMGAUSS_CACHE[nodes]


@dataclass(frozen=True)
class VarianceComponent:
    """Random intercept variance for one grouping factor."""

    group: str
    variance: float
    std_dev: float
    std_err: float  # delta-method SE of std_dev; nan on a boundary fit


@dataclass(frozen=True)
class FittedClmm:
    """A maximum-likelihood cumulative link mixed fit."""

    spec: ClmSpec
    data: Dataset
    param_names: tuple[str, ...]  # thresholds then location coefficients
    estimates: np.ndarray
    covariance: np.ndarray  # over (thresholds, location); log-sigma marginalized out
    log_lik: float
    convergence: Convergence
    variance_component: VarianceComponent
    conditional_modes: np.ndarray  # one per group, in group label order
    boundary: bool
    method: str
    nodes: int
    inner_iterations: int
    notes: tuple[str, ...] = ()
    x_names: tuple[str, ...] = ()

    @property
    def link(self) -> Link:
        return self.spec.link

    @property
    def n_obs(self) -> int:
        return self.data.n_obs

    @property
    def n_groups(self) -> int:
        return len(self.data.group_labels)

    @property
    def n_params(self) -> int:
        # thresholds + location + the variance parameter
        return len(self.param_names) + 1

    @property
    def aic(self) -> float:
        return 2.0 * self.n_params - 2.0 * self.log_lik

    @property
    def n_thresholds(self) -> int:
        return self.data.scale.n_categories - 1

    @property
    def thresholds(self) -> np.ndarray:
        return self.estimates[: self.n_thresholds]

    @property
    def std_errors(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.sqrt(np.diag(self.covariance))

    def location_slice(self) -> slice:
        return slice(self.n_thresholds, self.n_thresholds + len(self.x_names))

    def coef(self, name: str) -> float:
        try:
            return float(self.estimates[self.param_names.index(name)])
        except ValueError:
            raise ValueError(
                f"no parameter named {name!r}; names: {list(self.param_names)}"
            ) from None


def conditional_modes(fitted: FittedClmm) -> dict[str, float]:
    """Posterior modes of the group intercepts, keyed by group label."""
    return {
        label: float(b)
        for label, b in zip(fitted.data.group_labels, fitted.conditional_modes)
    }


class _MixedProblem:
    """Marginal likelihood machinery with cached group modes."""

    def __init__(
        self,
        y: np.ndarray,
        K: int,
        X: np.ndarray,
        groups: np.ndarray,
        n_groups: int,
        link: Link,
    ) -> None:
        self.y = np.asarray(y, dtype=np.int64)
        self.K = K
        self.X = np.asarray(X, dtype=float)
        self.g = np.asarray(groups, dtype=np.int64)
        self.G = n_groups
        self.n = len(self.y)
        self.p = self.X.shape[1]
        self.link = link
        self.hi_finite = self.y < K - 1
        self.lo_finite = self.y > 0
        self.y_hi = np.minimum(self.y, K - 2)
        self.y_lo = np.maximum(self.y - 1, 0)
        self.modes = np.zeros(n_groups)
        self.inner_iterations = 0

    # -- per-row pieces ------------------------------------------------------

    def _base_bounds(self, theta: np.ndarray):
        tau = theta[: self.K - 1]
        beta = theta[self.K - 1 : self.K - 1 + self.p]
        eta = self.X @ beta if self.p else np.zeros(self.n)
        return tau[self.y_hi] - eta, tau[self.y_lo] - eta

    def _row_logp(self, z_hi, z_lo):
        link = self.link
        lo_f = self.lo_finite if z_hi.ndim == 1 else self.lo_finite[:, None]
        hi_f = self.hi_finite if z_hi.ndim == 1 else self.hi_finite[:, None]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lc_hi = link.log_cdf(z_hi)
            lc_lo = link.log_cdf(z_lo)
            ls_hi = link.log_sf(z_hi)
            ls_lo = link.log_sf(z_lo)
            lower_form = lc_hi + np.log1p(-np.exp(np.minimum(lc_lo - lc_hi, 0.0)))
            upper_form = ls_lo + np.log1p(-np.exp(np.minimum(ls_hi - ls_lo, 0.0)))
        logp = np.where((z_hi + z_lo) < 0.0, lower_form, upper_form)
        logp = np.where(lo_f, logp, lc_hi)
        logp = np.where(hi_f | ~lo_f, logp, ls_lo)
        return logp

    def _row_derivs(self, z_hi, z_lo, logp):
        """First and second derivatives of each row's log-probability in b.

        b enters every bound as -b, so d logP/db = -(f_hi - f_lo)/P and
        the second derivative is (f'_hi - f'_lo)/P - ((f_hi - f_lo)/P)^2.
        The density-slope ratios reduce to expressions in w = f/P that stay
        finite in the tails.
        """
        logp = np.maximum(logp, _LOG_TINY)
        link = self.link
        with np.errstate(over="ignore", invalid="ignore"):
            w_hi = np.where(self.hi_finite, np.exp(link.log_density(z_hi) - logp), 0.0)
            w_lo = np.where(self.lo_finite, np.exp(link.log_density(z_lo) - logp), 0.0)
        zh = np.where(self.hi_finite, z_hi, 0.0)
        zl = np.where(self.lo_finite, z_lo, 0.0)
        if link.name == "probit":
            r_hi = -zh * w_hi
            r_lo = -zl * w_lo
        elif link.name == "logit":
            from scipy.special import expit

            r_hi = w_hi * (1.0 - 2.0 * expit(zh))
            r_lo = w_lo * (1.0 - 2.0 * expit(zl))
        else:  # extreme value
            r_hi = w_hi * (1.0 - np.exp(np.minimum(zh, 700.0)))
            r_lo = w_lo * (1.0 - np.exp(np.minimum(zl, 700.0)))
        diff = w_hi - w_lo
        d1 = -diff
        d2 = (r_hi - r_lo) - diff * diff
        return d1, d2

    # -- inner problem -------------------------------------------------------

    def _group_h(self, z_hi0, z_lo0, b, sigma2):
        """Conditional log-density per group at intercepts b."""
        zb = b[self.g]
        logp = self._row_logp(z_hi0 - zb, z_lo0 - zb)
        ll = np.bincount(self.g, weights=logp, minlength=self.G)
        return ll - 0.5 * b * b / sigma2, logp

    def solve_modes(self, theta: np.ndarray, sigma: float, tol: float = 1e-8):
        """Newton for all group modes at once; the target is strictly concave."""
        z_hi0, z_lo0 = self._base_bounds(theta)
        sigma2 = sigma * sigma
        b = self.modes.copy()
        h, _ = self._group_h(z_hi0, z_lo0, b, sigma2)
        if not np.all(np.isfinite(h)):
            b = np.zeros(self.G)
            h, _ = self._group_h(z_hi0, z_lo0, b, sigma2)
        for _ in range(100):
            zb = b[self.g]
            z_hi = z_hi0 - zb
            z_lo = z_lo0 - zb
            logp = self._row_logp(z_hi, z_lo)
            d1, d2 = self._row_derivs(z_hi, z_lo, logp)
            grad = np.bincount(self.g, weights=d1, minlength=self.G) - b / sigma2
            curv = -np.bincount(self.g, weights=d2, minlength=self.G) + 1.0 / sigma2
            if np.max(np.abs(grad)) < tol:
                break
            self.inner_iterations += 1
            step = grad / curv
            t = np.ones(self.G)
            for _ in range(60):
                h_new, _ = self._group_h(z_hi0, z_lo0, b + t * step, sigma2)
                worse = h_new < h - 1e-12
                if not worse.any():
                    break
                t[worse] *= 0.5
            b = b + t * step
            h, _ = self._group_h(z_hi0, z_lo0, b, sigma2)
        zb = b[self.g]
        logp = self._row_logp(z_hi0 - zb, z_lo0 - zb)
        _, d2 = self._row_derivs(z_hi0 - zb, z_lo0 - zb, logp)
        curv = -np.bincount(self.g, weights=d2, minlength=self.G) + 1.0 / sigma2
        self.modes = b
        h_val = np.bincount(self.g, weights=logp, minlength=self.G) - 0.5 * b * b / sigma2
        return b, h_val, curv, z_hi0, z_lo0

    # -- marginal objective ----------------------------------------------------

    def marginal_nll(self, x: np.ndarray, nodes: int) -> float:
        """Negative log marginal likelihood at (theta, log sigma).

        Infeasible points (unordered thresholds, a vanished row
        probability) return a large finite penalty so the outer
        quasi-Newton line search backs off rather than aborting.
        """
        theta = x[:-1]
        tau = theta[: self.K - 1]
        gaps = np.diff(tau)
        if np.any(gaps <= 0):
            return _PENALTY * (1.0 + float(-gaps.min()))
        sigma = float(np.exp(x[-1]))
        b, h_val, curv, z_hi0, z_lo0 = self.solve_modes(theta, sigma)
        if not (np.all(np.isfinite(h_val)) and np.all(curv > 0)):
            return _PENALTY
        if nodes == 1:
            log_lg = h_val - np.log(sigma) - 0.5 * np.log(curv)
        else:
            t, w = _hermgauss(nodes)
            s = 1.0 / np.sqrt(curv)  # (G,)
            pts = b[:, None] + _SQRT2 * s[:, None] * t[None, :]  # (G, J)
            zb = pts[self.g]  # (n, J)
            logp = self._row_logp(z_hi0[:, None] - zb, z_lo0[:, None] - zb)
            ll = np.zeros((self.G, logp.shape[1]))
            np.add.at(ll, self.g, logp)
            hmat = ll - 0.5 * pts * pts / (sigma * sigma)
            expo = np.log(w)[None, :] + hmat + (t * t)[None, :]
            m = expo.max(axis=1)
            inner = m + np.log(np.exp(expo - m[:, None]).sum(axis=1))
            log_lg = np.log(_SQRT2 * s) - np.log(sigma) - _LOG_SQRT_2PI + inner
        if np.any(log_lg < _LOG_TINY):
            return _PENALTY
        return float(-np.sum(log_lg))


def _central_gradient(fun, x, h_rel=1e-5):
    """Central differences, falling back to one-sided at a penalty wall.

    Differencing across the infeasible region would report a cliff of
    height _PENALTY where the objective actually has an ordinary slope.
    """
    g = np.zeros_like(x)
    f0 = None
    for j in range(len(x)):
        h = h_rel * (1.0 + abs(x[j]))
        up = x.copy()
        up[j] += h
        dn = x.copy()
        dn[j] -= h
        fu = fun(up)
        fd = fun(dn)
        bad_u = fu >= 0.5 * _PENALTY
        bad_d = fd >= 0.5 * _PENALTY
        if not bad_u and not bad_d:
            g[j] = (fu - fd) / (2.0 * h)
            continue
        if f0 is None:
            f0 = fun(x)
        if bad_u and not bad_d:
            g[j] = (f0 - fd) / h
        elif bad_d and not bad_u:
            g[j] = (fu - f0) / h
        else:
            g[j] = 0.0  # feasible slot narrower than the probe
    return g


def _fd_hessian(fun, x, h_rel=3e-4):
    d = len(x)
    H = np.zeros((d, d))
    f0 = fun(x)
    hs = [h_rel * (1.0 + abs(x[j])) for j in range(d)]
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = hs[i]
        H[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / (hs[i] * hs[i])
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = hs[j]
            H[i, j] = H[j, i] = (
                fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)
            ) / (4.0 * hs[i] * hs[j])
    return H


def fit_clmm(
    spec: ClmSpec,
    data: Dataset,
    method: str = "laplace",
    nodes: int | None = None,
    tolerance: float = 1e-3,
    max_iter: int = 400,
    fix_sigma_b: float | None = None,
) -> FittedClmm:
    """Fit a random-intercept cumulative model by marginal ML.

    method is 'laplace' or 'agq'; for 'agq', nodes must be an odd count
    between 1 and 101 (default 21).  fix_sigma_b pins the intercept
    standard deviation instead of estimating it; zero degenerates exactly
    to the fixed-effects model.

    Raises:
        ValueError: missing grouping, scale or nominal terms present, or a
            bad node count.
        NonConvergenceError: the outer search missed the gradient tolerance.
    """
    if data.group_codes is None:
        raise ValueError("data has no group ids; a random intercept needs them")
    if spec.scale_terms or spec.nominal:
        raise ValueError(
            "scale and nominal terms are not supported together with a "
            "random intercept"
        )
    if method not in ("laplace", "agq"):
        raise ValueError(f"method must be 'laplace' or 'agq', got {method!r}")
    if method == "laplace":
        nodes = 1
    else:
        nodes = 21 if nodes is None else int(nodes)
        if nodes < 1 or nodes > 101 or nodes % 2 == 0:
            raise ValueError(
                f"nodes must be an odd count between 1 and 101, got {nodes}"
            )

    if fix_sigma_b is not None and fix_sigma_b == 0.0:
        return _degenerate_fit(spec, data)

    data, notes = drop_unobserved_boundary_categories(data)
    X, x_names = design_matrix(data, spec.location, role="location")
    problem = _MixedProblem(
        y=data.response,
        K=data.scale.n_categories,
        X=X,
        groups=data.group_codes,
        n_groups=len(data.group_labels),
        link=spec.link,
    )
    names = data.scale.threshold_names() + x_names

    base = fit_clm(spec, data, compute_covariance=False)
    zeta0 = float(np.log(fix_sigma_b)) if fix_sigma_b else 0.0
    x0 = np.concatenate([base.estimates, [zeta0]])
    d = len(x0)

    fixed_zeta = fix_sigma_b is not None

    def objective(x: np.ndarray) -> float:
        return problem.marginal_nll(x, nodes)

    if fixed_zeta:

        def obj_free(xf: np.ndarray) -> float:
            return objective(np.concatenate([xf, [zeta0]]))

        free0 = x0[:-1]
        bounds = [(None, None)] * (d - 1)
        fun = obj_free
    else:
        free0 = x0
        bounds = [(None, None)] * (d - 1) + [(_LOG_SIGMA_FLOOR, np.log(1e3))]
        fun = objective

    result = minimize(
        fun,
        free0,
        jac=lambda x: _central_gradient(fun, x),
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": max_iter, "ftol": 1e-13, "gtol": tolerance * 0.2},
    )
    xhat = result.x
    outer_iter = int(result.nit)
    grad = _central_gradient(fun, xhat)
    if _projected_max(grad, xhat, bounds) > tolerance:
        result = minimize(
            fun,
            xhat,
            jac=lambda x: _central_gradient(fun, x),
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": max_iter, "ftol": 1e-15, "gtol": tolerance * 0.05},
        )
        xhat = result.x
        outer_iter += int(result.nit)
        grad = _central_gradient(fun, xhat)
    max_grad = _projected_max(grad, xhat, bounds)
    if max_grad > tolerance:
        raise NonConvergenceError(
            f"outer search stopped with max |gradient| = {max_grad:.3e} "
            f"above tolerance {tolerance:.1e}",
            diagnostics={"x": xhat, "max_grad": max_grad, "nll": result.fun},
        )

    full = np.concatenate([xhat, [zeta0]]) if fixed_zeta else xhat
    zeta = float(full[-1])
    # under the log parametrization the sigma -> 0 boundary is an
    # infinitely flat tail, so a gradient stop strands a little above it;
    # when the floor value matches the stopped value this is a boundary fit
    snapped = False
    if not fixed_zeta and zeta < np.log(0.01):
        at_floor = full.copy()
        at_floor[-1] = _LOG_SIGMA_FLOOR
        if problem.marginal_nll(at_floor, nodes) <= float(result.fun) + 1e-4:
            full = at_floor
            zeta = _LOG_SIGMA_FLOOR
            snapped = True
    sigma = float(np.exp(zeta))
    boundary = (not fixed_zeta) and zeta <= _LOG_SIGMA_FLOOR + 1e-8

    if snapped:
        # curvature in zeta has died; condition on the floor for the
        # remaining parameters instead of inverting a singular block
        def fun_floor(xf: np.ndarray) -> float:
            return problem.marginal_nll(np.concatenate([xf, [zeta]]), nodes)

        H = _fd_hessian(fun_floor, full[:-1])
    else:
        H = _fd_hessian(fun, xhat)
    try:
        cov_all = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        cov_all = np.linalg.pinv(H)
    cond = float(np.linalg.cond(H)) if np.all(np.isfinite(H)) else np.inf
    n_theta = len(names)
    cov = cov_all[:n_theta, :n_theta]
    if fixed_zeta or boundary:
        sigma_se = float("nan")
    else:
        var_zeta = float(cov_all[-1, -1])
        sigma_se = sigma * np.sqrt(var_zeta) if var_zeta > 0 else float("nan")

    theta = full[:-1]
    nll = problem.marginal_nll(full, nodes)
    b, _, _, _, _ = problem.solve_modes(theta, sigma, tol=1e-10)

    info = Convergence(
        iterations=outer_iter,
        step_halvings=problem.inner_iterations,
        max_grad=max_grad,
        cond_hessian=cond,
        converged=True,
    )
    return FittedClmm(
        spec=spec,
        data=data,
        param_names=tuple(names),
        estimates=theta,
        covariance=cov,
        log_lik=-nll,
        convergence=info,
        variance_component=VarianceComponent(
            group=str(data.group_name),
            variance=sigma * sigma,
            std_dev=sigma,
            std_err=sigma_se,
        ),
        conditional_modes=b,
        boundary=boundary,
        method=method,
        nodes=nodes,
        inner_iterations=problem.inner_iterations,
        notes=notes,
        x_names=tuple(x_names),
    )


def _projected_max(grad: np.ndarray, x: np.ndarray, bounds) -> float:
    out = 0.0
    for j, gj in enumerate(grad):
        lo, hi = bounds[j]
        if lo is not None and x[j] <= lo + 1e-12 and gj > 0:
            continue  # pushing into the floor; not a free direction
        if hi is not None and x[j] >= hi - 1e-12 and gj < 0:
            continue
        out = max(out, abs(float(gj)))
    return out


def _degenerate_fit(spec: ClmSpec, data: Dataset) -> FittedClmm:
    """sigma_b pinned at zero: exactly the fixed-effects model."""
    if data.group_codes is None:
        raise ValueError("data has no group ids")
    base = fit_clm(spec, data)
    return FittedClmm(
        spec=spec,
        data=base.data,
        param_names=base.param_names,
        estimates=base.estimates,
        covariance=base.covariance,
        log_lik=base.log_lik,
        convergence=base.convergence,
        variance_component=VarianceComponent(
            group=str(data.group_name), variance=0.0, std_dev=0.0, std_err=float("nan")
        ),
        conditional_modes=np.zeros(len(base.data.group_labels)),
        boundary=True,
        method="laplace",
        nodes=1,
        inner_iterations=0,
        notes=base.notes,
        x_names=base.x_names,
    )


def marginal_nll(
    fitted_or_spec,
    data: Dataset | None = None,
    at: np.ndarray | None = None,
    log_sigma: float | None = None,
    method: str = "laplace",
    nodes: int | None = None,
) -> float:
    """Evaluate the marginal objective for a fit (or spec) at given values.

    With a FittedClmm alone, re-evaluates at its own estimates, letting the
    caller compare integration methods on the same fit.
    """
    if isinstance(fitted_or_spec, FittedClmm):
        fitted = fitted_or_spec
        spec = fitted.spec
        data = fitted.data
        theta = fitted.estimates if at is None else np.asarray(at, float)
        zeta = (
            float(np.log(max(fitted.variance_component.std_dev, 1e-6)))
            if log_sigma is None
            else log_sigma
        )
    else:
        spec = fitted_or_spec
        if data is None or at is None or log_sigma is None:
            raise ValueError("spec form needs data, at and log_sigma")
        theta = np.asarray(at, float)
        zeta = float(log_sigma)
    if method == "laplace":
        n_nodes = 1
    else:
        n_nodes = 21 if nodes is None else int(nodes)
    data2, _ = drop_unobserved_boundary_categories(data)
    if data2.group_codes is None:
        raise ValueError("data has no group ids")
    X, _ = design_matrix(data2, spec.location, role="location")
    problem = _MixedProblem(
        y=data2.response,
        K=data2.scale.n_categories,
        X=X,
        groups=data2.group_codes,
        n_groups=len(data2.group_labels),
        link=spec.link,
    )
    return problem.marginal_nll(np.concatenate([theta, [zeta]]), n_nodes)

"""Fixed-layout text summaries of fitted models.

The rendering follows the block layout HCI readers already know from R's
ordinal fits: a formula/data preamble, a one-line fit header, a
coefficient table with significance marks, and a threshold table without
p-values (thresholds are nuisance structure, not hypotheses).  Column
precision mimics the same display rules: estimates and standard errors
share the decimal count needed for 4 significant figures anywhere in
either column, z values get 3 decimals, and p-values widen as a column
until the smallest one shows 3 significant figures.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import norm

from .clm import FittedClm
from .clmm import FittedClmm

_STAR_LEVELS = ((0.001, "***"), (0.01, "**"), (0.05, "*"), (0.1, "."))
_SIGNIF_LEGEND = (
    "Signif. codes:  "
    "0 ‘***’ 0.001 ‘**’ 0.01 ‘*’ 0.05 "
    "‘.’ 0.1 ‘ ’ 1"
)


def _stars(p: float) -> str:
    for cut, mark in _STAR_LEVELS:
        if p < cut:
            return mark
    return ""


def _decimals_for(value: float, sig: int) -> int:
    if not np.isfinite(value) or value == 0.0:
        return 0
    magnitude = int(np.floor(np.log10(abs(value))))
    return max(sig - 1 - magnitude, 0)


def _shared_decimals(columns: list[np.ndarray], sig: int, cap: int = 10) -> int:
    need = 0
    for col in columns:
        for v in col:
            need = max(need, _decimals_for(float(v), sig))
    return min(need, cap)


def _fixed(values: np.ndarray, decimals: int) -> list[str]:
    return [
        f"{v:.{decimals}f}" if np.isfinite(v) else "NA" for v in values
    ]


def _p_strings(pvals: np.ndarray) -> list[str]:
    finite = [p for p in pvals if np.isfinite(p) and p >= 1e-4]
    decimals = max((_decimals_for(p, 3) for p in finite), default=3)
    decimals = min(decimals, 6)
    out = []
    for p in pvals:
        if not np.isfinite(p):
            out.append("NA")
        elif p < 2e-16:
            out.append("<2e-16")
        elif p < 1e-4:
            out.append(f"{p:.2e}")
        else:
            out.append(f"{p:.{decimals}f}")
    return out


def _layout(
    names: list[str],
    headers: list[str],
    columns: list[list[str]],
    stars: list[str] | None = None,
    indent: str = "",
) -> list[str]:
    """Name column left-justified, numeric columns right-justified."""
    name_w = max([len(n) for n in names], default=0)
    widths = [
        max(len(h), max((len(c) for c in col), default=0))
        for h, col in zip(headers, columns)
    ]
    head = indent + " ".join(
        [" " * name_w] + [h.rjust(w) for h, w in zip(headers, widths)]
    )
    lines = [head]
    for i, name in enumerate(names):
        cells = [col[i].rjust(w) for col, w in zip(columns, widths)]
        lines.append(indent + " ".join([name.ljust(name_w)] + cells))
    if stars is not None and any(stars):
        star_w = max(len(s) for s in stars)
        lines[0] += " " + " " * star_w
        for i in range(len(names)):
            lines[i + 1] += " " + stars[i].ljust(star_w)
    return lines


def _header_line(cells: list[tuple[str, str]], indent: str = "") -> list[str]:
    """The one-line fit header; both rows padded cell by cell."""
    head, row = [], []
    for title, value in cells:
        w = max(len(title), len(value))
        head.append(title.ljust(w))
        row.append(value.ljust(w))
    return [indent + " ".join(head), indent + " ".join(row).rstrip()]


def _coefficient_lines(
    names: list[str],
    estimates: np.ndarray,
    std_errors: np.ndarray,
    with_p: bool,
) -> list[str]:
    decimals = _shared_decimals([estimates, std_errors], sig=4)
    est_s = _fixed(estimates, decimals)
    se_s = _fixed(std_errors, decimals)
    with np.errstate(invalid="ignore", divide="ignore"):
        z = estimates / std_errors
    z_s = ["NA" if not np.isfinite(v) else f"{v:.3f}" for v in z]
    if not with_p:
        return _layout(
            names, ["Estimate", "Std. Error", "z value"], [est_s, se_s, z_s]
        )
    p = 2.0 * norm.sf(np.abs(z))
    p_s = _p_strings(p)
    stars = ["" if not np.isfinite(v) else _stars(pp) for v, pp in zip(z, p)]
    lines = _layout(
        names,
        ["Estimate", "Std. Error", "z value", "Pr(>|z|)"],
        [est_s, se_s, z_s, p_s],
        stars=stars,
    )
    if any(stars):
        lines.append("---")
        lines.append(_SIGNIF_LEGEND)
    return lines


def _preamble(formula: str, data_name: str) -> list[str]:
    return [f"formula: {formula}", f"data:    {data_name}", ""]


def _clm_text(fitted: FittedClm, data_name: str) -> str:
    conv = fitted.convergence
    lines = _preamble(fitted.spec.formula_text(), data_name)
    lines += _header_line(
        [
            ("link", fitted.link.name),
            ("threshold", "flexible"),
            ("nobs", str(fitted.n_obs)),
            ("logLik", f"{fitted.log_lik:.2f}"),
            ("AIC", f"{fitted.aic:.2f}"),
            ("niter", conv.iteration_label()),
            ("max.grad", f"{conv.max_grad:.2e}"),
            ("cond.H", f"{conv.cond_hessian:.1e}"),
        ]
    )
    lines.append("")
    se = fitted.std_errors
    k = fitted.n_thresholds
    if fitted.x_names:
        sl = fitted.location_slice()
        lines.append("Coefficients:")
        lines += _coefficient_lines(
            list(fitted.x_names), fitted.estimates[sl], se[sl], with_p=True
        )
        lines.append("")
    else:
        lines.append("No coefficients")
        lines.append("")
    if fitted.s_names:
        sl = fitted.scale_slice()
        lines.append("Scale coefficients (log scale):")
        lines += _coefficient_lines(
            list(fitted.s_names), fitted.estimates[sl], se[sl], with_p=True
        )
        lines.append("")
    if fitted.p_names:
        # one row per threshold-by-term parameter, so the names come from
        # the flat vector, not the r term labels
        sl = fitted.nominal_slice()
        lines.append("Nominal coefficients:")
        lines += _coefficient_lines(
            list(fitted.param_names[sl]),
            fitted.estimates[sl],
            se[sl],
            with_p=True,
        )
        lines.append("")
    lines.append("Threshold coefficients:")
    lines += _coefficient_lines(
        list(fitted.param_names[:k]),
        fitted.estimates[:k],
        se[:k],
        with_p=False,
    )
    return "\n".join(lines) + "\n"


def _clmm_text(fitted: FittedClmm, data_name: str) -> str:
    conv = fitted.convergence
    vc = fitted.variance_component
    formula = f"{fitted.spec.formula_text()} + (1 | {vc.group})"
    lines = _preamble(formula, data_name)
    lines += _header_line(
        [
            ("link", fitted.link.name),
            ("threshold", "flexible"),
            ("nobs", str(fitted.n_obs)),
            ("logLik", f"{fitted.log_lik:.2f}"),
            ("AIC", f"{fitted.aic:.2f}"),
            ("niter", conv.iteration_label()),
            ("max.grad", f"{conv.max_grad:.2e}"),
            ("cond.H", f"{conv.cond_hessian:.1e}"),
        ],
        indent=" ",
    )
    lines.append("")
    lines.append("Random effects:")
    var_s, sd_s = f"{vc.variance:.4g}", f"{vc.std_dev:.4g}"
    cells = [
        ("Groups", vc.group),
        ("Name", "(Intercept)"),
        ("Variance", var_s),
        ("Std.Dev.", sd_s),
    ]
    widths = [max(len(h), len(v)) for h, v in cells]
    lines.append(
        " " + " ".join(h.ljust(w) for (h, _), w in zip(cells, widths))
    )
    lines.append(
        " " + " ".join(v.ljust(w) for (_, v), w in zip(cells, widths))
    )
    lines.append(f"Number of groups:  {vc.group} {fitted.n_groups} ")
    lines.append("")
    se = fitted.std_errors
    k = fitted.n_thresholds
    if fitted.x_names:
        sl = fitted.location_slice()
        lines.append("Coefficients:")
        lines += _coefficient_lines(
            list(fitted.x_names), fitted.estimates[sl], se[sl], with_p=True
        )
        lines.append("")
    else:
        lines.append("No coefficients")
        lines.append("")
    lines.append("Threshold coefficients:")
    lines += _coefficient_lines(
        list(fitted.param_names[:k]),
        fitted.estimates[:k],
        se[:k],
        with_p=False,
    )
    return "\n".join(lines) + "\n"


def summarize(fitted: FittedClm | FittedClmm, data_name: str = "data") -> str:
    """Render the fixed-layout summary block for a fitted model."""
    if isinstance(fitted, FittedClmm):
        return _clmm_text(fitted, data_name)
    if isinstance(fitted, FittedClm):
        return _clm_text(fitted, data_name)
    raise TypeError(f"cannot summarize {type(fitted).__name__}")

"""Design matrix construction: treatment coding against a reference level.

No global intercept column is ever emitted; in a cumulative model the
thresholds absorb it, so a constant column in any part of the design is
unidentifiable and rejected here.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
from scipy import linalg

from .data import Dataset, Factor


def term_columns(data: Dataset, term: str) -> tuple[np.ndarray, tuple[str, ...]]:
    """Columns and names contributed by one term.

    A factor term expands to one dummy column per non-reference level, in
    level order, named like 'ConditionSelf'.  A numeric covariate term
    contributes its own column under its own name.
    """
    factor_names = [f.name for f in data.factors]
    if term in factor_names:
        factor = data.factor(term)
        codes = data.factor_column(term)
        cols = []
        names = []
        ref = factor.index_of(factor.reference)
        for j, level in enumerate(factor.levels):
            if j == ref:
                continue
            cols.append((codes == j).astype(float))
            names.append(f"{factor.name}{level}")
        if not cols:
            return np.zeros((data.n_obs, 0)), ()
        return np.column_stack(cols), tuple(names)
    if term in data.covariate_names:
        return data.covariate_column(term).reshape(-1, 1), (term,)
    raise ValueError(
        f"term {term!r} is neither a factor nor a covariate of the data"
    )


def design_matrix(
    data: Dataset, terms: Sequence[str], role: str = "location"
) -> tuple[np.ndarray, tuple[str, ...]]:
    """Assemble the matrix for a term list and verify identifiability.

    Raises:
        ValueError: a constant column (aliased with the thresholds), or a
            rank-deficient matrix; both errors name the offending columns.
    """
    if not terms:
        return np.zeros((data.n_obs, 0)), ()
    blocks = []
    names: list[str] = []
    for term in terms:
        cols, cnames = term_columns(data, term)
        blocks.append(cols)
        names.extend(cnames)
    X = np.column_stack(blocks) if blocks else np.zeros((data.n_obs, 0))
    if X.shape[1] == 0:
        return X, tuple(names)
    spreads = X.max(axis=0) - X.min(axis=0) if X.shape[0] else np.ones(X.shape[1])
    constant = [names[j] for j in range(X.shape[1]) if spreads[j] == 0.0]
    if constant:
        raise ValueError(
            f"{role} design has constant column(s) {constant}; these are "
            "aliased with the thresholds and cannot be estimated"
        )
    _, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = diag.max() * max(X.shape) * np.finfo(float).eps if diag.size else 0.0
    rank = int((diag > tol).sum())
    if rank < X.shape[1]:
        bad = sorted(names[j] for j in piv[rank:])
        raise ValueError(
            f"{role} design is rank deficient; collinear column(s): {bad}"
        )
    return X, tuple(names)


def design_row(
    data: Dataset, terms: Sequence[str], setting: Mapping[str, object]
) -> np.ndarray:
    """One prediction row for a covariate setting.

    Factors missing from the setting sit at their reference level; missing
    numeric covariates sit at zero.  Unknown setting keys are rejected.
    """
    known = {f.name for f in data.factors} | set(data.covariate_names)
    unknown = sorted(set(map(str, setting)) - known)
    if unknown:
        raise ValueError(f"setting names unknown terms: {unknown}")
    row: list[float] = []
    for term in terms:
        factor = next((f for f in data.factors if f.name == term), None)
        if factor is not None:
            level = str(setting.get(term, factor.reference))
            j = factor.index_of(level)
            ref = factor.index_of(factor.reference)
            row.extend(
                1.0 if (i == j) else 0.0
                for i in range(len(factor.levels))
                if i != ref
            )
        else:
            row.append(float(setting.get(term, 0.0)))  # type: ignore[arg-type]
    return np.asarray(row, dtype=float)

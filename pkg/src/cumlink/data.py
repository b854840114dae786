"""Ordinal scales, factors and long-format datasets.

Responses live on an ordered scale of opaque labels; nothing here assumes
the labels are numbers or that adjacent labels are equidistant.  Datasets
are immutable: every transformation returns a new object.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np


class DataWarning(UserWarning):
    """Raised for recoverable data issues: dropped rows, inferred levels."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class OrdinalScale:
    """An ordered response scale of K >= 2 opaque labels."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.labels) < 2:
            raise ValueError("an ordinal scale needs at least 2 categories")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("scale labels must be unique")
        object.__setattr__(self, "labels", tuple(str(t) for t in self.labels))

    @property
    def n_categories(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValueError(
                f"label {label!r} is not on the scale {list(self.labels)}"
            ) from None

    def threshold_names(self) -> tuple[str, ...]:
        """Names of the K-1 cut points, e.g. '1|2' for labels ('1','2')."""
        pairs = zip(self.labels[:-1], self.labels[1:])
        return tuple(f"{a}|{b}" for a, b in pairs)


@dataclass(frozen=True)
class Factor:
    """A categorical predictor with a designated reference level."""

    name: str
    levels: tuple[str, ...]
    reference: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(str(t) for t in self.levels))
        if not self.levels:
            raise ValueError(f"factor {self.name!r} has no levels")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError(f"factor {self.name!r} has duplicate levels")
        ref = str(self.reference) if self.reference else self.levels[0]
        if ref not in self.levels:
            raise ValueError(
                f"reference {ref!r} is not a level of factor {self.name!r}"
            )
        object.__setattr__(self, "reference", ref)

    def index_of(self, level: str) -> int:
        try:
            return self.levels.index(str(level))
        except ValueError:
            raise ValueError(
                f"{level!r} is not a level of factor {self.name!r}; "
                f"levels: {list(self.levels)}"
            ) from None


def relevel(factor: Factor, new_reference: str) -> Factor:
    """Return the same factor with a different reference level."""
    factor.index_of(new_reference)
    return replace(factor, reference=str(new_reference))


@dataclass(frozen=True)
class Dataset:
    """Long-format ordinal data: one response per row, optional grouping.

    response holds 0-based codes into scale.labels; factor_codes holds, per
    factor, 0-based codes into that factor's levels.  group_codes is either
    None (no grouping) or a full-length code vector: a group id on some rows
    but not others is rejected upstream.
    """

    scale: OrdinalScale
    response: np.ndarray
    factors: tuple[Factor, ...] = ()
    factor_codes: tuple[np.ndarray, ...] = ()
    covariate_names: tuple[str, ...] = ()
    covariates: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    group_name: str | None = None
    group_labels: tuple[str, ...] = ()
    group_codes: np.ndarray | None = None

    def __post_init__(self) -> None:
        n = len(self.response)
        response = _frozen(np.asarray(self.response, dtype=np.int64))
        if response.size and (
            response.min() < 0 or response.max() >= self.scale.n_categories
        ):
            raise ValueError("response codes fall outside the scale")
        object.__setattr__(self, "response", response)
        if len(self.factors) != len(self.factor_codes):
            raise ValueError("factors and factor_codes must align")
        codes = []
        for factor, col in zip(self.factors, self.factor_codes):
            col = _frozen(np.asarray(col, dtype=np.int64))
            if len(col) != n:
                raise ValueError(f"factor {factor.name!r} code length mismatch")
            if col.size and (col.min() < 0 or col.max() >= len(factor.levels)):
                raise ValueError(f"factor {factor.name!r} codes out of range")
            codes.append(col)
        object.__setattr__(self, "factor_codes", tuple(codes))
        cov = np.asarray(self.covariates, dtype=float)
        if cov.size == 0:
            cov = np.zeros((n, len(self.covariate_names)))
        if cov.shape != (n, len(self.covariate_names)):
            raise ValueError("covariate matrix shape mismatch")
        object.__setattr__(self, "covariates", _frozen(cov))
        if self.group_codes is not None:
            g = _frozen(np.asarray(self.group_codes, dtype=np.int64))
            if len(g) != n:
                raise ValueError("group code length mismatch")
            if g.size and (g.min() < 0 or g.max() >= len(self.group_labels)):
                raise ValueError("group codes out of range")
            object.__setattr__(self, "group_codes", g)

    @property
    def n_obs(self) -> int:
        return len(self.response)

    def factor(self, name: str) -> Factor:
        for factor in self.factors:
            if factor.name == name:
                return factor
        raise ValueError(
            f"no factor named {name!r}; factors: {[f.name for f in self.factors]}"
        )

    def factor_column(self, name: str) -> np.ndarray:
        for factor, codes in zip(self.factors, self.factor_codes):
            if factor.name == name:
                return codes
        raise ValueError(f"no factor named {name!r}")

    def covariate_column(self, name: str) -> np.ndarray:
        try:
            j = self.covariate_names.index(name)
        except ValueError:
            raise ValueError(f"no covariate named {name!r}") from None
        return self.covariates[:, j]

    def with_reference(self, factor_name: str, new_reference: str) -> "Dataset":
        """Relevel one factor; rows are untouched."""
        factors = tuple(
            relevel(f, new_reference) if f.name == factor_name else f
            for f in self.factors
        )
        self.factor(factor_name)
        return replace(self, factors=factors)

    def take(self, indices: np.ndarray) -> "Dataset":
        """Row subset (with repetition allowed), e.g. for resampling."""
        idx = np.asarray(indices, dtype=np.int64)
        return replace(
            self,
            response=self.response[idx],
            factor_codes=tuple(c[idx] for c in self.factor_codes),
            covariates=self.covariates[idx],
            group_codes=None if self.group_codes is None else self.group_codes[idx],
        )

    @classmethod
    def from_records(
        cls,
        scale: OrdinalScale,
        response_tokens: Sequence[str],
        factors: Sequence[Factor] = (),
        factor_tokens: Mapping[str, Sequence[str]] | None = None,
        covariates: Mapping[str, Sequence[float]] | None = None,
        group: tuple[str, Sequence[str]] | None = None,
    ) -> "Dataset":
        """Build a dataset from label tokens, validating every value."""
        response = np.array([scale.index_of(t) for t in response_tokens])
        factor_tokens = factor_tokens or {}
        codes = []
        for factor in factors:
            tokens = factor_tokens.get(factor.name)
            if tokens is None:
                raise ValueError(f"missing values for factor {factor.name!r}")
            codes.append(np.array([factor.index_of(t) for t in tokens]))
        covariates = covariates or {}
        cov_names = tuple(covariates)
        cov = (
            np.column_stack([np.asarray(covariates[c], dtype=float) for c in cov_names])
            if cov_names
            else np.zeros((len(response), 0))
        )
        group_name = None
        group_labels: tuple[str, ...] = ()
        group_codes = None
        if group is not None:
            group_name, tokens = group
            tokens = [str(t) for t in tokens]
            group_labels = tuple(dict.fromkeys(tokens))
            lookup = {t: i for i, t in enumerate(group_labels)}
            group_codes = np.array([lookup[t] for t in tokens])
        return cls(
            scale=scale,
            response=response,
            factors=tuple(factors),
            factor_codes=tuple(codes),
            covariate_names=cov_names,
            covariates=cov,
            group_name=group_name,
            group_labels=group_labels,
            group_codes=group_codes,
        )


@dataclass(frozen=True)
class FrequencyTable:
    """Counts per (factor level, scale category)."""

    factor: Factor
    counts: np.ndarray  # shape (n_levels, K)

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != len(self.factor.levels):
            raise ValueError("counts must have one row per factor level")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", _frozen(counts))


def expand_frequency_table(table: FrequencyTable, scale: OrdinalScale) -> Dataset:
    """Unroll a frequency table into one row per counted unit.

    Rows come out in deterministic order: by factor level, then by scale
    category, repeated count times; re-tabulating reproduces the table.
    """
    if table.counts.shape[1] != scale.n_categories:
        raise ValueError(
            f"table has {table.counts.shape[1]} response columns but the "
            f"scale has {scale.n_categories} categories"
        )
    resp: list[str] = []
    level: list[str] = []
    for i, lev in enumerate(table.factor.levels):
        for k, lab in enumerate(scale.labels):
            c = int(table.counts[i, k])
            resp.extend([lab] * c)
            level.extend([lev] * c)
    return Dataset.from_records(
        scale,
        resp,
        factors=[table.factor],
        factor_tokens={table.factor.name: level},
    )


def tabulate(data: Dataset, factor_name: str) -> FrequencyTable:
    """Cross-tabulate responses against one factor."""
    factor = data.factor(factor_name)
    codes = data.factor_column(factor_name)
    K = data.scale.n_categories
    counts = np.zeros((len(factor.levels), K), dtype=np.int64)
    np.add.at(counts, (codes, data.response), 1)
    return FrequencyTable(factor=factor, counts=counts)


def drop_unobserved_boundary_categories(
    data: Dataset,
) -> tuple[Dataset, tuple[str, ...]]:
    """Trim scale categories with zero observations at either extreme.

    Interior zero-count categories are kept; each one gets a warning line
    because the thresholds flanking it are only weakly identified by the
    data.  Returns the (possibly reduced) dataset and the warning lines.
    """
    counts = np.bincount(data.response, minlength=data.scale.n_categories)
    lo, hi = 0, len(counts)
    notes: list[str] = []
    while lo < hi and counts[lo] == 0:
        notes.append(
            f"dropping unobserved boundary category {data.scale.labels[lo]!r}"
        )
        lo += 1
    while hi > lo and counts[hi - 1] == 0:
        notes.append(
            f"dropping unobserved boundary category {data.scale.labels[hi - 1]!r}"
        )
        hi -= 1
    if hi - lo < 2:
        raise ValueError("fewer than 2 response categories carry observations")
    for k in range(lo, hi):
        if counts[k] == 0:
            notes.append(
                f"interior category {data.scale.labels[k]!r} has zero "
                "observations; the thresholds around it are weakly identified"
            )
    if lo == 0 and hi == len(counts):
        return data, tuple(notes)
    scale = OrdinalScale(labels=data.scale.labels[lo:hi])
    return (
        replace(data, scale=scale, response=data.response - lo),
        tuple(notes),
    )


def load_csv(
    path: str,
    response_col: str,
    levels: Sequence[str] | None = None,
    factor_cols: Sequence[str] = (),
    numeric_cols: Sequence[str] = (),
    group_col: str | None = None,
    delimiter: str = ",",
) -> Dataset:
    """Read a long-format CSV (RFC 4180, UTF-8, header row required).

    Rows missing a value in any used column are dropped listwise with a
    counted warning.  When levels is None the scale is inferred by
    lexicographic sort of the observed response tokens, with a prominent
    warning, since lexicographic order is rarely the intended ordinal
    order for numeric-looking labels past 9.

    Raises:
        ValueError: missing or duplicate header names, a response token
            outside the declared levels (named with its row number), or a
            numeric column that fails to parse.
    """
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row") from None
        rows = list(reader)

    counts: dict[str, int] = {}
    for h in header:
        counts[h] = counts.get(h, 0) + 1
    dups = sorted(h for h, c in counts.items() if c > 1)
    if dups:
        raise ValueError(f"duplicate header names: {dups}")

    used = [response_col, *factor_cols, *numeric_cols]
    if group_col is not None:
        used.append(group_col)
    missing = [c for c in used if c not in header]
    if missing:
        raise ValueError(f"columns not in header: {missing}; header: {header}")
    col_idx = {c: header.index(c) for c in used}

    kept: list[list[str]] = []
    dropped = 0
    for row in rows:
        if not row or all(not cell.strip() for cell in row):
            continue
        values = [row[col_idx[c]].strip() if col_idx[c] < len(row) else "" for c in used]
        if any(v == "" for v in values):
            dropped += 1
            continue
        kept.append(values)
    if dropped:
        warnings.warn(
            f"dropped {dropped} row(s) with missing values in {used}",
            DataWarning,
            stacklevel=2,
        )

    resp_tokens = [v[0] for v in kept]
    if levels is None:
        inferred = sorted(set(resp_tokens))
        warnings.warn(
            "response levels were not declared; inferred lexicographic order "
            f"{inferred}. Declare levels explicitly if this is not the "
            "intended ordinal order.",
            DataWarning,
            stacklevel=2,
        )
        levels = inferred
    scale = OrdinalScale(labels=tuple(levels))
    level_set = set(scale.labels)
    for i, token in enumerate(resp_tokens):
        if token not in level_set:
            raise ValueError(
                f"row {i + 2}: response token {token!r} is not among the "
                f"declared levels {list(scale.labels)}"
            )

    factors = []
    factor_tokens: dict[str, list[str]] = {}
    for j, name in enumerate(factor_cols, start=1):
        tokens = [v[j] for v in kept]
        factors.append(Factor(name=name, levels=tuple(dict.fromkeys(tokens))))
        factor_tokens[name] = tokens

    covariates: dict[str, list[float]] = {}
    base = 1 + len(factor_cols)
    for j, name in enumerate(numeric_cols, start=base):
        parsed = []
        for i, v in enumerate(kept):
            try:
                parsed.append(float(v[j]))
            except ValueError:
                raise ValueError(
                    f"column {name!r}: cannot parse {v[j]!r} as a number"
                ) from None
        covariates[name] = parsed

    group = None
    if group_col is not None:
        group = (group_col, [v[-1] for v in kept])

    return Dataset.from_records(
        scale,
        resp_tokens,
        factors=factors,
        factor_tokens=factor_tokens,
        covariates=covariates,
        group=group,
    )

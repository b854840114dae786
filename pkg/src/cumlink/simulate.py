"""Forward generation of ordinal data from latent-variable models.

The forward map slices a latent distribution at fixed cut points:

    P(Y = k) = F((c_k - shift) / spread) - F((c_{k-1} - shift) / spread)

so shifting the latent location moves probability mass monotonically
toward higher categories, and the scale widens or narrows it.

All sampling is seed-deterministic.  Streams derive from a single
numpy SeedSequence: simulate_hierarchical spawns one child stream for the
group effects and one for the responses, so adding rows never perturbs the
group draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data import Dataset, Factor, OrdinalScale
from .links import Link, probit


@dataclass(frozen=True)
class ForwardModel:
    """Latent cut points plus a location shift and scale."""

    cutpoints: np.ndarray
    shift: float = 0.0
    scale: float = 1.0
    link: Link = probit

    def __post_init__(self) -> None:
        cuts = np.asarray(self.cutpoints, dtype=float)
        if cuts.ndim != 1 or cuts.size < 1:
            raise ValueError("cutpoints must be a 1-D array with K-1 >= 1 entries")
        if not np.all(np.isfinite(cuts)):
            raise ValueError("cutpoints must be finite")
        if np.any(np.diff(cuts) <= 0):
            k = int(np.argmax(np.diff(cuts) <= 0))
            raise ValueError(
                f"cutpoints must be strictly increasing; "
                f"cutpoints[{k}] >= cutpoints[{k + 1}]"
            )
        if not (self.scale > 0):
            raise ValueError(f"scale must be positive, got {self.scale}")
        cuts.flags.writeable = False
        object.__setattr__(self, "cutpoints", cuts)

    @property
    def n_categories(self) -> int:
        return len(self.cutpoints) + 1


def forward_probabilities(model: ForwardModel) -> np.ndarray:
    """Category probabilities implied by the model; sums to 1 exactly."""
    z = (model.cutpoints - model.shift) / model.scale
    cdf = np.concatenate([[0.0], np.asarray(model.link.cdf(z), dtype=float), [1.0]])
    return np.diff(cdf)


def cutpoints_from_proportions(
    proportions: Sequence[float], link: Link = probit
) -> np.ndarray:
    """Cut points that reproduce given category proportions exactly.

    The k-th cut point is the link quantile of the first k proportions'
    sum.  Every proportion must be strictly positive (a zero proportion
    puts two cut points in the same place) and they must sum to 1.
    """
    props = np.asarray(proportions, dtype=float)
    if props.ndim != 1 or props.size < 2:
        raise ValueError("need at least 2 proportions")
    for k, p in enumerate(props):
        if not p > 0:
            raise ValueError(
                f"proportions[{k}] = {p} is not strictly positive; zero-mass "
                "categories have no finite cut point"
            )
    total = float(props.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"proportions sum to {total!r}, expected 1 within 1e-9")
    cum = np.cumsum(props)[:-1]
    return np.asarray(link.quantile(cum), dtype=float)


def sample_ordinal(model: ForwardModel, n: int, seed: int) -> np.ndarray:
    """n iid category codes (0-based) drawn from the forward model."""
    probs = forward_probabilities(model)
    cum = np.cumsum(probs)
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return np.searchsorted(cum, u, side="right").astype(np.int64)


def simulate_dataset(
    scale: OrdinalScale,
    factor: Factor,
    models: Mapping[str, ForwardModel],
    n_per_level: int,
    seed: int,
) -> Dataset:
    """One-factor between-subjects sample: n_per_level rows per level."""
    missing = [lev for lev in factor.levels if lev not in models]
    if missing:
        raise ValueError(f"no forward model for level(s) {missing}")
    streams = np.random.SeedSequence(seed).spawn(len(factor.levels))
    resp: list[str] = []
    level_tokens: list[str] = []
    for lev, stream in zip(factor.levels, streams):
        model = models[lev]
        if model.n_categories != scale.n_categories:
            raise ValueError(
                f"model for level {lev!r} has {model.n_categories} categories, "
                f"scale has {scale.n_categories}"
            )
        probs = forward_probabilities(model)
        cum = np.cumsum(probs)
        u = np.random.default_rng(stream).random(n_per_level)
        codes = np.searchsorted(cum, u, side="right")
        resp.extend(scale.labels[c] for c in codes)
        level_tokens.extend([lev] * n_per_level)
    return Dataset.from_records(
        scale, resp, factors=[factor], factor_tokens={factor.name: level_tokens}
    )


def simulate_hierarchical(
    scale: OrdinalScale,
    factor: Factor,
    cutpoints: Sequence[float],
    effects: Mapping[str, float],
    sigma_b: float,
    n_groups: int,
    reps_per_cell: int = 1,
    seed: int = 0,
    link: Link = probit,
    group_name: str = "group",
) -> Dataset:
    """Within-subject design: every group responds under every level.

    Each group g draws a latent intercept b_g ~ Normal(0, sigma_b^2); the
    response under level v then has latent location effects[v] + b_g.
    Rows come out ordered by group, level, then repetition.
    """
    if sigma_b < 0:
        raise ValueError("sigma_b must be nonnegative")
    missing = [lev for lev in factor.levels if lev not in effects]
    if missing:
        raise ValueError(f"no effect given for level(s) {missing}")
    cuts = np.asarray(cutpoints, dtype=float)
    root = np.random.SeedSequence(seed)
    group_stream, response_stream = root.spawn(2)
    b = np.random.default_rng(group_stream).normal(0.0, sigma_b, size=n_groups)
    rng = np.random.default_rng(response_stream)
    resp: list[str] = []
    level_tokens: list[str] = []
    group_tokens: list[str] = []
    for g in range(n_groups):
        gid = f"g{g + 1:03d}"
        for lev in factor.levels:
            model = ForwardModel(
                cutpoints=cuts, shift=effects[lev] + b[g], scale=1.0, link=link
            )
            cum = np.cumsum(forward_probabilities(model))
            u = rng.random(reps_per_cell)
            codes = np.searchsorted(cum, u, side="right")
            resp.extend(scale.labels[c] for c in codes)
            level_tokens.extend([lev] * reps_per_cell)
            group_tokens.extend([gid] * reps_per_cell)
    return Dataset.from_records(
        scale,
        resp,
        factors=[factor],
        factor_tokens={factor.name: level_tokens},
        group=(group_name, group_tokens),
    )

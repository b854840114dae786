"""The latent-variable picture, computed both directions.

An ordinal response is modeled as a continuous score chopped into
bands.  Given cutpoints and a link you get category probabilities;
given target probabilities you can recover the cutpoints.  A model
with no covariates must land exactly on the observed proportions.
"""

import numpy as np

from cumlink import (
    ClmSpec,
    Factor,
    ForwardModel,
    FrequencyTable,
    OrdinalScale,
    cutpoints_from_proportions,
    expand_frequency_table,
    fit_clm,
    forward_probabilities,
    LINKS,
)
from cumlink.clm import category_probabilities

# Start from the target: we want a 3-category response that lands
# 10% / 15% / 75%.  Which cutpoints produce that under a probit link?
props = [0.10, 0.15, 0.75]
tau = cutpoints_from_proportions(props, LINKS["probit"])
print("cutpoints for 10/15/75 split:", np.round(tau, 5))

# And forward again: a standard normal score falls below -1.2816 with
# probability 0.10, between the cuts with probability 0.15, and so on.
model = ForwardModel(tau, shift=0.0, scale=1.0, link=LINKS["probit"])
print("round trip:", np.round(forward_probabilities(model), 6))

# shifting the latent score moves mass to the upper categories
for shift in (0.0, 0.5, 1.0):
    shifted = ForwardModel(tau, shift, 1.0, LINKS["probit"])
    print(f"  shift {shift:3.1f}:", np.round(forward_probabilities(shifted), 3))

# a scale bump flattens the response instead of moving it
wide = ForwardModel(tau, 0.0, 1.8, LINKS["probit"])
print("  scale 1.8:", np.round(forward_probabilities(wide), 3))
print()

# The same identity holds through the fitting machinery.  With no
# covariates the maximum likelihood thresholds are the link quantiles
# of the cumulative observed proportions, for every link.
counts = np.array([[18.0, 7.0, 31.0, 44.0]])
scale4 = OrdinalScale(("1", "2", "3", "4"))
observed = counts[0] / counts.sum()
data = expand_frequency_table(
    FrequencyTable(Factor("all", ("x",)), counts), scale4
)
for name, link in LINKS.items():
    fit = fit_clm(ClmSpec(link=link), data)
    quantiles = link.quantile(np.cumsum(observed)[:-1])
    gap = np.abs(fit.thresholds - quantiles).max()
    prob_gap = np.abs(category_probabilities(fit) - observed).max()
    print(
        f"{name:<8} thresholds {np.round(fit.thresholds, 4)}"
        f"  vs quantiles, gap {gap:.1e}; probability gap {prob_gap:.1e}"
    )

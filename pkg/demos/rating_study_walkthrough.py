"""Walk through a complete analysis of a rating study.

Four groups of participants rated how useful they found a tool on a
1..5 scale.  We only have the frequency table, which is all a
cumulative link model needs.
"""

import numpy as np

from cumlink import (
    ClmSpec,
    Factor,
    FrequencyTable,
    OrdinalScale,
    expand_frequency_table,
    fit_clm,
    interpret_coefficient,
    modal_category,
    pairwise_contrasts,
    probit,
    summarize,
    wald_table,
)
from cumlink.clm import predict_probs

# ratings per condition: rows are conditions, columns are categories 1..5
scale = OrdinalScale(("1", "2", "3", "4", "5"))
condition = Factor("Condition", ("Active", "Dissimilar", "Self", "Minimal"))
counts = np.array(
    [
        [0, 1, 3, 6, 16],   # Active
        [0, 3, 3, 6, 13],   # Dissimilar
        [0, 0, 3, 7, 15],   # Self
        [1, 0, 4, 12, 9],   # Minimal
    ],
    dtype=float,
)

# a frequency table expands to one row per observation, so the same
# fitting code serves raw and aggregated data
data = expand_frequency_table(FrequencyTable(condition, counts), scale)
print(f"{data.n_obs} observations across {len(condition.levels)} conditions")

# The model: each rating is a banded version of a latent continuous
# score.  Thresholds tau cut the latent axis into 5 bands; each
# condition shifts the latent location.  The first level (Active) is
# the reference, so coefficients are shifts relative to it.
fit = fit_clm(ClmSpec(location=("Condition",), link=probit), data)
print()
print(summarize(fit, data_name="counts"))

# Wald rows give the same content programmatically
for row in wald_table(fit):
    print(f"{row.name:<22} {row.estimate:9.4f}  z = {row.z:7.3f}  p = {row.p:.4f}")
print()

# plain-language reading of one coefficient
print(interpret_coefficient(fit, "ConditionMinimal"))
print()

# predicted category probabilities and the most likely rating per condition
for level in condition.levels:
    probs = predict_probs(fit, {"Condition": level})
    mode = modal_category(fit, {"Condition": level})
    cells = "  ".join(f"{k}: {p:.3f}" for k, p in probs.items())
    print(f"{level:<11} {cells}   mode = {mode}")
print()

# all pairwise latent differences, Holm-adjusted.  None of the
# conditions separate clearly at this sample size.
print("pairwise contrasts (latent scale):")
for c in pairwise_contrasts(fit, "Condition"):
    pair = f"{c.pair[0]} - {c.pair[1]}"
    print(
        f"  {pair:<22} {c.estimate:8.4f} +- {c.std_error:.4f}"
        f"   p.adj = {c.p_adjusted:.4f}"
    )

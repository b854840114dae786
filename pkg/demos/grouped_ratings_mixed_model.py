"""Repeated ratings from the same participants need a random intercept.

Each participant contributes one rating per condition, and some
participants just rate everything higher.  Ignoring that correlation
understates uncertainty; the mixed model absorbs it as a per-group
intercept on the latent scale.
"""

import numpy as np

from cumlink import (
    ClmSpec,
    Factor,
    OrdinalScale,
    fit_clm,
    fit_clmm,
    probit,
    simulate_hierarchical,
    summarize,
)
from scipy.stats import norm

scale = OrdinalScale(tuple(str(i) for i in range(1, 8)))
cond = Factor("cond", ("control", "guided", "freeform"))
tau = tuple(norm.ppf(np.linspace(1 / 7, 6 / 7, 6)))

data = simulate_hierarchical(
    scale,
    cond,
    cutpoints=tau,
    effects={"control": 0.0, "guided": 0.45, "freeform": 0.8},
    sigma_b=1.1,          # participant spread comparable to the effects
    n_groups=40,
    reps_per_cell=2,
    seed=20_240_816,
)
print(f"{data.n_obs} ratings from {len(set(data.group_codes))} participants")
print()

mixed = fit_clmm(ClmSpec(location=("cond",), link=probit), data)
print(summarize(mixed, data_name="simulated"))

# the flat model on the same data: effects look similar but their
# standard errors are too small once you know rows share participants
flat = fit_clm(ClmSpec(location=("cond",), link=probit), data)
print("flat vs mixed standard errors:")
for name in ("condguided", "condfreeform"):
    se_flat = flat.std_errors[list(flat.param_names).index(name)]
    se_mixed = mixed.std_errors[list(mixed.param_names).index(name)]
    print(f"  {name:<14} flat {se_flat:.4f}   mixed {se_mixed:.4f}")
print()

# the Laplace approximation is the default; adaptive quadrature
# spends more evaluations for a sharper integral
agq = fit_clmm(ClmSpec(location=("cond",), link=probit), data,
               method="agq", nodes=21)
print(f"logLik  laplace {mixed.log_lik:.4f}   agq21 {agq.log_lik:.4f}"
      f"   gap {abs(mixed.log_lik - agq.log_lik):.4f}")
print()

# conditional modes are shrunken estimates of each participant's
# intercept; extremes shrink hardest
modes = np.asarray(mixed.conditional_modes)
order = np.argsort(modes)
print(f"participant intercepts: min {modes.min():+.3f}, "
      f"median {np.median(modes):+.3f}, max {modes.max():+.3f}")
print("most lenient raters:", [f"g{order[-1]:02d}", f"g{order[-2]:02d}"],
      "hardest:", [f"g{order[0]:02d}", f"g{order[1]:02d}"])

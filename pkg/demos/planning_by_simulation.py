"""Sizing a rating study before running it.

Write down the effect you care about as a latent shift, then simulate
the whole pipeline at candidate sample sizes and count how often the
analysis would detect it.  Uses modest replicate counts so it runs in
seconds; scale them up for a real decision.
"""

import numpy as np

from cumlink import (
    ClmSpec,
    Dataset,
    Factor,
    ForwardModel,
    OrdinalScale,
    cutpoints_from_proportions,
    fit_clm,
    kruskal_wallis,
    probit,
    sample_ordinal,
    wald_table,
)

scale = OrdinalScale(("1", "2", "3", "4", "5"))
g = Factor("g", ("control", "treated"))

# pilot knowledge: control answers split roughly 10/20/30/25/15
pilot = [0.10, 0.20, 0.30, 0.25, 0.15]
tau = cutpoints_from_proportions(pilot, probit)
control = ForwardModel(tau, 0.0, 1.0, probit)
treated = ForwardModel(tau, 0.35, 1.0, probit)   # effect worth detecting

REPS = 120
alpha = 0.05
print(f"latent shift 0.35, {REPS} simulated studies per n, alpha {alpha}")
print(f"{'n/arm':>6} {'model power':>12} {'rank-test power':>16}")
for n in (40, 80, 160):
    hit_model = hit_rank = 0
    for r in range(REPS):
        seed = 1_000 * n + r
        yc = sample_ordinal(control, n, seed)
        yt = sample_ordinal(treated, n, seed + 500_000)
        data = Dataset(
            scale=scale,
            response=np.concatenate([yc, yt]),
            factors=(g,),
            factor_codes=(np.repeat([0, 1], n),),
        )
        fit = fit_clm(ClmSpec(location=("g",), link=probit), data)
        row = next(w for w in wald_table(fit) if w.name == "gtreated")
        hit_model += row.p < alpha
        # the rank test sees the same data as integer codes
        codes = data.response + 1
        kw = kruskal_wallis([codes[:n], codes[n:]])
        hit_rank += kw.p < alpha
    print(f"{n:>6} {hit_model / REPS:>12.2f} {hit_rank / REPS:>16.2f}")

print()
print("the model and the rank test track each other at this effect size;")
print("the model additionally yields the shift estimate and its interval.")

"""Regenerate shared-vectors.json from the backend's forward computation.

The browser keeps a local copy of the forward formula for offline use;
this file is the contract that keeps the two implementations in
lockstep.  Every entry's probs come straight from the backend library,
so both the UI tests and the backend acceptance tests check against
the same bytes.

Run from the repository root:  python3 frontend/scripts/generate_vectors.py
"""

import json
import pathlib

import numpy as np
from scipy.stats import norm

from cumlink import LINKS, ForwardModel, forward_probabilities

vectors = []


def add(tau, shift, scale, link_name, note):
    model = ForwardModel(np.asarray(tau, float), shift, scale, LINKS[link_name])
    vectors.append(
        {
            "tau": [float(t) for t in tau],
            "shift": float(shift),
            "scale": float(scale),
            "link": link_name,
            "probs": [float(p) for p in forward_probabilities(model)],
            "note": note,
        }
    )


# the 10/15/75 split, both at full precision and as displayed: the pair
# every walkthrough starts from
add([norm.ppf(0.10), norm.ppf(0.25)], 0.0, 1.0, "probit", "10/15/75 exact")
add([-1.2816, -0.6745], 0.0, 1.0, "probit", "10/15/75 as displayed")

# fitted thresholds of the reference rating study with the Minimal shift
USEFULNESS_TAU = [-2.5897188353122917, -1.8801167312687068,
                  -1.1436633096936222, -0.24503912475153053]
add(USEFULNESS_TAU, 0.0, 1.0, "probit", "rating-study baseline")
add(USEFULNESS_TAU, -0.4909247081750268, 1.0, "probit", "rating-study Minimal")

# single cutpoint at the median
add([0.0], 0.0, 1.0, "logit", "two categories, even split")

# every link at the same geometry
for link_name in ("probit", "logit", "cloglog"):
    add([-1.1, -0.2, 0.7], 0.4, 1.0, link_name, f"{link_name} shifted")
    add([-1.1, -0.2, 0.7], 0.0, 1.7, link_name, f"{link_name} stretched")
    add([-1.1, -0.2, 0.7], -0.6, 0.5, link_name, f"{link_name} shifted+narrow")

# K from 2 up to the slider cap of 11
rng = np.random.default_rng(1234)
for K in range(2, 12):
    tau = np.sort(rng.normal(0.0, 1.2, size=K - 1))
    link_name = ("probit", "logit", "cloglog")[K % 3]
    add(tau, float(rng.normal(0, 0.8)), float(rng.uniform(0.5, 2.0)),
        link_name, f"random K={K}")

# far tails, where naive cdf differences would lose digits
add([-1.0, 1.0], 7.5, 1.0, "probit", "saturated high")
add([-1.0, 1.0], -7.5, 1.0, "probit", "saturated low")

out = pathlib.Path(__file__).resolve().parent.parent / "shared-vectors.json"
out.write_text(json.dumps(vectors, indent=1) + "\n")
print(f"{len(vectors)} vectors -> {out}")

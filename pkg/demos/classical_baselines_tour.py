"""The classical tests, their assumptions, and where they crack.

Every test in the registry states what it assumes about the data.  The
rank tests survive any order-preserving relabeling of an ordinal
response; anything built on means or differences does not, and the
demo ends with a concrete counterexample.
"""

import numpy as np

from cumlink import (
    REGISTRY,
    friedman,
    kruskal_wallis,
    oneway_anova,
    registry_entry,
    wilcoxon_rank_sum,
    wilcoxon_signed_rank,
)

rng = np.random.default_rng(808)

# three independent groups, small shift between them
groups = [list(rng.normal(loc, 1.0, size=9)) for loc in (0.0, 0.4, 0.9)]

kw = kruskal_wallis(groups)
an = oneway_anova(groups)
print(f"Kruskal-Wallis  H = {kw.statistic:.4f}  p = {kw.p:.4f}")
print(f"one-way ANOVA   F = {an.statistic:.4f}  p = {an.p:.4f}")
print()

# what each test admits to assuming
for name in ("kruskal-wallis", "one-way-anova", "friedman", "wilcoxon-signed-rank"):
    e = registry_entry(name)
    print(f"{e.name:<22} metric={'yes' if e.metric_data else 'no':<4}"
          f" designs={'/'.join(e.designs):<8} category={e.category}")
print()

# paired data: same subjects twice
before = list(rng.normal(0.0, 1.0, size=10))
after = [b + 0.6 + rng.normal(0, 0.5) for b in before]
sr = wilcoxon_signed_rank(before, after)
print(f"signed-rank   W = {sr.statistic}  p = {sr.p:.4f}  ({sr.note})")

# blocked data: every subject rates every condition
blocks = rng.normal(size=(10, 3)) + np.array([0.0, 0.35, 0.8])
fr = friedman(blocks)
print(f"Friedman      Q = {fr.statistic:.4f}  p = {fr.p:.4f}")
print()

# Relabeling check.  Cubing is order-preserving, so if the data are
# "scores" with no unit, any sane ordinal procedure must not care.
cube = lambda xs: [x**3 for x in xs]
kw2 = kruskal_wallis([cube(g) for g in groups])
an2 = oneway_anova([cube(g) for g in groups])
print("after cubing every value:")
print(f"  Kruskal-Wallis p: {kw.p:.6f} -> {kw2.p:.6f}  (unchanged)")
print(f"  ANOVA p:          {an.p:.6f} -> {an2.p:.6f}  (moved)")

rs = wilcoxon_rank_sum(groups[0], groups[2])
rs2 = wilcoxon_rank_sum(cube(groups[0]), cube(groups[2]))
print(f"  rank-sum p:       {rs.p:.6f} -> {rs2.p:.6f}  (unchanged)")

# the signed-rank test ranks DIFFERENCES, and differences are metric:
# relabeling reorders them, so even this rank test can flip
sr2 = wilcoxon_signed_rank(cube(before), cube(after))
print(f"  signed-rank p:    {sr.p:.6f} -> {sr2.p:.6f}  (moved)")
print()

n_impl = sum(1 for e in REGISTRY.values() if e.implemented)
print(f"registry: {len(REGISTRY)} tests catalogued, {n_impl} implemented here;")
print("the rest are named so their assumption metadata is still queryable.")

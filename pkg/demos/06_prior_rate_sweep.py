"""How the prior's missing-mass weight moves the prior acceptance rates.

The exact-instrument kinds sample a lower-dimensional proposal (one split
solved from the other), so more prior missing mass widens their feasible
intervals and the rate RISES.  The window and smooth-weight kinds accept a
full-dimensional draw, and more prior missing mass spreads the odds ratio
away from 1, so their rates eventually FALL (after a small initial hump).
A mismatch between these regimes is why Bayes factors from the exact kinds
are sensitive to the prior's missing-mass weight.
"""

from mnarbounds import AssumptionSpec, prior_ar_sweep

specs = [
    AssumptionSpec.exact_iv(),
    AssumptionSpec.exact_iv_posbias(),
    AssumptionSpec.threshold_iv(2 / 3, 1.5),
    AssumptionSpec.lognormal_iv(0.4),
    AssumptionSpec.lognormal_betabias(0.4, 4.0, 2.0),
]

rows = prior_ar_sweep(range(1, 11), specs, attempts=40_000, seed=19)

kinds = [s.kind.value for s in specs]
table = {k: {} for k in kinds}
for row in rows:
    table[row["kind"]][row["alpha3"]] = row["ar"]

header = "alpha3 " + " ".join(f"{k[:12]:>14s}" for k in kinds)
print(header)
for g in range(1, 11):
    cells = " ".join(f"{table[k][float(g)]:14.4f}" for k in kinds)
    print(f"{g:6d} {cells}")

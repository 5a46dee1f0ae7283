"""Regenerates pilot_rows.csv: a small trial-shaped synthetic dataset.

115 units, 50 treated, binary age-style split as the candidate instrument,
and 30 missing outcomes whose missingness leans toward outcome-positive
rows (so the missingness is plausibly nonignorable).
"""

from pathlib import Path

import numpy as np

from mnarbounds.heckman import HeckmanData
from mnarbounds.io import write_rows_csv
from mnarbounds.rng import stream

rng = stream(20240801, "pilot-demo-data")
n, n_treat, n_missing = 115, 50, 30
x = np.zeros(n, dtype=int)
x[:n_treat] = 1
z = (rng.uniform(size=n) < 0.45).astype(int)
p_y = np.where(x == 1, 0.55, 0.35)
y = (rng.uniform(size=n) < p_y).astype(int)
p_miss = np.clip(0.16 + 0.18 * y + 0.08 * z, 0, 1)
order = np.argsort(-(p_miss + 1e-9 * rng.uniform(size=n)))
r = np.ones(n, dtype=int)
r[order[:n_missing]] = 0
data = HeckmanData(x=x, z=z, r=r, y=np.where(r == 1, y.astype(float), np.nan))

out = Path(__file__).with_name("pilot_rows.csv")
write_rows_csv(data, out)
print(f"wrote {out}: n={n}, treated={x.sum()}, missing={(r == 0).sum()}")

"""A small replicated study: coverage, widths, and evidence side by side.

Runs the full model roster over replicated datasets from the saturated
generator with both assumptions true, then prints the summary table.  Partial
identification shows up as wide-but-honest intervals with above-nominal
coverage; the parametric selection model is sharp but under-covers when its
distributional assumptions are off.  Desk-scale settings keep this to a
couple of minutes; raise the replicate count for table-quality numbers.
"""

from mnarbounds import DgpSpec, default_models, run_study

dgp = DgpSpec(kind="saturated", n=1000, target_missing=0.2)
result = run_study(dgp, default_models(), replicates=20, seed=42, draws=1000)

print(f"{'model':<10s} {'AR':>7s} {'BF(geo)':>8s} {'computed':>9s} {'coverage':>9s} {'width':>7s}")
for s in result.summaries:
    ar = f"{s.mean_ar:7.3f}" if s.mean_ar is not None else "       "
    bf = f"{s.bf_geomean:8.2f}" if s.bf_geomean is not None else "        "
    cov = f"{s.coverage:9.2f}" if s.coverage is not None else "         "
    wid = f"{s.mean_width:7.3f}" if s.mean_width is not None else "       "
    print(f"{s.model:<10s} {ar} {bf} {s.computed_frac:9.2f} {cov} {wid}")

print(f"\ntrue risk differences ranged over "
      f"[{min(result.psi_true):+.3f}, {max(result.psi_true):+.3f}] across replicates")

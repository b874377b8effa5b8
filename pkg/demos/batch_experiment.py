"""
Batch run over random pure, mixed and rank-2 states.

Writes runs.csv, scatter.csv (concurrence vs final <ZZ>), histogram.csv and
per-sample schedules to ./demo_runs, then prints a text histogram of the
errors. Equivalent to `zzctrl run --samples 60 --out demo_runs`.
"""
import sys

from zzctrl import ExperimentConfig, run_batch, summarize

n = int(sys.argv[1]) if len(sys.argv) > 1 else 60
cfg = ExperimentConfig(n_samples=n, output_dir="demo_runs", workers=2)
records = run_batch(cfg)
s = summarize(records)

print(f"{s.n_converged}/{s.n_samples} converged, mean iterations {s.mean_iterations:.0f}")
print("quantiles:", {k: round(v, 5) for k, v in s.quantiles.items()})
for left, c in zip(s.histogram_edges, s.histogram_counts):
    if c:
        print(f"  {left:.3f}  {'#' * c}")
if s.overflow:
    print(f"  >0.1   {'#' * s.overflow}")

worst = max(records, key=lambda r: r.error)
print(f"worst sample {worst.sample_id} ({worst.state_kind}): C={worst.concurrence:.4f} <ZZ>={worst.measurement:.4f}")

"""A small risk-versus-r experiment on identity and Gaussian designs.

For each cell we simulate null and alternative statistics, then report the best
achievable type I + type II error over all thresholds. Risk near 1 means the
test cannot tell the two apart; risk near 0 means perfect separation.

Run: python3 tutorials/05_risk_experiment.py   (about a minute)
"""

from sparsedetect import DesignSpec, ExperimentConfig, run_grid

signals = (0.1, 0.3, 0.6, 1.2)
for design in (DesignSpec.identity(2000), DesignSpec.gaussian(400, 2000)):
    cfg = ExperimentConfig(
        design, alpha_grid=(0.6,), signal_grid=signals, trials=60, tests=("ANOVA", "MAX", "HC_DISC"), master_seed=1
    )
    out = run_grid(cfg)
    print(f"\n{design.label}, alpha=0.6")
    print("  r     " + "".join(f"{t:>12}" for t in ("ANOVA", "MAX", "HC_DISC")))
    for r in signals:
        row = [e.best_risk for e in out if e.signal == r]
        print(f"  {r:<5} " + "".join(f"{x:12.3f}" for x in row))

# The CLI runs the same grids from JSON and writes results.csv, manifest.json
# and SVG plots:
#   sparsedetect reproduce fig1-desk --trials 20 --out fig1

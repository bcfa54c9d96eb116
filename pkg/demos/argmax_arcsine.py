"""Where does a path peak? The arcsine law, and what drift does to it.

For driftless Brownian motion the time of the maximum follows the arcsine
law — most paths peak near 0 or 1, almost none in the middle, and the peak
essentially never sits exactly at the horizon. Mean reversion (ou) pushes
the law away from arcsine; the same diagnostic quantifies by how much.

Run:  python demos/argmax_arcsine.py
"""

import numpy as np

from diffzoom import ExperimentConfig, run_argmax_boundary

for model, params in [("bm", {"sigma0": 1.0}),
                      ("ou", {"theta": 4.0, "sigma0": 1.0})]:
    cfg = ExperimentConfig(model=model, params=params, delta=1e-4,
                           n_paths=4000, master_seed=31)
    report = run_argmax_boundary(cfg)
    entry = report.per_epsilon[0]
    m = report.samples["argmax_time"]
    hist, _ = np.histogram(m, bins=10, range=(0, 1))
    bar = " ".join(f"{h:4d}" for h in hist)
    print(f"{model}: argmax-time histogram over [0,1] in tenths")
    print(f"  {bar}")
    print(f"  KS vs arcsine {entry['ks_vs_arcsine']['statistic']:.4f}"
          f"  (asserted < 0.02 only for bm)")
    print(f"  fraction peaking at the final grid point "
          f"{entry['fraction_argmax_at_horizon']:.4f}\n")

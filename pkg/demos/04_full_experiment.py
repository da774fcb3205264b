#!/usr/bin/env python3
"""The raw-vs-extracted prediction protocol, end to end.

Sweeps classifier candidates, picks one, builds feature datasets for
every encoding, fits each regressor on raw lag windows and on the
extracted features, and prints the metric grid with the joint interval
error.  Uses a reduced grid to stay around a few minutes; the CLI
(`intervalcast run --config ...`) exposes the same protocol with the
full default sweep.
"""

import time

from intervalcast import DgpSpec, ExperimentConfig, OrderConfig, TrainConfig, run_experiment
from intervalcast.regress import RegressorSpec

cfg = ExperimentConfig(
    data=DgpSpec(kind="c1", length=1500, seed=7),
    orders=OrderConfig(center=5, range=3),   # published C1 orders
    segment_lengths=(45,),
    depths=(1, 2),
    train=TrainConfig(epochs=10, seed=0),
    regressors=(
        RegressorSpec(kind="ridge", lam=1.0),
        RegressorSpec(kind="knn", k=5),
        RegressorSpec(kind="mlp", hidden=16, epochs=300),
    ),
    seed=13,
    leak_free=True,  # classifier only ever sees the training portion
)

print("running the protocol (a few minutes at this grid)...")
t0 = time.time()
report, model = run_experiment(cfg)
print(f"done in {time.time() - t0:.0f}s\n")

sel = report.fen_selection
print("candidate sweep:")
for cand in sel.candidates:
    chosen = " <- chosen" if (cand.depth, cand.delta) == (sel.chosen_depth, sel.chosen_delta) else ""
    print(f"  depth {cand.depth} / delta {cand.delta}: accuracy "
          f"{cand.report.best_accuracy:.3f} at epoch {cand.report.best_epoch}{chosen}")
print(f"orders: center={report.orders['center']} range={report.orders['range']}\n")

print(f"{'regressor':<8} {'method':<5} {'mse_c':>9} {'mse_r':>9} "
      f"{'mae_c':>8} {'mae_r':>8} {'smape_c':>8} {'mde':>8}")
for reg in ("ridge", "knn", "mlp"):
    for method in ("raw", "rp", "gasf", "gadf", "mtf"):
        c = report.cell(reg, method, "center").metrics
        r = report.cell(reg, method, "range").metrics
        entry = report.mde_entry(reg, method)
        print(f"{reg:<8} {method:<5} {c['mse']:>9.4f} {r['mse']:>9.4f} "
              f"{c['mae']:>8.4f} {r['mae']:>8.4f} {c['smape']:>8.4f} {entry.value:>8.4f}")

print(
    "\nnote: the extracted representations are invariant to each window's"
    "\nlevel and scale by construction, so on a level-dependent center"
    "\nprocess the raw-lag baseline keeps an information advantage; the"
    "\nspread ACROSS regressors collapses after extraction, which is the"
    "\nrepresentation's main effect at this scale."
)

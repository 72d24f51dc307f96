"""Coded receiver comparison: convolutional protection plus the dynamics.

Same three receivers with the rate-1/2 RSC in the loop at desk scale.  The
iterative receiver stays near the quantization-limited floor across the
sweep; the separated baseline needs several more dB to get there.  Takes a
couple of minutes.
"""

from statelink import ExperimentConfig, run_experiment

cfg = ExperimentConfig(
    ebn0_grid_db=(3.0, 5.0),
    slots=300,
    trials=4,
    master_seed=9,
    coded=True,
)
report = run_experiment(cfg)

print(f"{'receiver':<10} {'Eb/N0':>6} {'mean MSE':>12} {'BER':>10} {'collapses':>10}")
for ebn0 in cfg.ebn0_grid_db:
    for name in cfg.receivers:
        c = report.cell(name, ebn0)
        print(f"{name:<10} {ebn0:>6.1f} {c.mean_mse:>12.4g} {c.ber:>10.2e} "
              f"{c.collapse_count:>10d}")
    print()

bp3 = report.cell("pearl-bp", 3.0).mean_mse
kf3 = report.cell("kf", 3.0).mean_mse
print(f"at 3 dB the iterative receiver holds a {kf3 / bp3:.0f}x MSE advantage "
      f"over the separated baseline.")
print("note the one-shot prior receiver's error propagation: hard bit")
print("decisions fed back through the filter make it fragile even where")
print("its priors are usually right.")

"""Swarm-size sensitivity study on the demo training problem.

Runs the PSO trainer over a grid of swarm sizes and seeds, then prints
median final MSE per swarm size. Kept deliberately small so it finishes
in well under a minute; raise the budget/seed count for a fuller picture.
"""

import statistics

from aifml.dataio import demo_dataset, demo_system
from aifml.pso import sensitivity_sweep, sweep_csv

system = demo_system()
data = demo_dataset()

rows = sensitivity_sweep(system, data, particle_counts=[5, 10, 20],
                         eval_budgets=[400], seeds=list(range(5)),
                         progress=lambda p, b, s, mse: print(
                             f"  particles={p:2d} seed={s} mse={mse:.4f}"))

print("\n" + sweep_csv(rows))

for particles in (5, 10, 20):
    final = [mse for p, _, _, mse in rows if p == particles]
    print(f"particles={particles:2d}: median final MSE {statistics.median(final):.4f}")

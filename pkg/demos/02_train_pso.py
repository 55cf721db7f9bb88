"""Tune the demo air-conditioner system against its bundled dataset.

Uses particle swarm optimization over every membership-function parameter,
with the hand-written system seeding one particle so the result can never
be worse than the starting point.
"""

from aifml.dataio import demo_dataset, demo_system, rmse, split
from aifml.pso import PsoConfig, fitness_mse, pso_train

system = demo_system()
train, test = split(demo_dataset(), train_fraction=0.7, seed=7)

print(f"training rows: {train.n_rows}, test rows: {test.n_rows}")
print(f"untrained MSE (train): {fitness_mse(system, train):.4f}")
print(f"untrained RMSE (test): {rmse(system, test):.4f}")

cfg = PsoConfig(swarm_size=20, max_evaluations=2000, seed=0)
trained, history = pso_train(system, train, cfg)

print(f"\nevaluations used: {history.evaluations}")
print(f"trained MSE (train): {history.best_fitness[-1]:.4f}")
print(f"trained RMSE (test): {rmse(trained, test):.4f}")

# The convergence curve is best-so-far, hence non-increasing.
for checkpoint in (20, 100, 500, 1000, 2000):
    print(f"  best after {checkpoint:4d} evaluations: "
          f"{history.best_fitness[checkpoint - 1]:.4f}")

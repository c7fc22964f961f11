"""Generative seating processes, from one restaurant to a drifting menu.

Shows the CRP's logarithmic table growth, dish sharing across a
franchise, dish parameters drifting between arrivals, and time-decayed
popularity weights.
"""

import numpy as np

from topicdrift.dp_sim import crfp_sample, crp_partition, dim_sum_sample, tdpm_decayed_counts

rng = np.random.default_rng(3)

print("== single restaurant (CRP) ==")
for n in (10, 100, 1000):
    tables = np.mean([crp_partition(n, 1.0, rng).num_tables for _ in range(300)])
    harmonic = sum(1.0 / i for i in range(1, n + 1))
    print(f"  n={n:5d}: mean tables {tables:6.2f}  (harmonic sum {harmonic:6.2f})")

print("\n== franchise (shared menu) ==")
state = crfp_sample([40, 40, 40], alpha=1.0, gamma=1.5, rng=rng)
print(f"  3 restaurants, {state.num_dishes} dishes, usage {state.dish_usage}")
for d, dishes in enumerate(state.dish_of_table):
    print(f"  restaurant {d}: tables serve dishes {dishes}")

print("\n== drifting menu ==")
traj = dim_sum_sample([20, 20, 20], [0.0, 5.0, 20.0], alpha=1.0, gamma=1.0,
                      drift_v=0.05, param_dim=3, rng=np.random.default_rng(4))
for arrival, params in zip(traj.arrival_times, traj.dish_params):
    first = np.round(params[0], 3) if params.shape[0] else "-"
    print(f"  t={arrival:5.1f}: {params.shape[0]} dishes, dish 0 params {first}")
print("  (dish identity is fixed; only its ingredients move)")

print("\n== time-decayed popularity ==")
history = np.array([[1.0, 9.0], [2.0, 6.0], [8.0, 1.0]])  # oldest first
for width in (0, 1, 3):
    print(f"  width {width}: {np.round(tdpm_decayed_counts(history, width, 1.0), 4)}")
print("  width 0 forgets everything; wider windows remember more")

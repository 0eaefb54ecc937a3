"""Seeded Monte Carlo simulation and paired policy comparison.

Simulates the greedy policy on the 2-channel hand example (analytic value
1.15) and then compares greedy against round-robin using common random
numbers, which drives the variance of the estimated difference far below
that of two independent runs.
"""

from oppaccess import (
    BeliefVector,
    GreedyPolicy,
    HorizonSpec,
    RoundRobinPolicy,
    SimConfig,
    TransitionModel,
    common_random_numbers_compare,
    simulate,
)

cfg = SimConfig(
    model=TransitionModel(p01=0.2, p11=0.8),
    horizon=HorizonSpec(T=2, beta=1.0),
    n=2,
    k=1,
    initial_belief=BeliefVector((0.5, 0.5)),
    replications=100_000,
    seed=7,
)

summary = simulate(cfg, GreedyPolicy(k=1))
print(f"greedy simulated mean: {summary.mean:.5f} +/- {summary.std_error:.5f} (SE)")
print("analytic value:        1.15000\n")

paired = common_random_numbers_compare(cfg, GreedyPolicy(k=1), RoundRobinPolicy(2, 1))
print("paired comparison, greedy minus round-robin (common random numbers):")
print(f"  mean difference: {paired.mean_diff:+.5f} +/- {paired.se_diff:.5f} (SE)")
print("  On a symmetric start both policies sense the same first channel, so")
print("  the difference comes only from the second slot's reaction to what")
print("  was observed.")

"""Greedy policy versus the exact dynamic-programming optimum.

In the positively correlated regime (p11 >= p01) the myopic policy — sense
the k channels with the highest current beliefs — achieves the optimal
value exactly.  With negative correlation it can fall short, because a
channel just seen in the bad state becomes the most promising one next slot.
"""

from oppaccess import BeliefVector, FiniteHorizonSolver, HorizonSpec, TransitionModel

horizon = HorizonSpec(T=4, beta=1.0)
omega = BeliefVector((0.3, 0.5, 0.7))

print("=== positively correlated: greedy is optimal ===")
model = TransitionModel(p01=0.2, p11=0.8)
solver = FiniteHorizonSolver(model, horizon, k=1)
result = solver.optimal_value(omega, t=1)
greedy = solver.greedy_value(omega, t=1)
print(f"optimal value : {result.value:.12f}")
print(f"greedy value  : {greedy:.12f}")
print(f"gap           : {result.value - greedy:.3e}")
print(f"optimal first actions: {[a.indices for a in result.best_actions]}\n")

print("=== negatively correlated: greedy can be strictly suboptimal ===")
model = TransitionModel(p01=0.8, p11=0.2)
solver = FiniteHorizonSolver(model, horizon, k=1)
result = solver.optimal_value(omega, t=1)
greedy = solver.greedy_value(omega, t=1)
print(f"optimal value : {result.value:.12f}")
print(f"greedy value  : {greedy:.12f}")
print(f"gap           : {result.value - greedy:.3e}")
print(f"optimal first actions: {[a.indices for a in result.best_actions]}")
print("\nNote the optimal first action need not be the highest-belief channel")
print("once correlation is negative: sensing reveals information whose value")
print("depends on how beliefs bounce afterwards.")

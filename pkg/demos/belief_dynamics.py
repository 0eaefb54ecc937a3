"""Belief dynamics of a two-state Gilbert-Elliott channel.

Shows how an unobserved channel's belief relaxes toward the stationary
probability, and how the relaxation is monotone from either side when the
channel is positively correlated (p11 >= p01).
"""

from oppaccess import TransitionModel, tau_iterate

model = TransitionModel(p01=0.2, p11=0.8)
print(f"model: p01={model.p01}, p11={model.p11}")
print(f"positively correlated: {model.positively_correlated}")
print(f"stationary belief:     {model.stationary_belief():.6f}\n")

print("unobserved belief after m slots, starting from a good (1.0) and a bad (0.0) observation:")
print(f"{'m':>3} {'from good':>12} {'from bad':>12}")
for m in range(9):
    g = tau_iterate(1.0, model, m)
    b = tau_iterate(0.0, model, m)
    print(f"{m:>3} {g:>12.6f} {b:>12.6f}")

print("\nBoth trajectories converge to the stationary belief, and in the")
print("positively correlated regime they never cross it: a freshly-seen good")
print("channel stays more promising than a freshly-seen bad one, at every age.")

neg = TransitionModel(p01=0.8, p11=0.2)
print(f"\nnegatively correlated model (p01={neg.p01}, p11={neg.p11}) oscillates instead:")
print(" ".join(f"{tau_iterate(1.0, neg, m):.4f}" for m in range(7)))

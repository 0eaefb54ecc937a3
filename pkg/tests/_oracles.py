"""Independent reference implementations used to cross-check the solvers.

Deliberately naive: no memoisation, no outcome grouping, no reordering
tricks.  Only usable at tiny sizes, which is the point -- they share no code
path with the package's recursions.
"""

import itertools

from oppaccess import ActionSet, HorizonSpec, TransitionModel


def brute_force_optimal(omega, t, model: TransitionModel, horizon: HorizonSpec, k: int):
    """Optimal value by exhaustive enumeration over actions and outcomes."""
    n = len(omega)
    best = None
    for action in itertools.combinations(range(n), k):
        imm = sum(omega[i] for i in action)
        if t == horizon.T or horizon.beta == 0.0:
            val = imm
        else:
            expect = 0.0
            for bits in itertools.product((0, 1), repeat=k):
                q = 1.0
                for i, b in zip(action, bits):
                    q *= omega[i] if b else (1.0 - omega[i])
                bit = dict(zip(action, bits))
                child = tuple(
                    (model.p11 if bit[i] else model.p01)
                    if i in bit
                    else omega[i] * model.p11 + (1.0 - omega[i]) * model.p01
                    for i in range(n)
                )
                expect += q * brute_force_optimal(child, t + 1, model, horizon, k)
            val = imm + horizon.beta * expect
        if best is None or val > best:
            best = val
    return best


def brute_force_policy_value(omega, t, model, horizon, k, policy_action):
    """Value of a deterministic policy by exhaustive sample-tree expansion."""
    n = len(omega)
    action: ActionSet = policy_action(tuple(omega), t)
    sel = [i - 1 for i in action.indices]
    imm = sum(omega[i] for i in sel)
    if t == horizon.T or horizon.beta == 0.0:
        return imm
    expect = 0.0
    for bits in itertools.product((0, 1), repeat=k):
        q = 1.0
        for i, b in zip(sel, bits):
            q *= omega[i] if b else (1.0 - omega[i])
        bit = dict(zip(sel, bits))
        child = tuple(
            (model.p11 if bit[i] else model.p01)
            if i in bit
            else omega[i] * model.p11 + (1.0 - omega[i]) * model.p01
            for i in range(n)
        )
        expect += q * brute_force_policy_value(child, t + 1, model, horizon, k, policy_action)
    return imm + horizon.beta * expect


def full_observation_value(omega, model: TransitionModel, horizon: HorizonSpec):
    """Closed form for k = n: channels decouple, so the value is the sum of
    discounted per-channel marginal probabilities of being good."""
    total = 0.0
    for step in range(horizon.T):
        marginals = 0.0
        for w in omega:
            m = w
            for _ in range(step):
                m = m * model.p11 + (1.0 - m) * model.p01
            marginals += m
        total += horizon.beta**step * marginals
    return total

"""Seeded Monte Carlo simulation of the hidden channels under any policy.

Randomness discipline: every replication r draws from its own counter-based
Philox substream keyed by (seed, stream_id, r), so a single replication can be
reproduced in isolation and results do not depend on execution order.  Nature
(initial states and transitions) and policy-internal randomness live on
disjoint streams, which makes common-random-numbers comparisons valid: two
policies evaluated on the same seed see identical channel sample paths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .model import ActionSet, BeliefVector, HorizonSpec, TransitionModel, tau
from .policies import Policy

TRACE_SCHEMA_VERSION = 1

_MASK64 = (1 << 64) - 1
_STREAM_NATURE = 1
_STREAM_POLICY = 2


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce a simulation run.

    Hidden initial states are drawn per channel as Bernoulli(omega_i(1)) from
    the initial belief, which keeps simulated means consistent with the DP
    value of the same belief.
    """

    model: TransitionModel
    horizon: HorizonSpec
    n: int
    k: int
    initial_belief: BeliefVector
    replications: int
    seed: int
    record_traces: bool = False

    def __post_init__(self) -> None:
        if not (1 <= self.k <= self.n):
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.initial_belief.n != self.n:
            raise ValueError("initial belief length must equal n")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


@dataclass(frozen=True)
class StepRecord:
    t: int
    states: Tuple[int, ...]
    action: Tuple[int, ...]
    observations: Tuple[int, ...]
    reward: int
    discounted_cum: float


@dataclass(frozen=True)
class RunRecord:
    replication: int
    steps: Tuple[StepRecord, ...]
    total: float


@dataclass(frozen=True)
class SimSummary:
    mean: float
    variance: float
    std_error: float
    replications: int
    totals: np.ndarray = field(repr=False)
    traces: Optional[Tuple[RunRecord, ...]] = None


@dataclass(frozen=True)
class PairedSummary:
    """Common-random-numbers comparison of two policies on shared sample paths."""

    mean_a: float
    mean_b: float
    mean_diff: float
    se_diff: float
    replications: int
    diffs: np.ndarray = field(repr=False)


def _substream(seed: int, stream_id: int, replication: int) -> np.random.Generator:
    key = np.array(
        [seed & _MASK64, ((stream_id << 48) + replication) & _MASK64],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def _nature_uniforms(config: SimConfig) -> np.ndarray:
    """(R, T, n) uniforms: row 0 draws initial states, row t drives t -> t+1."""
    R, T, n = config.replications, config.horizon.T, config.n
    out = np.empty((R, T, n))
    for r in range(R):
        out[r] = _substream(config.seed, _STREAM_NATURE, r).random((T, n))
    return out


def _policy_uniforms(config: SimConfig) -> np.ndarray:
    R, T = config.replications, config.horizon.T
    out = np.empty((R, T))
    for r in range(R):
        out[r] = _substream(config.seed, _STREAM_POLICY, r).random(T)
    return out


def _summary(config: SimConfig, totals: np.ndarray, traces) -> SimSummary:
    mean = float(totals.mean())
    var = float(totals.var(ddof=1)) if len(totals) > 1 else 0.0
    se = float(np.sqrt(var / len(totals)))
    return SimSummary(mean, var, se, len(totals), totals, traces)


def _simulate_batch(config: SimConfig, policy: Policy, nat: np.ndarray, pol: np.ndarray):
    m, beta, T = config.model, config.horizon.beta, config.horizon.T
    R, n, k = config.replications, config.n, config.k
    omega0 = np.array(config.initial_belief.omega)
    states = (nat[:, 0, :] < omega0).astype(np.int8)
    beliefs = np.tile(omega0, (R, 1))
    totals = np.zeros(R)
    rows = np.arange(R)[:, None]
    disc = 1.0
    trace_steps = [] if config.record_traces else None
    for t in range(1, T + 1):
        acts = policy.batch_actions(beliefs, t, pol[:, t - 1])
        obs = states[rows, acts]
        rewards = obs.sum(axis=1)
        totals += disc * rewards
        if trace_steps is not None:
            trace_steps.append((t, states.copy(), acts, obs, rewards, totals.copy()))
        if t < T:
            beliefs = beliefs * m.p11 + (1.0 - beliefs) * m.p01
            beliefs[rows, acts] = np.where(obs, m.p11, m.p01)
            p_good = np.where(states, m.p11, m.p01)
            states = (nat[:, t, :] < p_good).astype(np.int8)
        disc *= beta
    traces = None
    if trace_steps is not None:
        traces = tuple(
            RunRecord(
                r,
                tuple(
                    StepRecord(
                        t,
                        tuple(int(x) for x in st[r]),
                        tuple(int(a) + 1 for a in acts[r]),
                        tuple(int(x) for x in ob[r]),
                        int(rw[r]),
                        float(tot[r]),
                    )
                    for (t, st, acts, ob, rw, tot) in trace_steps
                ),
                float(totals[r]),
            )
            for r in range(R)
        )
    return totals, traces


def _simulate_loop(config: SimConfig, policy: Policy, nat: np.ndarray, pol: np.ndarray):
    m, beta, T = config.model, config.horizon.beta, config.horizon.T
    R, n, k = config.replications, config.n, config.k
    omega0 = config.initial_belief.omega
    totals = np.zeros(R)
    traces: Optional[list] = [] if config.record_traces else None
    for r in range(R):
        states = tuple(int(nat[r, 0, i] < omega0[i]) for i in range(n))
        beliefs = omega0
        policy.reset(n, k, omega0)
        total = 0.0
        disc = 1.0
        steps = [] if traces is not None else None
        for t in range(1, T + 1):
            if hasattr(policy, "set_uniform"):
                policy.set_uniform(pol[r, t - 1])
            action = policy.action(beliefs, t)
            obs = tuple(states[i - 1] for i in action.indices)
            reward = sum(obs)
            total += disc * reward
            policy.observe(action, obs)
            if steps is not None:
                steps.append(
                    StepRecord(t, states, action.indices, obs, reward, total)
                )
            if t < T:
                bit = dict(zip(action.indices, obs))
                beliefs = tuple(
                    (m.p11 if bit[i] else m.p01) if i in bit else tau(w, m)
                    for i, w in enumerate(beliefs, start=1)
                )
                states = tuple(
                    int(nat[r, t, i] < (m.p11 if states[i] else m.p01))
                    for i in range(n)
                )
            disc *= beta
        totals[r] = total
        if traces is not None:
            traces.append(RunRecord(r, tuple(steps), total))
    return totals, tuple(traces) if traces is not None else None


def simulate(config: SimConfig, policy: Policy) -> SimSummary:
    """Estimate a policy's expected discounted reward by seeded Monte Carlo.

    Identical (config, policy) inputs produce bit-identical output.  Policies
    that advertise ``supports_batch`` run on a vectorised path; the two paths
    consume the same substreams and agree exactly.
    """
    nat = _nature_uniforms(config)
    pol = _policy_uniforms(config) if getattr(policy, "uses_randomness", False) else np.zeros(
        (config.replications, config.horizon.T)
    )
    policy.reset(config.n, config.k, config.initial_belief.omega)
    if policy.supports_batch:
        totals, traces = _simulate_batch(config, policy, nat, pol)
    else:
        totals, traces = _simulate_loop(config, policy, nat, pol)
    return _summary(config, totals, traces)


def common_random_numbers_compare(
    config: SimConfig, policy_a: Policy, policy_b: Policy
) -> PairedSummary:
    """Run both policies against identical channel sample paths and pair the totals."""
    sa = simulate(config, policy_a)
    sb = simulate(config, policy_b)
    diffs = sa.totals - sb.totals
    var = float(diffs.var(ddof=1)) if len(diffs) > 1 else 0.0
    se = float(np.sqrt(var / len(diffs)))
    return PairedSummary(sa.mean, sb.mean, float(diffs.mean()), se, len(diffs), diffs)


def write_traces(path: str, traces: Sequence[RunRecord]) -> None:
    """Write one JSON record per step: schema version, replication, t, hidden
    states, 1-based action indices, observation bits, realised reward."""
    with open(path, "w") as f:
        for run in traces:
            for s in run.steps:
                f.write(
                    json.dumps(
                        {
                            "v": TRACE_SCHEMA_VERSION,
                            "rep": run.replication,
                            "t": s.t,
                            "states": list(s.states),
                            "action": list(s.action),
                            "obs": list(s.observations),
                            "reward": s.reward,
                        },
                        separators=(",", ":"),
                    )
                    + "\n"
                )

"""Phased elimination over marginal action sets.

Each phase plays a balanced design over the surviving per-variable value
sets, fits pooled least squares, and discards values whose estimated gap to
the per-variable best reaches the phase threshold. Thresholds halve each
phase; three endpoint conventions are supported because the source
convention is ambiguous (see ModlParams.schedule).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .design import (
    Embedding,
    MarginalActionSet,
    design_sequence,
    gap_estimates,
    ols,
)
from .scm import Scm

SCHEDULES = ("proof-consistent", "verbatim-pseudocode", "final-epsilon")


@dataclass(frozen=True)
class ModlParams:
    epsilon: float
    delta: float
    sigma2: float
    reward_bound: float
    parents_bound: Optional[int] = None
    schedule: str = "proof-consistent"

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")
        if self.reward_bound <= 0:
            raise ValueError("reward_bound must be positive")
        if self.parents_bound is not None and self.parents_bound < 1:
            raise ValueError("parents_bound must be >= 1 when given")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")


@dataclass(frozen=True)
class PhaseSchedule:
    L: int
    gammas: tuple


def phase_schedule(params: ModlParams, K: int) -> PhaseSchedule:
    """Halving threshold sequence over L = floor(log2(2BK/eps)) phases.

    Endpoint per schedule: proof-consistent ends at eps/(2K), the printed
    pseudocode variant at 2*eps/K, final-epsilon at eps. When the horizon
    would be empty (eps >= 2BK) a single phase at the endpoint is used.
    """
    ratio = 2.0 * params.reward_bound * K / params.epsilon
    L = max(1, math.floor(math.log2(ratio)))
    if params.schedule == "proof-consistent":
        last = params.epsilon / (2.0 * K)
    elif params.schedule == "verbatim-pseudocode":
        last = 2.0 * params.epsilon / K
    else:
        last = params.epsilon
    gammas = tuple(last * 2.0 ** (L - ell) for ell in range(1, L + 1))
    return PhaseSchedule(L=L, gammas=gammas)


def phase_sample_size(S: MarginalActionSet, gamma: float, sigma2: float,
                      delta: float, L: int) -> int:
    """ceil(4 sigma^2 sum|S_k| / gamma^2 * ln(L/delta)), raised so a balanced
    design exists and can estimate every within-variable difference: at least
    max|S_k| + 1 rounds, and at least sum|S_k| + K + 1 (the identifiable
    dimension is sum(|S_k| - 1) + 1; random balanced designs need a little
    headroom above it before estimability holds reliably, and large early
    thresholds would otherwise ask for fewer rounds than the estimate has
    degrees of freedom)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n = math.ceil(4.0 * sigma2 * S.total_size / gamma**2 * math.log(L / delta))
    return max(n, max(S.sizes) + 1, S.total_size + S.num_vars + 1)


def eliminate(S: MarginalActionSet, to_best, gamma: float) -> MarginalActionSet:
    """Keep the values whose estimated gap to the per-variable best is below
    gamma. The empirical argmax has gap exactly zero, so no set empties."""
    new_sets = []
    for vals, gaps in zip(S.sets, to_best):
        kept = tuple(v for v, g in zip(vals, gaps) if g < gamma)
        if not kept:
            raise RuntimeError("elimination emptied a value set")
        new_sets.append(kept)
    return MarginalActionSet(tuple(new_sets))


@dataclass
class PhaseLog:
    ell: int
    gamma: float
    n: int
    action_set: MarginalActionSet  # set the phase sampled from
    survivors: MarginalActionSet  # set after this phase's elimination
    theta_hat: np.ndarray
    pairwise: list
    to_best: list
    p_hat_y: int  # singleton marginals after elimination

    def to_jsonable(self) -> dict:
        return {
            "phase": self.ell,
            "gamma": self.gamma,
            "n": self.n,
            "action_set": [list(s) for s in self.action_set.sets],
            "survivors": [list(s) for s in self.survivors.sets],
            "theta_hat": self.theta_hat.tolist(),
            "gaps_to_best": [g.tolist() for g in self.to_best],
            "num_resolved": self.p_hat_y,
        }


@dataclass
class ModlResult:
    chosen: np.ndarray  # one value per design variable
    theta_final: np.ndarray
    phase_logs: list
    samples_used: int
    recovered_parents: Optional[set] = None


def run_modl(env, supports, params: ModlParams, rng) -> ModlResult:
    """Full phased run against env.draw((n, K) actions, rng) -> n outcomes.

    Stops after the schedule, or earlier once every marginal is a singleton,
    or once the number of resolved marginals reaches params.parents_bound.
    Returns the per-variable argmax over the final survivors (ties to the
    smallest value), the final estimate, and per-phase logs.
    """
    supports = [int(m) for m in supports]
    K = len(supports)
    emb = Embedding.from_supports(supports)
    S = MarginalActionSet.full(supports)
    sched = phase_schedule(params, K)
    logs: list = []
    total = 0
    est = None
    for ell in range(1, sched.L + 1):
        gamma = sched.gammas[ell - 1]
        n = phase_sample_size(S, gamma, params.sigma2, params.delta, sched.L)
        actions = design_sequence(S, n, rng, emb)
        ys = env.draw(actions, rng)
        est = ols(actions, ys, emb)
        pairwise, to_best = gap_estimates(est, S)
        survivors = eliminate(S, to_best, gamma)
        p_hat = survivors.num_singletons()
        logs.append(
            PhaseLog(
                ell=ell,
                gamma=gamma,
                n=n,
                action_set=S,
                survivors=survivors,
                theta_hat=est.theta_hat,
                pairwise=pairwise,
                to_best=to_best,
                p_hat_y=p_hat,
            )
        )
        total += n
        S = survivors
        if S.all_singletons():
            break
        if params.parents_bound is not None and p_hat >= params.parents_bound:
            break

    chosen = np.empty(K, dtype=np.int64)
    for k, vals in enumerate(S.sets):
        idx = emb.offsets[k] + np.array(vals, dtype=np.int64) - 1
        th = est.theta_hat[idx]
        chosen[k] = vals[int(np.argmax(th))]  # first max = smallest value
    return ModlResult(
        chosen=chosen,
        theta_final=est.theta_hat,
        phase_logs=logs,
        samples_used=total,
        recovered_parents=recover_parents(logs),
    )


def recover_parents(logs) -> set:
    """Variables the run revealed as affecting the outcome.

    A variable qualifies if some phase estimated two of its surviving values
    more than 2*gamma apart, or if elimination ever shrank its marginal to a
    single value.
    """
    parents: set = set()
    for log in logs:
        for k, table in enumerate(log.pairwise):
            if k in parents:
                continue
            if table.size and np.max(np.abs(table)) > 2.0 * log.gamma:
                parents.add(k)
        for k, s in enumerate(log.survivors.sets):
            if len(s) == 1 and len(log.action_set.sets[k]) > 1:
                parents.add(k)
    return parents


def theoretical_complexity(scm: Scm, params: ModlParams) -> float:
    """Instance-dependent sample bound evaluated on ground truth.

    H = (16 sigma^2 / 3) * ln(log2(B K / eps) / delta)
        * sum_k sum_i 1 / max(gap_floor, Delta_k^i, eps/K)^2

    with Delta_k^i the true per-value gap (zero for non-parents). The floor
    term is 0 without parents_bound; with it, the smallest positive parent
    gap (0 when every parent is flat).
    """
    K = scm.num_vars
    B = params.reward_bound
    eps = params.epsilon
    if B * K <= eps:
        raise ValueError("bound undefined: need B*K > epsilon")
    floor = 0.0
    if params.parents_bound is not None:
        positive = [
            g
            for k in scm.outcome.parents
            for g in (np.max(scm.outcome.f[k]) - scm.outcome.f[k])
            if g > 0
        ]
        floor = min(positive) if positive else 0.0
    total = 0.0
    for k in range(K):
        m = scm.sizes[k]
        if k in scm.outcome.parents:
            f = scm.outcome.f[k]
            gaps = np.max(f) - f
        else:
            gaps = np.zeros(m)
        for g in gaps:
            denom = max(floor, float(g), eps / K)
            total += 1.0 / denom**2
    lead = 16.0 * params.sigma2 / 3.0
    return lead * math.log(math.log2(B * K / eps) / params.delta) * total

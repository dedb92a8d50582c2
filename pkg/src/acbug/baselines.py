"""Comparison algorithms: interval parents test, parents-first pipeline,
parents-known variant, and successive elimination over the product space."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .elimination import ModlParams, ModlResult, run_modl


@dataclass(frozen=True)
class ParentsTestConfig:
    epsilon: float
    delta: float
    sigma2: float
    x0: Optional[tuple] = None  # baseline assignment, all-ones when omitted
    parents_bound: Optional[int] = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")


@dataclass
class ParentsResult:
    parents: set
    samples_used: int
    draws: list  # (variable, value, n) in execution order


def parents_test_n(sigma2: float, epsilon: float, K: int, m: int, delta: float) -> int:
    """Draws per tested value; at least one so the mean exists even at
    sigma2 = 0."""
    n = math.ceil(8.0 * sigma2 / epsilon**2 * math.log(2.0 * K * m / delta))
    return max(1, n)


def find_parents(env, supports, cfg: ParentsTestConfig, rng) -> ParentsResult:
    """Detect outcome parents by one-variable-at-a-time interventions.

    Holding everything else at x0, each value of a variable gets an open
    interval (mean - eps/2, mean + eps/2); the variable is declared a parent
    the moment the running intersection empties, skipping its remaining
    values. Variables are scanned in a random order, and scanning stops
    early once parents_bound parents are found.
    """
    K = len(supports)
    x0 = cfg.x0 if cfg.x0 is not None else tuple([1] * K)
    if len(x0) != K:
        raise ValueError("x0 must assign every variable")
    for v, m in zip(x0, supports):
        if not (1 <= v <= m):
            raise ValueError("x0 value outside support")

    base = np.array(x0, dtype=np.int64)
    parents: set = set()
    draws: list = []
    samples = 0
    order = [int(k) for k in rng.permutation(K)]
    for k in order:
        if cfg.parents_bound is not None and len(parents) >= cfg.parents_bound:
            break
        n = parents_test_n(cfg.sigma2, cfg.epsilon, K, supports[k], cfg.delta)
        lo, hi = -math.inf, math.inf
        for j in range(1, supports[k] + 1):
            actions = np.tile(base, (n, 1))
            actions[:, k] = j
            ys = env.draw(actions, rng)
            mean = float(ys.mean())
            samples += n
            draws.append((k, j, n))
            lo = max(lo, mean - cfg.epsilon / 2.0)
            hi = min(hi, mean + cfg.epsilon / 2.0)
            if lo >= hi:
                parents.add(k)
                break
    return ParentsResult(parents=parents, samples_used=samples, draws=draws)


@dataclass
class PipelineResult:
    intervention: dict  # variable -> value, partial
    samples_used: int
    parents: set
    modl: Optional[ModlResult]
    stage1_samples: int = 0


def run_p1(scm_env, supports, params: ModlParams, cfg: ParentsTestConfig, rng) -> PipelineResult:
    """Parents test first, then phased elimination restricted to the found
    set, intervening on nothing else. An empty stage-1 result returns the
    observational arm at stage-1 cost."""
    K = len(supports)
    stage1 = find_parents(scm_env.restrict(range(K)), supports, cfg, rng)
    if not stage1.parents:
        return PipelineResult(
            intervention={},
            samples_used=stage1.samples_used,
            parents=set(),
            modl=None,
            stage1_samples=stage1.samples_used,
        )
    chosen_vars = sorted(stage1.parents)
    sub_env = scm_env.restrict(chosen_vars)
    res = run_modl(sub_env, [supports[v] for v in chosen_vars], params, rng)
    return PipelineResult(
        intervention={v: int(x) for v, x in zip(chosen_vars, res.chosen)},
        samples_used=stage1.samples_used + res.samples_used,
        parents=stage1.parents,
        modl=res,
        stage1_samples=stage1.samples_used,
    )


def run_restricted(scm_env, supports, variables, params: ModlParams, rng) -> PipelineResult:
    """Phased elimination over a given variable subset (the parents-known
    reference point)."""
    chosen_vars = sorted(int(v) for v in variables)
    sub_env = scm_env.restrict(chosen_vars)
    res = run_modl(sub_env, [supports[v] for v in chosen_vars], params, rng)
    return PipelineResult(
        intervention={v: int(x) for v, x in zip(chosen_vars, res.chosen)},
        samples_used=res.samples_used,
        parents=set(chosen_vars),
        modl=res,
    )


def run_oracle(scm_env, supports, true_parents, params: ModlParams, rng) -> PipelineResult:
    return run_restricted(scm_env, supports, true_parents, params, rng)


class ArmCapExceeded(ValueError):
    pass


def product_arms(supports) -> np.ndarray:
    """All assignments in lexicographic order, one row each."""
    grids = np.indices([int(m) for m in supports])
    return grids.reshape(len(supports), -1).T + 1


@dataclass
class SeResult:
    chosen: np.ndarray
    samples_used: int
    passes: int


def run_se(env, supports, epsilon: float, delta: float, sigma2: float, rng,
           arm_cap: int = 100_000) -> SeResult:
    """Successive elimination on the full product action space.

    Round-robins over surviving arms; after pass t an arm is dropped when
    the best mean beats it by more than twice the radius
    r_t = sqrt(2 sigma^2 ln(4 A t^2 / delta) / t). Stops at a single
    survivor or once 2 r_t <= epsilon, returning the empirical best.
    """
    total_arms = 1
    for m in supports:
        total_arms *= int(m)
        if total_arms > arm_cap:
            raise ArmCapExceeded(
                f"product action space exceeds the {arm_cap}-arm cap"
            )
    arms = product_arms(supports)
    A = arms.shape[0]
    alive = np.ones(A, dtype=bool)
    sums = np.zeros(A)
    samples = 0
    t = 0
    while True:
        t += 1
        idx = np.flatnonzero(alive)
        ys = env.draw(arms[idx], rng)
        sums[idx] += ys
        samples += idx.size
        means = sums[idx] / t
        r = math.sqrt(2.0 * sigma2 * math.log(4.0 * A * t * t / delta) / t)
        keep = means.max() - means <= 2.0 * r
        alive[idx[~keep]] = False
        if alive.sum() == 1 or 2.0 * r <= epsilon:
            break
    idx = np.flatnonzero(alive)
    means = sums[idx] / t
    best = idx[int(np.argmax(means))]  # first max = lexicographically smallest
    return SeResult(chosen=arms[best].copy(), samples_used=samples, passes=t)

"""Self-contained property checks behind `acbug validate`.

Each check takes an rng and returns None on success or a short description
of the violation. They are quick spot checks, not the full test suite.
"""
from __future__ import annotations

import math

import numpy as np

from .design import (
    Embedding,
    MarginalActionSet,
    design_bound,
    design_counts,
    design_sequence,
    gap_estimates,
    ols,
    worst_pair_design_norm,
)
from .elimination import ModlParams, phase_schedule
from .generate import GenConfig, gen_scm
from .scm import ScmEnv, from_json, interventional_mean, to_json


def _random_action_set(rng, max_vars=3, max_support=3):
    K = int(rng.integers(1, max_vars + 1))
    sets = []
    supports = []
    for _ in range(K):
        m = int(rng.integers(2, max_support + 1))
        size = int(rng.integers(1, m + 1))
        vals = np.sort(rng.choice(np.arange(1, m + 1), size=size, replace=False))
        sets.append(tuple(int(v) for v in vals))
        supports.append(m)
    return MarginalActionSet(tuple(sets)), supports


def check_design_balance(rng):
    for _ in range(50):
        S, supports = _random_action_set(rng)
        n = int(rng.integers(S.total_size + 1, S.total_size + 40))
        emb = Embedding.from_supports(supports)
        actions = design_sequence(S, n, rng, emb)
        for k, counts in enumerate(design_counts(actions, emb)):
            in_set = [counts[v - 1] for v in S.sets[k]]
            if max(in_set) - min(in_set) > 1:
                return f"unbalanced counts {in_set} for variable {k}"
            if counts.sum() != n or sum(in_set) != n:
                return f"counts escape the value set for variable {k}"
    return None


def check_pair_norm_bound(rng):
    """Pair norms stay within the design bound when every marginal is exactly
    uniform (n a multiple of each set size). Draws avoid three size-3 sets
    with n not divisible by 9: there no within-one-balanced design can meet
    the bound at all, which the test suite covers and documents."""
    for _ in range(50):
        while True:
            S, supports = _random_action_set(rng)
            if sum(1 for s in S.sets if len(s) == 3) < 3:
                break
        l = math.lcm(*(len(s) for s in S.sets))
        lo = -(-(S.total_size + 1) // l)
        n = l * int(rng.integers(lo, lo + 12))
        emb = Embedding.from_supports(supports)
        actions = design_sequence(S, n, rng, emb)
        worst = worst_pair_design_norm(actions, S, emb)
        bound = design_bound(S, n)
        if worst > bound + 1e-9:
            return f"worst pair norm {worst:.6g} exceeds bound {bound:.6g}"
    return None


def check_normal_equations(rng):
    # arbitrary designs, not just balanced ones
    for _ in range(20):
        S, supports = _random_action_set(rng)
        emb = Embedding.from_supports(supports)
        n = int(rng.integers(1, 25))
        actions = np.column_stack(
            [rng.choice(np.array(vals), size=n) for vals in S.sets]
        )
        ys = rng.normal(size=n)
        est = ols(actions, ys, emb)
        lhs = est.covariance @ est.theta_hat
        rhs = np.zeros(emb.dim)
        offsets = np.array(emb.offsets)
        for row, y in zip(actions, ys):
            rhs[offsets + row - 1] += y
        scale = max(1.0, float(np.linalg.norm(rhs)))
        if np.linalg.norm(lhs - rhs) / scale > 1e-8:
            return "normal equations violated beyond 1e-8 relative residual"
    return None


def check_noiseless_gap_recovery(rng):
    for _ in range(20):
        S, supports = _random_action_set(rng)
        emb = Embedding.from_supports(supports)
        theta_star = rng.normal(size=emb.dim)
        n = int(rng.integers(S.total_size + 1, S.total_size + 30))
        actions = design_sequence(S, n, rng, emb)
        offsets = np.array(emb.offsets)
        idx = offsets[None, :] + actions - 1
        ys = theta_star[idx].sum(axis=1)
        est = ols(actions, ys, emb)
        _, to_best = gap_estimates(est, S)
        for k, vals in enumerate(S.sets):
            tv = theta_star[emb.offsets[k] + np.array(vals) - 1]
            true_gaps = tv.max() - tv
            if np.max(np.abs(to_best[k] - true_gaps)) > 1e-9:
                return f"noiseless gaps off for variable {k}"
    return None


def check_generation_roundtrip(rng):
    for _ in range(5):
        cfg = GenConfig(
            num_vars=int(rng.integers(2, 7)),
            num_parents=int(rng.integers(1, 3)),
            seed=int(rng.integers(1 << 32)),
        )
        scm = gen_scm(cfg)
        again = gen_scm(cfg)
        if to_json(scm) != to_json(again):
            return "same seed produced different documents"
        back = from_json(to_json(scm))
        if to_json(back) != to_json(scm):
            return "serialization round trip changed the document"
        for cpd in scm.cpds:
            if cpd.kind == "table":
                err = np.abs(cpd.table.sum(axis=1) - 1.0).max()
                if err > 1e-12:
                    return f"cpd rows sum to 1 only within {err:.2e}"
    return None


def check_env_against_exact_mean(rng):
    cfg = GenConfig(num_vars=3, num_parents=2, noise_sigma2=0.5, seed=7)
    scm = gen_scm(cfg)
    env = ScmEnv(scm)
    n = 20000
    actions = np.column_stack(
        [rng.integers(1, m + 1, size=n) for m in scm.sizes]
    )
    first = actions[0]
    actions[:] = first
    ys = env.draw(actions, rng)
    exact, _ = interventional_mean(scm, {k: int(v) for k, v in enumerate(first)})
    se = float(np.sqrt(scm.outcome.noise_sigma2 / n))
    if abs(float(ys.mean()) - exact) > 4 * se:
        return f"batch mean {ys.mean():.4f} far from exact {exact:.4f}"
    return None


def check_schedule_endpoints(rng):
    eps, K, B = 0.5, 10, 5.0
    cases = {
        "proof-consistent": eps / (2 * K),
        "verbatim-pseudocode": 2 * eps / K,
        "final-epsilon": eps,
    }
    for name, want in cases.items():
        params = ModlParams(
            epsilon=eps, delta=0.1, sigma2=1.0, reward_bound=B, schedule=name
        )
        sched = phase_schedule(params, K)
        if sched.L != 7:
            return f"{name}: expected 7 phases, got {sched.L}"
        if abs(sched.gammas[-1] - want) > 1e-12:
            return f"{name}: endpoint {sched.gammas[-1]} != {want}"
        for a, b in zip(sched.gammas, sched.gammas[1:]):
            if abs(a - 2 * b) > 1e-12:
                return f"{name}: thresholds do not halve"
    return None


ALL_CHECKS = (
    ("design-balance", check_design_balance),
    ("pair-norm-bound", check_pair_norm_bound),
    ("normal-equations", check_normal_equations),
    ("noiseless-gap-recovery", check_noiseless_gap_recovery),
    ("generation-roundtrip", check_generation_roundtrip),
    ("env-exact-mean", check_env_against_exact_mean),
    ("schedule-endpoints", check_schedule_endpoints),
)

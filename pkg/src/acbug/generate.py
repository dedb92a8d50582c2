"""Random model generation.

Graphs come from an ordered Erdos-Renyi process over K-1 of the K variables,
the outcome's parents are a uniform subset of all K, and variables ordered
after the outcome become its children with probability one half. Probability
rows and reward tables are normalized / scaled Beta(2,5) draws.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .scm import (
    LAZY_TABLE_CAP,
    Cpd,
    Dag,
    Interaction,
    OutcomeModel,
    Scm,
    VariableSpec,
)
from .seeding import spawn_rng, stable_seed


@dataclass(frozen=True)
class GenConfig:
    num_vars: int
    num_parents: int
    support_lo: int = 3
    support_hi: int = 6
    degree: float = 3.0
    reward_scale: float = 5.0
    noise_sigma2: float = 1.0
    noise_kind: str = "gaussian"
    alpha: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        if not (1 <= self.num_parents <= self.num_vars):
            raise ValueError("num_parents must lie in 1..num_vars")
        if not (2 <= self.support_lo <= self.support_hi):
            raise ValueError("need 2 <= support_lo <= support_hi")
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        if self.reward_scale <= 0:
            raise ValueError("reward_scale must be positive")
        if self.noise_sigma2 < 0:
            raise ValueError("noise_sigma2 must be nonnegative")
        if self.noise_kind not in ("gaussian", "uniform-bounded"):
            raise ValueError(f"unknown noise kind {self.noise_kind!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")


def gen_dag(cfg: GenConfig, rng) -> Dag:
    """Sample a DAG: random order, pairwise edges among the first K-1 ordered
    variables with probability min(1, degree/(K-2)), then a uniform size-P
    parent set for the outcome and coin-flip children after it."""
    K = cfg.num_vars
    order = [int(v) for v in rng.permutation(K)]
    edges_into: list = [[] for _ in range(K)]

    m = K - 1
    p = min(1.0, cfg.degree / (K - 2)) if K > 2 else 0.0
    n_pairs = m * (m - 1) // 2
    coins = rng.random(n_pairs) if n_pairs else np.empty(0)
    idx = 0
    for i in range(m):
        for j in range(i + 1, m):
            if coins[idx] < p:
                edges_into[order[j]].append(order[i])
            idx += 1

    parents = sorted(int(v) for v in rng.choice(K, size=cfg.num_parents, replace=False))
    pos_of = {v: i for i, v in enumerate(order)}
    last = max(pos_of[v] for v in parents)
    topo = order[: last + 1] + [K] + order[last + 1 :]

    after = order[last + 1 :]
    child_coins = rng.random(len(after)) if after else np.empty(0)
    for v, c in zip(after, child_coins):
        if c < 0.5:
            edges_into[v].append(K)

    dag = Dag(
        num_vars=K,
        outcome_parents=tuple(parents),
        parent_lists=tuple(tuple(sorted(e)) for e in edges_into),
        topo_order=tuple(topo),
    )
    dag.validate()
    return dag


def _gen_cpds(dag: Dag, sizes, rng, key_seed: int) -> list:
    K = dag.num_vars
    cpds = []
    for v in range(K):
        parents = dag.parent_lists[v]
        parent_sizes = tuple(None if p == K else sizes[p] for p in parents)
        n_cfg = 1
        for s in parent_sizes:
            if s is None:
                n_cfg = None
                break
            n_cfg *= s
        if n_cfg is None or n_cfg > LAZY_TABLE_CAP:
            cpds.append(
                Cpd(
                    var=v,
                    parents=parents,
                    parent_sizes=parent_sizes,
                    size=sizes[v],
                    kind="lazy",
                    key_seed=key_seed,
                )
            )
            continue
        w = rng.beta(2.0, 5.0, size=(n_cfg, sizes[v]))
        table = w / w.sum(axis=1, keepdims=True)
        cpds.append(
            Cpd(
                var=v,
                parents=parents,
                parent_sizes=parent_sizes,
                size=sizes[v],
                kind="table",
                table=table,
            )
        )
    return cpds


def gen_scm(cfg: GenConfig, rng=None) -> Scm:
    """Draw a full model from cfg.

    Each ingredient (supports, graph, probability rows, reward tables,
    interaction indices) uses its own stream keyed off the seed, so changing
    one knob never reshuffles unrelated draws. Passing an rng replaces
    cfg.seed with a root drawn from it.
    """
    root = cfg.seed if rng is None else int(rng.integers(1 << 63))
    K = cfg.num_vars

    supports = spawn_rng(root, "supports").integers(
        cfg.support_lo, cfg.support_hi + 1, size=K
    )
    sizes = [int(s) for s in supports]
    variables = [VariableSpec(f"X{v + 1}", sizes[v]) for v in range(K)]

    dag = gen_dag(cfg, spawn_rng(root, "dag"))

    key_seed = stable_seed(root, "lazy")
    cpds = _gen_cpds(dag, sizes, spawn_rng(root, "cpd"), key_seed)

    f_rng = spawn_rng(root, "f")
    f = {
        k: cfg.reward_scale * f_rng.beta(2.0, 5.0, size=sizes[k])
        for k in dag.outcome_parents
    }
    outcome = OutcomeModel(
        parents=dag.outcome_parents,
        f=f,
        noise_kind=cfg.noise_kind,
        noise_sigma2=cfg.noise_sigma2,
        reward_bound=cfg.reward_scale,
        interaction=None,
    )

    meta = {"generator": dataclasses.asdict(cfg) | {"seed": root}}
    scm = Scm(variables, dag, cpds, outcome, meta).validate()
    if cfg.alpha > 0:
        scm = gen_misspecification(
            scm, cfg.alpha, spawn_rng(root, "mis"), m_max=cfg.support_hi
        )
    return scm


def gen_misspecification(scm: Scm, alpha: float, rng, m_max: Optional[int] = None) -> Scm:
    """Attach a multiplicative perturbation over random parent index groups.

    Groups of sizes 4, 3 and 2 are drawn from the outcome's parents: all nine
    indices distinct when there are at least nine parents, otherwise distinct
    within a group (with replacement only when a group is larger than the
    parent set). Needs at least two parents. alpha = 0 returns scm unchanged.
    """
    parents = np.array(scm.outcome.parents, dtype=np.int64)
    p_y = len(parents)
    if p_y < 2:
        raise ValueError("misspecification needs at least two outcome parents")
    if alpha == 0:
        return scm
    if m_max is None:
        m_max = scm.meta.get("generator", {}).get("support_hi") or max(scm.sizes)

    if p_y >= 9:
        pick = rng.choice(parents, size=9, replace=False)
        groups = (tuple(pick[:4]), tuple(pick[4:7]), tuple(pick[7:9]))
    else:
        groups = tuple(
            tuple(rng.choice(parents, size=s, replace=s > p_y)) for s in (4, 3, 2)
        )
    groups = tuple(tuple(int(v) for v in g) for g in groups)

    outcome = dataclasses.replace(
        scm.outcome,
        interaction=Interaction(alpha=float(alpha), groups=groups, m_max=int(m_max)),
    )
    new = dataclasses.replace(scm, outcome=outcome)
    return new.validate()

"""Discrete-parent structural causal models with a real-valued outcome.

A model holds K categorical variables X_0..X_{K-1} (values 1..M_k), a DAG over
the variables plus one outcome node Y, conditional probability tables for the
variables, and an additive outcome

    y = sum over parents k of f_k(x_k)  [+ optional interaction]  + noise.

Variables are indexed 0..K-1; the outcome node id is K. Values are 1-based
throughout (a variable with support size M takes values 1..M). Children of Y
condition on Y's value rounded half away from zero.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .seeding import stable_seed

ROW_TOL = 1e-12
ENUM_CAP = 1_000_000
LAZY_TABLE_CAP = 100_000

Intervention = dict  # variable index -> value in 1..M_k


def round_half_away(y):
    """Round scalar or array half away from zero (2.5 -> 3, -2.5 -> -3)."""
    y = np.asarray(y, dtype=float)
    out = np.where(y >= 0, np.floor(y + 0.5), np.ceil(y - 0.5))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class VariableSpec:
    """One categorical variable: display name and support size (>= 2)."""

    name: str
    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"support size must be >= 2, got {self.size}")


@dataclass(frozen=True)
class Dag:
    """Graph over variables 0..K-1 and the outcome node (id K).

    parent_lists[v] are v's parents in ascending id order (the outcome id K
    appears for children of Y). topo_order covers all K+1 nodes.
    """

    num_vars: int
    outcome_parents: tuple
    parent_lists: tuple
    topo_order: tuple

    def validate(self):
        K = self.num_vars
        if sorted(self.topo_order) != list(range(K + 1)):
            raise ValueError("topo_order must enumerate all variables plus the outcome")
        if not self.outcome_parents:
            raise ValueError("outcome must have at least one parent")
        if any(not (0 <= p < K) for p in self.outcome_parents):
            raise ValueError("outcome parents must be variable indices")
        if list(self.outcome_parents) != sorted(set(self.outcome_parents)):
            raise ValueError("outcome_parents must be sorted and unique")
        if len(self.parent_lists) != K:
            raise ValueError("need one parent list per variable")
        pos = {node: i for i, node in enumerate(self.topo_order)}
        for v, parents in enumerate(self.parent_lists):
            if list(parents) != sorted(set(parents)):
                raise ValueError(f"parent list of {v} must be sorted and unique")
            for p in parents:
                if pos[p] >= pos[v]:
                    raise ValueError(f"edge {p}->{v} violates topo_order")
        for p in self.outcome_parents:
            if pos[p] >= pos[K]:
                raise ValueError(f"edge {p}->Y violates topo_order")


@dataclass
class Cpd:
    """Conditional distribution of one variable given its parents.

    kind "table" stores one row per parent configuration, configurations
    enumerated in row-major order (first parent slowest). kind "lazy" draws
    rows on demand, keyed deterministically by (key_seed, configuration);
    it is required when Y is a parent (unbounded conditioning value) and
    used when a full table would be too large to materialize.
    """

    var: int
    parents: tuple
    parent_sizes: tuple  # support size per parent, None for the outcome node
    size: int
    kind: str
    table: Optional[np.ndarray] = None
    key_seed: Optional[int] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def validate(self):
        if self.kind not in ("table", "lazy"):
            raise ValueError(f"unknown cpd kind {self.kind!r}")
        if self.kind == "table":
            if self.table is None:
                raise ValueError("table cpd needs rows")
            n_cfg = 1
            for s in self.parent_sizes:
                n_cfg *= s
            if self.table.shape != (n_cfg, self.size):
                raise ValueError("cpd table shape mismatch")
            if np.any(self.table < 0):
                raise ValueError("cpd rows must be nonnegative")
            err = np.abs(self.table.sum(axis=1) - 1.0).max() if n_cfg else 0.0
            if err > ROW_TOL:
                raise ValueError(f"cpd rows must sum to 1 within {ROW_TOL}")
        else:
            if self.key_seed is None:
                raise ValueError("lazy cpd needs key_seed")

    def _strides(self):
        sizes = self.parent_sizes
        strides = [1] * len(sizes)
        for i in range(len(sizes) - 2, -1, -1):
            strides[i] = strides[i + 1] * sizes[i + 1]
        return strides

    def flat_index(self, values):
        """Row-major config index for one tuple of 1-based parent values."""
        idx = 0
        for v, s in zip(values, self._strides()):
            idx += (int(v) - 1) * s
        return idx

    def row(self, values) -> np.ndarray:
        """Distribution over 1..size given parent values (tuple of ints)."""
        if self.kind == "table":
            return self.table[self.flat_index(values)]
        key = tuple(int(v) for v in values)
        cached = self._cache.get(key)
        if cached is None:
            rng = np.random.default_rng(stable_seed(self.key_seed, self.var, key))
            w = rng.beta(2.0, 5.0, size=self.size)
            cached = w / w.sum()
            self._cache[key] = cached
        return cached

    def rows_for(self, columns) -> np.ndarray:
        """Rows for a batch of configs; columns is a list of (n,) value arrays."""
        if self.kind == "table":
            idx = np.zeros(len(columns[0]), dtype=np.int64) if columns else None
            if idx is None:
                return np.broadcast_to(self.table[0], (1, self.size))
            for col, s in zip(columns, self._strides()):
                idx += (np.asarray(col, dtype=np.int64) - 1) * s
            return self.table[idx]
        cfg = np.stack([np.asarray(c) for c in columns], axis=1).astype(np.int64)
        uniq, inverse = np.unique(cfg, axis=0, return_inverse=True)
        rows = np.empty((uniq.shape[0], self.size))
        for i, u in enumerate(uniq):
            rows[i] = self.row(tuple(u))
        return rows[inverse]


@dataclass
class Interaction:
    """Non-additive outcome perturbation over three parent index groups."""

    alpha: float
    groups: tuple  # three tuples of variable indices, sizes 4 / 3 / 2
    m_max: int

    @property
    def active(self) -> bool:
        return self.alpha != 0.0


@dataclass
class OutcomeModel:
    """Additive reward tables over the outcome's parents, plus noise."""

    parents: tuple
    f: dict  # variable index -> np.ndarray of length M_k, values in [0, reward_bound]
    noise_kind: str
    noise_sigma2: float
    reward_bound: float
    interaction: Optional[Interaction] = None

    def validate(self, sizes):
        if self.noise_kind not in ("gaussian", "uniform-bounded"):
            raise ValueError(f"unknown noise kind {self.noise_kind!r}")
        if self.noise_sigma2 < 0:
            raise ValueError("noise variance must be nonnegative")
        if set(self.f) != set(self.parents):
            raise ValueError("f must be defined exactly for the outcome parents")
        for k, vals in self.f.items():
            if len(vals) != sizes[k]:
                raise ValueError(f"f table of variable {k} has wrong length")
            if np.any(vals < 0) or np.any(vals > self.reward_bound):
                raise ValueError("f values must lie in [0, reward_bound]")
        if self.interaction is not None and self.interaction.active:
            g = self.interaction.groups
            if len(g) != 3 or tuple(len(t) for t in g) != (4, 3, 2):
                raise ValueError("interaction needs index groups of sizes 4, 3, 2")
            for grp in g:
                if any(v not in self.parents for v in grp):
                    raise ValueError("interaction indices must be outcome parents")

    def interaction_term(self, value_of):
        """Evaluate the interaction for one assignment (callable var -> value)."""
        ia = self.interaction
        if ia is None or not ia.active:
            return 0.0
        total = 0.0
        for grp in ia.groups:
            prod = 1.0
            for v in grp:
                prod = prod * value_of(v)
            total += prod
        return ia.alpha * self.reward_bound * float(ia.m_max) ** -4 * total


@dataclass
class Scm:
    """Variables + DAG + CPDs + outcome model, with generation metadata."""

    variables: list
    dag: Dag
    cpds: list
    outcome: OutcomeModel
    meta: dict = field(default_factory=dict)

    @property
    def num_vars(self) -> int:
        return self.dag.num_vars

    @property
    def sizes(self):
        return [v.size for v in self.variables]

    def validate(self):
        K = self.dag.num_vars
        if len(self.variables) != K or len(self.cpds) != K:
            raise ValueError("need one VariableSpec and one Cpd per variable")
        self.dag.validate()
        sizes = self.sizes
        for v, cpd in enumerate(self.cpds):
            if cpd.var != v or cpd.size != sizes[v]:
                raise ValueError(f"cpd {v} mismatched with variable spec")
            if tuple(cpd.parents) != tuple(self.dag.parent_lists[v]):
                raise ValueError(f"cpd {v} parents disagree with dag")
            expected_sizes = tuple(
                None if p == K else sizes[p] for p in cpd.parents
            )
            if tuple(cpd.parent_sizes) != expected_sizes:
                raise ValueError(f"cpd {v} parent sizes disagree with dag")
            if any(p == K for p in cpd.parents) and cpd.kind != "lazy":
                raise ValueError("children of the outcome need lazy cpds")
            cpd.validate()
        self.outcome.validate(sizes)
        if tuple(self.outcome.parents) != tuple(self.dag.outcome_parents):
            raise ValueError("outcome model parents disagree with dag")
        return self


def check_intervention(scm: Scm, iv: Intervention):
    sizes = scm.sizes
    for var, val in iv.items():
        if not (0 <= int(var) < scm.num_vars):
            raise ValueError(f"intervention on unknown variable {var}")
        if not (1 <= int(val) <= sizes[int(var)]):
            raise ValueError(
                f"value {val} outside support 1..{sizes[int(var)]} of variable {var}"
            )


def _noise(outcome: OutcomeModel, rng, n=None):
    s2 = outcome.noise_sigma2
    if s2 == 0:
        return 0.0 if n is None else np.zeros(n)
    if outcome.noise_kind == "gaussian":
        return rng.normal(0.0, math.sqrt(s2), size=n)
    half = math.sqrt(3.0 * s2)  # Var(U[-a,a]) = a^2/3
    return rng.uniform(-half, half, size=n)


def sample(scm: Scm, iv: Intervention, rng) -> tuple:
    """Draw one joint assignment and outcome under do(iv).

    Returns (assignment, y) where assignment maps every variable index to its
    value. Intervened variables are clamped; everything else follows its CPD
    in topological order. Children of Y condition on round_half_away(y).

    This is the scalar reference path; ScmEnv.draw is the batched equivalent.
    """
    check_intervention(scm, iv)
    K = scm.num_vars
    assignment: dict = {}
    y = None
    for node in scm.dag.topo_order:
        if node == K:
            val = 0.0
            for k in scm.outcome.parents:
                val += scm.outcome.f[k][assignment[k] - 1]
            val += scm.outcome.interaction_term(lambda v: assignment[v])
            y = val + float(_noise(scm.outcome, rng))
            continue
        if node in iv:
            assignment[node] = int(iv[node])
            continue
        cpd = scm.cpds[node]
        parent_vals = tuple(
            int(round_half_away(y)) if p == K else assignment[p] for p in cpd.parents
        )
        row = cpd.row(parent_vals)
        assignment[node] = int(rng.choice(cpd.size, p=row)) + 1
    return assignment, float(y)


def _mutilated_unassigned_ancestors(scm: Scm, assigned) -> list:
    """Unassigned variables that still feed Y once assigned vars are clamped.

    Returned in topological order. Clamping cuts incoming edges, so the walk
    from pa(Y) stops at assigned variables.
    """
    K = scm.num_vars
    seen = set()
    stack = [p for p in scm.outcome.parents if p not in assigned]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        for p in scm.dag.parent_lists[v]:
            if p == K:
                raise RuntimeError("outcome found among its own ancestors")
            if p not in assigned and p not in seen:
                stack.append(p)
    pos = {node: i for i, node in enumerate(scm.dag.topo_order)}
    return sorted(seen, key=lambda v: pos[v])


def _ancestral_columns(scm: Scm, free_topo, fixed_cols, n, rng):
    """Sample free variables given per-sample fixed columns; returns var -> (n,) array."""
    cols = dict(fixed_cols)
    for v in free_topo:
        cpd = scm.cpds[v]
        parent_cols = [cols[p] for p in cpd.parents]
        rows = cpd.rows_for(parent_cols) if cpd.parents else np.broadcast_to(
            cpd.row(()), (n, cpd.size)
        )
        cum = np.cumsum(rows, axis=1)
        u = rng.random(n)
        vals = (u[:, None] > cum).sum(axis=1) + 1
        cols[v] = np.minimum(vals, cpd.size).astype(np.int64)
    return cols


def interventional_mean(scm: Scm, iv: Intervention, budget: int = 200_000, rng=None):
    """Mean outcome under do(iv), with the standard error of the estimate.

    Exact (stderr 0) when iv covers all outcome parents, or when the joint
    configuration count of the unassigned ancestors of Y is small enough to
    enumerate (<= 1e6). Otherwise Monte Carlo with `budget` draws; the draws
    evaluate the conditional mean given sampled parents (outcome noise
    integrates to zero exactly), and the reported stderr reflects the
    remaining parent-configuration variance.
    """
    check_intervention(scm, iv)
    iv = {int(k): int(v) for k, v in iv.items()}
    out = scm.outcome
    free = _mutilated_unassigned_ancestors(scm, iv)
    if not free:
        total = sum(out.f[k][iv[k] - 1] for k in out.parents)
        total += out.interaction_term(lambda v: iv[v])
        return float(total), 0.0

    sizes = scm.sizes
    count = 1
    for v in free:
        count *= sizes[v]
        if count > ENUM_CAP:
            break

    if count <= ENUM_CAP:
        grids = np.indices([sizes[v] for v in free]).reshape(len(free), -1) + 1
        cols = {v: grids[i] for i, v in enumerate(free)}
        for v, val in iv.items():
            cols[v] = np.full(count, val, dtype=np.int64)
        prob = np.ones(count)
        for v in free:
            cpd = scm.cpds[v]
            if cpd.parents:
                rows = cpd.rows_for([cols[p] for p in cpd.parents])
            else:
                rows = np.broadcast_to(cpd.row(()), (count, cpd.size))
            prob = prob * rows[np.arange(count), cols[v] - 1]
        vals = np.zeros(count)
        for k in out.parents:
            vals += out.f[k][cols[k] - 1]
        if out.interaction is not None and out.interaction.active:
            vals += out.interaction_term(lambda v, c=cols: c[v].astype(float))
        return float(np.dot(prob, vals)), 0.0

    if rng is None:
        rng = np.random.default_rng(stable_seed("interventional-mean", budget))
    fixed = {v: np.full(budget, val, dtype=np.int64) for v, val in iv.items()}
    cols = _ancestral_columns(scm, free, fixed, budget, rng)
    vals = np.zeros(budget)
    for k in out.parents:
        vals += out.f[k][cols[k] - 1]
    if out.interaction is not None and out.interaction.active:
        vals += out.interaction_term(lambda v: cols[v].astype(float))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(budget))
    return mean, stderr


def best_global(scm: Scm) -> tuple:
    """Best global assignment of the additive model and its mean outcome.

    Returns (intervention, mean): per-variable argmax of f for parents (ties
    to the smallest value), value 1 for non-parents. Only defined for the
    purely additive model.
    """
    ia = scm.outcome.interaction
    if ia is not None and ia.active:
        raise ValueError("best_global requires a purely additive outcome (alpha = 0)")
    values = {k: 1 for k in range(scm.num_vars)}
    total = 0.0
    for k in scm.outcome.parents:
        f = scm.outcome.f[k]
        j = int(np.argmax(f))  # first max, i.e. smallest value on ties
        values[k] = j + 1
        total += float(f[j])
    return values, total


def epsilon_min(scm: Scm) -> float:
    """Smallest over parents of the largest within-variable f spread.

    Any tolerance at or below this value makes every parent statistically
    visible. Returns +inf when the outcome has no parents.
    """
    if not scm.outcome.parents:
        return math.inf
    spreads = [
        float(np.max(scm.outcome.f[k]) - np.min(scm.outcome.f[k]))
        for k in scm.outcome.parents
    ]
    return min(spreads)


class ScmEnv:
    """Batched sampling front-end used by the bandit algorithms.

    restrict(variables) returns a view that accepts an (n, len(variables))
    matrix of 1-based values per draw call and returns n outcome samples,
    leaving all other variables un-intervened.
    """

    def __init__(self, scm: Scm):
        self.scm = scm
        self.supports = scm.sizes

    def restrict(self, variables) -> "SubsetEnv":
        return SubsetEnv(self.scm, tuple(int(v) for v in variables))

    def draw(self, actions: np.ndarray, rng) -> np.ndarray:
        return self.restrict(range(self.scm.num_vars)).draw(actions, rng)


class SubsetEnv:
    """Sampler for interventions on a fixed variable subset."""

    def __init__(self, scm: Scm, variables: tuple):
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variables in intervention subset")
        self.scm = scm
        self.variables = variables
        self.supports = [scm.sizes[v] for v in variables]
        self._free = _mutilated_unassigned_ancestors(scm, set(variables))
        self._col_of = {v: i for i, v in enumerate(variables)}

    def draw(self, actions: np.ndarray, rng) -> np.ndarray:
        """n outcome draws for n row-wise value assignments of the subset."""
        actions = np.asarray(actions, dtype=np.int64)
        if actions.ndim != 2 or actions.shape[1] != len(self.variables):
            raise ValueError("actions must be (n, num_subset_variables)")
        n = actions.shape[0]
        out = self.scm.outcome
        fixed = {v: actions[:, i] for v, i in self._col_of.items()}
        cols = (
            _ancestral_columns(self.scm, self._free, fixed, n, rng)
            if self._free
            else fixed
        )
        y = np.zeros(n)
        for k in out.parents:
            y += out.f[k][cols[k] - 1]
        if out.interaction is not None and out.interaction.active:
            y += out.interaction_term(lambda v: cols[v].astype(float))
        return y + _noise(out, rng, n)


# ---------------------------------------------------------------------------
# JSON serialization. Floats survive exactly (repr round trip), so a model
# serialized and reloaded is bit-identical.

FORMAT_TAG = "acbug-scm-v1"


def to_dict(scm: Scm) -> dict:
    cpds = []
    for cpd in scm.cpds:
        entry = {"kind": cpd.kind, "parents": list(cpd.parents)}
        if cpd.kind == "table":
            entry["rows"] = cpd.table.tolist()
        else:
            entry["key_seed"] = cpd.key_seed
        cpds.append(entry)
    out = scm.outcome
    interaction = None
    if out.interaction is not None:
        interaction = {
            "alpha": out.interaction.alpha,
            "groups": [list(g) for g in out.interaction.groups],
            "m_max": out.interaction.m_max,
        }
    return {
        "format": FORMAT_TAG,
        "variables": [{"name": v.name, "size": v.size} for v in scm.variables],
        "dag": {
            "outcome_parents": list(scm.dag.outcome_parents),
            "parent_lists": [list(p) for p in scm.dag.parent_lists],
            "topo_order": list(scm.dag.topo_order),
        },
        "cpds": cpds,
        "outcome": {
            "parents": list(out.parents),
            "f": {str(k): out.f[k].tolist() for k in out.parents},
            "noise_kind": out.noise_kind,
            "noise_sigma2": out.noise_sigma2,
            "reward_bound": out.reward_bound,
            "interaction": interaction,
        },
        "meta": scm.meta,
    }


def from_dict(d: dict) -> Scm:
    if d.get("format") != FORMAT_TAG:
        raise ValueError(f"unknown model format {d.get('format')!r}")
    variables = [VariableSpec(v["name"], int(v["size"])) for v in d["variables"]]
    sizes = [v.size for v in variables]
    K = len(variables)
    dag = Dag(
        num_vars=K,
        outcome_parents=tuple(d["dag"]["outcome_parents"]),
        parent_lists=tuple(tuple(p) for p in d["dag"]["parent_lists"]),
        topo_order=tuple(d["dag"]["topo_order"]),
    )
    cpds = []
    for v, entry in enumerate(d["cpds"]):
        parents = tuple(entry["parents"])
        parent_sizes = tuple(None if p == K else sizes[p] for p in parents)
        if entry["kind"] == "table":
            cpds.append(
                Cpd(
                    var=v,
                    parents=parents,
                    parent_sizes=parent_sizes,
                    size=sizes[v],
                    kind="table",
                    table=np.array(entry["rows"], dtype=float).reshape(-1, sizes[v]),
                )
            )
        else:
            cpds.append(
                Cpd(
                    var=v,
                    parents=parents,
                    parent_sizes=parent_sizes,
                    size=sizes[v],
                    kind="lazy",
                    key_seed=int(entry["key_seed"]),
                )
            )
    o = d["outcome"]
    interaction = None
    if o.get("interaction") is not None:
        i = o["interaction"]
        interaction = Interaction(
            alpha=float(i["alpha"]),
            groups=tuple(tuple(g) for g in i["groups"]),
            m_max=int(i["m_max"]),
        )
    outcome = OutcomeModel(
        parents=tuple(o["parents"]),
        f={int(k): np.array(v, dtype=float) for k, v in o["f"].items()},
        noise_kind=o["noise_kind"],
        noise_sigma2=float(o["noise_sigma2"]),
        reward_bound=float(o["reward_bound"]),
        interaction=interaction,
    )
    return Scm(variables, dag, cpds, outcome, dict(d.get("meta", {}))).validate()


def to_json(scm: Scm) -> str:
    return json.dumps(to_dict(scm), indent=1, sort_keys=True)


def from_json(text: str) -> Scm:
    return from_dict(json.loads(text))


def save(scm: Scm, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(scm))
        fh.write("\n")


def load(path) -> Scm:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(fh.read())

"""One-hot embeddings, balanced marginal designs, and pooled least squares.

The estimation problem is deliberately rank-deficient: one-hot blocks sum to
the all-ones vector within each variable, so only within-variable differences
of coordinates are identifiable. Everything here works with differences and
uses the Moore-Penrose pseudoinverse with a fixed relative cutoff.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

CHUNK = 65536
REDRAWS = 16
REDRAWS_SMALL = 8
SWAP_BUDGET = 400
ESTIMABILITY_ATOL = 1e-8
PAIR_ENUM_CAP = 512


@dataclass(frozen=True)
class Embedding:
    supports: tuple
    offsets: tuple
    dim: int

    @classmethod
    def from_supports(cls, supports) -> "Embedding":
        supports = tuple(int(m) for m in supports)
        if any(m < 1 for m in supports):
            raise ValueError("support sizes must be positive")
        offsets = []
        acc = 0
        for m in supports:
            offsets.append(acc)
            acc += m
        return cls(supports=supports, offsets=tuple(offsets), dim=acc)

    def slice_of(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k] + self.supports[k])


def embed(x, emb: Embedding) -> np.ndarray:
    """Concatenated one-hot vector of a full assignment (1-based values)."""
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (len(emb.supports),):
        raise ValueError("assignment length must match the embedding")
    for k, (v, m) in enumerate(zip(x, emb.supports)):
        if not (1 <= v <= m):
            raise ValueError(f"value {v} outside support 1..{m} of variable {k}")
    out = np.zeros(emb.dim)
    out[np.array(emb.offsets) + x - 1] = 1.0
    return out


@dataclass(frozen=True)
class MarginalActionSet:
    """Per-variable surviving value sets; the action set is their product."""

    sets: tuple  # one ascending tuple of values per variable

    def __post_init__(self):
        for k, s in enumerate(self.sets):
            if len(s) == 0:
                raise ValueError(f"empty value set for variable {k}")
            if list(s) != sorted(set(s)):
                raise ValueError(f"value set of variable {k} must be sorted, unique")

    @classmethod
    def full(cls, supports) -> "MarginalActionSet":
        return cls(tuple(tuple(range(1, int(m) + 1)) for m in supports))

    @property
    def num_vars(self) -> int:
        return len(self.sets)

    @property
    def sizes(self):
        return [len(s) for s in self.sets]

    @property
    def total_size(self) -> int:
        return sum(len(s) for s in self.sets)

    def num_singletons(self) -> int:
        return sum(1 for s in self.sets if len(s) == 1)

    def all_singletons(self) -> bool:
        return all(len(s) == 1 for s in self.sets)


def design_counts(actions: np.ndarray, emb: Embedding) -> list:
    """Per-variable value-count arrays N_k[j-1] over a batch of assignments."""
    actions = np.asarray(actions, dtype=np.int64)
    return [
        np.bincount(actions[:, k] - 1, minlength=m)
        for k, m in enumerate(emb.supports)
    ]


def _balanced_columns(S: MarginalActionSet, n: int, rng) -> np.ndarray:
    cols = np.empty((n, S.num_vars), dtype=np.int64)
    for k, vals in enumerate(S.sets):
        vals = np.array(vals, dtype=np.int64)
        m = len(vals)
        cycles = -(-n // m)
        col = np.concatenate([rng.permutation(vals) for _ in range(cycles)])
        cols[:, k] = col[:n]
    return cols


def _proportional_remainder(S: MarginalActionSet, r: int, rng) -> np.ndarray:
    """r rows with balanced per-variable counts whose pairwise co-occurrence
    greedily tracks the proportional target; keeps the variance of estimated
    differences near the balanced-design ideal even for a short block."""
    sizes = S.sizes
    quotas = []
    for k, vals in enumerate(S.sets):
        m = sizes[k]
        q = np.full(m, r // m, dtype=np.int64)
        extra = r - q.sum()
        if extra:
            q[rng.permutation(m)[:extra]] += 1
        quotas.append(q)
    multi = [k for k in range(S.num_vars) if sizes[k] > 1]
    targets = {}
    running = {}
    for a in range(len(multi)):
        for b in range(a + 1, len(multi)):
            k, l = multi[a], multi[b]
            targets[(k, l)] = np.outer(quotas[k], quotas[l]) / float(r)
            running[(k, l)] = np.zeros((sizes[k], sizes[l]))

    cols = np.empty((r, S.num_vars), dtype=np.int64)
    for k in range(S.num_vars):
        if sizes[k] == 1:
            cols[:, k] = S.sets[k][0]
    remaining = [q.astype(float) for q in quotas]
    for t in range(r):
        frac = (t + 1) / r
        chosen = {}
        for k in rng.permutation(multi):
            k = int(k)
            scores = []
            for vi in range(sizes[k]):
                if remaining[k][vi] <= 0:
                    continue
                score = 0.0
                for l, wi in chosen.items():
                    if (k, l) in targets:
                        score += running[(k, l)][vi, wi] - targets[(k, l)][vi, wi] * frac
                    else:
                        score += running[(l, k)][wi, vi] - targets[(l, k)][wi, vi] * frac
                scores.append((score, vi))
            lo = min(s for s, _ in scores)
            ties = [vi for s, vi in scores if s < lo + 1e-12]
            vi = int(ties[rng.integers(len(ties))])
            remaining[k][vi] -= 1
            chosen[k] = vi
            cols[t, k] = S.sets[k][vi]
        for (k, l) in targets:
            running[(k, l)][chosen[k], chosen[l]] += 1.0
    return cols


def _product_size(S: MarginalActionSet, cap: int) -> int:
    """Product of set sizes, capped (returns cap + 1 once it exceeds cap)."""
    total = 1
    for m in S.sizes:
        total *= m
        if total > cap:
            return cap + 1
    return total


def design_sequence(S: MarginalActionSet, n: int, rng, emb: Optional[Embedding] = None) -> np.ndarray:
    """n assignments with per-variable counts balanced to within one and, for
    small action products, cross-variable co-occurrence close enough to
    proportional that every action pair's squared estimation norm stays
    within design_bound(S, n) whenever some legal design can meet it.

    When the product of the surviving sets has at most 512 actions, the
    sequence is built from full product sweeps (whose pairwise co-occurrence
    is exactly proportional) plus a short remainder block constructed to track
    proportional co-occurrence, then certified against the bound over every
    action pair, with swap-descent repair and redraws on failure. When the
    product divides n the factorial sweeps meet the bound by construction; at
    other n a certified design almost always exists and is found, but at some
    (S, n) integer rounding of co-occurrence cells makes the bound infeasible
    for every within-one-balanced design (exhaustive search at small shapes),
    and the best estimable design found is returned instead. Independent
    random columns leave co-occurrence uncontrolled, so for larger products
    the sequence is plain per-variable permutation cycling and only within-
    variable estimability is verified (redrawn on failure, up to 16 times).
    Selection never looks at outcomes, so fixed-design confidence analysis is
    unaffected.
    """
    if n < max(S.sizes):
        raise ValueError("need at least max |S_k| rounds for a balanced design")
    if emb is None:
        emb = Embedding.from_supports([max(s) for s in S.sets])
    offsets = np.array(emb.offsets, dtype=np.int64)

    prod = _product_size(S, PAIR_ENUM_CAP)
    if prod <= PAIR_ENUM_CAP and n > max(S.sizes):
        arms = product_assignments(S)
        q, r = divmod(n, prod)
        base = np.tile(arms, (q, 1))
        bound = design_bound(S, n)
        best_cols, best_norm, plateau = None, np.inf, 0
        for _ in range(REDRAWS_SMALL):
            cols = base
            if r:
                cols = np.vstack([base, _proportional_remainder(S, r, rng)])
            ok, Vp = _estimable_pinv(cols, S, emb, offsets)
            if not ok:
                continue
            w = _max_pair_norm(arms, Vp, offsets, emb.dim)
            if w > bound + 1e-9 and r:
                cols, w = _swap_descent(S, cols, q * prod, emb, offsets, arms,
                                        bound, rng)
                ok, _ = _estimable_pinv(cols, S, emb, offsets)
                if not ok:
                    continue
            if w <= bound + 1e-9:
                return cols[rng.permutation(n)]
            if w < best_norm - 1e-12:
                best_cols, best_norm, plateau = cols, w, 0
            else:
                plateau += 1
                if best_cols is not None and plateau >= 2:
                    break
        if best_cols is None:
            raise RuntimeError(
                f"no estimable balanced design after {REDRAWS_SMALL} draws "
                f"for sets {S.sets} at n={n}"
            )
        # At some (S, n) with uneven per-value counts no within-one-balanced
        # design can meet the bound (integer co-occurrence rounding); return
        # the best estimable design found rather than fail.
        return best_cols[rng.permutation(n)]

    for _ in range(REDRAWS):
        cols = _balanced_columns(S, n, rng)
        ok, _ = _estimable_pinv(cols, S, emb, offsets)
        if ok:
            return cols
    raise RuntimeError(
        f"no estimable balanced design after {REDRAWS} draws for sets "
        f"{S.sets} at n={n}"
    )


def _swap_descent(S, cols, n_fixed, emb, offsets, arms, bound, rng):
    """Greedy first-improvement descent on the worst pair norm: swap one
    variable's value between two mutable rows (rows past n_fixed), which
    preserves per-variable counts while reshaping cross-variable co-occurrence.
    Stops at the bound or when the move budget runs out."""
    cols = cols.copy()
    n = cols.shape[0]
    mutable = np.arange(n_fixed, n)
    multi = [k for k in range(S.num_vars)
             if len(S.sets[k]) > 1 and len(np.unique(cols[mutable, k])) > 1]
    V = _info_matrix(cols, emb, offsets)
    Vp = np.linalg.pinv(V, rcond=emb.dim * np.finfo(float).eps, hermitian=True)
    w = _max_pair_norm(arms, Vp, offsets, emb.dim)
    if not multi:
        return cols, w

    def row_embed(t):
        e = np.zeros(emb.dim)
        e[offsets + cols[t] - 1] = 1.0
        return e

    stall = 0
    for _ in range(SWAP_BUDGET):
        if w <= bound + 1e-9 or stall >= 100:
            break
        k = multi[rng.integers(len(multi))]
        i, j = rng.choice(mutable, size=2, replace=False)
        if cols[i, k] == cols[j, k]:
            stall += 1
            continue
        ei, ej = row_embed(i), row_embed(j)
        cols[i, k], cols[j, k] = cols[j, k], cols[i, k]
        ei2, ej2 = row_embed(i), row_embed(j)
        V2 = (V - np.outer(ei, ei) - np.outer(ej, ej)
              + np.outer(ei2, ei2) + np.outer(ej2, ej2))
        Vp2 = np.linalg.pinv(V2, rcond=emb.dim * np.finfo(float).eps,
                             hermitian=True)
        w2 = _max_pair_norm(arms, Vp2, offsets, emb.dim)
        # a swap that confounds variables shrinks pinv norms spuriously, so
        # an apparent improvement must also keep every difference estimable
        if w2 < w - 1e-15 and _estimable_pinv(cols, S, emb, offsets)[0]:
            V, Vp, w = V2, Vp2, w2
            stall = 0
        else:
            cols[i, k], cols[j, k] = cols[j, k], cols[i, k]
            stall += 1
    return cols, w


def _estimable_pinv(cols, S, emb, offsets):
    """(estimable?, pinv of the realized information matrix)."""
    V = _info_matrix(cols, emb, offsets)
    Vp = np.linalg.pinv(V, rcond=emb.dim * np.finfo(float).eps, hermitian=True)
    P = V @ Vp
    for k in range(S.num_vars):
        if len(S.sets[k]) == 1:
            continue
        base = offsets[k]
        idx = [base + v - 1 for v in S.sets[k]]
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                z = np.zeros(emb.dim)
                z[idx[a]] = 1.0
                z[idx[b]] = -1.0
                if np.max(np.abs(P @ z - z)) > ESTIMABILITY_ATOL:
                    return False, Vp
    return True, Vp


def _max_pair_norm(arms, Vp, offsets, dim) -> float:
    arms = np.asarray(arms, dtype=np.int64)
    E = np.zeros((arms.shape[0], dim))
    idx = offsets[None, :] + arms - 1
    E[np.arange(arms.shape[0])[:, None], idx] = 1.0
    G = E @ Vp @ E.T
    d = np.diag(G)
    norms = d[:, None] + d[None, :] - 2.0 * G
    return float(np.max(norms))


def _info_matrix(actions, emb, offsets) -> np.ndarray:
    d = emb.dim
    V = np.zeros((d, d))
    idx = offsets[None, :] + np.asarray(actions, dtype=np.int64) - 1
    for start in range(0, idx.shape[0], CHUNK):
        block = idx[start : start + CHUNK]
        X = np.zeros((block.shape[0], d))
        X[np.arange(block.shape[0])[:, None], block] = 1.0
        V += X.T @ X
    return V


def design_bound(S: MarginalActionSet, n: int) -> float:
    """Worst-case squared estimation norm of any action difference under a
    balanced design: sum over variables of 2|S_k| / (n - |S_k|)."""
    total = 0.0
    for k, s in enumerate(S.sets):
        if n <= len(s):
            raise ValueError(f"need n > |S_{k}| = {len(s)}, got n = {n}")
        total += 2.0 * len(s) / (n - len(s))
    return total


@dataclass
class OlsEstimate:
    theta_hat: np.ndarray
    covariance: np.ndarray  # pooled information matrix V_n
    n: int
    pinv_tol: float  # relative singular-value cutoff
    emb: Embedding


def ols(actions, ys, emb: Embedding) -> OlsEstimate:
    """Pooled least squares over one-hot embeddings.

    theta_hat = pinv(V_n) @ sum_t e(x_t) y_t with V_n = sum_t e(x_t)e(x_t)^T.
    Rank deficiency is expected; the cutoff is d * eps relative to the largest
    singular value, and theta_hat lands in the row space of V_n.
    """
    actions = np.asarray(actions, dtype=np.int64)
    ys = np.asarray(ys, dtype=float)
    if actions.ndim != 2 or actions.shape[0] != ys.shape[0] or ys.shape[0] < 1:
        raise ValueError("need equally many assignments and outcomes, at least one")
    offsets = np.array(emb.offsets, dtype=np.int64)
    d = emb.dim
    idx = offsets[None, :] + actions - 1
    V = np.zeros((d, d))
    b = np.zeros(d)
    for start in range(0, idx.shape[0], CHUNK):
        block = idx[start : start + CHUNK]
        X = np.zeros((block.shape[0], d))
        X[np.arange(block.shape[0])[:, None], block] = 1.0
        V += X.T @ X
        b += X.T @ ys[start : start + CHUNK]
    tol = d * np.finfo(float).eps
    theta = np.linalg.pinv(V, rcond=tol, hermitian=True) @ b
    return OlsEstimate(
        theta_hat=theta, covariance=V, n=actions.shape[0], pinv_tol=tol, emb=emb
    )


def gap_estimates(est: OlsEstimate, S: MarginalActionSet):
    """Estimated within-variable gaps over the surviving sets.

    Returns (pairwise, to_best): pairwise[k][a, b] is theta of the a-th minus
    the b-th surviving value of variable k; to_best[k][a] is the gap from the
    per-variable empirical best to the a-th value (zero at the argmax).
    """
    pairwise = []
    to_best = []
    for k, vals in enumerate(S.sets):
        idx = est.emb.offsets[k] + np.array(vals, dtype=np.int64) - 1
        th = est.theta_hat[idx]
        pairwise.append(th[:, None] - th[None, :])
        to_best.append(np.max(th) - th)
    return pairwise, to_best


def product_assignments(S: MarginalActionSet) -> np.ndarray:
    """Every assignment in the product of the surviving sets, one per row,
    lexicographic in the set order. Only sensible for small products."""
    sizes = S.sizes
    total = 1
    for m in sizes:
        total *= m
    grids = np.indices(sizes).reshape(len(sizes), -1)
    out = np.empty((total, len(sizes)), dtype=np.int64)
    for k, vals in enumerate(S.sets):
        out[:, k] = np.array(vals, dtype=np.int64)[grids[k]]
    return out


def worst_pair_design_norm(actions, S: MarginalActionSet, emb: Embedding) -> float:
    """Exhaustive max over pairs x, x' in the product of S of
    (e(x) - e(x'))^T pinv(V_n) (e(x) - e(x')) for the realized sequence."""
    offsets = np.array(emb.offsets, dtype=np.int64)
    V = _info_matrix(actions, emb, offsets)
    Vp = np.linalg.pinv(V, rcond=emb.dim * np.finfo(float).eps, hermitian=True)
    return _max_pair_norm(product_assignments(S), Vp, offsets, emb.dim)


def confidence_radius(S: MarginalActionSet, n: int, sigma2: float, delta: float) -> float:
    """High-probability bound on any action-pair gap error after n balanced
    rounds: sqrt(4 sigma^2 (sum_k |S_k| / n) ln(1/delta))."""
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    if n < 1:
        raise ValueError("need at least one round")
    return math.sqrt(4.0 * sigma2 * (S.total_size / n) * math.log(1.0 / delta))

"""End-to-end behavioral guarantees.

Each test checks one externally meaningful property of the shipped
algorithms at desk scale, with pre-committed seeds so reruns are exact.
"""
import math
import time

import numpy as np
import pytest

from acbug import (
    GenConfig,
    ModlParams,
    ParentsTestConfig,
    ScmEnv,
    epsilon_min,
    find_parents,
    gen_scm,
    interventional_mean,
    run_modl,
    run_p1,
    theoretical_complexity,
)
from acbug.design import (
    Embedding,
    MarginalActionSet,
    design_bound,
    design_sequence,
    gap_estimates,
    ols,
    worst_pair_design_norm,
)
from acbug.generate import gen_misspecification
from acbug.harness import (
    ExperimentConfig,
    aggregate,
    run_experiment,
)
from acbug.seeding import spawn_rng, stable_seed

from helpers import root_scm

EPS = 0.5
DELTA = 0.1


def summary_map(records):
    return {(r.sweep_value, r.algorithm): r for r in aggregate(records)}


# ---------------------------------------------------------------------------
# shared experiment batteries


@pytest.fixture(scope="module")
def pac_battery():
    cfg = ExperimentConfig(
        gen=GenConfig(num_vars=10, num_parents=5, support_lo=3, support_hi=6,
                      degree=3.0, noise_sigma2=1.0),
        sweep_param="num_parents",
        sweep_values=(5,),
        algorithms=("modl",),
        epsilon=EPS,
        delta=DELTA,
        num_scms=20,
        runs_per_scm=20,
        master_seed=stable_seed("acceptance", "pac"),
        schedule="final-epsilon",
    )
    t0 = time.perf_counter()
    res = run_experiment(cfg)
    return res, time.perf_counter() - t0


@pytest.fixture(scope="module")
def parent_sweep():
    cfg = ExperimentConfig(
        gen=GenConfig(num_vars=10, num_parents=5, support_lo=3, support_hi=6,
                      degree=3.0, noise_sigma2=1.0),
        sweep_param="num_parents",
        sweep_values=(2, 4, 6, 8, 10),
        algorithms=("modl", "p1", "oracle"),
        epsilon=EPS,
        delta=DELTA,
        num_scms=5,
        runs_per_scm=4,
        master_seed=stable_seed("acceptance", "ordering"),
        schedule="final-epsilon",
    )
    return cfg, run_experiment(cfg)


@pytest.fixture(scope="module")
def recovery_instances():
    """Instances whose reward spreads clear the test width, so the detection
    guarantee applies at eps = 0.5."""
    scms = []
    i = 0
    while len(scms) < 20:
        seed = stable_seed("acceptance", "recovery", i)
        i += 1
        scm = gen_scm(GenConfig(num_vars=5, num_parents=2, support_lo=3,
                                support_hi=4, noise_sigma2=1.0, seed=seed))
        if epsilon_min(scm) >= EPS:
            scms.append(scm)
    return scms


# ---------------------------------------------------------------------------
# criteria


def test_pac_guarantee(pac_battery):
    res, elapsed = pac_battery
    assert len(res.records) == 400
    failures = sum(1 for r in res.records if not r.success)
    rate = failures / len(res.records)
    assert rate <= 0.15, f"failure rate {rate:.3f} over 400 runs"
    assert elapsed < 300.0, f"battery took {elapsed:.1f}s"


def test_pipeline_sample_ordering(parent_sweep):
    cfg, res = parent_sweep
    rows = summary_map(res.records)
    for v in cfg.sweep_values:
        oracle = rows[(v, "oracle")].samples_mean
        modl = rows[(v, "modl")].samples_mean
        p1 = rows[(v, "p1")].samples_mean
        assert oracle <= modl <= p1, (
            f"P_Y={v}: oracle {oracle:.0f}, full {modl:.0f}, staged {p1:.0f}")
    gap = {alg: np.mean([r.true_gap for r in res.records
                         if r.algorithm == alg])
           for alg in ("modl", "p1", "oracle")}
    assert abs(gap["modl"] - gap["oracle"]) <= abs(gap["modl"] - gap["p1"])


def test_full_run_coincides_with_restricted_at_total_parentage(parent_sweep):
    cfg, res = parent_sweep
    pairs = {}
    for r in res.records:
        if r.sweep_value == 10 and r.algorithm in ("modl", "oracle"):
            pairs.setdefault((r.scm_idx, r.run_idx), {})[r.algorithm] = r
    assert len(pairs) == cfg.num_scms * cfg.runs_per_scm
    for (si, ri), d in pairs.items():
        assert d["modl"].samples == d["oracle"].samples, (si, ri)
        assert d["modl"].chosen == d["oracle"].chosen, (si, ri)


def test_samples_decrease_with_parent_count(parent_sweep):
    cfg, res = parent_sweep
    rows = summary_map(res.records)
    stats = [(rows[(v, "modl")].samples_mean, rows[(v, "modl")].samples_stderr)
             for v in cfg.sweep_values]
    inversions = []
    for (m_a, se_a), (m_b, se_b) in zip(stats, stats[1:]):
        if not m_b < m_a:
            inversions.append((m_b - m_a, math.hypot(se_a, se_b)))
    assert len(inversions) <= 1, f"means not decreasing: {stats}"
    for excess, se in inversions:
        assert excess <= se, f"inversion {excess:.1f} exceeds stderr {se:.1f}"


def test_product_space_elimination_blowup():
    cfg = ExperimentConfig(
        gen=GenConfig(num_vars=4, num_parents=2, support_lo=3, support_hi=3,
                      noise_sigma2=1.0),
        sweep_param="num_parents",
        sweep_values=(2,),
        algorithms=("modl", "se"),
        epsilon=EPS,
        delta=DELTA,
        num_scms=5,
        runs_per_scm=4,
        master_seed=stable_seed("acceptance", "blowup"),
        schedule="final-epsilon",
    )
    rows = summary_map(run_experiment(cfg).records)
    se_mean = rows[(2, "se")].samples_mean
    modl_mean = rows[(2, "modl")].samples_mean
    assert se_mean >= 20.0 * modl_mean, (
        f"flat elimination used {se_mean:.0f} vs {modl_mean:.0f} "
        f"({se_mean / modl_mean:.1f}x)")


def test_sample_ceiling_against_instance_bound():
    violations = []
    for i in range(10):
        scm = gen_scm(GenConfig(num_vars=4, num_parents=1 + i % 2,
                                support_lo=2, support_hi=4, noise_sigma2=1.0,
                                seed=stable_seed("acceptance", "ceiling", i)))
        env = ScmEnv(scm)
        free = ModlParams(epsilon=EPS, delta=DELTA, sigma2=1.0,
                          reward_bound=5.0, schedule="proof-consistent")
        known = ModlParams(epsilon=EPS, delta=DELTA, sigma2=1.0,
                           reward_bound=5.0,
                           parents_bound=len(scm.outcome.parents),
                           schedule="proof-consistent")
        h_free = theoretical_complexity(scm, free)
        h_known = theoretical_complexity(scm, known)
        for r in range(2):
            for tag, params, ceiling in (("free", free, h_free),
                                         ("known", known, h_known)):
                rng = spawn_rng("acceptance", "ceiling-run", i, r, tag)
                res = run_modl(env, scm.sizes, params, rng)
                if res.samples_used > 4.0 * ceiling:
                    violations.append(
                        (i, r, tag, res.samples_used / ceiling))
    assert not violations, f"runs above 4x bound: {violations}"


def test_design_pair_norm_bound_battery():
    rng = spawn_rng("acceptance", "design-bound")
    violations = []
    for _ in range(200):
        K = int(rng.integers(1, 4))
        sizes = tuple(int(m) for m in rng.integers(2, 4, size=K))
        S = MarginalActionSet.full(sizes)
        lcm = math.lcm(*sizes)
        n = lcm * int(rng.integers(1, 9))
        while n <= S.total_size:
            n += lcm
        emb = Embedding.from_supports(sizes)
        actions = design_sequence(S, n, rng, emb)
        worst = worst_pair_design_norm(actions, S, emb)
        bound = design_bound(S, n)
        if worst > bound + 1e-8:
            violations.append((sizes, n, worst, bound))
    assert not violations, f"pair-norm bound exceeded: {violations}"


def test_gap_estimates_unbiased_over_refits():
    sizes = [2, 3, 3]
    f = {0: [1.0, 2.5], 1: [0.5, 3.0, 1.0], 2: [2.0, 0.0, 1.5]}
    scm = root_scm(sizes, f, noise_sigma2=1.0)
    env = ScmEnv(scm)
    S = MarginalActionSet.full(sizes)
    emb = Embedding.from_supports(sizes)
    actions = design_sequence(S, 24, spawn_rng("acceptance", "refit-design"),
                              emb)
    rng = spawn_rng("acceptance", "refit-noise")
    draws = {}
    for _ in range(2000):
        est = ols(actions, env.draw(actions, rng), emb)
        pairwise, _ = gap_estimates(est, S)
        for k, table in enumerate(pairwise):
            m = len(S.sets[k])
            for a in range(m):
                for b in range(a + 1, m):
                    draws.setdefault((k, a, b), []).append(table[a, b])
    for (k, a, b), vals in draws.items():
        vals = np.asarray(vals)
        truth = f[k][a] - f[k][b]
        stderr = vals.std(ddof=1) / math.sqrt(len(vals))
        assert abs(vals.mean() - truth) <= 4.0 * stderr, (
            f"pair {(k, a, b)}: mean {vals.mean():.4f} truth {truth:.4f} "
            f"stderr {stderr:.4f}")


def test_parent_recovery_from_elimination_logs(recovery_instances):
    params = ModlParams(epsilon=EPS, delta=DELTA, sigma2=1.0,
                        reward_bound=5.0, schedule="proof-consistent")
    hits = total = 0
    for si, scm in enumerate(recovery_instances):
        env = ScmEnv(scm)
        true_parents = set(scm.outcome.parents)
        for r in range(20):
            rng = spawn_rng("acceptance", "recovery-run", si, r)
            res = run_modl(env, scm.sizes, params, rng)
            hits += int(res.recovered_parents == true_parents)
            total += 1
    assert total == 400
    assert hits / total >= 0.85, f"exact recovery in {hits}/{total} runs"


def test_parent_recovery_from_interval_test(recovery_instances):
    cfg = ParentsTestConfig(epsilon=EPS, delta=DELTA, sigma2=1.0)
    hits = total = 0
    for si, scm in enumerate(recovery_instances):
        env = ScmEnv(scm)
        true_parents = set(scm.outcome.parents)
        for r in range(20):
            rng = spawn_rng("acceptance", "interval-run", si, r)
            res = find_parents(env, scm.sizes, cfg, rng)
            hits += int(res.parents == true_parents)
            total += 1
    assert total == 400
    assert hits / total >= 0.85, f"exact recovery in {hits}/{total} runs"


def test_sample_cost_insensitive_to_graph_connectivity():
    cfg = ExperimentConfig(
        gen=GenConfig(num_vars=10, num_parents=5, support_lo=3, support_hi=6,
                      noise_sigma2=1.0),
        sweep_param="degree",
        sweep_values=(1.0, 2.0, 3.0, 4.0),
        algorithms=("modl",),
        epsilon=EPS,
        delta=DELTA,
        num_scms=5,
        runs_per_scm=4,
        master_seed=stable_seed("acceptance", "degree"),
        schedule="final-epsilon",
    )
    rows = summary_map(run_experiment(cfg).records)
    means = [rows[(v, "modl")].samples_mean for v in cfg.sweep_values]
    spread = (max(means) - min(means)) / np.mean(means)
    assert spread < 0.15, f"relative spread {spread:.3f} across {means}"


def test_interaction_strength_degrades_gap_in_order():
    """Paired instances across interaction weights: the full-variable runs
    lose optimality no faster than the staged pipeline."""
    alphas = (0.0, 0.5, 1.0)
    gaps = {(alg, a): [] for alg in ("modl", "p1") for a in alphas}
    for i in range(12):
        base = gen_scm(GenConfig(num_vars=6, num_parents=5, support_lo=3,
                                 support_hi=4, noise_sigma2=1.0,
                                 seed=stable_seed("acceptance", "mis", i)))
        for alpha in alphas:
            scm = (base if alpha == 0.0 else
                   gen_misspecification(
                       base, alpha, spawn_rng("acceptance", "mis-groups", i)))
            env = ScmEnv(scm)
            sizes = scm.sizes
            out = scm.outcome
            cols = np.indices(sizes).reshape(len(sizes), -1)
            vals = np.zeros(cols.shape[1])
            for k in out.parents:
                vals += out.f[k][cols[k]]
            if out.interaction is not None and out.interaction.active:
                vals += out.interaction_term(
                    lambda v: cols[v].astype(float) + 1.0)
            v_star = float(vals.max())
            params = ModlParams(epsilon=EPS, delta=DELTA, sigma2=1.0,
                                reward_bound=5.0, schedule="final-epsilon")
            ptc = ParentsTestConfig(epsilon=EPS, delta=DELTA, sigma2=1.0)
            for r in range(3):
                res = run_modl(env, sizes, params,
                               spawn_rng("acceptance", "mis-run", i, alpha,
                                         r, "modl"))
                iv = {k: int(v) for k, v in enumerate(res.chosen)}
                mean, stderr = interventional_mean(scm, iv)
                assert stderr == 0.0
                gaps[("modl", alpha)].append(v_star - mean)

                p1 = run_p1(env, sizes, params, ptc,
                            spawn_rng("acceptance", "mis-run", i, alpha,
                                      r, "p1"))
                mean, stderr = interventional_mean(scm, p1.intervention)
                assert stderr == 0.0
                gaps[("p1", alpha)].append(v_star - mean)

    def stats(alg, a):
        v = np.asarray(gaps[(alg, a)])
        return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))

    for alg in ("modl", "p1"):
        for a_lo, a_hi in zip(alphas, alphas[1:]):
            lo, se_lo = stats(alg, a_lo)
            hi, se_hi = stats(alg, a_hi)
            assert hi >= lo - math.hypot(se_lo, se_hi), (
                f"{alg} gap fell from {lo:.3f} at {a_lo} to {hi:.3f} at {a_hi}")

    m0, se_m0 = stats("modl", 0.0)
    p0, se_p0 = stats("p1", 0.0)
    for a in alphas[1:]:
        ma, se_ma = stats("modl", a)
        pa, se_pa = stats("p1", a)
        modl_rise = ma - m0
        p1_rise = pa - p0
        slack = math.hypot(math.hypot(se_ma, se_m0),
                           math.hypot(se_pa, se_p0))
        assert p1_rise >= modl_rise - slack, (
            f"alpha={a}: staged pipeline degraded by {p1_rise:.3f}, "
            f"full run by {modl_rise:.3f}")

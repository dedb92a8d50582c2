import math

import numpy as np
import pytest

from acbug import (
    ArmCapExceeded,
    ModlParams,
    ParentsTestConfig,
    ScmEnv,
    best_global,
    find_parents,
    parents_test_n,
    run_modl,
    run_oracle,
    run_p1,
    run_se,
)
from acbug.baselines import product_arms

from helpers import root_scm


def modl_params(**kw):
    base = dict(epsilon=0.5, delta=0.1, sigma2=1.0, reward_bound=5.0)
    base.update(kw)
    return ModlParams(**base)


def test_parents_test_n_worked_value():
    assert parents_test_n(1.0, 0.5, 10, 4, 0.1) == 214


def test_parents_test_n_floor_at_one():
    assert parents_test_n(0.0, 0.5, 10, 4, 0.1) == 1


def test_parents_test_config_validation():
    with pytest.raises(ValueError):
        ParentsTestConfig(epsilon=0.0, delta=0.1, sigma2=1.0)
    with pytest.raises(ValueError):
        ParentsTestConfig(epsilon=0.5, delta=1.0, sigma2=1.0)
    with pytest.raises(ValueError):
        ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=-1.0)


def test_find_parents_noiseless_exact():
    """Spreads of 2 against a 0.5 test width: parents pop, others never do."""
    sizes = [2, 3, 2, 2]
    scm = root_scm(sizes, {1: [0.0, 2.0, 1.0], 3: [2.0, 0.0]})
    cfg = ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=0.0)
    for seed in range(20):
        res = find_parents(ScmEnv(scm), sizes, cfg,
                           np.random.default_rng(seed))
        assert res.parents == {1, 3}
        assert sum(n for _, _, n in res.draws) == res.samples_used
        per_var = {}
        for k, j, n in res.draws:
            assert n == 1
            per_var.setdefault(k, []).append(j)
        # a parent with a detectable second value stops after two draws
        assert per_var[3] == [1, 2]
        for k in (0, 2):
            assert per_var[k] == list(range(1, sizes[k] + 1))


def test_find_parents_respects_budget_and_scan_order_varies():
    sizes = [2, 2, 2]
    scm = root_scm(sizes, {0: [2.0, 0.0], 1: [0.0, 2.0]})
    cfg = ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=0.0,
                            parents_bound=1)
    seen = set()
    for seed in range(40):
        res = find_parents(ScmEnv(scm), sizes, cfg,
                           np.random.default_rng(seed))
        assert len(res.parents) == 1
        seen |= res.parents
    assert seen == {0, 1}


def test_find_parents_baseline_assignment_matters():
    """Detection compares values while everything else sits at x0, so a
    variable whose effect is already at its x0 level still shows spread."""
    sizes = [3, 2]
    scm = root_scm(sizes, {0: [1.0, 1.0, 3.0]})
    cfg = ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=0.0, x0=(2, 2))
    res = find_parents(ScmEnv(scm), sizes, cfg, np.random.default_rng(0))
    assert res.parents == {0}


def test_find_parents_x0_validation():
    sizes = [2, 2]
    scm = root_scm(sizes, {0: [1.0, 0.0]})
    env = ScmEnv(scm)
    bad_len = ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=0.0, x0=(1,))
    with pytest.raises(ValueError):
        find_parents(env, sizes, bad_len, np.random.default_rng(0))
    bad_val = ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=0.0, x0=(1, 3))
    with pytest.raises(ValueError):
        find_parents(env, sizes, bad_val, np.random.default_rng(0))


def test_run_p1_flat_outcome_returns_observational_arm():
    sizes = [2, 3]
    scm = root_scm(sizes, {0: [1.0, 1.0]})
    cfg = ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=0.0)
    res = run_p1(ScmEnv(scm), sizes, modl_params(sigma2=0.0), cfg,
                 np.random.default_rng(0))
    assert res.intervention == {}
    assert res.parents == set()
    assert res.modl is None
    assert res.samples_used == res.stage1_samples == sum(sizes)


def test_run_p1_noiseless_end_to_end():
    sizes = [2, 3, 2]
    scm = root_scm(sizes, {0: [0.0, 2.0], 2: [3.0, 1.0]})
    cfg = ParentsTestConfig(epsilon=0.5, delta=0.1, sigma2=0.0)
    res = run_p1(ScmEnv(scm), sizes, modl_params(), cfg,
                 np.random.default_rng(3))
    assert res.parents == {0, 2}
    assert res.intervention == {0: 2, 2: 1}
    assert res.modl is not None
    assert res.samples_used == res.stage1_samples + res.modl.samples_used


def test_oracle_on_all_variables_coincides_with_unrestricted_run():
    sizes = [2, 3, 2]
    scm = root_scm(sizes, {0: [1.0, 0.0], 1: [0.0, 0.5, 2.0], 2: [0.0, 1.0]},
                   noise_sigma2=1.0)
    env = ScmEnv(scm)
    p = modl_params()
    for seed in range(5):
        a = run_oracle(env, sizes, (2, 0, 1), p, np.random.default_rng(seed))
        b = run_modl(env, sizes, p, np.random.default_rng(seed))
        assert a.samples_used == b.samples_used
        assert a.intervention == {k: int(v) for k, v in enumerate(b.chosen)}


def test_product_arms_lexicographic():
    got = product_arms([2, 3])
    want = [[1, 1], [1, 2], [1, 3], [2, 1], [2, 2], [2, 3]]
    assert np.array_equal(got, want)


def test_run_se_noiseless_single_pass():
    sizes = [2, 3]
    scm = root_scm(sizes, {0: [0.0, 1.0], 1: [0.0, 2.0, 1.0]})
    for seed in range(20):
        res = run_se(ScmEnv(scm), sizes, 0.5, 0.1, 0.0,
                     np.random.default_rng(seed))
        assert res.passes == 1
        assert res.samples_used == 6
        assert list(res.chosen) == [2, 2]


def test_run_se_flat_rewards_tie_to_smallest_arm():
    sizes = [2, 2]
    scm = root_scm(sizes, {0: [1.0, 1.0]})
    res = run_se(ScmEnv(scm), sizes, 0.5, 0.1, 0.0, np.random.default_rng(0))
    assert list(res.chosen) == [1, 1]
    assert res.passes == 1


def test_run_se_two_arms_big_gap():
    sizes = [2]
    scm = root_scm(sizes, {0: [5.0, 0.0]}, noise_sigma2=1e-4)
    for seed in range(200):
        res = run_se(ScmEnv(scm), sizes, 0.5, 0.1, 1e-4,
                     np.random.default_rng(seed))
        assert res.samples_used == 2
        assert res.passes == 1
        assert list(res.chosen) == [1]


def test_run_se_single_arm_stub_env():
    class Stub:
        def draw(self, actions, rng):
            return np.zeros(len(actions))

    res = run_se(Stub(), [1], 0.5, 0.1, 1.0, np.random.default_rng(0))
    assert res.samples_used == 1
    assert res.passes == 1
    assert list(res.chosen) == [1]


def test_run_se_never_drops_the_best_arm():
    """Exact means with a positive assumed variance: elimination can only
    remove strictly worse arms, so the final pick is the true optimum."""
    rng = np.random.default_rng(10)
    for _ in range(10):
        sizes = [int(m) for m in rng.integers(2, 4, size=2)]
        f = {k: rng.uniform(0.0, 5.0, size=sizes[k]).tolist()
             for k in range(2)}
        scm = root_scm(sizes, f)
        res = run_se(ScmEnv(scm), sizes, 0.5, 0.1, 1.0,
                     np.random.default_rng(int(rng.integers(1 << 31))))
        x_star, _ = best_global(scm)
        assert list(res.chosen) == [x_star[0], x_star[1]]


def test_run_se_arm_cap():
    class Boom:
        def draw(self, actions, rng):  # pragma: no cover
            raise AssertionError("cap must trip before any draw")

    with pytest.raises(ArmCapExceeded):
        run_se(Boom(), [10, 10], 0.5, 0.1, 1.0, np.random.default_rng(0),
               arm_cap=99)
    # a product exactly at the cap still runs
    sizes = [2, 2]
    scm = root_scm(sizes, {0: [1.0, 0.0]})
    res = run_se(ScmEnv(scm), sizes, 0.5, 0.1, 0.0, np.random.default_rng(0),
                 arm_cap=4)
    assert res.samples_used == 4


def test_se_radius_schedule_matches_formula():
    """With unit variance the pass count is the first t where the width
    drops under epsilon (no arm separation to end it sooner)."""
    sizes = [2]
    scm = root_scm(sizes, {0: [1.0, 1.0]})
    eps, delta = 0.5, 0.1
    res = run_se(ScmEnv(scm), sizes, eps, delta, 1.0,
                 np.random.default_rng(0))
    t = res.passes
    r = math.sqrt(2.0 * math.log(4.0 * 2 * t * t / delta) / t)
    assert 2.0 * r <= eps
    r_prev = math.sqrt(2.0 * math.log(4.0 * 2 * (t - 1) ** 2 / delta) / (t - 1))
    assert 2.0 * r_prev > eps

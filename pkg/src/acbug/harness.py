"""Experiment harness: seeded sweeps over generated models, per-run records,
and CSV aggregation.

Every run's stream is derived by hashing (master_seed, sweep_value, scm_idx,
run_idx, stream-name), so results never depend on execution order or worker
count, and adding an algorithm to a config leaves the other algorithms'
records untouched. The phased-elimination family (modl, modl_known_py,
oracle) shares one stream name so runs coincide exactly when their variable
sets do.
"""
from __future__ import annotations

import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .baselines import (
    ArmCapExceeded,
    ParentsTestConfig,
    run_p1,
    run_restricted,
    run_se,
)
from .elimination import SCHEDULES, ModlParams, run_modl
from .generate import GenConfig, gen_scm
from .scm import Scm, ScmEnv, best_global, interventional_mean, save as save_scm
from .seeding import spawn_rng, stable_seed

ALGORITHMS = ("modl", "modl_known_py", "p1", "oracle", "se")
SWEEP_PARAMS = ("num_parents", "support_lo", "degree", "alpha", "num_vars")
STREAM = {
    "modl": "modl",
    "modl_known_py": "modl",
    "oracle": "modl",
    "p1": "p1",
    "se": "se",
}

RECORDS_COLUMNS = (
    "sweep_param",
    "sweep_value",
    "scm_idx",
    "run_idx",
    "algorithm",
    "samples",
    "true_gap",
    "success",
    "pa_precision",
    "pa_recall",
    "wall_ms",
)
SUMMARY_COLUMNS = (
    "sweep_param",
    "sweep_value",
    "algorithm",
    "count",
    "samples_mean",
    "samples_stderr",
    "true_gap_mean",
    "true_gap_stderr",
    "failure_rate",
    "pa_precision_mean",
    "pa_recall_mean",
)


@dataclass(frozen=True)
class ExperimentConfig:
    gen: GenConfig
    sweep_param: str
    sweep_values: tuple
    algorithms: tuple
    epsilon: float
    delta: float
    num_scms: int
    runs_per_scm: int
    master_seed: int = 0
    arm_cap: int = 100_000
    schedule: str = "proof-consistent"
    x0: Optional[tuple] = None
    mc_budget: int = 200_000
    best_enum_cap: int = 1 << 27

    def __post_init__(self):
        if self.sweep_param not in SWEEP_PARAMS:
            raise ValueError(f"sweep_param must be one of {SWEEP_PARAMS}")
        if not self.sweep_values:
            raise ValueError("need at least one sweep value")
        if not self.algorithms:
            raise ValueError("need at least one algorithm")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("duplicate algorithm")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.num_scms < 1 or self.runs_per_scm < 1:
            raise ValueError("num_scms and runs_per_scm must be >= 1")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        for v in self.sweep_values:
            gen_for(self, v)  # validates value against the template


def gen_for(cfg: ExperimentConfig, sweep_value) -> GenConfig:
    """Generator config at one sweep point.

    support_lo sweeps shift both bounds, preserving the template's width;
    the other parameters replace their field directly.
    """
    if cfg.sweep_param == "support_lo":
        width = cfg.gen.support_hi - cfg.gen.support_lo
        return dataclasses.replace(
            cfg.gen, support_lo=sweep_value, support_hi=sweep_value + width
        )
    return dataclasses.replace(cfg.gen, **{cfg.sweep_param: sweep_value})


def experiment_config_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    gen_d = d.pop("gen", None)
    if gen_d is None:
        raise ValueError("config needs a 'gen' block")
    known_gen = {f.name for f in dataclasses.fields(GenConfig)}
    bad = set(gen_d) - known_gen
    if bad:
        raise ValueError(f"unknown gen fields: {sorted(bad)}")
    gen = GenConfig(**gen_d)
    sweep = d.pop("sweep", None)
    if not isinstance(sweep, dict) or "param" not in sweep or "values" not in sweep:
        raise ValueError("config needs sweep: {param, values}")
    kwargs = {
        "gen": gen,
        "sweep_param": sweep["param"],
        "sweep_values": tuple(sweep["values"]),
        "algorithms": tuple(d.pop("algorithms", ())),
        "epsilon": d.pop("epsilon", None),
        "delta": d.pop("delta", None),
        "num_scms": d.pop("num_scms", None),
        "runs_per_scm": d.pop("runs_per_scm", None),
    }
    for field in ("master_seed", "arm_cap", "schedule", "mc_budget", "best_enum_cap"):
        if field in d:
            kwargs[field] = d.pop(field)
    if "x0" in d:
        x0 = d.pop("x0")
        kwargs["x0"] = tuple(x0) if x0 is not None else None
    if d:
        raise ValueError(f"unknown config fields: {sorted(d)}")
    missing = [k for k, v in kwargs.items() if v is None and k != "x0"]
    if missing:
        raise ValueError(f"missing config fields: {missing}")
    return ExperimentConfig(**kwargs)


@dataclass
class RunRecord:
    sweep_param: str
    sweep_value: object
    scm_idx: int
    run_idx: int
    algorithm: str
    samples: int
    true_gap: float
    success: bool
    pa_precision: Optional[float]
    pa_recall: Optional[float]
    wall_ms: float
    chosen: dict  # the returned intervention; not serialized to CSV


@dataclass
class ExperimentResult:
    records: list
    phases: dict  # (sweep_value, scm_idx, run_idx, algorithm) -> phase log list
    skipped: int = 0


def _best_value(scm: Scm, cap: int) -> float:
    """Highest achievable interventional mean, exhaustively for non-additive
    outcomes (interventional means never exceed the best global mean)."""
    ia = scm.outcome.interaction
    if ia is None or not ia.active:
        return best_global(scm)[1]
    sizes = scm.sizes
    total = 1
    for m in sizes:
        total *= m
    if total > cap:
        raise ValueError(
            f"non-additive best value needs {total} evaluations, above cap {cap}"
        )
    out = scm.outcome
    best = -math.inf
    chunk = 1 << 20
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        cols = np.unravel_index(np.arange(start, stop), sizes)
        vals = np.zeros(stop - start)
        for k in out.parents:
            vals += out.f[k][cols[k]]
        vals += out.interaction_term(lambda v: cols[v].astype(float) + 1.0)
        best = max(best, float(vals.max()))
    return best


def _evaluate_gap(scm: Scm, intervention: dict, v_star: float, budget: int, rng) -> float:
    mean, stderr = interventional_mean(scm, intervention, budget=budget, rng=rng)
    gap = v_star - mean
    if stderr > 0:
        # the true mean never exceeds v_star; clip pure estimation noise
        gap = max(gap, 0.0)
    return gap


def _pa_metrics(found: set, true_parents: set):
    if not found:
        return 1.0, 0.0
    hit = len(found & true_parents)
    return hit / len(found), hit / len(true_parents)


def _execute_one(cfg: ExperimentConfig, scm: Scm, env: ScmEnv, v_star: float,
                 sweep_value, scm_idx: int, run_idx: int, algorithm: str):
    K = scm.num_vars
    supports = scm.sizes
    true_parents = set(scm.outcome.parents)
    seed = stable_seed(cfg.master_seed, sweep_value, scm_idx, run_idx, STREAM[algorithm])
    rng = np.random.default_rng(seed)
    params = ModlParams(
        epsilon=cfg.epsilon,
        delta=cfg.delta,
        sigma2=scm.outcome.noise_sigma2,
        reward_bound=scm.outcome.reward_bound,
        parents_bound=len(true_parents) if algorithm == "modl_known_py" else None,
        schedule=cfg.schedule,
    )
    phases = None
    pa = (None, None)

    t0 = time.perf_counter()
    if algorithm in ("modl", "modl_known_py"):
        res = run_modl(env.restrict(range(K)), supports, params, rng)
        intervention = {k: int(v) for k, v in enumerate(res.chosen)}
        samples = res.samples_used
        phases = res.phase_logs
        pa = _pa_metrics(res.recovered_parents, true_parents)
    elif algorithm == "oracle":
        res = run_restricted(env, supports, true_parents, params, rng)
        intervention = res.intervention
        samples = res.samples_used
        phases = res.modl.phase_logs
    elif algorithm == "p1":
        ptc = ParentsTestConfig(
            epsilon=cfg.epsilon, delta=cfg.delta,
            sigma2=scm.outcome.noise_sigma2, x0=cfg.x0,
        )
        res = run_p1(env, supports, params, ptc, rng)
        intervention = res.intervention
        samples = res.samples_used
        phases = res.modl.phase_logs if res.modl is not None else []
        pa = _pa_metrics(res.parents, true_parents)
    elif algorithm == "se":
        res = run_se(
            env, supports, cfg.epsilon, cfg.delta,
            scm.outcome.noise_sigma2, rng, arm_cap=cfg.arm_cap,
        )
        intervention = {k: int(v) for k, v in enumerate(res.chosen)}
        samples = res.samples_used
    else:  # pragma: no cover
        raise ValueError(algorithm)
    wall_ms = (time.perf_counter() - t0) * 1000.0

    eval_rng = spawn_rng(cfg.master_seed, "eval", sweep_value, scm_idx, run_idx, algorithm)
    gap = _evaluate_gap(scm, intervention, v_star, cfg.mc_budget, eval_rng)
    record = RunRecord(
        sweep_param=cfg.sweep_param,
        sweep_value=sweep_value,
        scm_idx=scm_idx,
        run_idx=run_idx,
        algorithm=algorithm,
        samples=samples,
        true_gap=gap,
        success=gap <= cfg.epsilon,
        pa_precision=pa[0],
        pa_recall=pa[1],
        wall_ms=wall_ms,
        chosen=intervention,
    )
    return record, phases


def scm_for(cfg: ExperimentConfig, sweep_value, scm_idx: int) -> Scm:
    seed = stable_seed(cfg.master_seed, "scm", sweep_value, scm_idx)
    gen = dataclasses.replace(gen_for(cfg, sweep_value), seed=seed)
    return gen_scm(gen)


def _run_task(args):
    """One (sweep_value, scm_idx) cell: regenerate the model and run every
    configured algorithm for every run index. Worker-safe."""
    cfg, sweep_value, scm_idx, collect_phases = args
    scm = scm_for(cfg, sweep_value, scm_idx)
    env = ScmEnv(scm)
    v_star = _best_value(scm, cfg.best_enum_cap)
    records = []
    phases = {}
    skipped = 0
    for run_idx in range(cfg.runs_per_scm):
        for algorithm in cfg.algorithms:
            try:
                record, logs = _execute_one(
                    cfg, scm, env, v_star, sweep_value, scm_idx, run_idx, algorithm
                )
            except ArmCapExceeded:
                skipped += 1
                continue
            records.append(record)
            if collect_phases and logs is not None:
                phases[(sweep_value, scm_idx, run_idx, algorithm)] = logs
    return records, phases, skipped


def run_experiment(cfg: ExperimentConfig, jobs: int = 1,
                   collect_phases: bool = False) -> ExperimentResult:
    """Execute the sweep. Output is identical for any jobs >= 1."""
    tasks = [
        (cfg, sweep_value, scm_idx, collect_phases)
        for sweep_value in cfg.sweep_values
        for scm_idx in range(cfg.num_scms)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_task, tasks))
    else:
        outputs = [_run_task(t) for t in tasks]

    records: list = []
    phases: dict = {}
    skipped = 0
    for recs, ph, sk in outputs:
        records.extend(recs)
        phases.update(ph)
        skipped += sk
    value_order = {v: i for i, v in enumerate(cfg.sweep_values)}
    alg_order = {a: i for i, a in enumerate(cfg.algorithms)}
    records.sort(
        key=lambda r: (
            value_order[r.sweep_value],
            r.scm_idx,
            r.run_idx,
            alg_order[r.algorithm],
        )
    )
    return ExperimentResult(records=records, phases=phases, skipped=skipped)


@dataclass
class SummaryRow:
    sweep_param: str
    sweep_value: object
    algorithm: str
    count: int
    samples_mean: float
    samples_stderr: float
    true_gap_mean: float
    true_gap_stderr: float
    failure_rate: float
    pa_precision_mean: Optional[float]
    pa_recall_mean: Optional[float]


def _mean_stderr(values):
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def aggregate(records) -> list:
    """Group records by (sweep_value, algorithm), in first-appearance order."""
    if not records:
        raise ValueError("nothing to aggregate")
    groups: dict = {}
    for r in records:
        groups.setdefault((r.sweep_value, r.algorithm), []).append(r)
    rows = []
    for (sweep_value, algorithm), recs in groups.items():
        samples_mean, samples_stderr = _mean_stderr([r.samples for r in recs])
        gap_mean, gap_stderr = _mean_stderr([r.true_gap for r in recs])
        failure = sum(1 for r in recs if not r.success) / len(recs)
        prec = [r.pa_precision for r in recs if r.pa_precision is not None]
        rec = [r.pa_recall for r in recs if r.pa_recall is not None]
        rows.append(
            SummaryRow(
                sweep_param=recs[0].sweep_param,
                sweep_value=sweep_value,
                algorithm=algorithm,
                count=len(recs),
                samples_mean=samples_mean,
                samples_stderr=samples_stderr,
                true_gap_mean=gap_mean,
                true_gap_stderr=gap_stderr,
                failure_rate=failure,
                pa_precision_mean=float(np.mean(prec)) if prec else None,
                pa_recall_mean=float(np.mean(rec)) if rec else None,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# CSV formatting: 9 significant digits, empty string for missing values.


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return "%.9g" % value
    return str(value)


def records_to_csv(records) -> str:
    lines = [",".join(RECORDS_COLUMNS)]
    for r in records:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.sweep_param,
                    r.sweep_value,
                    r.scm_idx,
                    r.run_idx,
                    r.algorithm,
                    r.samples,
                    r.true_gap,
                    r.success,
                    r.pa_precision,
                    r.pa_recall,
                    r.wall_ms,
                )
            )
        )
    return "\n".join(lines) + "\n"


def summary_to_csv(rows) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for r in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.sweep_param,
                    r.sweep_value,
                    r.algorithm,
                    r.count,
                    r.samples_mean,
                    r.samples_stderr,
                    r.true_gap_mean,
                    r.true_gap_stderr,
                    r.failure_rate,
                    r.pa_precision_mean,
                    r.pa_recall_mean,
                )
            )
        )
    return "\n".join(lines) + "\n"


def run_to_directory(cfg: ExperimentConfig, outdir, jobs: int = 1,
                     dump_phases: bool = False) -> ExperimentResult:
    """Run the sweep and write records.csv, summary.csv, the generated model
    documents, and (optionally) per-run phase logs under outdir."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    result = run_experiment(cfg, jobs=jobs, collect_phases=dump_phases)
    (outdir / "records.csv").write_text(records_to_csv(result.records))
    summary = aggregate(result.records) if result.records else []
    (outdir / "summary.csv").write_text(summary_to_csv(summary))
    scm_dir = outdir / "scms"
    scm_dir.mkdir(exist_ok=True)
    for i, sweep_value in enumerate(cfg.sweep_values):
        for scm_idx in range(cfg.num_scms):
            scm = scm_for(cfg, sweep_value, scm_idx)
            save_scm(scm, scm_dir / f"sweep{i}_scm{scm_idx}.json")
    if dump_phases:
        phase_dir = outdir / "phases"
        phase_dir.mkdir(exist_ok=True)
        for (sweep_value, scm_idx, run_idx, algorithm), logs in result.phases.items():
            i = cfg.sweep_values.index(sweep_value)
            name = f"sweep{i}_scm{scm_idx}_run{run_idx}_{algorithm}.json"
            payload = [log.to_jsonable() for log in logs]
            (phase_dir / name).write_text(json.dumps(payload, indent=1))
    return result

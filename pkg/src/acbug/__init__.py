"""Additive causal bandits: best-intervention search without knowing the graph.

The package is organized around a small pipeline:

- :mod:`acbug.scm`: structural causal models over finite supports with an
  additive real-valued outcome, exact or Monte Carlo interventional means,
  and a batched sampling environment.
- :mod:`acbug.generate`: seeded random model generators for benchmarks.
- :mod:`acbug.design`: one-hot embeddings, balanced intervention designs,
  and least-squares gap estimation.
- :mod:`acbug.elimination`: the phased elimination search over marginal
  action sets, plus its sample-complexity functional.
- :mod:`acbug.baselines`: two-stage parent-recovery pipeline, restricted
  search, and successive elimination over full product arms.
- :mod:`acbug.harness`: seeded experiment sweeps with CSV output.
"""

from .seeding import spawn_rng, stable_seed
from .scm import (
    Cpd,
    Dag,
    Interaction,
    OutcomeModel,
    Scm,
    ScmEnv,
    SubsetEnv,
    VariableSpec,
    best_global,
    epsilon_min,
    interventional_mean,
    load,
    round_half_away,
    sample,
    save,
)
from .generate import GenConfig, gen_dag, gen_misspecification, gen_scm
from .design import (
    Embedding,
    MarginalActionSet,
    OlsEstimate,
    confidence_radius,
    design_bound,
    design_counts,
    design_sequence,
    embed,
    gap_estimates,
    ols,
    product_assignments,
    worst_pair_design_norm,
)
from .elimination import (
    ModlParams,
    ModlResult,
    PhaseLog,
    PhaseSchedule,
    eliminate,
    phase_sample_size,
    phase_schedule,
    recover_parents,
    run_modl,
    theoretical_complexity,
)
from .baselines import (
    ArmCapExceeded,
    ParentsResult,
    ParentsTestConfig,
    PipelineResult,
    SeResult,
    find_parents,
    parents_test_n,
    product_arms,
    run_oracle,
    run_p1,
    run_restricted,
    run_se,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    RunRecord,
    SummaryRow,
    aggregate,
    experiment_config_from_dict,
    records_to_csv,
    run_experiment,
    run_to_directory,
    summary_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ArmCapExceeded",
    "Cpd",
    "Dag",
    "Embedding",
    "ExperimentConfig",
    "ExperimentResult",
    "GenConfig",
    "Interaction",
    "MarginalActionSet",
    "ModlParams",
    "ModlResult",
    "OlsEstimate",
    "OutcomeModel",
    "ParentsResult",
    "ParentsTestConfig",
    "PhaseLog",
    "PhaseSchedule",
    "PipelineResult",
    "RunRecord",
    "Scm",
    "ScmEnv",
    "SeResult",
    "SubsetEnv",
    "SummaryRow",
    "VariableSpec",
    "aggregate",
    "best_global",
    "confidence_radius",
    "design_bound",
    "design_counts",
    "design_sequence",
    "eliminate",
    "embed",
    "epsilon_min",
    "experiment_config_from_dict",
    "find_parents",
    "gap_estimates",
    "gen_dag",
    "gen_misspecification",
    "gen_scm",
    "interventional_mean",
    "load",
    "ols",
    "parents_test_n",
    "phase_sample_size",
    "phase_schedule",
    "product_arms",
    "product_assignments",
    "recover_parents",
    "records_to_csv",
    "round_half_away",
    "run_experiment",
    "run_modl",
    "run_oracle",
    "run_p1",
    "run_restricted",
    "run_se",
    "run_to_directory",
    "sample",
    "save",
    "spawn_rng",
    "stable_seed",
    "summary_to_csv",
    "theoretical_complexity",
    "worst_pair_design_norm",
    "__version__",
]

"""A two-variable model by hand: observational vs interventional means.

X1 flips a biased coin for X2, and only X2 feeds the outcome. Intervening
on X1 therefore moves Y only through X2, while intervening on X2 pins the
mean exactly.
"""
import numpy as np

from acbug import (
    Cpd, Dag, OutcomeModel, Scm, VariableSpec,
    best_global, epsilon_min, interventional_mean, sample,
)

variables = [VariableSpec("X1", 2), VariableSpec("X2", 2)]
dag = Dag(num_vars=2, outcome_parents=(1,),
          parent_lists=((), (0,)), topo_order=(0, 1, 2))
cpds = [
    Cpd(var=0, parents=(), parent_sizes=(), size=2, kind="table",
        table=np.array([[0.5, 0.5]])),
    # P(X2=1 | X1=1) = 0.3 and P(X2=1 | X1=2) = 0.8
    Cpd(var=1, parents=(0,), parent_sizes=(2,), size=2, kind="table",
        table=np.array([[0.3, 0.7], [0.8, 0.2]])),
]
outcome = OutcomeModel(parents=(1,), f={1: np.array([1.0, 3.0])},
                       noise_kind="gaussian", noise_sigma2=0.0,
                       reward_bound=3.0)
scm = Scm(variables, dag, cpds, outcome).validate()

print("outcome parents:", scm.dag.outcome_parents)
print("reward table of X2:", scm.outcome.f[1])

mean, err = interventional_mean(scm, {})
print(f"\nobservational mean: {mean:.3f} (stderr {err})")
for v in (1, 2):
    mean, err = interventional_mean(scm, {0: v})
    print(f"do(X1={v}):  E[Y] = {mean:.3f}")
for v in (1, 2):
    mean, err = interventional_mean(scm, {1: v})
    print(f"do(X2={v}):  E[Y] = {mean:.3f}")

iv, value = best_global(scm)
print(f"\nbest global intervention: {iv} with value {value:.3f}")
print(f"smallest value gap on any parent: {epsilon_min(scm):.3f}")

rng = np.random.default_rng(7)
assignment, y = sample(scm, {0: 2}, rng)
print(f"\none draw under do(X1=2): assignment {assignment}, y = {y:.3f}")

# intervened values are clamped, so X1 is 2 in every draw
draws = [sample(scm, {0: 2}, rng)[0][0] for _ in range(5)]
print("X1 across five more draws:", draws)

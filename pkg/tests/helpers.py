"""Hand-built models small enough to verify against pencil-and-paper numbers."""
import numpy as np

from acbug import Cpd, Dag, OutcomeModel, Scm, VariableSpec


def root_scm(sizes, f, noise_sigma2=0.0, noise_kind="gaussian",
             reward_bound=5.0, tables=None, interaction=None, validate=True):
    """Model whose variables are all independent roots.

    f maps variable index to its reward table; every other variable is a
    non-parent. tables optionally overrides the marginal rows (uniform by
    default).
    """
    K = len(sizes)
    parents = tuple(sorted(f))
    variables = [VariableSpec(f"X{k + 1}", int(m)) for k, m in enumerate(sizes)]
    cpds = []
    for k, m in enumerate(sizes):
        if tables is None:
            row = np.full((1, m), 1.0 / m)
        else:
            row = np.asarray(tables[k], dtype=float).reshape(1, m)
        cpds.append(Cpd(var=k, parents=(), parent_sizes=(), size=int(m),
                        kind="table", table=row))
    dag = Dag(num_vars=K, outcome_parents=parents,
              parent_lists=tuple(() for _ in range(K)),
              topo_order=tuple(range(K + 1)))
    outcome = OutcomeModel(
        parents=parents,
        f={k: np.asarray(v, dtype=float) for k, v in f.items()},
        noise_kind=noise_kind,
        noise_sigma2=noise_sigma2,
        reward_bound=reward_bound,
        interaction=interaction,
    )
    scm = Scm(variables, dag, cpds, outcome)
    return scm.validate() if validate else scm


def chain_scm(noise_sigma2=0.0):
    """X1 -> X2 -> Y with hand-checkable mixture means.

    P(X2=1|X1=1)=0.3, P(X2=1|X1=2)=0.8, f_2=(1,3). Observationally
    P(X2=1)=0.55, so E[Y]=1.9; under do(X1=1) it is 2.4, under do(X1=2) 1.4.
    """
    variables = [VariableSpec("X1", 2), VariableSpec("X2", 2)]
    dag = Dag(num_vars=2, outcome_parents=(1,),
              parent_lists=((), (0,)), topo_order=(0, 1, 2))
    cpds = [
        Cpd(var=0, parents=(), parent_sizes=(), size=2, kind="table",
            table=np.array([[0.5, 0.5]])),
        Cpd(var=1, parents=(0,), parent_sizes=(2,), size=2, kind="table",
            table=np.array([[0.3, 0.7], [0.8, 0.2]])),
    ]
    outcome = OutcomeModel(parents=(1,), f={1: np.array([1.0, 3.0])},
                           noise_kind="gaussian", noise_sigma2=noise_sigma2,
                           reward_bound=3.0)
    return Scm(variables, dag, cpds, outcome).validate()

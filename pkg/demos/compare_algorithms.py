"""Compare query efficiency of the five algorithms on the toy family.

Runs SGD, OGQ, SGQ, SAGA and SVRG on four 1-D quadratics and reports
how many gradient queries each needs to push the mean optimality gap
below a threshold.
"""
import numpy as np

from sqopt import AlgoSpec, make_quadratic_family, run_many, run_ogq

ALPHA = 0.015
X0 = 5.0
T = 300
TRIALS = 200
SEED = 20240817
THRESHOLD = 0.5


def queries_to_reach(trajectories, target):
    gaps = np.stack([tr.gap for tr in trajectories]).mean(axis=0)
    hits = np.flatnonzero(gaps <= target)
    return int(trajectories[0].queries[hits[0]]) if hits.size else None


def main():
    problem = make_quadratic_family([1, 1, 1, 1], [2, 1, -1, -2])
    print(f"f(x) = x^2 + 5/2, x0 = {X0}, alpha = {ALPHA}, {TRIALS} trials")
    print(f"queries until mean gap <= {THRESHOLD}:")

    specs = [
        AlgoSpec("sgd", ALPHA),
        AlgoSpec("sgq", ALPHA, p=0.3),
        AlgoSpec("saga", ALPHA),
        AlgoSpec("svrg", ALPHA, snapshot_every=10),
    ]
    for spec in specs:
        trajectories = run_many(spec, problem, X0, T, TRIALS, SEED)
        q = queries_to_reach(trajectories, THRESHOLD)
        print(f"  {spec.name:8s} {q}")

    # OGQ is deterministic: one run, one query per step
    ogq = run_ogq(problem, X0, ALPHA, T)
    q = queries_to_reach([ogq], THRESHOLD)
    print(f"  {'ogq':8s} {q}  (idealized: sees all gradients)")


if __name__ == "__main__":
    main()

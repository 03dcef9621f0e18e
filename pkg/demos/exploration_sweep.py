"""Effect of the exploration rate p on SGQ's transient.

Sweeps p over {0.1, 0.3, 0.7, 1.0} and prints the mean gap once 150
total queries are spent.  Lower p leans harder on the stale-gradient
UCB rule; p = 1 is plain uniform sampling and matches SGD.
"""
import numpy as np

from sqopt import AlgoSpec, make_quadratic_family, run_many

ALPHA = 0.015
X0 = 5.0
T = 200
TRIALS = 200
SEED = 20240817
QUERY_MARK = 150


def main():
    problem = make_quadratic_family([1, 1, 1, 1], [2, 1, -1, -2])
    t_mark = QUERY_MARK - problem.n  # n queries go to table initialization
    print(f"mean gap after {QUERY_MARK} queries ({TRIALS} trials):")
    for j, p in enumerate([0.1, 0.3, 0.7, 1.0]):
        trajectories = run_many(
            AlgoSpec("sgq", ALPHA, p=p), problem, X0, T, TRIALS, SEED + j
        )
        at_mark = np.array([tr.gap[t_mark] for tr in trajectories])
        se = at_mark.std() / np.sqrt(TRIALS)
        print(f"  p = {p:3.1f}: {at_mark.mean():.4f} +- {se:.4f}")


if __name__ == "__main__":
    main()

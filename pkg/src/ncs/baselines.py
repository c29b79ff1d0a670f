"""Reference optimizers sharing the engine's operators and record format."""

import numpy as np

from .engine import RunRecord, _run
from .rng import INIT_STREAM, make_stream

__all__ = ["phc_run", "random_search_run"]


def phc_run(problem, cfg):
    """Parallel hill climbing: the engine with greedy acceptance only.

    An offspring replaces its parent iff its objective value is strictly
    lower. Mutation, step-size adaptation, success counting and the lambda
    stream draws are identical to :func:`ncs.engine.ncs_run`, so both
    algorithms see the same mutation noise under a common seed.
    """
    return _run(problem, cfg, "phc")


def random_search_run(problem, budget, seed):
    """Best of ``budget`` uniform samples in the problem box.

    Samples come from the initialization stream in row-major order, so a
    larger budget with the same seed extends the sample sequence.
    """
    budget = int(budget)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = make_stream(seed, INIT_STREAM)
    d = problem.dim
    best_x, best_f = None, np.inf
    history = []
    done = 0
    chunk = 4096
    while done < budget:
        m = min(chunk, budget - done)
        X = problem.lower + rng.uniforms(m * d).reshape(m, d) * problem.width
        f = problem.evaluate_batch(X)
        i = int(np.argmin(f))
        if best_x is None or f[i] < best_f:
            best_x, best_f = X[i].copy(), float(f[i])
        done += m
        history.append((done, best_f))
    return RunRecord(
        best_solution=best_x,
        best_value=best_f,
        history=history,
        evaluations_used=budget,
        algorithm="random",
    )

"""Estimator-style wrappers so the optimizers compose with scikit-learn tooling.

``fit(problem)`` runs the optimizer and stores the outcome in trailing
underscore attributes; constructor arguments are plain hyper-parameters, so
``get_params``/``set_params``/``sklearn.base.clone`` work as usual.

>>> from ncs import NCSOptimizer, make_problem
>>> opt = NCSOptimizer(budget=2000, random_state=3).fit(make_problem("sphere", 2))
>>> opt.n_evaluations_
2000
"""

import numbers

import numpy as np
from sklearn.base import BaseEstimator

from .baselines import phc_run, random_search_run
from .engine import ConfigError, NcsConfig, ncs_run
from .objectives import ObjectiveSpec

__all__ = [
    "check_problem",
    "check_random_state",
    "t_max_for_budget",
    "NCSOptimizer",
    "PHCOptimizer",
    "RandomSearchOptimizer",
]


def check_problem(problem, bounds=None):
    """Coerce ``problem`` into an :class:`ObjectiveSpec`.

    A plain callable ``f(x) -> float`` is accepted together with ``bounds``,
    a ``(lower, upper)`` pair of equal-length sequences.
    """
    if isinstance(problem, ObjectiveSpec):
        if bounds is not None:
            raise ValueError("bounds are taken from the ObjectiveSpec; do not pass them")
        return problem
    if not callable(problem):
        raise TypeError(f"problem must be an ObjectiveSpec or a callable, got {type(problem).__name__}")
    if bounds is None:
        raise ValueError("bounds=(lower, upper) is required for a plain callable")
    lower, upper = (np.atleast_1d(np.asarray(b, dtype=float)) for b in bounds)
    if lower.shape != upper.shape or lower.ndim != 1:
        raise ValueError("lower and upper bounds must be 1-D and of equal length")
    func = problem

    def batch(X):
        return np.array([func(x) for x in X], dtype=float)

    name = getattr(problem, "__name__", "callable")
    return ObjectiveSpec(name=name, dim=lower.size, lower=lower, upper=upper, func=batch)


def check_random_state(seed):
    """Validate a 64-bit integer seed (``None`` means 0)."""
    if seed is None:
        return 0
    if isinstance(seed, numbers.Integral) and not isinstance(seed, bool):
        return int(seed) & ((1 << 64) - 1)
    raise ValueError(f"random_state must be an integer seed, got {seed!r}")


def t_max_for_budget(budget, n):
    """Largest iteration count whose ``n * (t_max + 1)`` evaluations fit in ``budget``."""
    t_max = int(budget) // int(n) - 1
    if t_max < 0:
        raise ConfigError(f"budget {budget} cannot even cover the initial population of {n}")
    return t_max


class NCSOptimizer(BaseEstimator):
    """Negatively correlated search as an estimator.

    Parameters
    ----------
    n_rls : int, default 10
        Number of parallel local searches.
    budget : int, optional
        Evaluation budget; sets ``t_max = budget // n_rls - 1``. Ignored if
        ``t_max`` is given.
    t_max : int, optional
        Number of iterations. One of ``budget`` / ``t_max`` is required.
    sigma0 : float, optional
        Initial step size, default a tenth of the widest bound width.
    r : float, default 0.99
        Step-size factor of the success rule.
    epoch : int, default 10
        Iterations between step-size updates.
    bound_policy : {'reflect', 'clamp'}
    sigma_min, sigma_max : float, optional
    random_state : int, default 0
    record_trajectory : bool, default False

    Attributes
    ----------
    record_ : RunRecord
    best_solution_ : ndarray
    best_value_ : float
    n_evaluations_ : int
    """

    _runner = staticmethod(ncs_run)

    def __init__(
        self,
        n_rls=10,
        budget=None,
        t_max=None,
        sigma0=None,
        r=0.99,
        epoch=10,
        bound_policy="reflect",
        sigma_min=None,
        sigma_max=None,
        random_state=0,
        record_trajectory=False,
    ):
        self.n_rls = n_rls
        self.budget = budget
        self.t_max = t_max
        self.sigma0 = sigma0
        self.r = r
        self.epoch = epoch
        self.bound_policy = bound_policy
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max
        self.random_state = random_state
        self.record_trajectory = record_trajectory

    def _config(self):
        if self.t_max is not None:
            t_max = int(self.t_max)
        elif self.budget is not None:
            t_max = t_max_for_budget(self.budget, self.n_rls)
        else:
            raise ConfigError("set either budget or t_max")
        return NcsConfig(
            t_max=t_max,
            n=self.n_rls,
            sigma0=self.sigma0,
            r=self.r,
            epoch=self.epoch,
            seed=check_random_state(self.random_state),
            bound_policy=self.bound_policy,
            sigma_min=self.sigma_min,
            sigma_max=self.sigma_max,
            record_trajectory=self.record_trajectory,
        ).validate()

    def fit(self, problem, bounds=None):
        problem = check_problem(problem, bounds)
        self.record_ = self._runner(problem, self._config())
        self.best_solution_ = self.record_.best_solution
        self.best_value_ = self.record_.best_value
        self.n_evaluations_ = self.record_.evaluations_used
        self.n_features_in_ = problem.dim
        return self


class PHCOptimizer(NCSOptimizer):
    """Parallel hill climbing; same parameters as :class:`NCSOptimizer`."""

    _runner = staticmethod(phc_run)


class RandomSearchOptimizer(BaseEstimator):
    """Uniform random sampling of ``budget`` points."""

    def __init__(self, budget=1000, random_state=0):
        self.budget = budget
        self.random_state = random_state

    def fit(self, problem, bounds=None):
        problem = check_problem(problem, bounds)
        self.record_ = random_search_run(problem, self.budget, check_random_state(self.random_state))
        self.best_solution_ = self.record_.best_solution
        self.best_value_ = self.record_.best_value
        self.n_evaluations_ = self.record_.evaluations_used
        self.n_features_in_ = problem.dim
        return self

"""Negatively correlated search for continuous problems.

Each of the ``N`` randomized local searches (RLS) keeps one solution and an
isotropic Gaussian step size. Every iteration all of them propose an
offspring; an offspring replaces its parent when its normalized objective
value divided by its normalized correlation (the minimum Bhattacharyya
distance of its search distribution to the other RLSs' distributions) falls
below a noisy threshold ``lambda``. Step sizes follow the 1/5 success rule.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .rng import INIT_STREAM, LAMBDA_STREAM, RngStream, make_stream, rls_stream_id

__all__ = [
    "REPLACE",
    "KEEP",
    "LAMBDA_MIN",
    "ConfigError",
    "PopulationError",
    "NonFiniteObjectiveError",
    "SearchDistribution",
    "RlsState",
    "NcsConfig",
    "RunRecord",
    "repair",
    "gaussian_mutate",
    "bhattacharyya_gaussian",
    "pairwise_bhattacharyya",
    "min_correlation",
    "normalize_pair",
    "lambda_at",
    "selection_decide",
    "adapt_sigma",
    "ncs_run",
]

REPLACE = "replace"
KEEP = "keep"
LAMBDA_MIN = 1e-6
SUCCESS_RATE = 0.2


class ConfigError(ValueError):
    """Invalid run configuration."""


class PopulationError(ValueError):
    """Malformed or too-small population."""


class NonFiniteObjectiveError(RuntimeError):
    """The objective returned NaN or infinity."""


@dataclass
class SearchDistribution:
    """Isotropic Gaussian ``N(mean, sigma^2 I)`` attached to one solution."""

    mean: np.ndarray
    sigma: float

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def dim(self):
        return self.mean.shape[0]


@dataclass
class RlsState:
    dist: SearchDistribution
    f_current: float
    success_count: int
    rng: RngStream


@dataclass
class NcsConfig:
    """Run parameters.

    ``sigma0``, ``sigma_min`` and ``sigma_max`` default to fractions of the
    widest bound width ``w``: ``w / 10``, ``1e-10 * w`` and ``w``.
    """

    t_max: int = 1000
    n: int = 10
    sigma0: Optional[float] = None
    r: float = 0.99
    epoch: int = 10
    seed: int = 0
    bound_policy: str = "reflect"
    sigma_min: Optional[float] = None
    sigma_max: Optional[float] = None
    record_trajectory: bool = False

    def validate(self):
        if int(self.n) < 2:
            raise ConfigError(f"population size n must be >= 2, got {self.n}")
        if int(self.t_max) < 0:
            raise ConfigError(f"t_max must be non-negative, got {self.t_max}")
        if not 0.0 < self.r < 1.0:
            raise ConfigError(f"r must lie in (0, 1), got {self.r}")
        if int(self.epoch) < 1:
            raise ConfigError(f"epoch must be positive, got {self.epoch}")
        if self.bound_policy not in ("reflect", "clamp"):
            raise ConfigError(f"bound_policy must be 'reflect' or 'clamp', got {self.bound_policy!r}")
        for name in ("sigma0", "sigma_min", "sigma_max"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(f"{name} must be positive, got {v}")
        return self

    def resolve_sigmas(self, problem):
        w = float(np.max(problem.width))
        s_min = 1e-10 * w if self.sigma_min is None else float(self.sigma_min)
        s_max = w if self.sigma_max is None else float(self.sigma_max)
        if s_min > s_max:
            raise ConfigError(f"sigma_min {s_min} exceeds sigma_max {s_max}")
        s0 = w / 10.0 if self.sigma0 is None else float(self.sigma0)
        return min(max(s0, s_min), s_max), s_min, s_max


@dataclass
class RunRecord:
    """Outcome of one optimizer run.

    ``history`` holds ``(iteration, best_value_so_far)`` from iteration 0
    (initial population). ``trajectory`` holds ``(iteration, rls, x, f)`` for
    the solution each RLS retains, when logging is enabled.
    """

    best_solution: np.ndarray
    best_value: float
    history: List[Tuple[int, float]]
    evaluations_used: int
    trajectory: Optional[List[Tuple[int, int, np.ndarray, float]]] = None
    final_population: List[RlsState] = field(default_factory=list)
    algorithm: str = "ncs"


def repair(x, lower, upper, policy="reflect"):
    """Map ``x`` back into ``[lower, upper]`` coordinate-wise."""
    if policy == "clamp":
        return np.clip(x, lower, upper)
    if policy != "reflect":
        raise ConfigError(f"unknown bound policy {policy!r}")
    x = np.asarray(x, dtype=float)
    inside = (x >= lower) & (x <= upper)
    if np.all(inside):
        return x
    w = upper - lower
    # repeated mirroring at both walls == folding with period 2w
    y = np.mod(x - lower, 2.0 * w)
    y = np.where(y > w, 2.0 * w - y, y)
    return np.where(inside, x, lower + y)


def gaussian_mutate(x, sigma, rng, lower, upper, policy="reflect"):
    """Offspring ``x + sigma * z`` (``z`` standard normal), repaired into bounds.

    Consumes exactly ``len(x)`` normal draws from ``rng``.
    """
    x = np.asarray(x, dtype=float)
    z = rng.normals(x.shape[0])
    return repair(x + sigma * z, lower, upper, policy)


def bhattacharyya_gaussian(a, b):
    """Bhattacharyya distance between ``N(a.mean, a.sigma^2 I)`` and ``N(b.mean, b.sigma^2 I)``.

    With ``S = (a.sigma^2 + b.sigma^2) / 2`` the general Gaussian form
    ``(1/8) dm^T S^-1 dm + (1/2) ln(det S / sqrt(det Sa det Sb))`` reduces to
    ``|dm|^2 / (4 (sa^2 + sb^2)) + (D/2) ln((sa^2 + sb^2) / (2 sa sb))``.
    """
    if a.mean.shape != b.mean.shape:
        raise PopulationError(
            f"dimension mismatch between distributions: {a.mean.shape} vs {b.mean.shape}"
        )
    d = a.mean.shape[0]
    diff = a.mean - b.mean
    s2 = a.sigma * a.sigma + b.sigma * b.sigma
    return float(diff @ diff / (4.0 * s2) + 0.5 * d * np.log(s2 / (2.0 * a.sigma * b.sigma)))


def pairwise_bhattacharyya(means_a, sigmas_a, means_b, sigmas_b):
    """Matrix of distances between rows of ``means_a`` and rows of ``means_b``."""
    means_a = np.atleast_2d(means_a)
    means_b = np.atleast_2d(means_b)
    if means_a.shape[1] != means_b.shape[1]:
        raise PopulationError("dimension mismatch between distributions")
    d = means_a.shape[1]
    sa = np.asarray(sigmas_a, dtype=float)[:, None]
    sb = np.asarray(sigmas_b, dtype=float)[None, :]
    s2 = sa * sa + sb * sb
    diff = means_a[:, None, :] - means_b[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    return sq / (4.0 * s2) + 0.5 * d * np.log(s2 / (2.0 * sa * sb))


def min_correlation(candidate, others):
    """``min_j D_B(candidate, others[j])`` over the other RLSs' distributions."""
    others = list(others)
    if not others:
        raise PopulationError("correlation needs at least one other RLS (n >= 2)")
    return min(bhattacharyya_gaussian(candidate, o) for o in others)


def normalize_pair(v_old, v_new, shift_floor=0.0, check_floor=True):
    """Shift by ``shift_floor`` and scale so the pair sums to one.

    Returns ``(0.5, 0.5)`` when both shifted values are zero.
    """
    a = v_old - shift_floor
    b = v_new - shift_floor
    if check_floor and (a < 0 or b < 0):
        raise PopulationError(
            f"values ({v_old}, {v_new}) lie below the floor {shift_floor}; "
            "the floor must be the running minimum"
        )
    s = a + b
    if s == 0:
        return 0.5, 0.5
    return a / s, b / s


def lambda_at(t, t_max, rng):
    """Threshold ``lambda_t ~ N(1, 0.1 - 0.1 t / t_max)``; one normal draw per call.

    Non-positive draws are clamped to ``LAMBDA_MIN``.
    """
    z = rng.next_gaussian()
    std = 0.0 if t_max <= 0 else 0.1 - 0.1 * (t / t_max)
    lam = 1.0 + max(std, 0.0) * z
    return lam if lam > 0 else LAMBDA_MIN


def selection_decide(f_new_norm, corr_new_norm, lam, f_old_raw=None, f_new_raw=None):
    """Keep-or-replace rule for one RLS.

    Replaces when ``f_new_norm / corr_new_norm < lam``. A zero correlation
    counts as an infinite ratio (keep), unless ``f_new_norm`` is zero as well;
    then the raw objective values decide greedily.
    """
    if corr_new_norm == 0:
        if f_new_norm == 0 and f_old_raw is not None and f_new_raw is not None:
            return REPLACE if f_new_raw < f_old_raw else KEEP
        return KEEP
    return REPLACE if f_new_norm / corr_new_norm < lam else KEEP


def adapt_sigma(sigma, c, epoch, r, sigma_min=0.0, sigma_max=np.inf):
    """1/5 success rule: ``sigma / r`` above rate 0.2, ``sigma * r`` below, clamped."""
    if c > epoch:
        raise ValueError(f"success count {c} exceeds epoch {epoch}")
    # c / epoch vs 1/5 compared in integers to avoid rounding at the boundary
    if 5 * c > epoch:
        sigma = sigma / r
    elif 5 * c < epoch:
        sigma = sigma * r
    return min(max(sigma, sigma_min), sigma_max)


def _check_finite(values, X, where):
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NonFiniteObjectiveError(
            f"objective returned {values[i]} at {where} for x = {X[i].tolist()}"
        )


def _run(problem, cfg, mode):
    cfg.validate()
    n, d = int(cfg.n), problem.dim
    t_max, epoch = int(cfg.t_max), int(cfg.epoch)
    lower, upper = problem.lower, problem.upper
    sigma0, s_min, s_max = cfg.resolve_sigmas(problem)

    init_rng = make_stream(cfg.seed, INIT_STREAM)
    lam_rng = make_stream(cfg.seed, LAMBDA_STREAM)
    rls_rngs = [make_stream(cfg.seed, rls_stream_id(i)) for i in range(n)]

    X = lower + init_rng.uniforms(n * d).reshape(n, d) * (upper - lower)
    fx = problem.evaluate_batch(X)
    _check_finite(fx, X, "initialization")
    evaluations = n
    sigmas = np.full(n, sigma0)
    success = np.zeros(n, dtype=int)

    ib = int(np.argmin(fx))
    best_x, best_f = X[ib].copy(), float(fx[ib])
    history = [(0, best_f)]
    trajectory = None
    if cfg.record_trajectory:
        trajectory = [(0, i, X[i].copy(), float(fx[i])) for i in range(n)]

    t = 0
    while t < t_max:
        lam = lambda_at(t, t_max, lam_rng)
        Xn = np.empty_like(X)
        for i in range(n):
            Xn[i] = gaussian_mutate(X[i], sigmas[i], rls_rngs[i], lower, upper, cfg.bound_policy)
        fn = problem.evaluate_batch(Xn)
        _check_finite(fn, Xn, f"iteration {t}")
        evaluations += n

        if mode == "ncs":
            # both correlations against the start-of-iteration population
            cur = pairwise_bhattacharyya(X, sigmas, X, sigmas)
            new = pairwise_bhattacharyya(Xn, sigmas, X, sigmas)
            np.fill_diagonal(cur, np.inf)
            np.fill_diagonal(new, np.inf)
            corr_cur = cur.min(axis=1)
            corr_new = new.min(axis=1)

        for i in range(n):
            if fn[i] < best_f:
                best_f = float(fn[i])
                best_x = Xn[i].copy()

        for i in range(n):
            if mode == "ncs":
                _, f_new_norm = normalize_pair(fx[i], fn[i], best_f)
                _, c_new_norm = normalize_pair(corr_cur[i], corr_new[i], 0.0)
                decision = selection_decide(f_new_norm, c_new_norm, lam, fx[i], fn[i])
            else:
                decision = REPLACE if fn[i] < fx[i] else KEEP
            if decision == REPLACE:
                X[i] = Xn[i]
                fx[i] = fn[i]
                success[i] += 1

        t += 1
        if t % epoch == 0:
            for i in range(n):
                sigmas[i] = adapt_sigma(sigmas[i], int(success[i]), epoch, cfg.r, s_min, s_max)
            success[:] = 0
        history.append((t, best_f))
        if trajectory is not None:
            trajectory.extend((t, i, X[i].copy(), float(fx[i])) for i in range(n))

    population = [
        RlsState(SearchDistribution(X[i].copy(), float(sigmas[i])), float(fx[i]), int(success[i]), rls_rngs[i])
        for i in range(n)
    ]
    return RunRecord(
        best_solution=best_x,
        best_value=best_f,
        history=history,
        evaluations_used=evaluations,
        trajectory=trajectory,
        final_population=population,
        algorithm=mode,
    )


def ncs_run(problem, cfg):
    """Run negatively correlated search on ``problem``.

    Parameters
    ----------
    problem : ObjectiveSpec
        Bounded minimization problem.
    cfg : NcsConfig
        Run parameters; ``cfg.n >= 2``.

    Returns
    -------
    RunRecord
        Best solution found and run bookkeeping. Exactly
        ``cfg.n * (cfg.t_max + 1)`` objective evaluations are spent.
    """
    return _run(problem, cfg, "ncs")

"""Rank-based comparison of optimizers: Wilcoxon rank-sum, Friedman, Top-K.

Smaller values (function errors) are better throughout.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import chi2, norm, rankdata

__all__ = [
    "A_BETTER",
    "B_BETTER",
    "NO_DIFFERENCE",
    "EXACT_MAX_TOTAL",
    "WilcoxonResult",
    "FriedmanResult",
    "wilcoxon_rank_sum",
    "friedman",
    "pairwise_verdicts",
    "top_k_table",
    "win_draw_loss",
]

A_BETTER = "a_better"
B_BETTER = "b_better"
NO_DIFFERENCE = "no_difference"
EXACT_MAX_TOTAL = 12


@dataclass(frozen=True)
class WilcoxonResult:
    p_value: float
    verdict: str
    statistic: float
    method: str

    def __iter__(self):
        return iter((self.p_value, self.verdict))


@dataclass(frozen=True)
class FriedmanResult:
    avg_ranks: np.ndarray
    statistic: float
    p_value: float

    def __iter__(self):
        return iter((self.avg_ranks, self.statistic, self.p_value))


def _sample(values, name):
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def _exact_p(ranks, n1, w, alternative):
    mean = n1 * (ranks.size + 1) / 2.0
    sums = np.array([ranks[list(c)].sum() for c in combinations(range(ranks.size), n1)])
    eps = 1e-9
    if alternative == "less":
        hits = sums <= w + eps
    elif alternative == "greater":
        hits = sums >= w - eps
    else:
        hits = np.abs(sums - mean) >= abs(w - mean) - eps
    return hits.mean()


def _normal_p(ranks, n1, n2, w, alternative):
    n = n1 + n2
    mean = n1 * (n + 1) / 2.0
    _, counts = np.unique(ranks, return_counts=True)
    tie = np.sum(counts ** 3 - counts) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie)
    if var <= 0:
        return 1.0
    sd = np.sqrt(var)
    if alternative == "less":
        return norm.cdf((w - mean + 0.5) / sd)
    if alternative == "greater":
        return norm.sf((w - mean - 0.5) / sd)
    z = (abs(w - mean) - 0.5) / sd
    return 2.0 * norm.sf(max(z, 0.0))


def wilcoxon_rank_sum(a, b, alpha=0.05, alternative="two-sided", method="auto"):
    """Wilcoxon rank-sum test of sample ``a`` against sample ``b``.

    Parameters
    ----------
    a, b : array_like
        Samples with at least 3 finite values each.
    alpha : float
        Significance level for the verdict.
    alternative : {'two-sided', 'less', 'greater'}
        ``'less'`` tests whether ``a`` tends to be smaller than ``b``.
    method : {'auto', 'exact', 'normal'}
        ``'auto'`` enumerates the permutation distribution of the rank sum
        when ``len(a) + len(b) <= 12`` and otherwise uses the normal
        approximation with tie-corrected variance and continuity correction.

    Returns
    -------
    WilcoxonResult
        Unpacks as ``(p_value, verdict)``. The verdict is ``'a_better'`` when
        the test rejects and ``a`` has the smaller median (mean rank on a tie
        of medians), ``'b_better'`` symmetrically, else ``'no_difference'``.
    """
    a = _sample(a, "a")
    b = _sample(b, "b")
    if a.size < 3 or b.size < 3:
        raise ValueError("each sample needs at least 3 values")
    if alternative not in ("two-sided", "less", "greater"):
        raise ValueError(f"unknown alternative {alternative!r}")
    n1, n2 = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled)
    w = float(ranks[:n1].sum())
    if np.all(pooled == pooled[0]):
        return WilcoxonResult(1.0, NO_DIFFERENCE, w, "degenerate")
    if method == "auto":
        method = "exact" if n1 + n2 <= EXACT_MAX_TOTAL else "normal"
    if method == "exact":
        p = _exact_p(ranks, n1, w, alternative)
    elif method == "normal":
        p = _normal_p(ranks, n1, n2, w, alternative)
    else:
        raise ValueError(f"unknown method {method!r}")
    p = float(min(max(p, 0.0), 1.0))

    verdict = NO_DIFFERENCE
    if p < alpha:
        ma, mb = np.median(a), np.median(b)
        if ma == mb:
            ma, mb = w / n1, ranks[n1:].mean()
        if ma < mb and alternative != "greater":
            verdict = A_BETTER
        elif ma > mb and alternative != "less":
            verdict = B_BETTER
    return WilcoxonResult(p, verdict, w, method)


def friedman(matrix):
    """Friedman test over a problems x algorithms matrix.

    Each row is ranked with mid-ranks for ties (rank 1 = smallest). The
    statistic is ``12 n / (k (k + 1)) * sum_j (Rbar_j - (k + 1) / 2)^2`` with
    ``n`` problems and ``k`` algorithms, referred to chi-square with ``k - 1``
    degrees of freedom.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 2:
        raise ValueError("need a 2-D matrix with at least 2 problems and 2 algorithms")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    n, k = m.shape
    ranks = rankdata(m, axis=1)
    avg = ranks.mean(axis=0)
    stat = 12.0 * n / (k * (k + 1)) * np.sum((avg - (k + 1) / 2.0) ** 2)
    return FriedmanResult(avg, float(stat), float(chi2.sf(stat, k - 1)))


def pairwise_verdicts(samples, alpha=0.05):
    """Antisymmetric win/tie/loss matrix for one problem.

    ``samples`` is a sequence of per-algorithm samples; entry ``[i, j]`` is
    ``+1`` if algorithm ``i`` is significantly better than ``j`` under the
    two-sided rank-sum test, ``-1`` if worse and ``0`` otherwise.
    """
    k = len(samples)
    out = np.zeros((k, k), dtype=int)
    for i in range(k):
        for j in range(i + 1, k):
            v = wilcoxon_rank_sum(samples[i], samples[j], alpha).verdict
            if v == A_BETTER:
                out[i, j], out[j, i] = 1, -1
            elif v == B_BETTER:
                out[i, j], out[j, i] = -1, 1
    return out


def top_k_table(per_problem_verdicts):
    """Counts ``[alg, K-1]`` of problems on which each algorithm places in the top K.

    Within a problem, algorithms are ordered by pairwise wins (more is
    better) and then losses (fewer is better); an algorithm's place is one
    plus the number of algorithms strictly ahead of it.
    """
    mats = [np.asarray(v) for v in per_problem_verdicts]
    if not mats:
        raise ValueError("no problems given")
    k = mats[0].shape[0]
    counts = np.zeros((k, k), dtype=int)
    for v in mats:
        if v.shape != (k, k):
            raise ValueError("all verdict matrices must be k x k")
        wins = (v > 0).sum(axis=1)
        losses = (v < 0).sum(axis=1)
        for i in range(k):
            ahead = np.sum((wins > wins[i]) | ((wins == wins[i]) & (losses < losses[i])))
            counts[i, ahead:] += 1
    return counts


def win_draw_loss(a_samples, b_samples, alpha=0.05):
    """``(w, d, l)`` of algorithm A against B over paired per-problem samples."""
    w = d = l = 0
    for a, b in zip(a_samples, b_samples):
        v = wilcoxon_rank_sum(a, b, alpha).verdict
        if v == A_BETTER:
            w += 1
        elif v == B_BETTER:
            l += 1
        else:
            d += 1
    return w, d, l

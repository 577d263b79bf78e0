"""Pairwise significance tests and omnibus tests with Tukey HSD post-hoc comparisons.

Pairwise tests compare two systems across topics. Omnibus tests take the
whole topics x systems matrix and report every system pair, adjusted for
multiple comparisons through the studentized range distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import List, Sequence

import numpy as np
from scipy import stats
from scipy.stats import rankdata

from ..exceptions import ContractError
from .studentized_range import studentized_range_quantile, studentized_range_sf


@dataclass(frozen=True)
class PairwiseDecision:
    system_a: object
    system_b: object
    p_value: float
    significant: bool
    statistic: float = math.nan
    degenerate: bool = False


def _pair(x, y, paired=True):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if paired and x.shape != y.shape:
        raise ContractError(f"paired samples differ in length: {x.size} vs {y.size}")
    return x, y


def _decision(p, alpha, stat=math.nan, a="x", b="y", degenerate=False):
    p = float(min(1.0, max(0.0, p)))
    return PairwiseDecision(a, b, p, (not degenerate) and p < alpha, float(stat), degenerate)


def _tie_term(values) -> float:
    """Sum of t^3 - t over groups of tied values."""
    _, counts = np.unique(values, return_counts=True)
    counts = counts.astype(float)
    return float(np.sum(counts ** 3 - counts))


def sign_test(x, y, alpha: float = 0.05, labels=("x", "y")) -> PairwiseDecision:
    """Exact two-sided binomial test on the signs of the paired differences."""
    x, y = _pair(x, y)
    d = x - y
    pos = int(np.sum(d > 0))
    n = pos + int(np.sum(d < 0))
    if n == 0:
        return _decision(1.0, alpha, 0.0, *labels, degenerate=True)
    p = 2.0 * stats.binom.cdf(min(pos, n - pos), n, 0.5)
    return _decision(p, alpha, pos, *labels)


def wilcoxon_rank_sum(x, y, alpha: float = 0.05, labels=("x", "y")) -> PairwiseDecision:
    """Mann-Whitney U, normal approximation with tie and continuity corrections."""
    x, y = _pair(x, y, paired=False)
    n1, n2 = x.size, y.size
    if n1 < 2 or n2 < 2:
        raise ContractError("each sample needs at least two observations")
    pooled = np.concatenate([x, y])
    ranks = rankdata(pooled)
    big_n = n1 + n2
    u1 = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    var = n1 * n2 / 12.0 * ((big_n + 1) - _tie_term(pooled) / (big_n * (big_n - 1)))
    if var <= 0:
        return _decision(1.0, alpha, u1, *labels, degenerate=True)
    z = (abs(u1 - mu) - 0.5) / math.sqrt(var)
    return _decision(2.0 * stats.norm.sf(z), alpha, u1, *labels)


def wilcoxon_signed_rank(x, y, alpha: float = 0.05, labels=("x", "y")) -> PairwiseDecision:
    """Signed-rank test; zero differences dropped, normal approximation with corrections."""
    x, y = _pair(x, y)
    d = x - y
    d = d[d != 0]
    n = d.size
    if n == 0:
        return _decision(1.0, alpha, 0.0, *labels, degenerate=True)
    ranks = rankdata(np.abs(d))
    t_plus = ranks[d > 0].sum()
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(np.abs(d)) / 48.0
    if var <= 0:
        return _decision(1.0, alpha, t_plus, *labels, degenerate=True)
    z = (abs(t_plus - mu) - 0.5) / math.sqrt(var)
    return _decision(2.0 * stats.norm.sf(z), alpha, t_plus, *labels)


def paired_t_test(x, y, alpha: float = 0.05, labels=("x", "y")) -> PairwiseDecision:
    """Two-sided paired Student's t test.

    Constant differences have no variance: p is 1 when they are all zero
    and 0 otherwise.
    """
    x, y = _pair(x, y)
    if x.size < 2:
        raise ContractError("need at least two pairs")
    d = x - y
    mean = d.mean()
    if np.all(d == d[0]):
        p = 1.0 if d[0] == 0 else 0.0
        return _decision(p, alpha, 0.0 if d[0] == 0 else math.copysign(math.inf, d[0]), *labels)
    t = mean / (d.std(ddof=1) / math.sqrt(d.size))
    return _decision(2.0 * stats.t.sf(abs(t), d.size - 1), alpha, t, *labels)


# -- omnibus tests -----------------------------------------------------------

@dataclass(frozen=True)
class AnovaDecomposition:
    """Sums of squares for ``y_ij = mu + tau_i + alpha_j + eps_ij``.

    One-way fits leave ``topic_effects`` empty and fold the topic variation
    into the residual.
    """

    grand_mean: float
    topic_effects: np.ndarray
    system_effects: np.ndarray
    residuals: np.ndarray
    ss_topic: float
    ss_system: float
    ss_residual: float
    ss_total: float
    df_topic: int
    df_system: int
    df_residual: int

    @property
    def ms_system(self) -> float:
        return self.ss_system / self.df_system

    @property
    def ms_topic(self) -> float:
        return self.ss_topic / self.df_topic if self.df_topic else math.nan

    @property
    def ms_residual(self) -> float:
        return self.ss_residual / self.df_residual

    @property
    def f_system(self) -> float:
        if self.ms_residual == 0:
            return math.inf if self.ms_system > 0 else math.nan
        return self.ms_system / self.ms_residual

    @property
    def p_system(self) -> float:
        f = self.f_system
        if math.isnan(f):
            return 1.0
        return float(stats.f.sf(f, self.df_system, self.df_residual))

    @property
    def f_topic(self) -> float:
        if not self.df_topic:
            return math.nan
        if self.ms_residual == 0:
            return math.inf if self.ms_topic > 0 else math.nan
        return self.ms_topic / self.ms_residual

    @property
    def p_topic(self) -> float:
        f = self.f_topic
        if math.isnan(f):
            return 1.0 if self.df_topic else math.nan
        return float(stats.f.sf(f, self.df_topic, self.df_residual))


def _matrix(matrix):
    cells = np.asarray(matrix.cells if hasattr(matrix, "cells") else matrix, dtype=float)
    systems = list(getattr(matrix, "systems", range(cells.shape[1])))
    if cells.ndim != 2 or cells.shape[0] < 2 or cells.shape[1] < 2:
        raise ContractError(f"need at least 2 topics and 2 systems, got shape {cells.shape}")
    return cells, systems


def one_way_anova(matrix) -> AnovaDecomposition:
    y, _ = _matrix(matrix)
    p, q = y.shape
    mu = y.mean()
    alpha = y.mean(axis=0) - mu
    resid = y - y.mean(axis=0)
    ss_sys = p * float(np.sum(alpha ** 2))
    ss_res = float(np.sum(resid ** 2))
    return AnovaDecomposition(mu, np.zeros(0), alpha, resid, 0.0, ss_sys, ss_res,
                              float(np.sum((y - mu) ** 2)), 0, q - 1, p * q - q)


def two_way_anova(matrix) -> AnovaDecomposition:
    y, _ = _matrix(matrix)
    p, q = y.shape
    mu = y.mean()
    tau = y.mean(axis=1) - mu
    alpha = y.mean(axis=0) - mu
    resid = y - mu - tau[:, None] - alpha[None, :]
    return AnovaDecomposition(
        mu, tau, alpha, resid,
        q * float(np.sum(tau ** 2)), p * float(np.sum(alpha ** 2)), float(np.sum(resid ** 2)),
        float(np.sum((y - mu) ** 2)), p - 1, q - 1, (p - 1) * (q - 1))


def _tukey(means: np.ndarray, se: np.ndarray, df: float, alpha: float, systems: Sequence,
           degenerate: bool = False) -> List[PairwiseDecision]:
    """All-pairs comparison of ``means`` with ``se[i, j]`` the standard error of one mean.

    ``se`` is the scale of the studentized range statistic, i.e. the
    difference's standard error divided by sqrt(2).
    """
    k = len(means)
    crit = studentized_range_quantile(alpha, k, df)
    out = []
    for i, j in combinations(range(k), 2):
        diff = abs(means[i] - means[j])
        if degenerate:
            out.append(PairwiseDecision(systems[i], systems[j], 1.0, False, 0.0, True))
            continue
        if se[i, j] == 0:
            sig = diff > 0
            out.append(PairwiseDecision(systems[i], systems[j], 0.0 if sig else 1.0, bool(sig),
                                        math.inf if sig else 0.0))
            continue
        qstat = diff / se[i, j]
        p = float(studentized_range_sf(qstat, k, df))
        out.append(PairwiseDecision(systems[i], systems[j], min(1.0, max(0.0, p)),
                                    bool(qstat > crit), qstat))
    return out


def one_way_anova_tukey(matrix, alpha: float = 0.05) -> List[PairwiseDecision]:
    """One-way ANOVA on the system factor, Tukey HSD on the system means.

    A zero residual variance makes every pair with unequal means significant.
    """
    y, systems = _matrix(matrix)
    dec = one_way_anova(y)
    n = np.full(y.shape[1], y.shape[0])
    se = np.sqrt(dec.ms_residual / 2.0 * (1.0 / n[:, None] + 1.0 / n[None, :]))
    return _tukey(y.mean(axis=0), se, dec.df_residual, alpha, systems)


def two_way_anova_tukey(matrix, alpha: float = 0.05) -> List[PairwiseDecision]:
    """Two-way (topic + system) ANOVA without interaction, Tukey HSD on system means."""
    y, systems = _matrix(matrix)
    dec = two_way_anova(y)
    q = y.shape[1]
    se = np.full((q, q), math.sqrt(dec.ms_residual / y.shape[0]))
    return _tukey(y.mean(axis=0), se, dec.df_residual, alpha, systems)


@dataclass(frozen=True)
class RankTestResult:
    statistic: float
    p_value: float
    mean_ranks: np.ndarray
    rank_variance: float


def kruskal_wallis(matrix) -> RankTestResult:
    """Kruskal-Wallis H over system columns, tie-corrected, chi-square approximation."""
    y, _ = _matrix(matrix)
    p, q = y.shape
    flat = y.ravel(order="F")
    big_n = flat.size
    ranks = rankdata(flat).reshape((p, q), order="F")
    mean_ranks = ranks.mean(axis=0)
    correction = 1.0 - _tie_term(flat) / (big_n ** 3 - big_n)
    # variance of a single rank, adjusted for ties
    var = big_n * (big_n + 1) / 12.0 * correction
    if correction <= 0:
        return RankTestResult(math.nan, 1.0, mean_ranks, 0.0)
    h = (12.0 / (big_n * (big_n + 1)) * np.sum(p * mean_ranks ** 2) - 3 * (big_n + 1)) / correction
    return RankTestResult(float(h), float(stats.chi2.sf(h, q - 1)), mean_ranks, var)


def kruskal_wallis_tukey(matrix, alpha: float = 0.05) -> List[PairwiseDecision]:
    """Tukey-type comparison of mean ranks after Kruskal-Wallis (infinite df)."""
    y, systems = _matrix(matrix)
    res = kruskal_wallis(y)
    n = np.full(y.shape[1], y.shape[0])
    se = np.sqrt(res.rank_variance / 2.0 * (1.0 / n[:, None] + 1.0 / n[None, :]))
    return _tukey(res.mean_ranks, se, math.inf, alpha, systems, degenerate=res.rank_variance == 0)


def friedman(matrix) -> RankTestResult:
    """Friedman chi-square on within-topic ranks, tie-corrected."""
    y, _ = _matrix(matrix)
    p, q = y.shape
    ranks = np.vstack([rankdata(row) for row in y])
    mean_ranks = ranks.mean(axis=0)
    var = float(np.sum((ranks - (q + 1) / 2.0) ** 2)) / (p * (q - 1))
    if var == 0:
        return RankTestResult(math.nan, 1.0, mean_ranks, 0.0)
    chi = p * float(np.sum((mean_ranks - (q + 1) / 2.0) ** 2)) / var
    return RankTestResult(chi, float(stats.chi2.sf(chi, q - 1)), mean_ranks, var)


def friedman_tukey(matrix, alpha: float = 0.05) -> List[PairwiseDecision]:
    """Tukey-type comparison of mean within-topic ranks after Friedman (infinite df)."""
    y, systems = _matrix(matrix)
    res = friedman(y)
    q = y.shape[1]
    se = np.full((q, q), math.sqrt(res.rank_variance / y.shape[0]))
    return _tukey(res.mean_ranks, se, math.inf, alpha, systems, degenerate=res.rank_variance == 0)


PAIRWISE_TESTS = {
    "sign": sign_test,
    "ranksum": wilcoxon_rank_sum,
    "signrank": wilcoxon_signed_rank,
    "ttest": paired_t_test,
}
OMNIBUS_TESTS = {
    "anova1": one_way_anova_tukey,
    "anova2": two_way_anova_tukey,
    "kruskal": kruskal_wallis_tukey,
    "friedman": friedman_tukey,
}
TEST_NAMES = {
    "sign": "Sign",
    "ranksum": "Wilcoxon Rank Sum",
    "signrank": "Wilcoxon Signed Rank",
    "ttest": "Student's t",
    "anova1": "One-way ANOVA",
    "anova2": "Two-way ANOVA",
    "kruskal": "Kruskal-Wallis",
    "friedman": "Friedman",
}
ORDINAL_TESTS = frozenset({"sign", "ranksum", "kruskal", "friedman"})


def all_pairs(matrix, test: str, alpha: float = 0.05) -> List[PairwiseDecision]:
    """Decisions for every system pair under one of the eight test ids."""
    y, systems = _matrix(matrix)
    if test in OMNIBUS_TESTS:
        return OMNIBUS_TESTS[test](matrix, alpha)
    if test not in PAIRWISE_TESTS:
        raise ContractError(f"unknown test {test!r}; expected one of {sorted(TEST_NAMES)}")
    fn = PAIRWISE_TESTS[test]
    return [fn(y[:, i], y[:, j], alpha, labels=(systems[i], systems[j]))
            for i, j in combinations(range(y.shape[1]), 2)]

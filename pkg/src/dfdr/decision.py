"""Rejection-threshold selection.

Two rules are provided for a single family of tests: maximizing the
estimated expected net desirability, and dFDR control (reject as much as
possible subject to an estimated dFDR bound). For heterogeneous costs and
benefits there are two further routes: an independent threshold per subset of
tests sharing the same cost and benefit, or one common threshold chosen by
maximizing the weighted desirability.

Candidate thresholds are exactly the observed statistic values, plus +inf as
the implicit "reject nothing" option whose desirability is 0. Ties in the
objective break toward the largest threshold (fewest rejections).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dfdr.data import DataMatrix
from dfdr.errors import ValidationError
from dfdr.estimators import (
    CostBenefit,
    Pi0Estimate,
    choose_lambda,
    dfdr_values_at,
    estimate_dfdr_at_pvalue,
    estimate_pi0_weighted,
    inherited_null_weights,
    resolve_pi0,
)
from dfdr.resampling import PermutationPlan, build_statistic_set
from dfdr.stats import PValueSet, StatisticSet


@dataclass(frozen=True)
class CurvePoint:
    """One evaluated candidate threshold."""

    tau: float
    dfdr: float
    desirability: float
    discoveries: int


@dataclass(frozen=True)
class DecisionResult:
    """A chosen threshold with the full candidate curve behind it.

    ``rejected`` is the set of test indices with statistic >= tau. For
    p-value decisions the threshold is a p-value cutoff instead and
    ``rejected`` holds the indices with p-value <= tau.
    """

    tau: float
    rejected: frozenset[int]
    dfdr: float
    desirability: float
    pi0: Pi0Estimate
    curve: tuple[CurvePoint, ...]

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


@dataclass(frozen=True)
class Subset:
    """A block of tests sharing one comparison and one cost/benefit pair."""

    name: str
    feature_indices: tuple[int, ...]
    group_a: str
    group_b: str
    benefit: float
    cost: float

    def __post_init__(self) -> None:
        if self.benefit <= 0.0 or self.cost < 0.0:
            raise ValidationError(
                f"subset {self.name!r}: benefit must be > 0 and cost >= 0"
            )
        if len(set(self.feature_indices)) != len(self.feature_indices):
            raise ValidationError(f"subset {self.name!r} repeats a feature index")


@dataclass(frozen=True)
class SubsetPartition:
    """Disjoint subsets of tests, each large enough to estimate on its own."""

    subsets: tuple[Subset, ...]
    min_size: int = 50

    def __post_init__(self) -> None:
        names = [s.name for s in self.subsets]
        if len(set(names)) != len(names):
            raise ValidationError("subset names must be unique")
        seen: dict[tuple[str, str], set[int]] = {}
        for s in self.subsets:
            key = (s.group_a, s.group_b)
            used = seen.setdefault(key, set())
            overlap = used.intersection(s.feature_indices)
            if overlap:
                raise ValidationError(
                    f"subset {s.name!r} overlaps another subset on the same "
                    f"comparison (feature index {min(overlap)})"
                )
            used.update(s.feature_indices)

    def validate_sizes(self) -> None:
        for s in self.subsets:
            if len(s.feature_indices) < self.min_size:
                raise ValidationError(
                    f"subset {s.name!r} has {len(s.feature_indices)} tests, "
                    f"fewer than the minimum {self.min_size}"
                )


@dataclass(frozen=True)
class SubsetDecision:
    subset: Subset
    result: DecisionResult


def _candidate_taus(observed: np.ndarray) -> np.ndarray:
    taus = np.unique(observed)
    if not np.isposinf(taus[-1]):
        taus = np.append(taus, np.inf)
    return taus


def _best_index(desirability: np.ndarray) -> int:
    # ties toward the largest threshold: last index among the maxima
    return int(np.flatnonzero(desirability == desirability.max())[-1])


def _result_at(
    stats: StatisticSet,
    pi0: Pi0Estimate,
    taus: np.ndarray,
    dfdr: np.ndarray,
    desirability: np.ndarray,
    counts: np.ndarray,
    pick: int,
) -> DecisionResult:
    tau = float(taus[pick])
    rejected = frozenset(int(i) for i in np.flatnonzero(stats.observed >= tau))
    curve = tuple(
        CurvePoint(float(t), float(d), float(g), int(c))
        for t, d, g, c in zip(taus, dfdr, desirability, counts)
    )
    return DecisionResult(
        tau=tau,
        rejected=rejected,
        dfdr=float(dfdr[pick]),
        desirability=float(desirability[pick]),
        pi0=pi0,
        curve=curve,
    )


def _scan(stats: StatisticSet, pi0: Pi0Estimate, benefit: float, ratio: float):
    taus = _candidate_taus(stats.observed)
    sorted_obs = np.sort(stats.observed)
    counts = stats.n_tests - np.searchsorted(sorted_obs, taus, side="left")
    dfdr = dfdr_values_at(stats, pi0, taus)
    desirability = benefit * (1.0 - (1.0 + ratio) * dfdr) * counts
    return taus, dfdr, desirability, counts


def maximize_desirability(
    stats: StatisticSet, pi0: Pi0Estimate, cost_benefit: CostBenefit
) -> DecisionResult:
    """Choose the threshold maximizing the estimated expected desirability.

    When every nonempty rejection region has negative estimated desirability,
    the empty region (desirability 0) wins and nothing is rejected.
    """
    b1, ratio = cost_benefit.homogeneous()
    taus, dfdr, desirability, counts = _scan(stats, pi0, b1, ratio)
    return _result_at(stats, pi0, taus, dfdr, desirability, counts, _best_index(desirability))


def control_dfdr(
    stats: StatisticSet,
    pi0: Pi0Estimate,
    alpha: float,
    cost_benefit: CostBenefit | None = None,
) -> DecisionResult:
    """Reject as many hypotheses as possible with estimated dFDR <= alpha.

    Picks the smallest candidate threshold whose dFDR estimate is within the
    bound; discovery counts only shrink as the threshold grows, so this
    maximizes discoveries. With no feasible candidate nothing is rejected.
    The reported desirability uses ``cost_benefit`` if given, otherwise the
    ratio 1/alpha - 1 matching the bound.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha!r}")
    if cost_benefit is None:
        cost_benefit = CostBenefit.from_probability(alpha)
    b1, ratio = cost_benefit.homogeneous()
    taus, dfdr, desirability, counts = _scan(stats, pi0, b1, ratio)
    feasible = np.flatnonzero(dfdr <= alpha)
    pick = int(feasible[0])  # +inf candidate has dfdr 0, so feasible is never empty
    return _result_at(stats, pi0, taus, dfdr, desirability, counts, pick)


def per_subset_optimize(
    partition: SubsetPartition,
    matrix: DataMatrix,
    plan: PermutationPlan,
    pi0_mode="estimate",
) -> tuple[SubsetDecision, ...]:
    """Desirability maximization run independently on each subset of tests.

    Each subset gets its own null statistics (generated from that subset's
    rows only), its own pi0 estimate and tuning threshold, and its own cost
    and benefit. For a single subset covering all rows this reduces exactly
    to maximize_desirability on the whole problem.
    """
    partition.validate_sizes()
    out = []
    for subset in partition.subsets:
        sub = matrix.select_features(subset.feature_indices)
        stats = build_statistic_set(sub, subset.group_a, subset.group_b, plan)
        pi0 = resolve_pi0(stats, pi0_mode)
        cb = CostBenefit(
            benefits=np.array([subset.benefit]), costs=np.array([subset.cost])
        )
        out.append(SubsetDecision(subset=subset, result=maximize_desirability(stats, pi0, cb)))
    return tuple(out)


def common_threshold_weighted(
    stats: StatisticSet,
    weights,
    benefits,
    pi0_weighted: Pi0Estimate,
) -> DecisionResult:
    """One common threshold maximizing the weighted desirability estimate.

    ``weights`` are the per-test sums benefit + cost and ``benefits`` the
    per-test benefits; the null statistics must come from the pooled data,
    each inheriting its generating test's weight. With uniform weights this
    selects the same threshold as maximize_desirability.
    """
    w = np.asarray(weights, dtype=float).ravel()
    b = np.asarray(benefits, dtype=float).ravel()
    if w.size != stats.n_tests or b.size != stats.n_tests:
        raise ValidationError("weights and benefits must each have one value per test")
    if np.any(w < 0.0) or np.any(b < 0.0):
        raise ValidationError("weights and benefits must be nonnegative")
    if not np.any(w > 0.0):
        raise ValidationError("weights must not all be zero")
    if np.any(b > w):
        raise ValidationError("each benefit must not exceed its weight (cost >= 0)")

    taus = _candidate_taus(stats.observed)
    counts = stats.n_tests - np.searchsorted(np.sort(stats.observed), taus, side="left")

    w_obs_ge = _suffix_weight_sums(stats.observed, w, taus)
    b_obs_ge = _suffix_weight_sums(stats.observed, b, taus)
    w_null = inherited_null_weights(w, stats.n_permutations)
    w_null_ge = _suffix_weight_sums(stats.null_stats, w_null, taus)

    with np.errstate(divide="ignore", invalid="ignore"):
        dfdr = (
            pi0_weighted.value
            * (w_null_ge / stats.n_null)
            / (w_obs_ge / stats.n_tests)
        )
    dfdr = np.where(w_obs_ge == 0.0, 0.0, dfdr)
    desirability = b_obs_ge - dfdr * w_obs_ge
    return _result_at(stats, pi0_weighted, taus, dfdr, desirability, counts, _best_index(desirability))


def weighted_pi0_for(stats: StatisticSet, weights) -> Pi0Estimate:
    """Convenience: tuning threshold plus weighted pi0 estimate for pooled stats."""
    lam = choose_lambda(stats.null_stats)
    return estimate_pi0_weighted(stats.observed, stats.null_stats, weights, lam)


def maximize_desirability_pvalues(
    pvals: PValueSet, pi0: Pi0Estimate, cost_benefit: CostBenefit
) -> DecisionResult:
    """Desirability maximization over p-value cutoffs.

    Candidates are the observed p-values plus the "reject nothing" option,
    encoded as the cutoff -inf. Ties break toward the smaller cutoff (fewest
    rejections).
    """
    b1, ratio = cost_benefit.homogeneous()
    cutoffs, dfdr, desirability, counts = _scan_pvalues(pvals, pi0, b1, ratio)
    best = int(np.flatnonzero(desirability == desirability.max())[0])
    return _pvalue_result_at(pvals, pi0, cutoffs, dfdr, desirability, counts, best)


def control_dfdr_pvalues(
    pvals: PValueSet,
    pi0: Pi0Estimate,
    alpha: float,
    cost_benefit: CostBenefit | None = None,
) -> DecisionResult:
    """Largest p-value cutoff with estimated dFDR <= alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha!r}")
    if cost_benefit is None:
        cost_benefit = CostBenefit.from_probability(alpha)
    b1, ratio = cost_benefit.homogeneous()
    cutoffs, dfdr, desirability, counts = _scan_pvalues(pvals, pi0, b1, ratio)
    feasible = np.flatnonzero(dfdr <= alpha)
    pick = int(feasible[-1])  # larger cutoff rejects more; -inf is always feasible
    return _pvalue_result_at(pvals, pi0, cutoffs, dfdr, desirability, counts, pick)


def _scan_pvalues(pvals: PValueSet, pi0: Pi0Estimate, benefit: float, ratio: float):
    cutoffs = np.concatenate([[-np.inf], np.unique(pvals.pvalues)])
    estimates = [estimate_dfdr_at_pvalue(pvals, pi0, c) if c >= 0.0 else None for c in cutoffs]
    dfdr = np.array([0.0 if e is None else e.value for e in estimates])
    counts = np.array([0 if e is None else e.discoveries for e in estimates])
    desirability = benefit * (1.0 - (1.0 + ratio) * dfdr) * counts
    return cutoffs, dfdr, desirability, counts


def _pvalue_result_at(pvals, pi0, cutoffs, dfdr, desirability, counts, pick) -> DecisionResult:
    cutoff = float(cutoffs[pick])
    rejected = frozenset(int(i) for i in np.flatnonzero(pvals.pvalues <= cutoff))
    curve = tuple(
        CurvePoint(float(t), float(d), float(g), int(c))
        for t, d, g, c in zip(cutoffs, dfdr, desirability, counts)
    )
    return DecisionResult(
        tau=cutoff,
        rejected=rejected,
        dfdr=float(dfdr[pick]),
        desirability=float(desirability[pick]),
        pi0=pi0,
        curve=curve,
    )


def _suffix_weight_sums(values: np.ndarray, weights: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Sum of weights over entries with value >= tau, for each tau."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    w_sorted = weights[order]
    suffix = np.concatenate([np.cumsum(w_sorted[::-1])[::-1], [0.0]])
    idx = np.searchsorted(sorted_vals, taus, side="left")
    return suffix[idx]

"""Estimators for the true-null proportion, the dFDR, and the desirability.

The decisive false discovery rate (dFDR) at a threshold tau is the ratio of
expected false discoveries to expected discoveries for the rejection region
[tau, inf), or 0 when nothing can be rejected. It is estimated by comparing
the exceedance proportion of the resampled null statistics with that of the
observed statistics, scaled by an estimate of the true-null proportion pi0.

All threshold comparisons are inclusive: a test is rejected when its
statistic is >= tau (for p-values, <= the cutoff). Rejection regions are
single intervals; the +inf sentinel statistic lies inside every region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dfdr.errors import UndefinedEstimateError, ValidationError
from dfdr.stats import PValueSet, StatisticSet

# P(|Z| < 1/2) for a standard normal Z: the target proportion of null
# statistics below the pi0 tuning threshold lambda.
CENTRAL_BAND_MASS = 0.382925

# Null p-values are uniform, so the tuning threshold needs no resampling:
# the null share of p-values above 1 - CENTRAL_BAND_MASS is CENTRAL_BAND_MASS.
PVALUE_BAND_THRESHOLD = 1.0 - CENTRAL_BAND_MASS


@dataclass(frozen=True)
class Pi0Estimate:
    """Estimated (or assumed) proportion of true null hypotheses.

    ``lam`` is the tuning threshold used by the quantile-matching estimate;
    it is NaN for the fixed and user-supplied modes.
    """

    value: float
    lam: float
    mode: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValidationError(f"pi0 must lie in [0, 1], got {self.value!r}")
        if self.mode not in ("estimated", "fixed-one", "user-supplied"):
            raise ValidationError(f"unknown pi0 mode {self.mode!r}")

    @classmethod
    def fixed_one(cls) -> "Pi0Estimate":
        """The conservative choice pi0 = 1."""
        return cls(value=1.0, lam=math.nan, mode="fixed-one")

    @classmethod
    def user(cls, value: float) -> "Pi0Estimate":
        return cls(value=float(value), lam=math.nan, mode="user-supplied")


@dataclass(frozen=True)
class CostBenefit:
    """Per-test benefits of a true discovery and costs of a false discovery.

    Arrays of length one denote the homogeneous case (every test shares the
    same benefit and cost). The probability threshold ``p`` attached to the
    homogeneous case is (1 + cost/benefit)^-1: the upper bound on the
    false-rejection probability inside an optimal rejection region.
    """

    benefits: np.ndarray
    costs: np.ndarray

    def __post_init__(self) -> None:
        b = np.atleast_1d(np.asarray(self.benefits, dtype=float))
        c = np.atleast_1d(np.asarray(self.costs, dtype=float))
        object.__setattr__(self, "benefits", b)
        object.__setattr__(self, "costs", c)
        if b.size != c.size:
            raise ValidationError("benefits and costs must have equal length")
        if np.any(b < 0.0) or np.any(c < 0.0):
            raise ValidationError("benefits and costs must be nonnegative")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValidationError("benefits and costs must be finite")

    @classmethod
    def from_ratio(cls, cost_ratio: float) -> "CostBenefit":
        """Homogeneous case with benefit 1 and cost equal to the given ratio."""
        return cls(benefits=np.array([1.0]), costs=np.array([float(cost_ratio)]))

    @classmethod
    def from_probability(cls, p: float) -> "CostBenefit":
        """Homogeneous case from a probability threshold p = (1 + c/b)^-1."""
        return cls.from_ratio(p_to_cost_ratio(p))

    @classmethod
    def per_test(cls, benefits, costs) -> "CostBenefit":
        return cls(benefits=np.asarray(benefits, float), costs=np.asarray(costs, float))

    @property
    def is_homogeneous(self) -> bool:
        return bool(
            np.all(self.benefits == self.benefits[0])
            and np.all(self.costs == self.costs[0])
        )

    def homogeneous(self) -> tuple[float, float]:
        """(benefit, cost/benefit ratio); requires equal per-test values and benefit > 0."""
        if not self.is_homogeneous:
            raise ValidationError("costs and benefits differ between tests")
        b1 = float(self.benefits[0])
        if b1 <= 0.0:
            raise ValidationError("benefit must be positive")
        return b1, float(self.costs[0]) / b1

    @property
    def probability(self) -> float:
        """p = (1 + c/b)^-1 for the homogeneous case."""
        _, ratio = self.homogeneous()
        return 1.0 / (1.0 + ratio)

    @property
    def weights(self) -> np.ndarray:
        """Per-test weights benefit + cost, as used by the weighted dFDR."""
        return self.benefits + self.costs


@dataclass(frozen=True)
class DfdrEstimate:
    """dFDR estimate at one threshold, with the counts behind it."""

    tau: float
    value: float
    discoveries: int
    null_exceedances: int


def p_to_cost_ratio(p: float) -> float:
    """Cost-to-benefit ratio 1/p - 1 for a probability threshold p in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise ValidationError(f"probability threshold must lie in (0, 1], got {p!r}")
    return 1.0 / p - 1.0


def choose_lambda(null_stats) -> float:
    """Tuning threshold for the pi0 estimate.

    Picks, among the null statistic values themselves plus +inf, the value
    whose empirical proportion of null statistics strictly below it is
    closest to CENTRAL_BAND_MASS. Ties break toward the smaller value.
    """
    nulls = np.sort(np.asarray(null_stats, dtype=float).ravel())
    if nulls.size < 1:
        raise ValidationError("need at least one null statistic")
    candidates = np.unique(nulls)
    if not np.isposinf(candidates[-1]):
        candidates = np.append(candidates, np.inf)
    below = np.searchsorted(nulls, candidates, side="left") / nulls.size
    distance = np.abs(below - CENTRAL_BAND_MASS)
    return float(candidates[int(np.argmin(distance))])


def estimate_pi0(observed, null_stats, lam: float) -> Pi0Estimate:
    """Quantile-matching pi0 estimate at tuning threshold lam.

    The raw ratio (share of observed statistics below lam) / (share of null
    statistics below lam) is clamped into [0, 1]; raw values above 1 are
    meaningless as a proportion. Raises UndefinedEstimateError when no null
    statistic falls below lam.
    """
    obs = np.asarray(observed, dtype=float).ravel()
    nulls = np.asarray(null_stats, dtype=float).ravel()
    null_below = int(np.count_nonzero(nulls < lam))
    if null_below == 0:
        raise UndefinedEstimateError(
            f"no null statistic below lambda={lam!r}; "
            "consider the conservative mode pi0 = 1"
        )
    obs_below = int(np.count_nonzero(obs < lam))
    raw = (obs_below / obs.size) / (null_below / nulls.size)
    return Pi0Estimate(value=min(1.0, max(0.0, raw)), lam=lam, mode="estimated")


def estimate_pi0_weighted(observed, null_stats, weights, lam: float) -> Pi0Estimate:
    """Weighted pi0 estimate: indicator counts replaced by weight sums.

    Each null statistic inherits the weight of the test that generated it
    (null ordering is permutation-major). Reduces to estimate_pi0 when all
    weights are equal.
    """
    obs = np.asarray(observed, dtype=float).ravel()
    nulls = np.asarray(null_stats, dtype=float).ravel()
    if nulls.size == 0 or nulls.size % obs.size != 0:
        raise ValidationError(
            f"{nulls.size} null statistics cannot inherit weights from {obs.size} tests"
        )
    w = _checked_weights(weights, obs.size)
    w_null = inherited_null_weights(w, nulls.size // obs.size)
    null_below = float(np.sum(w_null[nulls < lam]))
    if null_below == 0.0:
        raise UndefinedEstimateError(
            f"no positive null weight below lambda={lam!r}; "
            "consider the conservative mode pi0 = 1"
        )
    obs_below = float(np.sum(w[obs < lam]))
    raw = (obs_below / obs.size) / (null_below / nulls.size)
    return Pi0Estimate(value=min(1.0, max(0.0, raw)), lam=lam, mode="estimated")


def estimate_pi0_from_pvalues(pvals: PValueSet) -> Pi0Estimate:
    """pi0 estimate for the p-value route, using the analytic uniform null.

    The share of p-values above PVALUE_BAND_THRESHOLD, divided by the null
    share CENTRAL_BAND_MASS, clamped into [0, 1].
    """
    frac = np.count_nonzero(pvals.pvalues > PVALUE_BAND_THRESHOLD) / pvals.n_tests
    raw = frac / CENTRAL_BAND_MASS
    return Pi0Estimate(
        value=min(1.0, max(0.0, raw)), lam=PVALUE_BAND_THRESHOLD, mode="estimated"
    )


def resolve_pi0(stats: StatisticSet, mode) -> Pi0Estimate:
    """Build a Pi0Estimate from a mode: "estimate", "one", or a number."""
    if mode == "one":
        return Pi0Estimate.fixed_one()
    if mode == "estimate":
        lam = choose_lambda(stats.null_stats)
        return estimate_pi0(stats.observed, stats.null_stats, lam)
    if isinstance(mode, (int, float)) and not isinstance(mode, bool):
        return Pi0Estimate.user(float(mode))
    raise ValidationError(f"unknown pi0 mode {mode!r}")


def _dfdr_scalar(k_null: int, k_obs: int, n_null: int, n_tests: int, pi0: float) -> float:
    if k_obs == 0:
        return 0.0
    return pi0 * (k_null / n_null) / (k_obs / n_tests)


def dfdr_values_at(stats: StatisticSet, pi0: Pi0Estimate, taus) -> np.ndarray:
    """Vectorized dFDR estimates at each threshold in taus."""
    taus = np.asarray(taus, dtype=float)
    sorted_obs = np.sort(stats.observed)
    sorted_null = np.sort(stats.null_stats)
    k_obs = stats.n_tests - np.searchsorted(sorted_obs, taus, side="left")
    k_null = stats.n_null - np.searchsorted(sorted_null, taus, side="left")
    with np.errstate(divide="ignore", invalid="ignore"):
        values = pi0.value * (k_null / stats.n_null) / (k_obs / stats.n_tests)
    return np.where(k_obs == 0, 0.0, values)


def estimate_dfdr_at_tau(stats: StatisticSet, pi0: Pi0Estimate, tau: float) -> DfdrEstimate:
    """dFDR estimate for the rejection region [tau, inf)."""
    k_obs = int(np.count_nonzero(stats.observed >= tau))
    k_null = int(np.count_nonzero(stats.null_stats >= tau))
    value = _dfdr_scalar(k_null, k_obs, stats.n_null, stats.n_tests, pi0.value)
    return DfdrEstimate(tau=float(tau), value=value, discoveries=k_obs, null_exceedances=k_null)


def estimate_dfdr_at_pvalue(pvals: PValueSet, pi0: Pi0Estimate, cutoff: float) -> DfdrEstimate:
    """dFDR estimate when rejecting every p-value <= cutoff.

    Uses the uniform null distribution of p-values directly, so no resampled
    nulls are needed; the null exceedance count reported is the expected
    count m * cutoff rounded to the nearest integer.
    """
    if not 0.0 <= cutoff <= 1.0:
        raise ValidationError(f"p-value cutoff must lie in [0, 1], got {cutoff!r}")
    m = pvals.n_tests
    k = int(np.count_nonzero(pvals.pvalues <= cutoff))
    value = 0.0 if k == 0 else pi0.value * cutoff / (k / m)
    return DfdrEstimate(
        tau=float(cutoff),
        value=value,
        discoveries=k,
        null_exceedances=int(round(m * cutoff)),
    )


def estimate_desirability(
    stats: StatisticSet, pi0: Pi0Estimate, cost_benefit: CostBenefit, tau: float
) -> float:
    """Estimated expected net desirability of rejecting all statistics >= tau.

    benefit * (1 - (1 + cost/benefit) * dFDR(tau)) * (number of discoveries).
    """
    b1, ratio = cost_benefit.homogeneous()
    est = estimate_dfdr_at_tau(stats, pi0, tau)
    return b1 * (1.0 - (1.0 + ratio) * est.value) * est.discoveries


def inherited_null_weights(weights: np.ndarray, n_permutations: int) -> np.ndarray:
    """Weights for null statistics: each inherits its generating test's weight."""
    return np.tile(weights, n_permutations)


def estimate_weighted_dfdr(stats: StatisticSet, pi0: Pi0Estimate, weights, tau: float) -> float:
    """Weighted dFDR estimate at tau with nonnegative per-test weights.

    Indicator counts become weight sums; with constant weights this equals
    estimate_dfdr_at_tau to machine precision. Zero when no rejected test
    carries positive weight.
    """
    w = _checked_weights(weights, stats.n_tests)
    w_null = inherited_null_weights(w, stats.n_permutations)
    denom = float(np.sum(w[stats.observed >= tau]))
    if denom == 0.0:
        return 0.0
    num = float(np.sum(w_null[stats.null_stats >= tau]))
    return pi0.value * (num / stats.n_null) / (denom / stats.n_tests)


def dfdr_from_cdfs(pi0: float, null_cdf_at_tau: float, marginal_cdf_at_tau: float) -> float:
    """Closed-form dFDR pi0 * (1 - F0(tau)) / (1 - F(tau)) for analytic distributions.

    Returns 0 when the marginal exceedance probability is 0.
    """
    marginal_tail = 1.0 - marginal_cdf_at_tau
    if marginal_tail == 0.0:
        return 0.0
    return pi0 * (1.0 - null_cdf_at_tau) / marginal_tail


def weighted_dfdr_from_cdfs(pi0: float, null_cdfs_at_tau, marginal_cdfs_at_tau, weights) -> float:
    """Closed-form weighted dFDR from per-component analytic distributions.

    Equals dfdr_from_cdfs applied to the weight-mixture distributions: giving
    one test more weight is equivalent to increasing its representation in
    the sample proportionally.
    """
    w = np.asarray(weights, dtype=float)
    f0 = np.asarray(null_cdfs_at_tau, dtype=float)
    f = np.asarray(marginal_cdfs_at_tau, dtype=float)
    denom = float(np.sum(w * (1.0 - f)))
    if denom == 0.0:
        return 0.0
    return pi0 * float(np.sum(w * (1.0 - f0))) / denom


def _checked_weights(weights, n_tests: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float).ravel()
    if w.size != n_tests:
        raise ValidationError(f"{w.size} weights for {n_tests} tests")
    if np.any(w < 0.0):
        raise ValidationError("weights must be nonnegative")
    if not np.any(w > 0.0):
        raise ValidationError("at least one weight must be positive")
    return w

"""Truth-labeled synthetic instances and empirically measured error rates.

The generator produces a two-group matrix of independent standard-normal
measurements in which alternative features carry a mean shift in the second
group, so the null and marginal distributions of the absolute two-sample t
statistic are available in closed form for oracle comparisons. An optional
equicorrelated-block mode adds within-block feature dependence while leaving
the marginals unchanged.

Measured quantities, pooled over replicates, are the realized counterparts of
the error-rate definitions: the FDR (conditional false fraction times the
probability of any rejection), the pFDR (conditional false fraction), the PFP
(ratio of expected counts, undefined without rejections), and the dFDR (the
PFP when defined, else 0). The pooled false fraction among rejected tests is
also the realized conditional probability that a rejected hypothesis is a
true null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from dfdr.data import DataMatrix
from dfdr.decision import DecisionResult, control_dfdr, maximize_desirability
from dfdr.errors import ValidationError
from dfdr.estimators import (
    CostBenefit,
    dfdr_from_cdfs,
    estimate_dfdr_at_tau,
    resolve_pi0,
)
from dfdr.resampling import PermutationPlan, build_statistic_set
from dfdr.stats import StatisticSet


@dataclass(frozen=True)
class SimulationConfig:
    """Generative settings for one Monte Carlo experiment.

    ``truth_mode`` "fixed" plants exactly floor(pi0 * n_tests) true nulls per
    replicate; "random" draws each truth bit independently with alternative
    probability 1 - pi0. Blocks of ``block_size`` > 1 features share an
    equicorrelated noise component with correlation ``block_rho``.
    """

    n_tests: int
    pi0: float
    n_a: int = 10
    n_b: int = 10
    effect: float = 2.0
    n_permutations: int = 25
    replicates: int = 200
    seed: int = 0
    truth_mode: str = "fixed"
    block_size: int = 1
    block_rho: float = 0.0

    def __post_init__(self) -> None:
        if self.n_tests < 1:
            raise ValidationError("n_tests must be >= 1")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValidationError("pi0 must lie in [0, 1]")
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1")
        if self.n_a < 2 or self.n_b < 2:
            raise ValidationError("both groups need at least two subjects")
        if not math.isfinite(self.effect):
            raise ValidationError("effect size must be finite")
        if self.truth_mode not in ("fixed", "random"):
            raise ValidationError(f"unknown truth mode {self.truth_mode!r}")
        if self.block_size < 1:
            raise ValidationError("block_size must be >= 1")
        if not 0.0 <= self.block_rho < 1.0:
            raise ValidationError("block_rho must lie in [0, 1)")


@dataclass(frozen=True)
class ReplicateOutcome:
    """Realized rejection record for one replicate."""

    tau: float
    dfdr_estimate: float
    pi0_value: float
    n_rejected: int
    n_false: int
    rejected_stats: np.ndarray
    rejected_is_null: np.ndarray


@dataclass(frozen=True)
class LocalBin:
    """Realized false fraction inside one threshold interval of the rejection region."""

    lo_offset: float
    hi_offset: float
    rejections: int
    false_rejections: int
    rate: float


@dataclass(frozen=True)
class ErrorRateReport:
    """Empirical error rates pooled over replicates.

    ``pfp`` and ``conditional_prob`` are None when no test was rejected in
    any replicate (the PFP is undefined there); ``dfdr`` is 0 in that case.
    """

    fdr: float
    fdr_se: float
    pfdr: float | None
    pfdr_se: float | None
    pfp: float | None
    dfdr: float
    dfdr_se: float | None
    conditional_prob: float | None
    total_rejections: int
    total_false_rejections: int
    replicates_with_rejections: int
    replicates: int
    outcomes: tuple[ReplicateOutcome, ...] = field(repr=False)


def _instance_seeds(config: SimulationConfig, replicate: int):
    root = np.random.SeedSequence(entropy=config.seed, spawn_key=(replicate,))
    data_seq, plan_seq = root.spawn(2)
    plan_seed = int(plan_seq.generate_state(1, np.uint64)[0])
    return data_seq, plan_seed


def generate_instance(config: SimulationConfig, replicate: int) -> tuple[DataMatrix, np.ndarray]:
    """One truth-labeled matrix; deterministic given (seed, replicate).

    Returns the matrix and the truth bits h (0 = null true, 1 = alternative).
    """
    data_seq, _ = _instance_seeds(config, replicate)
    rng = np.random.default_rng(data_seq)
    m, n_a, n_b = config.n_tests, config.n_a, config.n_b
    n = n_a + n_b

    if config.truth_mode == "fixed":
        n_null = math.floor(config.pi0 * m + 1e-9)
        h = np.zeros(m, dtype=int)
        h[n_null:] = 1
        rng.shuffle(h)
    else:
        h = (rng.random(m) < 1.0 - config.pi0).astype(int)

    if config.block_size > 1 and config.block_rho > 0.0:
        n_blocks = -(-m // config.block_size)
        shared = rng.standard_normal((n_blocks, n))
        block_of = np.arange(m) // config.block_size
        noise = (
            math.sqrt(1.0 - config.block_rho) * rng.standard_normal((m, n))
            + math.sqrt(config.block_rho) * shared[block_of]
        )
    else:
        noise = rng.standard_normal((m, n))

    values = noise
    values[h == 1, n_a:] += config.effect

    digits = len(str(m))
    return (
        DataMatrix(
            values=values,
            feature_ids=tuple(f"f{i:0{digits}d}" for i in range(m)),
            subject_ids=tuple(
                [f"a{j:02d}" for j in range(n_a)] + [f"b{j:02d}" for j in range(n_b)]
            ),
            labels=tuple(["A"] * n_a + ["B"] * n_b),
        ),
        h,
    )


def build_replicate_stats(config: SimulationConfig, replicate: int) -> tuple[StatisticSet, np.ndarray]:
    """Statistics plus truth bits for one replicate of the full pipeline."""
    matrix, h = generate_instance(config, replicate)
    _, plan_seed = _instance_seeds(config, replicate)
    plan = PermutationPlan(n_permutations=config.n_permutations, seed=plan_seed)
    return build_statistic_set(matrix, "A", "B", plan), h


@dataclass(frozen=True)
class DesirabilityRule:
    """Decision rule: maximize desirability at a fixed cost-to-benefit ratio."""

    cost_ratio: float = 19.0
    pi0_mode: object = "estimate"

    def __call__(self, stats: StatisticSet) -> DecisionResult:
        pi0 = resolve_pi0(stats, self.pi0_mode)
        return maximize_desirability(stats, pi0, CostBenefit.from_ratio(self.cost_ratio))


@dataclass(frozen=True)
class DfdrControlRule:
    """Decision rule: reject as much as possible with estimated dFDR <= alpha."""

    alpha: float = 0.05
    pi0_mode: object = "estimate"

    def __call__(self, stats: StatisticSet) -> DecisionResult:
        pi0 = resolve_pi0(stats, self.pi0_mode)
        return control_dfdr(stats, pi0, self.alpha)


@dataclass(frozen=True)
class FixedThresholdRule:
    """Decision rule: reject every statistic >= tau, no optimization."""

    tau: float
    pi0_mode: object = "one"

    def __call__(self, stats: StatisticSet) -> DecisionResult:
        pi0 = resolve_pi0(stats, self.pi0_mode)
        est = estimate_dfdr_at_tau(stats, pi0, self.tau)
        rejected = frozenset(int(i) for i in np.flatnonzero(stats.observed >= self.tau))
        return DecisionResult(
            tau=float(self.tau),
            rejected=rejected,
            dfdr=est.value,
            desirability=math.nan,
            pi0=pi0,
            curve=(),
        )


def measure_error_rates(config: SimulationConfig, rule) -> ErrorRateReport:
    """Run the full pipeline per replicate and pool the realized error rates."""
    outcomes = []
    fractions = []  # V/R per replicate, 0 when R == 0
    rejecting = []  # V/R over replicates with R > 0
    total_v = 0
    total_r = 0
    for r in range(config.replicates):
        stats, h = build_replicate_stats(config, r)
        decision = rule(stats)
        idx = np.fromiter(decision.rejected, dtype=int, count=len(decision.rejected))
        n_rejected = idx.size
        is_null = h[idx] == 0 if n_rejected else np.zeros(0, dtype=bool)
        n_false = int(np.count_nonzero(is_null))
        order = np.argsort(stats.observed[idx]) if n_rejected else np.zeros(0, dtype=int)
        outcomes.append(
            ReplicateOutcome(
                tau=decision.tau,
                dfdr_estimate=decision.dfdr,
                pi0_value=decision.pi0.value,
                n_rejected=n_rejected,
                n_false=n_false,
                rejected_stats=stats.observed[idx][order],
                rejected_is_null=is_null[order],
            )
        )
        total_v += n_false
        total_r += n_rejected
        if n_rejected > 0:
            q = n_false / n_rejected
            fractions.append(q)
            rejecting.append(q)
        else:
            fractions.append(0.0)

    n = config.replicates
    fractions_arr = np.asarray(fractions)
    fdr = float(fractions_arr.mean())
    fdr_se = float(fractions_arr.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan

    if rejecting:
        rej = np.asarray(rejecting)
        pfdr = float(rej.mean())
        pfdr_se = float(rej.std(ddof=1) / math.sqrt(rej.size)) if rej.size > 1 else math.nan
        pooled = total_v / total_r
        pfp = pooled
        dfdr = pooled
        dfdr_se = math.sqrt(pooled * (1.0 - pooled) / total_r)
        conditional = pooled
    else:
        pfdr = pfdr_se = pfp = conditional = dfdr_se = None
        dfdr = 0.0

    return ErrorRateReport(
        fdr=fdr,
        fdr_se=fdr_se,
        pfdr=pfdr,
        pfdr_se=pfdr_se,
        pfp=pfp,
        dfdr=dfdr,
        dfdr_se=dfdr_se,
        conditional_prob=conditional,
        total_rejections=total_r,
        total_false_rejections=total_v,
        replicates_with_rejections=len(rejecting),
        replicates=n,
        outcomes=tuple(outcomes),
    )


def measure_local_dfdr(outcomes, offsets) -> tuple[LocalBin, ...]:
    """Realized false fractions in threshold intervals of the rejection region.

    ``offsets`` are increasing breakpoints relative to each replicate's chosen
    threshold; bins are [tau*, tau* + o1), [tau* + o1, tau* + o2), ..., with a
    final bin extending to infinity. An empty offsets sequence yields the
    single bin covering the whole rejection region. Empty bins report rate 0.
    """
    offsets = [float(o) for o in offsets]
    if any(o <= 0 for o in offsets) or sorted(offsets) != offsets:
        raise ValidationError("offsets must be positive and increasing")
    edges = [0.0] + offsets + [math.inf]

    bins = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rejections = 0
        false_rejections = 0
        for outcome in outcomes:
            if outcome.n_rejected == 0:
                continue
            rel = outcome.rejected_stats - outcome.tau
            in_bin = (rel >= lo) & (rel < hi)
            rejections += int(np.count_nonzero(in_bin))
            false_rejections += int(np.count_nonzero(outcome.rejected_is_null[in_bin]))
        rate = false_rejections / rejections if rejections else 0.0
        bins.append(
            LocalBin(
                lo_offset=lo,
                hi_offset=hi,
                rejections=rejections,
                false_rejections=false_rejections,
                rate=rate,
            )
        )
    return tuple(bins)


def boundary_offset(outcomes, fraction: float = 0.05) -> float:
    """Offset h so that [tau*, tau* + h) captures about ``fraction`` of rejections."""
    if not 0.0 < fraction < 1.0:
        raise ValidationError("fraction must lie in (0, 1)")
    rel = np.concatenate(
        [o.rejected_stats - o.tau for o in outcomes if o.n_rejected > 0]
    )
    if rel.size == 0:
        raise ValidationError("no rejections recorded; boundary bin undefined")
    h = float(np.quantile(rel, fraction))
    if h <= 0.0:
        positive = rel[rel > 0.0]
        if positive.size == 0:
            raise ValidationError("all rejections sit exactly at the threshold")
        h = float(positive.min())
    return h


def analytic_statistic_cdfs(config: SimulationConfig):
    """Closed-form CDFs (null, alternative, marginal) of the absolute statistic.

    Valid for equal group sizes, where the unequal-variance statistic
    coincides with the pooled two-sample t: the null distribution is a folded
    central t and the alternative a folded noncentral t with noncentrality
    effect * sqrt(n/2). The marginal mixes them with the realized null
    proportion (exact in fixed truth mode).
    """
    if config.n_a != config.n_b:
        raise ValidationError("closed-form CDFs require equal group sizes")
    df = config.n_a + config.n_b - 2
    ncp = config.effect * math.sqrt(config.n_a / 2.0)
    if config.truth_mode == "fixed":
        pi0 = math.floor(config.pi0 * config.n_tests + 1e-9) / config.n_tests
    else:
        pi0 = config.pi0

    def null_cdf(tau):
        tau = np.asarray(tau, dtype=float)
        return sps.t.cdf(tau, df) - sps.t.cdf(-tau, df)

    def alt_cdf(tau):
        tau = np.asarray(tau, dtype=float)
        return sps.nct.cdf(tau, df, ncp) - sps.nct.cdf(-tau, df, ncp)

    def marginal_cdf(tau):
        return pi0 * null_cdf(tau) + (1.0 - pi0) * alt_cdf(tau)

    return null_cdf, alt_cdf, marginal_cdf


def analytic_dfdr(config: SimulationConfig, tau: float) -> float:
    """True dFDR of the region [tau, inf) under the generative model."""
    null_cdf, _, marginal_cdf = analytic_statistic_cdfs(config)
    if config.truth_mode == "fixed":
        pi0 = math.floor(config.pi0 * config.n_tests + 1e-9) / config.n_tests
    else:
        pi0 = config.pi0
    return dfdr_from_cdfs(pi0, float(null_cdf(tau)), float(marginal_cdf(tau)))

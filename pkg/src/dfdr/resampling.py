"""Permutation null distributions.

Whole subject columns are relabeled, never individual cells, so correlations
between features are preserved in the null. Group sizes are kept fixed and
the relabeling is drawn uniformly at random with replacement from the
permutation group; the identity permutation is not excluded.

Reproducibility contract: permutation ``b`` is generated from the PCG64
stream seeded with ``numpy.random.SeedSequence(entropy=seed, spawn_key=(b,))``,
so results are deterministic for a given seed, independent of platform and of
whether permutations are evaluated in parallel. Null statistics are ordered
by permutation index, then feature index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dfdr.data import DataMatrix
from dfdr.errors import ValidationError
from dfdr.stats import StatisticSet, abs_t_from_columns


@dataclass(frozen=True)
class PermutationPlan:
    """How many label permutations to draw and from which seed."""

    n_permutations: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_permutations < 1:
            raise ValidationError("n_permutations must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be a nonnegative integer")


def permutation_indices(plan: PermutationPlan, index: int, size: int) -> np.ndarray:
    """The permutation of ``range(size)`` used at permutation ``index``."""
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=plan.seed, spawn_key=(index,))
    )
    return rng.permutation(size)


def null_from_permutations(
    matrix: DataMatrix,
    group_a: str,
    group_b: str,
    permutations,
    statistic=abs_t_from_columns,
) -> np.ndarray:
    """Null statistics for an explicit sequence of label permutations.

    Each permutation reassigns the pooled columns of the two groups to the
    group slots while keeping group sizes fixed. Useful for forcing specific
    permutations (e.g. the identity) in tests.
    """
    cols_a = matrix.group_columns(group_a)
    cols_b = matrix.group_columns(group_b)
    pool = np.concatenate([cols_a, cols_b])
    n_a = cols_a.size
    m = matrix.n_features
    out = np.empty(m * len(permutations), dtype=float)
    for b, perm in enumerate(permutations):
        perm = np.asarray(perm, dtype=np.intp)
        if perm.size != pool.size or not np.array_equal(np.sort(perm), np.arange(pool.size)):
            raise ValidationError(f"permutation {b} is not a permutation of the pooled columns")
        shuffled = pool[perm]
        out[b * m : (b + 1) * m] = statistic(matrix.values, shuffled[:n_a], shuffled[n_a:])
    return out


def permutation_null(
    matrix: DataMatrix,
    group_a: str,
    group_b: str,
    plan: PermutationPlan,
    statistic=abs_t_from_columns,
) -> np.ndarray:
    """Null statistics from ``plan.n_permutations`` random label permutations."""
    cols_a = matrix.group_columns(group_a)
    cols_b = matrix.group_columns(group_b)
    size = cols_a.size + cols_b.size
    perms = (
        permutation_indices(plan, b, size) for b in range(plan.n_permutations)
    )
    return null_from_permutations(matrix, group_a, group_b, list(perms), statistic)


def build_statistic_set(
    matrix: DataMatrix,
    group_a: str,
    group_b: str,
    plan: PermutationPlan,
    statistic=abs_t_from_columns,
) -> StatisticSet:
    """Observed statistics plus their permutation null, as one StatisticSet."""
    observed = statistic(
        matrix.values, matrix.group_columns(group_a), matrix.group_columns(group_b)
    )
    null_stats = permutation_null(matrix, group_a, group_b, plan, statistic)
    return StatisticSet(
        observed=observed, null_stats=null_stats, n_permutations=plan.n_permutations
    )

import numpy as np
import pytest

from dfdr import DataMatrix, Pi0Estimate, StatisticSet


@pytest.fixture
def tiny_matrix() -> DataMatrix:
    """3 features x 4 subjects, two groups of two."""
    return DataMatrix(
        values=np.array(
            [
                [1.0, 2.0, 3.0, 4.0],
                [5.0, 5.0, 5.0, 5.0],
                [2.0, 4.0, 1.0, 3.0],
            ]
        ),
        feature_ids=("g1", "g2", "g3"),
        subject_ids=("s1", "s2", "s3", "s4"),
        labels=("A", "A", "B", "B"),
    )


@pytest.fixture
def four_test_stats() -> StatisticSet:
    """The worked 4-test example: one permutation, hand-checkable counts."""
    return StatisticSet(
        observed=np.array([3.0, 2.0, 1.0, 0.5]),
        null_stats=np.array([0.5, 0.4, 0.3, 0.2]),
        n_permutations=1,
    )


@pytest.fixture
def pi0_one() -> Pi0Estimate:
    return Pi0Estimate.fixed_one()


def random_statistic_set(rng: np.random.Generator, max_m: int = 50, max_b: int = 5) -> StatisticSet:
    """Random small instance with ties (one-decimal rounding) and occasional +inf."""
    m = int(rng.integers(1, max_m + 1))
    b = int(rng.integers(1, max_b + 1))
    observed = np.round(np.abs(rng.normal(1.0, 1.0, size=m)), 1)
    nulls = np.round(np.abs(rng.normal(0.8, 0.8, size=m * b)), 1)
    if rng.random() < 0.1:
        observed[rng.integers(0, m)] = np.inf
    return StatisticSet(observed=observed, null_stats=nulls, n_permutations=b)

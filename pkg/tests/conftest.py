import numpy as np
import pytest

from expertfind.learners import Dataset


def blobs_two_class(n=200, seed=0):
    """Two well-separated Gaussian blobs in 2-D."""
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.vstack(
        [
            rng.normal(0.0, 1.0, size=(half, 2)),
            rng.normal(5.0, 1.0, size=(n - half, 2)),
        ]
    )
    y = np.array([0] * half + [1] * (n - half))
    perm = rng.permutation(n)
    return Dataset(X[perm], y[perm])


def blobs_three_class(n=600, p=30, seed=7, informative=0):
    """Separable 3-class data: one strongly informative feature among noise."""
    rng = np.random.default_rng(seed)
    per = n // 3
    y = np.repeat([0, 1, 2], per)
    X = rng.normal(0.0, 1.0, size=(len(y), p))
    X[:, informative] += y * 5.0
    # two mildly informative companions
    X[:, (informative + 1) % p] += (y == 0) * 1.5
    X[:, (informative + 2) % p] += (y == 2) * 1.5
    perm = rng.permutation(len(y))
    return Dataset(X[perm], y[perm])


@pytest.fixture
def two_blobs():
    return blobs_two_class()


@pytest.fixture
def three_blobs():
    return blobs_three_class()

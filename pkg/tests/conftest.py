"""Shared randomized generators for the test suite.

Everything takes an explicit numpy Generator so each test pins its own
seed; nothing here draws from global state.
"""

import numpy as np

from infera.dist import JointDistribution, from_dense
from infera.mechanism import EventProfile, PrivacyBudget


def bit_table(n: int) -> np.ndarray:
    """(2**n, n) little-endian bit table."""
    return (np.arange(2**n)[:, None] >> np.arange(n)) & 1


def random_prior(rng: np.random.Generator, n: int, floor: float = 0.0) -> JointDistribution:
    """Random dense binary prior; floor > 0 keeps every entry supported."""
    w = rng.gamma(1.0, size=2**n) + floor
    return from_dense(n, 2, w)


def random_budget(
    rng: np.random.Generator, n: int, low: float = 0.05, high: float = 1.0
) -> PrivacyBudget:
    return PrivacyBudget(rng.uniform(low, high, size=n))


def random_dp_profile(rng: np.random.Generator, n: int, budget: PrivacyBudget) -> EventProfile:
    """Random profile that satisfies the budget.

    Smooth a free log-profile g by the weighted-Hamming infimal
    convolution l(x) = min_u (g(u) + sum_i eps_i [x_i != u_i]); the result
    changes by at most eps_i along coordinate i, and exponentiating a
    max-shifted l keeps every entry in (0, 1].
    """
    bits = bit_table(n)
    g = rng.uniform(-3.0, 0.0, size=2**n)
    dist = (bits[:, None, :] != bits[None, :, :]).astype(np.float64) @ budget.eps
    smoothed = (g[None, :] + dist).min(axis=1)
    smoothed -= smoothed.max()
    return EventProfile(n=n, alphabet_size=2, values=np.exp(smoothed))


def random_monotone(rng: np.random.Generator, n: int) -> np.ndarray:
    """Values of a random nondecreasing function on {0,1}^n.

    Max of two nonnegative-weight linear forms, so monotone by
    construction and cheap to vary.
    """
    bits = bit_table(n).astype(np.float64)
    w1 = rng.uniform(0.0, 1.0, size=n)
    w2 = rng.uniform(0.0, 1.0, size=n)
    c = rng.uniform(0.0, 0.5)
    return np.maximum(bits @ w1, bits @ w2 + c)

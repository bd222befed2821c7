"""Dense joint distributions over small discrete databases.

A database is a tuple x = (x_0, ..., x_{n-1}) with every coordinate in
{0, ..., alphabet_size - 1}.  Probabilities are stored as a flat vector
indexed little-endian: index(x) = sum_i x_i * alphabet_size**i, so
coordinate 0 is the least significant digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InsufficientSupport,
    NegativeProbability,
    SizeCap,
    UnsupportedAlphabet,
    ZeroMass,
)

DEFAULT_CAP = 2**20

# Entries above this magnitude of negativity are treated as data errors
# rather than float noise.
_NEG_TOL = 1e-12


def _digit_table(n: int, alphabet_size: int) -> np.ndarray:
    """(alphabet_size**n, n) array; row k holds the digits of index k."""
    idx = np.arange(alphabet_size**n)
    digits = np.empty((idx.size, n), dtype=np.int64)
    for i in range(n):
        digits[:, i] = (idx // alphabet_size**i) % alphabet_size
    return digits


@dataclass(frozen=True)
class JointDistribution:
    """Normalized prior over databases of n coordinates."""

    n: int
    alphabet_size: int
    probs: np.ndarray

    def __post_init__(self):
        if self.probs.shape != (self.alphabet_size**self.n,):
            raise DimensionMismatch(
                f"expected {self.alphabet_size**self.n} entries, "
                f"got {self.probs.shape}"
            )
        self.probs.setflags(write=False)

    def digits(self) -> np.ndarray:
        return _digit_table(self.n, self.alphabet_size)

    def index_of(self, x: Sequence[int]) -> int:
        return int(sum(int(v) * self.alphabet_size**i for i, v in enumerate(x)))

    def prob_of(self, x: Sequence[int]) -> float:
        return float(self.probs[self.index_of(x)])

    def marginal_of(self, i: int) -> np.ndarray:
        """Distribution of coordinate i."""
        a = self.alphabet_size
        shaped = self.probs.reshape((a,) * self.n, order="F")
        axes = tuple(k for k in range(self.n) if k != i)
        return shaped.sum(axis=axes)


@dataclass(frozen=True)
class ConditionalSlice:
    """Conditional law of x_{-a} given x_a = value, with the event mass.

    The slice keeps the remaining coordinates in their original order,
    re-indexed little-endian over n - 1 digits.
    """

    target: int
    value: int
    mass: float
    dist: JointDistribution


def from_dense(
    n: int,
    alphabet_size: int,
    weights: Sequence[float],
    cap: int = DEFAULT_CAP,
) -> JointDistribution:
    """Build a distribution from nonnegative weights, normalizing them.

    Rejects weights below -1e-12 (NegativeProbability); smaller negative
    float noise is clamped to zero.  Raises ZeroMass when nothing remains
    to normalize and SizeCap when alphabet_size**n exceeds the cap.
    """
    if n < 1 or alphabet_size < 2:
        raise DimensionMismatch(f"need n >= 1 and alphabet >= 2, got {n}, {alphabet_size}")
    size = alphabet_size**n
    if size > cap:
        raise SizeCap(f"{size} entries exceed cap {cap}")
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (size,):
        raise DimensionMismatch(f"expected {size} weights, got shape {w.shape}")
    if np.any(w < -_NEG_TOL):
        worst = int(np.argmin(w))
        raise NegativeProbability(f"weight {w[worst]} at index {worst}")
    w = np.where(w < 0.0, 0.0, w)
    total = math.fsum(w.tolist())
    if total <= 0.0:
        raise ZeroMass("weights sum to zero")
    return JointDistribution(n=n, alphabet_size=alphabet_size, probs=w / total)


def product(marginals: Sequence[Sequence[float]], cap: int = DEFAULT_CAP) -> JointDistribution:
    """Independent prior with the given per-coordinate marginals."""
    mats = [np.asarray(m, dtype=np.float64) for m in marginals]
    alphabet = mats[0].size
    if any(m.size != alphabet for m in mats):
        raise DimensionMismatch("marginals must share one alphabet size")
    n = len(mats)
    if alphabet**n > cap:
        raise SizeCap(f"{alphabet**n} entries exceed cap {cap}")
    probs = np.ones(1)
    # Little-endian order: later coordinates vary slower.
    for m in mats:
        probs = np.outer(probs, m).reshape(-1, order="F")
    return from_dense(n, alphabet, probs, cap=cap)


def perfectly_correlated(n: int, p_one: float, cap: int = DEFAULT_CAP) -> JointDistribution:
    """All coordinates equal: all-zeros with mass 1 - p_one, all-ones with p_one."""
    if not 0.0 <= p_one <= 1.0:
        raise NegativeProbability(f"p_one must lie in [0, 1], got {p_one}")
    if 2**n > cap:
        raise SizeCap(f"{2**n} entries exceed cap {cap}")
    w = np.zeros(2**n)
    w[0] = 1.0 - p_one
    w[-1] = p_one
    return from_dense(n, 2, w, cap=cap)


def parity_constrained(r: int, s: int, cap: int = DEFAULT_CAP) -> JointDistribution:
    """Uniform prior on binary (x_a, r rows of s bits) with even row parities.

    Coordinate 0 is x_a; coordinate 1 + i*s + j is bit j of row i.  The
    support is the set of databases where x_a plus each row sum is even,
    which leaves 2**(1 + r*(s-1)) databases.
    """
    n = 1 + r * s
    if 2**n > cap:
        raise SizeCap(f"{2**n} entries exceed cap {cap}")
    digits = _digit_table(n, 2)
    ok = np.ones(digits.shape[0], dtype=bool)
    for i in range(r):
        row = digits[:, 1 + i * s : 1 + (i + 1) * s].sum(axis=1)
        ok &= (digits[:, 0] + row) % 2 == 0
    return from_dense(n, 2, ok.astype(np.float64), cap=cap)


def conditional_slice(dist: JointDistribution, a: int, z: int) -> ConditionalSlice:
    """Condition on x_a = z and drop coordinate a.

    Raises InsufficientSupport when Pr(x_a = z) = 0.
    """
    if not 0 <= a < dist.n:
        raise DimensionMismatch(f"coordinate {a} out of range for n={dist.n}")
    if not 0 <= z < dist.alphabet_size:
        raise DimensionMismatch(f"value {z} outside alphabet")
    alph = dist.alphabet_size
    shaped = dist.probs.reshape((alph,) * dist.n, order="F")
    block = np.take(shaped, z, axis=a).reshape(-1, order="F")
    mass = math.fsum(block.tolist())
    if mass <= 0.0:
        raise InsufficientSupport(f"Pr(x_{a} = {z}) = 0")
    inner = JointDistribution(n=dist.n - 1, alphabet_size=alph, probs=block / mass)
    return ConditionalSlice(target=a, value=z, mass=mass, dist=inner)


def is_positively_affiliated(dist: JointDistribution):
    """Check log-supermodularity of the prior on the binary hypercube.

    Returns (True, None) or (False, witness) where the witness is a pair
    of databases violating p(x v x') * p(x ^ x') >= p(x) * p(x').  It is
    enough to test pairs differing in exactly two coordinates; violations
    elsewhere always induce one at such a pair, so the reduction is exact
    for strictly positive priors and is the check used here throughout.
    Zero entries compare as plain products (0 >= positive fails).
    """
    if dist.alphabet_size != 2:
        raise UnsupportedAlphabet("affiliation check requires binary coordinates")
    p = dist.probs
    n = dist.n
    for idx in range(2**n):
        for i in range(n):
            if idx >> i & 1:
                continue
            for j in range(i + 1, n):
                if idx >> j & 1:
                    continue
                # idx has zeros at i and j: it is the meet of the pair
                # (idx + 2^i, idx + 2^j) whose join is idx + 2^i + 2^j.
                lo = p[idx]
                hi = p[idx + (1 << i) + (1 << j)]
                left = p[idx + (1 << i)]
                right = p[idx + (1 << j)]
                if hi * lo < left * right * (1.0 - 1e-12):
                    x1 = tuple((idx + (1 << i)) >> k & 1 for k in range(n))
                    x2 = tuple((idx + (1 << j)) >> k & 1 for k in range(n))
                    return False, (x1, x2)
    return True, None


def is_pairwise_positively_correlated(dist: JointDistribution) -> bool:
    """True when Cov(x_i, x_j) >= 0 for every pair i < j (up to 1e-12)."""
    if dist.alphabet_size != 2:
        raise UnsupportedAlphabet("pairwise correlation check requires binary coordinates")
    digits = dist.digits().astype(np.float64)
    p = dist.probs
    means = p @ digits
    for i in range(dist.n):
        for j in range(i + 1, dist.n):
            cross = float(p @ (digits[:, i] * digits[:, j]))
            if cross < means[i] * means[j] - 1e-12:
                return False
    return True

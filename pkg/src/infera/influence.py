"""Influence matrices and the resulting inference bounds.

The influence of coordinate j on coordinate i is half the log of the
worst ratio a single conditional probability of x_i can take across two
contexts differing only at j.  Singleton value sets suffice: a ratio of
sums never beats its largest term.  Contexts of zero probability are
excluded; if the conditional support of x_i changes across an admissible
adjacent pair, the entry is unbounded (math.inf).

When the matrix G has spectral norm below one, the inference parameter
of coordinate i under budget eps obeys nu_i <= 2 * ((I - G)^-1 eps)_i,
and under the row-dominance condition G eps <= (1 - delta) eps also
nu_i <= 2 eps_i / delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dist import JointDistribution
from .errors import (
    DegenerateDistribution,
    NoConvergence,
    SpectralNormTooLarge,
    UnboundedInfluence,
)
from .mechanism import PrivacyBudget


@dataclass(frozen=True)
class InfluenceMatrix:
    gamma: np.ndarray

    def __post_init__(self):
        self.gamma.setflags(write=False)

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @property
    def unbounded(self) -> bool:
        return bool(np.any(np.isinf(self.gamma)))


@dataclass(frozen=True)
class DobrushinBound:
    phi: np.ndarray
    spectral: float
    nu_bound: np.ndarray
    delta: float
    nu_delta_bound: Optional[np.ndarray]


def influence_matrix(dist: JointDistribution) -> InfluenceMatrix:
    """Pairwise multiplicative influences under the prior."""
    n, alph = dist.n, dist.alphabet_size
    if n < 1:
        raise DegenerateDistribution("empty distribution")
    gamma = np.zeros((n, n))
    shaped = dist.probs.reshape((alph,) * n, order="F")
    for i in range(n):
        # Axis 0 holds x_i's value, the rest are the context coordinates.
        table = np.moveaxis(shaped, i, 0)
        mass = table.sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(mass > 0.0, table / mass, np.nan)
        rest = [k for k in range(n) if k != i]
        for pos, j in enumerate(rest):
            worst = 1.0
            for u in range(alph):
                cu = np.take(cond, u, axis=1 + pos)
                mu = np.take(mass, u, axis=pos)
                for v in range(u + 1, alph):
                    cv = np.take(cond, v, axis=1 + pos)
                    mv = np.take(mass, v, axis=pos)
                    admissible = (mu > 0.0) & (mv > 0.0)
                    if not np.any(admissible):
                        continue
                    pu = cu.reshape(alph, -1)[:, admissible.ravel()]
                    pv = cv.reshape(alph, -1)[:, admissible.ravel()]
                    if np.any((pu > 0.0) != (pv > 0.0)):
                        worst = math.inf
                        continue
                    both = pu > 0.0
                    if np.any(both):
                        r = pu[both] / pv[both]
                        worst = max(worst, float(r.max()), float((1.0 / r).max()))
            gamma[i, j] = 0.5 * math.log(worst) if math.isfinite(worst) else math.inf
    return InfluenceMatrix(gamma=gamma)


def spectral_norm(matrix: np.ndarray, tol: float = 1e-10, cap: int = 100_000) -> float:
    """Largest singular value by power iteration on matrix.T @ matrix.

    The start vector is the deterministic all-ones direction, which for a
    nonnegative matrix always overlaps the top eigenvector.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if np.any(np.isinf(m)):
        raise UnboundedInfluence("matrix has unbounded entries")
    gram = m.T @ m
    v = np.full(gram.shape[0], 1.0 / math.sqrt(gram.shape[0]))
    lam = 0.0
    for _ in range(cap):
        w = gram @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        new = float(v @ gram @ v)
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return math.sqrt(new)
        lam = new
    raise NoConvergence("power iteration did not settle")


def dobrushin_bounds(matrix: InfluenceMatrix, budget: PrivacyBudget) -> DobrushinBound:
    """Inference bounds from the influence matrix; needs spectral norm < 1."""
    gamma = matrix.gamma
    if matrix.unbounded:
        raise UnboundedInfluence("influence matrix has unbounded entries")
    if budget.n != matrix.n:
        raise DegenerateDistribution("budget length differs from matrix size")
    s = spectral_norm(gamma)
    if s >= 1.0:
        raise SpectralNormTooLarge(f"spectral norm {s} >= 1")
    eye = np.eye(matrix.n)
    phi = np.linalg.solve(eye - gamma, eye)
    residual = float(np.max(np.abs((eye - gamma) @ phi - eye)))
    if residual > 1e-9:
        raise NoConvergence(f"linear solve residual {residual}")
    eps = budget.eps
    nu_bound = 2.0 * phi @ eps
    positive = eps > 0.0
    if np.any(positive):
        pressure = (gamma @ eps)[positive] / eps[positive]
        delta = 1.0 - float(pressure.max())
    else:
        delta = 1.0
    nu_delta_bound = 2.0 * eps / delta if delta > 0.0 else None
    return DobrushinBound(
        phi=phi,
        spectral=s,
        nu_bound=nu_bound,
        delta=delta,
        nu_delta_bound=nu_delta_bound,
    )


def product_ratio_bound(a: float, b: float) -> float:
    """Correlation cap for positive variables with bounded log-spread.

    If sup A / inf A <= e^{2a} and sup B / inf B <= e^{2b} then
    E[AB] / (E[A] E[B]) is at most
    1 + (e^{2a} - 1)(e^{2b} - 1) / (e^a + e^b)^2, itself at most e^{ab}.
    """
    return 1.0 + (math.expm1(2 * a) * math.expm1(2 * b)) / (math.exp(a) + math.exp(b)) ** 2

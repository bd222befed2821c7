"""Closed-form inference parameter for positively affiliated priors.

For a log-supermodular binary prior the worst mechanism is maximally
biased toward one of the target's values, so the linear program collapses
to two weighted sums.  Writing w_z(y) = exp(-sum_{i != a} eps_i |y_i - z|)
for the off-target decay, the branch for value z is

    nu_z = | ln( sum_y pi^z(y) w_z(y) )
            - ln( e^{-eps_a} sum_y pi^{1-z}(y) w_z(y) ) |

and the parameter is max(nu_0, nu_1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dist import JointDistribution, conditional_slice, from_dense, is_positively_affiliated
from .errors import NotAffiliated, UnsupportedAlphabet
from .mechanism import PrivacyBudget


@dataclass(frozen=True)
class ClosedFormResult:
    nu: float
    winning_z: int
    numerator: float
    denominator: float
    branch_values: tuple


def _branch(dist: JointDistribution, budget: PrivacyBudget, a: int, z: int):
    """Numerator and denominator of the z branch, before the log."""
    rest_eps = np.delete(budget.eps, a)
    sl_same = conditional_slice(dist, a, z)
    sl_other = conditional_slice(dist, a, 1 - z)
    digits = sl_same.dist.digits()
    w = np.exp(-(np.abs(digits - z) @ rest_eps))
    num = math.fsum((sl_same.dist.probs * w).tolist())
    den = math.exp(-budget.eps[a]) * math.fsum((sl_other.dist.probs * w).tolist())
    return num, den


def nu_closed_form(
    dist: JointDistribution,
    budget: PrivacyBudget,
    a: int,
    force: bool = False,
) -> ClosedFormResult:
    """Evaluate both branches and return the larger one.

    Raises NotAffiliated (with a witness pair) when the prior fails the
    affiliation check, unless force is set, in which case the formula is
    evaluated anyway and a warning records that its value is only an
    upper-bound-free heuristic on such priors.  Ties report z = 0.
    """
    if dist.alphabet_size != 2:
        raise UnsupportedAlphabet("closed form requires binary coordinates")
    affiliated, witness = is_positively_affiliated(dist)
    if not affiliated:
        if not force:
            raise NotAffiliated(
                f"prior is not positively affiliated; witness {witness}",
                witness=witness,
            )
        warnings.warn(
            "evaluating the biased-mechanism formula on a non-affiliated "
            "prior; the result is not the exact inference parameter",
            stacklevel=2,
        )
    branches = []
    for z in (0, 1):
        num, den = _branch(dist, budget, a, z)
        branches.append((abs(math.log(num) - math.log(den)), num, den))
    values = (branches[0][0], branches[1][0])
    winning_z = 0 if branches[0][0] >= branches[1][0] else 1
    nu, num, den = branches[winning_z]
    return ClosedFormResult(
        nu=nu,
        winning_z=winning_z,
        numerator=num,
        denominator=den,
        branch_values=values,
    )


def nu_of_max_biased(
    dist: JointDistribution, budget: PrivacyBudget, a: int, z: int
) -> float:
    """Signed log ratio Pr(event | x_a = z) / Pr(event | x_a = 1 - z)
    for the event of the maximally z-biased mechanism."""
    if dist.alphabet_size != 2:
        raise UnsupportedAlphabet("biased profiles require binary coordinates")
    num, den = _branch(dist, budget, a, z)
    return math.log(num) - math.log(den)


def random_affiliated(
    n: int, rng: np.random.Generator, field_scale: float = 1.0, coupling_scale: float = 0.6
) -> JointDistribution:
    """Random positively affiliated prior.

    Weights follow log w(x) = sum_i theta_i x_i + sum_{i<j} J_ij x_i x_j
    with J_ij >= 0; nonnegative pairwise couplings make log w
    supermodular, hence the prior affiliated, for any fields theta.
    """
    theta = rng.normal(0.0, field_scale, size=n)
    coupling = rng.uniform(0.0, coupling_scale, size=(n, n))
    digits = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.float64)
    log_w = digits @ theta
    for i in range(n):
        for j in range(i + 1, n):
            log_w += coupling[i, j] * digits[:, i] * digits[:, j]
    return from_dense(n, 2, np.exp(log_w - log_w.max()))

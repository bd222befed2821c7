"""Ferromagnetic Ising models on complete d-ary trees.

Spins are sigma_i = (-1)^{x_i}, so x = 0 is spin +1.  The prior is
pi(x) proportional to exp(J * sum_edges sigma_i sigma_j + h0 * sum_i sigma_i).
A maximally biased mechanism acts on such a prior exactly like an extra
uniform external field of magnitude eps/2, which turns inference
questions into magnetization questions.

Two backends answer them:

* exact enumeration over all spin configurations (small trees);
* the branch-ratio recursion x_{k+1} = y(x_k) with
  y(x) = e^{2h} ((e^J x + e^{-J}) / (e^J + e^{-J} x))^d,
  whose fixed point from x_0 = 1 describes the deep-tree limit.

For an infinite tree of branching d (degree Delta = d + 1) under a
uniform budget eps, the inference parameter of any site is

  nu(eps) = (Delta/(Delta - 1)) * ln x(J, eps/2) - eps/(Delta - 1).

The recursion's fixed point is continuous in h at 0 exactly when
tanh(J) <= 1/d; stronger couplings leave a positive inference floor no
budget can cross.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .dist import DEFAULT_CAP, JointDistribution, from_dense
from .errors import DimensionMismatch, NoConvergence, SizeCap
from .mechanism import PrivacyBudget

FIXED_POINT_TOL = 1e-13
FIXED_POINT_CAP = 10**6


@dataclass(frozen=True)
class IsingTreeModel:
    """Complete d-ary tree of the given depth, BFS indexed from the root."""

    d: int
    depth: int
    J: float
    h0: float = 0.0

    def __post_init__(self):
        if self.d < 2:
            raise DimensionMismatch("branching factor must be at least 2")
        if self.depth < 0:
            raise DimensionMismatch("depth must be nonnegative")
        if self.J <= 0.0:
            raise DimensionMismatch("coupling must be positive")

    @property
    def n(self) -> int:
        return (self.d ** (self.depth + 1) - 1) // (self.d - 1)

    def edges(self) -> List[Tuple[int, int]]:
        """Parent-child pairs; child of node k are k*d + 1 .. k*d + d."""
        return [(k, k * self.d + c) for k in range(self.n) for c in range(1, self.d + 1)
                if k * self.d + c < self.n]


@dataclass(frozen=True)
class BetheSolution:
    x: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class TreeRootRatios:
    """Finite-tree branch iterates and root ratios.

    iterates[k] is the recursion value after k steps from 1, so
    iterates[1] = e^{2h} is the single-node tree and root_ratio (the last
    iterate) equals Z+/Z- = (1 + <sigma_root>)/(1 - <sigma_root>) of the
    complete d-ary tree of the requested depth.  x_star rescales the root
    ratio to a degree-(d+1) root.
    """

    depth: int
    x: float
    root_ratio: float
    x_star: float
    iterates: Tuple[float, ...]


def _branch_step(J: float, h: float, d: int, x: float) -> float:
    ej, emj = math.exp(J), math.exp(-J)
    return math.exp(2.0 * h) * ((ej * x + emj) / (ej + emj * x)) ** d


def ising_tree_distribution(model: IsingTreeModel, cap: int = DEFAULT_CAP) -> JointDistribution:
    """Dense prior over the tree's 2^n spin assignments."""
    n = model.n
    if 2**n > cap:
        raise SizeCap(f"tree with {n} nodes needs 2**{n} entries, cap {cap}")
    digits = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    sigma = 1.0 - 2.0 * digits
    energy = model.h0 * sigma.sum(axis=1)
    for i, j in model.edges():
        energy += model.J * sigma[:, i] * sigma[:, j]
    return from_dense(n, 2, np.exp(energy - energy.max()), cap=cap)


def magnetization_exact(
    target: Union[IsingTreeModel, JointDistribution],
    site: int,
    field_offset: float = 0.0,
    cap: int = DEFAULT_CAP,
) -> float:
    """<sigma_site> by full enumeration, under an extra uniform field.

    A model input rebuilds the Gibbs weights at field h0 + field_offset;
    a raw distribution is reweighted by exp(field_offset * sum sigma).
    """
    if isinstance(target, IsingTreeModel):
        model = IsingTreeModel(
            d=target.d, depth=target.depth, J=target.J, h0=target.h0 + field_offset
        )
        dist = ising_tree_distribution(model, cap=cap)
    else:
        dist = target
        if field_offset != 0.0:
            digits = dist.digits()
            tilt = field_offset * (1.0 - 2.0 * digits).sum(axis=1)
            dist = from_dense(
                dist.n,
                dist.alphabet_size,
                dist.probs * np.exp(tilt - tilt.max()),
                cap=cap,
            )
    sigma_site = 1.0 - 2.0 * dist.digits()[:, site]
    return float(math.fsum((dist.probs * sigma_site).tolist()))


def nu_gibbs(model: IsingTreeModel, eps: float, site: int, cap: int = DEFAULT_CAP) -> float:
    """Inference parameter of one site under a uniform budget, exactly.

    With rho the prior odds Pr(x_site = 1)/Pr(x_site = 0), the two biased
    mechanisms give

      nu = max( ln rho + ln((1 + m_+)/(1 - m_+)),
               -ln rho - ln((1 + m_-)/(1 - m_-)) )

    where m_+- is the site magnetization under field offset +-eps/2.
    At h0 = 0 the odds are even and both branches coincide.
    """
    if eps <= 0.0:
        raise DimensionMismatch("eps must be positive")
    base = ising_tree_distribution(model, cap=cap)
    marg = base.marginal_of(site)
    log_rho = math.log(marg[1]) - math.log(marg[0])
    m_plus = magnetization_exact(model, site, +0.5 * eps, cap=cap)
    m_minus = magnetization_exact(model, site, -0.5 * eps, cap=cap)
    up = log_rho + math.log1p(m_plus) - math.log1p(-m_plus)
    down = -log_rho - math.log1p(m_minus) + math.log1p(-m_minus)
    return max(up, down)


def bethe_fixed_point(
    J: float,
    h: float,
    d: int,
    tol: float = FIXED_POINT_TOL,
    cap: int = FIXED_POINT_CAP,
) -> BetheSolution:
    """Iterate the branch recursion from x = 1 until it settles.

    The iteration is monotone, so it converges to the fixed point x(J, h):
    1 at h = 0, in (1, inf) for h > 0, in (0, 1) for h < 0.  Hitting the
    cap raises NoConvergence rather than returning a bad value.
    """
    x = 1.0
    for k in range(1, cap + 1):
        nxt = _branch_step(J, h, d, x)
        if abs(nxt - x) <= tol * max(1.0, abs(x)):
            return BetheSolution(x=nxt, iterations=k, converged=True)
        x = nxt
    raise NoConvergence(f"branch recursion at J={J}, h={h}, d={d} hit {cap} iterations")


def tree_root_ratios(J: float, h: float, d: int, depth: int) -> TreeRootRatios:
    """Exact root ratios of the finite complete d-ary tree via recursion."""
    if depth < 0:
        raise DimensionMismatch("depth must be nonnegative")
    iterates = [1.0]
    for _ in range(depth + 1):
        iterates.append(_branch_step(J, h, d, iterates[-1]))
    root_ratio = iterates[-1]
    x_star = math.exp(-2.0 * h / d) * root_ratio ** ((d + 1) / d)
    return TreeRootRatios(
        depth=depth,
        x=iterates[depth],
        root_ratio=root_ratio,
        x_star=x_star,
        iterates=tuple(iterates),
    )


def nu_bethe_limit(J: float, eps: float, d: int) -> float:
    """Deep-tree inference parameter under a uniform budget.

    Applies the degree-(Delta) root formula with Delta = d + 1 to the
    fixed point at field eps/2; at J = 0 this reduces to eps exactly.
    """
    if eps < 0.0:
        raise DimensionMismatch("eps must be nonnegative")
    if eps == 0.0:
        return 0.0
    x = bethe_fixed_point(J, 0.5 * eps, d).x
    delta_deg = d + 1
    return (delta_deg / (delta_deg - 1.0)) * math.log(x) - eps / (delta_deg - 1.0)


def critical_coupling(d: int) -> float:
    """Coupling above which the zero-field fixed point becomes unstable."""
    if d < 2:
        raise DimensionMismatch("branching factor must be at least 2")
    return math.atanh(1.0 / d)


def enforceable_epsilon(
    target_nu: float, J: float, d: int, tol: float = 1e-10
) -> Optional[float]:
    """Largest budget whose deep-tree inference parameter stays <= target.

    nu(eps) >= eps always, so the answer lies in (0, target_nu]; it is
    found by bisection.  Returns None when even a vanishing budget leaks
    more than the target (supercritical coupling with the target below
    the inference floor).  Monotonicity of nu in eps is asserted on the
    evaluated points.
    """
    if target_nu <= 0.0:
        raise DimensionMismatch("target must be positive")
    if nu_bethe_limit(J, target_nu, d) <= target_nu + 1e-12:
        return target_nu
    lo = min(1e-8, 0.5 * target_nu)
    nu_lo = nu_bethe_limit(J, lo, d)
    if nu_lo > target_nu:
        return None
    hi, nu_hi = target_nu, None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        nu_mid = nu_bethe_limit(J, mid, d)
        assert nu_lo <= nu_mid + 1e-12, "nu must be nondecreasing in eps"
        if nu_mid <= target_nu:
            lo, nu_lo = mid, nu_mid
        else:
            hi, nu_hi = mid, nu_mid
    return lo


def sensitivity_profile(
    J: float, h0: float, d: int, eps_list: Sequence[float]
) -> List[Tuple[float, float]]:
    """Deep-tree inference parameter as a function of the budget, at a
    fixed base field.  Uses w(h) = ln x(J, h):

      nu(eps) = max(w(h0 + eps/2) - w(h0), w(h0) - w(h0 - eps/2)).
    """
    w0 = math.log(bethe_fixed_point(J, h0, d).x)
    out = []
    for eps in eps_list:
        if eps <= 0.0:
            raise DimensionMismatch("budgets must be positive")
        up = math.log(bethe_fixed_point(J, h0 + 0.5 * eps, d).x) - w0
        down = w0 - math.log(bethe_fixed_point(J, h0 - 0.5 * eps, d).x)
        out.append((float(eps), max(up, down)))
    return out


def uniform_budget(model: IsingTreeModel, eps: float) -> PrivacyBudget:
    return PrivacyBudget.uniform(model.n, eps)

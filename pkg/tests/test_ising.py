"""Tree Gibbs priors, the branch recursion, and deep-tree leakage laws."""

import itertools
import math

import numpy as np
import pytest

from infera.dist import is_positively_affiliated
from infera.errors import DimensionMismatch, NoConvergence, SizeCap
from infera.ising import (
    IsingTreeModel,
    bethe_fixed_point,
    critical_coupling,
    enforceable_epsilon,
    ising_tree_distribution,
    magnetization_exact,
    nu_bethe_limit,
    nu_gibbs,
    sensitivity_profile,
    tree_root_ratios,
    uniform_budget,
)


def _enumerate_ratio(n, edges, J, h):
    """Root odds P(s_0 = +1)/P(s_0 = -1) by direct summation."""
    up, down = 0.0, 0.0
    for bits in itertools.product((0, 1), repeat=n):
        s = [1.0 - 2.0 * b for b in bits]
        e = h * sum(s) + J * sum(s[i] * s[j] for i, j in edges)
        w = math.exp(e)
        if bits[0] == 0:
            up += w
        else:
            down += w
    return up / down


# --- model and distribution ---------------------------------------------

def test_model_indexing():
    m = IsingTreeModel(d=2, depth=2, J=0.3)
    assert m.n == 7
    assert m.edges() == [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]
    m3 = IsingTreeModel(d=3, depth=1, J=0.3)
    assert m3.n == 4
    assert m3.edges() == [(0, 1), (0, 2), (0, 3)]


def test_model_validation():
    with pytest.raises(DimensionMismatch):
        IsingTreeModel(d=1, depth=2, J=0.3)
    with pytest.raises(DimensionMismatch):
        IsingTreeModel(d=2, depth=-1, J=0.3)
    with pytest.raises(DimensionMismatch):
        IsingTreeModel(d=2, depth=2, J=0.0)


def test_distribution_size_cap():
    with pytest.raises(SizeCap):
        ising_tree_distribution(IsingTreeModel(d=2, depth=3, J=0.2), cap=1000)


def test_weak_coupling_is_nearly_uniform():
    d = ising_tree_distribution(IsingTreeModel(d=2, depth=1, J=1e-9))
    assert np.allclose(d.probs, 1.0 / 8.0, rtol=0, atol=1e-8)


def test_zero_field_flip_symmetry():
    d = ising_tree_distribution(IsingTreeModel(d=2, depth=2, J=0.4))
    # Global spin flip reverses the little-endian cell order.
    assert np.allclose(d.probs, d.probs[::-1], rtol=0, atol=1e-15)


def test_matches_edge_copy_process():
    # At h0 = 0 the Gibbs weights equal a root coin flip broadcast down
    # the tree, each child copying its parent with probability
    # (1 + tanh J) / 2.
    J = 0.35
    m = IsingTreeModel(d=2, depth=2, J=J)
    d = ising_tree_distribution(m)
    p = 0.5 * (1.0 + math.tanh(J))
    want = np.empty(2**m.n)
    for idx in range(2**m.n):
        bits = [(idx >> k) & 1 for k in range(m.n)]
        w = 0.5
        for i, j in m.edges():
            w *= p if bits[i] == bits[j] else 1.0 - p
        want[idx] = w
    assert np.allclose(d.probs, want, rtol=1e-12, atol=0)


def test_tree_prior_is_affiliated():
    d = ising_tree_distribution(IsingTreeModel(d=2, depth=2, J=0.5, h0=-0.2))
    ok, witness = is_positively_affiliated(d)
    assert ok and witness is None


# --- exact magnetization -------------------------------------------------

def test_magnetization_basic_laws():
    assert abs(magnetization_exact(IsingTreeModel(d=2, depth=2, J=0.4), 0)) <= 1e-15
    m = IsingTreeModel(d=2, depth=1, J=1e-12, h0=0.7)
    assert abs(magnetization_exact(m, 0) - math.tanh(0.7)) <= 1e-9


def test_magnetization_offset_paths_agree():
    model = IsingTreeModel(d=2, depth=2, J=0.3, h0=0.1)
    dist = ising_tree_distribution(model)
    for offset in (0.0, 0.17, -0.4):
        via_model = magnetization_exact(model, 1, field_offset=offset)
        via_dist = magnetization_exact(dist, 1, field_offset=offset)
        assert abs(via_model - via_dist) <= 1e-12


def test_root_ratio_against_enumeration():
    J, h = 0.3, 0.1
    m = IsingTreeModel(d=2, depth=2, J=J, h0=h)
    want = _enumerate_ratio(m.n, m.edges(), J, h)
    got = tree_root_ratios(J, h, 2, 2).root_ratio
    assert abs(got - want) <= 1e-12 * want


def test_x_star_is_symmetric_root_ratio():
    # x_star at depth k is the root ratio of the tree whose root has
    # d + 1 branches of depth k - 1: for d = 2, depth 2 that is 10 nodes.
    J, h = 0.3, 0.1
    edges = [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (3, 9)]
    want = _enumerate_ratio(10, edges, J, h)
    got = tree_root_ratios(J, h, 2, 2).x_star
    assert abs(got - want) <= 1e-9


# --- site leakage on finite trees ----------------------------------------

def test_nu_gibbs_frozen_value():
    m = IsingTreeModel(d=2, depth=2, J=0.3, h0=0.1)
    assert abs(nu_gibbs(m, 0.2, 0) - 0.38281695005229466) <= 1e-9


def test_nu_gibbs_zero_field_identity():
    m = IsingTreeModel(d=2, depth=2, J=0.4)
    eps = 0.3
    mag = magnetization_exact(m, 0, field_offset=0.5 * eps)
    want = math.log1p(mag) - math.log1p(-mag)
    assert abs(nu_gibbs(m, eps, 0) - want) <= 1e-12


def test_nu_gibbs_decoupled_limit():
    m = IsingTreeModel(d=2, depth=2, J=1e-12, h0=0.2)
    assert abs(nu_gibbs(m, 0.3, 4) - 0.3) <= 1e-9


def test_nu_gibbs_rejects_bad_budget():
    m = IsingTreeModel(d=2, depth=1, J=0.3)
    with pytest.raises(DimensionMismatch):
        nu_gibbs(m, 0.0, 0)


def test_uniform_budget_shape():
    m = IsingTreeModel(d=3, depth=1, J=0.3)
    b = uniform_budget(m, 0.25)
    assert b.n == 4
    assert np.array_equal(b.eps, np.full(4, 0.25))


# --- branch recursion ----------------------------------------------------

def test_fixed_point_basic_laws():
    sol = bethe_fixed_point(0.4, 0.0, 2)
    assert sol.x == 1.0 and sol.converged
    assert abs(bethe_fixed_point(0.0, 0.3, 2).x - math.exp(0.6)) <= 1e-12
    assert bethe_fixed_point(0.3, 0.2, 2).x > 1.0
    assert bethe_fixed_point(0.3, -0.2, 2).x < 1.0


def test_fixed_point_supercritical_symmetry_breaking():
    # Above the critical coupling a vanishing field still tilts the odds.
    assert math.log(bethe_fixed_point(0.7, 5e-7, 2).x) > 0.05


def test_fixed_point_reciprocal_symmetry():
    for J, h, d in [(0.3, 0.1, 2), (0.5, 0.4, 3), (0.7, 0.02, 2)]:
        up = bethe_fixed_point(J, h, d).x
        down = bethe_fixed_point(J, -h, d).x
        assert abs(up * down - 1.0) <= 1e-12


def test_fixed_point_iteration_cap():
    with pytest.raises(NoConvergence):
        bethe_fixed_point(0.5, 0.3, 2, cap=2)


def test_finite_iterates_climb_to_fixed_point():
    J, h, d = 0.3, 0.1, 2
    ratios = tree_root_ratios(J, h, d, 12)
    xs = ratios.iterates
    fix = bethe_fixed_point(J, h, d).x
    assert all(a < b for a, b in zip(xs, xs[1:]))
    assert xs[-1] < fix
    assert abs(tree_root_ratios(J, h, d, 60).root_ratio - fix) <= 1e-10


def test_depth_zero_ratios():
    r = tree_root_ratios(0.3, 0.1, 2, 0)
    assert r.x == 1.0
    assert abs(r.root_ratio - math.exp(0.2)) <= 1e-15
    # A lone root is the same tree under either degree convention.
    assert abs(r.x_star - math.exp(0.2)) <= 1e-15
    with pytest.raises(DimensionMismatch):
        tree_root_ratios(0.3, 0.1, 2, -1)


def test_finite_trees_leak_less_than_the_limit():
    # ln(root ratio) stays below (d+1)/d ln x - 2h/d with a positive,
    # strictly shrinking gap as the tree deepens.
    J, h, d = 0.3, 0.1, 2
    fix = bethe_fixed_point(J, h, d).x
    bound = (d + 1) / d * math.log(fix) - 2 * h / d
    gaps = []
    for depth in range(7):
        gaps.append(bound - math.log(tree_root_ratios(J, h, d, depth).root_ratio))
    assert all(g > 0 for g in gaps)
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


# --- deep-tree leakage ---------------------------------------------------

def test_limit_reduces_to_budget_without_coupling():
    for eps in (0.1, 0.5, 1.0):
        assert abs(nu_bethe_limit(0.0, eps, 2) - eps) <= 1e-14
    assert nu_bethe_limit(0.4, 0.0, 2) == 0.0
    with pytest.raises(DimensionMismatch):
        nu_bethe_limit(0.4, -0.1, 2)


def test_limit_monotone_in_budget():
    values = [nu_bethe_limit(0.4, e, 2) for e in (0.05, 0.1, 0.2, 0.4, 0.8)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_limit_slope_beats_row_condition_rate():
    # At J = atanh((1 - delta)/d) the row-dominance constant is delta,
    # yet the true slope is (d + 1 - delta)/(d delta), above 1/delta.
    for delta, want in [(0.5, 2.5), (0.25, 5.5)]:
        J = math.atanh((1.0 - delta) / 2.0)
        slope = nu_bethe_limit(J, 1e-6, 2) / 1e-6
        assert slope > 1.0 / delta
        assert abs(slope - want) <= 0.01 * want


def test_limit_supercritical_floor():
    assert nu_bethe_limit(0.7, 1e-6, 2) > 0.05


def test_critical_coupling_values():
    assert abs(critical_coupling(2) - 0.5 * math.log(3.0)) <= 1e-15
    assert abs(critical_coupling(3) - 0.5 * math.log(2.0)) <= 1e-15
    assert critical_coupling(2) > critical_coupling(3) > critical_coupling(4)
    with pytest.raises(DimensionMismatch):
        critical_coupling(1)


def test_enforceable_budget():
    assert enforceable_epsilon(0.4, 0.0, 2) == 0.4
    eps = enforceable_epsilon(0.4, 0.3, 2)
    assert eps is not None and eps < 0.4
    assert nu_bethe_limit(0.3, eps, 2) <= 0.4 + 1e-9
    assert nu_bethe_limit(0.3, eps + 1e-6, 2) > 0.4
    assert enforceable_epsilon(0.01, 0.7, 2) is None
    with pytest.raises(DimensionMismatch):
        enforceable_epsilon(0.0, 0.3, 2)


def test_sensitivity_profile_matches_limit_at_zero_base_field():
    eps = 0.3
    # Without a base field the one-sided branch is ln x(J, eps/2); the
    # deep-tree value adds (ln x - eps)/d on top, zero only at J = 0.
    ((_, flat),) = sensitivity_profile(0.0, 0.0, 2, [eps])
    assert abs(flat - nu_bethe_limit(0.0, eps, 2)) <= 1e-14
    ((_, low),) = sensitivity_profile(0.3, 0.0, 2, [eps])
    assert low < nu_bethe_limit(0.3, eps, 2)


def test_sensitivity_saturation_scenario():
    # Deep in the ordered phase a base field pins the root: small budgets
    # barely leak, while a budget big enough to fight the field unlocks a
    # jump far beyond linear growth.
    profile = sensitivity_profile(3.0, 0.3, 2, [0.2, 1.0])
    (e0, v0), (e1, v1) = profile
    assert v0 / e0 < 2.0
    assert v1 / e1 > 10.0
    assert math.log(bethe_fixed_point(3.0, 0.3, 2).x) > 6.0
    assert math.log(bethe_fixed_point(3.0, -0.2, 2).x) < -6.0


def test_sensitivity_rejects_nonpositive_budget():
    with pytest.raises(DimensionMismatch):
        sensitivity_profile(0.3, 0.1, 2, [0.2, 0.0])

"""Closed-form leakage under positive affiliation."""

import math

import numpy as np
import pytest

from conftest import random_budget, random_dp_profile, random_prior
from infera.affiliated import (
    nu_closed_form,
    nu_of_max_biased,
    random_affiliated,
)
from infera.dist import (
    from_dense,
    is_positively_affiliated,
    parity_constrained,
    perfectly_correlated,
    product,
)
from infera.errors import NotAffiliated
from infera.ising import IsingTreeModel, ising_tree_distribution, uniform_budget
from infera.lp_exact import nu_exact
from infera.mechanism import PrivacyBudget, max_biased_profile, mechanism_nu


def test_product_recovers_own_budget():
    d = product([[0.2, 0.8], [0.7, 0.3], [0.4, 0.6]])
    b = PrivacyBudget(np.array([0.3, 0.6, 0.9]))
    for a in range(3):
        res = nu_closed_form(d, b, a)
        assert abs(res.nu - b.eps[a]) <= 1e-12


def test_twins_closed_form():
    d = perfectly_correlated(2, 0.5)
    res = nu_closed_form(d, PrivacyBudget.uniform(2, 0.5), 0)
    assert abs(res.nu - 1.0) <= 1e-12
    # Fair twins are flip symmetric, so ties resolve to z = 0.
    assert res.winning_z == 0
    assert len(res.branch_values) == 2
    assert abs(res.branch_values[0] - res.branch_values[1]) <= 1e-12


def test_result_internal_consistency():
    rng = np.random.default_rng(41)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        d = random_affiliated(n, rng)
        b = random_budget(rng, n)
        res = nu_closed_form(d, b, int(rng.integers(n)))
        assert abs(res.nu - abs(math.log(res.numerator / res.denominator))) <= 1e-12
        assert res.nu == max(res.branch_values)


def test_matches_lp_on_tree():
    model = IsingTreeModel(d=2, depth=2, J=0.3, h0=0.1)
    dist = ising_tree_distribution(model)
    b = uniform_budget(model, 0.2)
    for a in (0, 1, 3):
        lhs = nu_closed_form(dist, b, a).nu
        rhs = nu_exact(dist, b, a).nu
        assert abs(lhs - rhs) <= 1e-6


def test_rejects_non_affiliated():
    d = parity_constrained(2, 2)
    b = PrivacyBudget.uniform(5, 0.2)
    with pytest.raises(NotAffiliated) as info:
        nu_closed_form(d, b, 0)
    # The attached witness must be a genuine violation.
    x1, x2 = info.value.witness
    x1, x2 = np.array(x1), np.array(x2)
    join, meet = np.maximum(x1, x2), np.minimum(x1, x2)
    assert d.prob_of(join) * d.prob_of(meet) < d.prob_of(x1) * d.prob_of(x2)


def test_force_bypasses_check_with_warning():
    d = parity_constrained(2, 2)
    b = PrivacyBudget.uniform(5, 0.2)
    with pytest.warns(UserWarning):
        res = nu_closed_form(d, b, 0, force=True)
    # Off the affiliated family the formula is only the biased-profile
    # value, and the summary mechanism strictly beats it here.
    nu_m1 = mechanism_nu(d, _parity_summary_profile(0.2), 0)
    assert res.nu < nu_m1


def _parity_summary_profile(eps):
    from infera.mechanism import parity_mechanism_m1_profile

    return parity_mechanism_m1_profile(2, 2, eps)


def test_closed_form_equals_biased_profile_leakage():
    rng = np.random.default_rng(42)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        d = random_affiliated(n, rng)
        b = random_budget(rng, n)
        a = int(rng.integers(n))
        res = nu_closed_form(d, b, a)
        direct = max(
            abs(nu_of_max_biased(d, b, a, z)) for z in (0, 1)
        )
        assert abs(res.nu - direct) <= 1e-12
        prof = max_biased_profile(n, b, res.winning_z)
        assert abs(mechanism_nu(d, prof, a) - res.nu) <= 1e-12


def test_dominates_every_private_mechanism():
    rng = np.random.default_rng(43)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        d = random_affiliated(n, rng)
        b = random_budget(rng, n)
        a = int(rng.integers(n))
        cap = nu_closed_form(d, b, a).nu
        for _ in range(5):
            prof = random_dp_profile(rng, n, b)
            assert mechanism_nu(d, prof, a) <= cap + 1e-7


def test_parity_biased_profile_stays_small():
    d = parity_constrained(2, 2)
    b = PrivacyBudget.uniform(5, 0.2)
    for z in (0, 1):
        assert abs(nu_of_max_biased(d, b, 0, z)) <= 0.36 + 1e-9


def test_biased_profile_flip_symmetry():
    # Flipping every bit maps the z = 0 branch onto the z = 1 branch.
    d = perfectly_correlated(3, 0.5)
    b = PrivacyBudget.uniform(3, 0.4)
    v0 = nu_of_max_biased(d, b, 0, 0)
    v1 = nu_of_max_biased(d, b, 0, 1)
    assert abs(v0 - v1) <= 1e-12


def test_biased_profile_signed_value():
    # Biasing toward 0 on a strongly anti-correlated pair shifts the
    # posterior toward 1, so the signed log ratio goes negative while
    # its magnitude is still the profile's leakage.
    d = from_dense(2, 2, np.array([0.05, 0.45, 0.45, 0.05]))
    b = PrivacyBudget(np.array([0.01, 2.0]))
    v = nu_of_max_biased(d, b, 0, 0)
    assert v < 0
    prof = max_biased_profile(2, b, 0)
    assert abs(abs(v) - mechanism_nu(d, prof, 0)) <= 1e-12


def test_random_affiliated_is_affiliated():
    rng = np.random.default_rng(44)
    for _ in range(25):
        n = int(rng.integers(1, 6))
        d = random_affiliated(n, rng)
        ok, witness = is_positively_affiliated(d)
        assert ok and witness is None

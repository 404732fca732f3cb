#!/usr/bin/env python3
"""
Tests for ad-orbits, the nilpotency bound, eigenvector sets and the sandwich classifier
"""

import os
import sys

import pytest

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import Settings
from errors import ElementError
from fixtures import build_fixture
from locality import (ad_orbit, classify, cyclic_probe, eigen_membership, growth_witness,
                      leading_coefficient_nonzero, mf_mn_membership, nilpotency_bound,
                      nilpotency_bound_check, orbit_bound, structural_eigen,
                      support_decrease_witness)

SETTINGS = Settings(max_power=4, samples=10, max_degree=2, coord_bound=2)


@pytest.fixture(scope='module')
def f1():
    return build_fixture('F1')


@pytest.fixture(scope='module')
def f2():
    return build_fixture('F2')


def test_orbit_grows_on_f1(f1):
    print("🧪 Testing ad-orbits...")
    report = ad_orbit(f1.x((1, 0)), f1.x((0, 1)), 5)
    assert report.span_dims == [1, 2, 3, 4, 5, 6]
    assert report.grows_strictly()
    assert report.powers[1] == f1.x((2, 2))
    assert report.powers[2] == f1.x((4, 3)).scale(2)
    assert report.nilpotent_at is None

    dead = ad_orbit(f1.zero(), f1.x((0, 1)), 3)
    assert dead.nilpotent_at == 1
    assert dead.span_dims == [1, 1, 1, 1]
    with pytest.raises(ElementError):
        ad_orbit(f1.one(), f1.one(), 0)
    print("✅ span dimensions 1..6 along x[(0,1)]")


def test_nilpotency_bound_examples(f2):
    print("🧪 Testing the nilpotency bound...")
    u, v = f2.t(1, 2), f2.monomial((0, 0), (1, 3))
    assert nilpotency_bound(u, v) == 4
    result = nilpotency_bound_check(u, v)
    assert result['verified'] and result['nonzero_before']
    assert support_decrease_witness(u, v) is None

    f5 = build_fixture('F5')
    u5, v5 = f5.x((1, 0)), f5.t(2, 2)
    result = nilpotency_bound_check(u5, v5)
    assert result['m'] == 3
    assert result['verified'] and result['nonzero_before']
    print("✅ ad_u^m(v) = 0 with ad_u^(m-1)(v) != 0")


def test_witness_needs_a_live_leading_term(f2):
    u, v = f2.t(1), f2.t(2, 2)
    assert nilpotency_bound(u, v) == 3
    assert leading_coefficient_nonzero(u, v)
    assert nilpotency_bound_check(u, v)['nonzero_before']
    inflated = nilpotency_bound_check(u, v, m=4)
    assert inflated['verified'] and not inflated['nonzero_before']
    assert not nilpotency_bound_check(u, v, m=2)['verified']

    w = f2.monomial((0, 0), (2, 2))
    assert nilpotency_bound(f2.one(), w) == 5
    assert not leading_coefficient_nonzero(f2.one(), w)
    result = nilpotency_bound_check(f2.one(), w)
    assert result['verified'] and not result['nonzero_before']


def test_nilpotency_needs_h2(f1, f2):
    with pytest.raises(ElementError):
        nilpotency_bound_check(f1.x((1, 0)), f1.x((0, 1)))
    with pytest.raises(ElementError):
        nilpotency_bound_check(f2.t(1), f2.t(1) + f2.t(2))


def test_eigen_membership(f1):
    print("🧪 Testing eigenvector sets...")
    result = eigen_membership(f1.x((2, 0)))
    assert result == {'member': True, 'mu': '(2)', 'direct': True, 'agree': True}
    mixed = eigen_membership(f1.x((1, 0)) + f1.x((0, 1)))
    assert not mixed['member'] and not mixed['direct'] and mixed['agree']
    assert eigen_membership(f1.zero())['member']
    assert structural_eigen(f1.x((3, 1)) + f1.x((2, 0)).scale(5)) == (2,)
    print("✅ structural and direct answers agree")


def test_mf_mn(f1, f2):
    assert mf_mn_membership(f1.x((-1, -1))) == (True, False)
    assert mf_mn_membership(f1.x((1, 0))) == (False, False)
    assert mf_mn_membership(f1.one()) == (True, True)
    with pytest.raises(ElementError):
        mf_mn_membership(f2.t(1))


def test_cyclic_identity(f1):
    result = cyclic_probe((1, 1), f1.x((2, 0)))
    assert result['equal']
    assert result['lhs'] == result['rhs'] == '-2*x[(4,2)]'
    with pytest.raises(ElementError):
        cyclic_probe((1, 0), f1.x((2, 0)))
    with pytest.raises(ElementError):
        cyclic_probe((1, 1), f1.x((1, 0)) + f1.x((0, 1)))


def test_growth_and_orbit_bound(f1, f2):
    witness = growth_witness(f1.x((1, 0)), 4)
    assert witness['found']
    assert witness['r'] == 2 and witness['b'] == '1'
    assert witness['span_dims'] == [1, 2, 3, 4, 5]
    assert orbit_bound(f2.t(1), f2.monomial((0, 0), (1, 3))) == 8


def test_classify(f1):
    print("🧪 Testing the sandwich classifier...")
    out = classify(f1.x((1, 0)), SETTINGS)
    assert out['verdict'] == 'not locally finite (structural)'
    assert out['empirical']['growth']['found']
    assert out['consistent']
    out = classify(f1.x((-1, -1)), SETTINGS)
    assert out['structural']['H1']
    assert out['verdict'] == 'locally finite (structural)'
    assert 'growth' not in out['empirical']
    print("✅ structural verdicts with matching witnesses")


if __name__ == "__main__":
    print("🔬 Locality tests")
    a1, a2 = build_fixture('F1'), build_fixture('F2')
    test_orbit_grows_on_f1(a1)
    test_nilpotency_bound_examples(a2)
    test_witness_needs_a_live_leading_term(a2)
    test_nilpotency_needs_h2(a1, a2)
    test_eigen_membership(a1)
    test_mf_mn(a1, a2)
    test_cyclic_identity(a1)
    test_growth_and_orbit_bound(a1, a2)
    test_classify(a1)
    print("\n✅ All locality tests passed!")

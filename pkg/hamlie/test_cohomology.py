#!/usr/bin/env python3
"""
Tests for the 2-cocycle family, coboundaries, reduction and the H^2 probes
"""

import os
import sys

import pytest

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cohomology import (Coboundary, Combo, PhiMu, PhiP, PhiPPrime, Table, check_cocycle_laws,
                        coboundary_of, eval_cocycle, h2_report, independence_probe, key_box,
                        random_functional, reduce_cocycle, reduction_index)
from config import Settings
from derivations import hom_star_complement
from errors import CocycleError
from fixtures import build_fixture
from harness import sample_rng

SMALL = Settings(samples=20, max_degree=2, coord_bound=2, seed=5)


def test_h2_dimensions():
    print("🧪 Testing H^2 reports...")
    assert h2_report(build_fixture('F3')) == {'dimension': 0, 'generators': []}
    assert h2_report(build_fixture('F2'))['dimension'] == 0
    f1 = h2_report(build_fixture('F1'))
    assert f1 == {'dimension': 2, 'generators': ['phi[1]', "phi'[1]"]}
    f6 = h2_report(build_fixture('F6'))
    assert f6['dimension'] == 3
    assert f6['generators'][-1].startswith('phimu{')
    print("✅ dimensions 0, 2 and 3 as expected")


def test_phi_closed_values():
    f1 = build_fixture('F1')
    u, v = f1.x((2, 1)), f1.x((-2, -1))
    assert eval_cocycle(PhiP(1), u, v) == 2
    assert eval_cocycle(PhiP(1), v, u) == -2
    assert eval_cocycle(PhiPPrime(1), u, v) == 1
    assert eval_cocycle(PhiP(1), u, f1.x((0, 0))) == 0
    weighted = Combo(((2, PhiP(1)), (-1, PhiPPrime(1))))
    assert eval_cocycle(weighted, u, v) == 3
    with pytest.raises(CocycleError):
        eval_cocycle(PhiP(1), build_fixture('F3').one(), build_fixture('F3').one())


def test_cocycle_laws_hold():
    print("🧪 Testing the cocycle laws...")
    f1 = build_fixture('F1')
    for c in (PhiP(1), PhiPPrime(1), Combo(((2, PhiP(1)), (3, PhiPPrime(1))))):
        assert check_cocycle_laws(c, f1, SMALL).ok
    f6 = build_fixture('F6')
    (hom,) = hom_star_complement(f6.lattice)
    assert check_cocycle_laws(PhiMu(hom), f6, SMALL).ok
    f3 = build_fixture('F3')
    box = key_box(f3, 1, 2)
    psi = Coboundary(random_functional(f3, box, sample_rng(1, 0)))
    assert check_cocycle_laws(psi, f3, SMALL).ok
    print("✅ phi, phi', phi_mu and psi_f are skew and closed")


def test_table_without_skew_symmetry_fails():
    f1 = build_fixture('F1')
    # brackets inside this box vanish, so only skew-symmetry can fail
    k1 = f1.x((1, 0)).only_key()
    k2 = f1.x((2, 0)).only_key()
    table = Table(f1, {(k1, k2): f1.field.one}, frozenset({k1, k2}))
    report = check_cocycle_laws(table, f1, SMALL)
    assert not report.ok
    assert report.counterexample['law'] == 'skew-symmetry'


def test_functional_box_is_enforced():
    f1 = build_fixture('F1')
    with pytest.raises(CocycleError):
        coboundary_of({f1.x((5, 5)).only_key(): 1}, f1, box=[f1.one().only_key()])


def test_reduction_index_order():
    assert reduction_index(build_fixture('F3').shape) == 1
    assert reduction_index(build_fixture('F2').shape) == 1
    assert reduction_index(build_fixture('F5').shape) == 2


def test_reduction_kills_coboundaries():
    print("🧪 Testing the reduction to zero on a box...")
    for name in ('F2', 'F3', 'F5'):
        algebra = build_fixture(name)
        box = key_box(algebra, 1, 3)
        for k in range(3):
            psi = Coboundary(random_functional(algebra, box, sample_rng(9, k)))
            _, residual = reduce_cocycle(psi, algebra, box)
            assert residual['ok'], (name, residual['witness'])
            assert residual['pairs_checked'] > 0
    with pytest.raises(CocycleError):
        reduce_cocycle(PhiP(1), build_fixture('F1'), [])
    print("✅ every sampled coboundary reduces to zero")


def test_independence_probe():
    print("🧪 Testing the independence probe...")
    assert independence_probe(build_fixture('F1'))['independent']
    result = independence_probe(build_fixture('F6'))
    assert result['independent']
    assert len(result['family']) == 3
    f1 = build_fixture('F1')
    assert not independence_probe(f1, PhiP(1))['coboundary_on_probes']
    box = key_box(f1, 1, 0)
    psi = Coboundary(random_functional(f1, box, sample_rng(2, 0)))
    assert independence_probe(f1, psi)['coboundary_on_probes']
    with pytest.raises(CocycleError):
        independence_probe(build_fixture('F3'))
    print("✅ phi classes are independent modulo coboundaries")


if __name__ == "__main__":
    print("🔬 Cohomology tests")
    test_h2_dimensions()
    test_phi_closed_values()
    test_cocycle_laws_hold()
    test_table_without_skew_symmetry_fails()
    test_functional_box_is_enforced()
    test_reduction_index_order()
    test_reduction_kills_coboundaries()
    test_independence_probe()
    print("\n✅ All cohomology tests passed!")

#!/usr/bin/env python3
"""
Tests for the outer derivation family, the derivation law and probe recovery
"""

import os
import sys

import pytest

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import Settings
from derivations import (D0, Ad, DMu, DOuter, DPrime0, PartialT, build_hom, check_derivation_law,
                         check_spec, combo, derivation_probe, eval_derivation, generator_family,
                         hom_plus_basis, hom_star_complement, mu_component, recovered)
from errors import DerivationError
from fixtures import build_fixture

SMALL = Settings(samples=20, max_degree=2, coord_bound=2, seed=3)


@pytest.fixture(scope='module')
def f1():
    return build_fixture('F1')


def test_closed_forms(f1):
    print("🧪 Testing derivation closed forms on F1...")
    assert eval_derivation(D0(), f1.x((1, 0))) == f1.x((1, 0)).scale(2)
    assert eval_derivation(D0(), f1.one()) == f1.one()
    assert eval_derivation(DOuter(1), f1.x((-1, -1))) == f1.one().scale(-1)
    assert eval_derivation(DOuter(1), f1.x((0, 1))) == f1.x((1, 2))
    assert eval_derivation(DPrime0(), f1.x((1, 1))) == f1.one()
    assert eval_derivation(DPrime0(), f1.x((1, 0))).is_zero()
    d = combo((2, DOuter(1)), (1, D0()))
    expected = f1.x((1, 2)).scale(2) + f1.x((0, 1))
    assert eval_derivation(d, f1.x((0, 1))) == expected
    print("✅ d0, d[1] and d0' match by hand")


def test_spec_checks(f1):
    f2 = build_fixture('F2')
    with pytest.raises(DerivationError):
        check_spec(DPrime0(), build_fixture('F5'))
    with pytest.raises(DerivationError):
        check_spec(DOuter(1), f2)
    with pytest.raises(DerivationError):
        check_spec(PartialT(1), f1)
    with pytest.raises(DerivationError):
        eval_derivation(D0(), f1.extend().one())
    with pytest.raises(DerivationError):
        build_hom(f1.lattice, (1, 0))
    assert build_hom(f1.lattice, (1, -1)).values == (1, -1)


@pytest.mark.parametrize('name', ['F1', 'F2', 'F3', 'F4', 'F5', 'F6', 'F7'])
def test_d0_is_accepted_on_every_fixture(name):
    algebra = build_fixture(name)
    check_spec(D0(), algebra)
    check_spec(combo((3, D0()), (1, Ad(algebra.one()))), algebra)
    assert check_derivation_law(D0(), algebra, SMALL, name='d0').ok


def test_d0_through_law_check_and_recovery():
    f2 = build_fixture('F2')
    report = check_derivation_law(combo((2, D0())), f2, SMALL)
    assert report.ok and report.total == SMALL.samples
    recovery = derivation_probe(D0(), f2)
    assert recovery['status'] == 'ok'
    assert recovered(recovery, 'd0') == '1'


def test_hom_spaces():
    f1 = build_fixture('F1')
    assert len(hom_plus_basis(f1.lattice)) == 1
    assert mu_component(f1.lattice, 1).values == (1, -1)
    assert hom_star_complement(f1.lattice) == []
    f6 = build_fixture('F6')
    assert len(hom_plus_basis(f6.lattice)) == 2
    assert len(hom_star_complement(f6.lattice)) == 1


def test_generator_family_labels():
    assert [label for label, _ in generator_family(build_fixture('F1'))] == ["d0'", 'd0', 'd[1]', 'd[2]']
    assert [label for label, _ in generator_family(build_fixture('F2'))] == ['d0']
    assert [label for label, _ in generator_family(build_fixture('F6'))] == [
        "d0'", 'd0', 'd[1]', 'd[2]', 'dmu*1']


def test_derivation_law_holds_for_family():
    print("🧪 Testing the derivation law...")
    for name in ('F1', 'F3', 'F5', 'F7'):
        algebra = build_fixture(name)
        for label, spec in generator_family(algebra):
            report = check_derivation_law(spec, algebra, SMALL, name=label)
            assert report.ok, (name, label, report.counterexample)
    f3 = build_fixture('F3')
    report = check_derivation_law(Ad(f3.x((1, 0)) + f3.t(2)), f3, SMALL)
    assert report.ok
    print("✅ every generator satisfies the Leibniz law on samples")


def test_derivation_law_rejects_scaling():
    f2 = build_fixture('F2')
    report = check_derivation_law(lambda u: u.scale(2), f2, SMALL)
    assert not report.ok
    assert report.counterexample is not None


def test_probe_recovery(f1):
    print("🧪 Testing probe recovery...")
    report = derivation_probe(D0(), f1)
    assert report['status'] == 'ok'
    assert recovered(report, 'd0') == '1'
    assert recovered(report, 'd[1]') == '0'

    report = derivation_probe(Ad(f1.x((1, 0))), f1)
    assert set(report['coordinates'].values()) == {'0'}

    mu = DMu(build_hom(f1.lattice, (1, -1)))
    report = derivation_probe(combo((2, DOuter(1)), (1, mu)), f1)
    assert recovered(report, 'd[1]') == '2'
    assert recovered(report, 'd0') == '0'
    print("✅ planted outer coordinates come back")


if __name__ == "__main__":
    print("🔬 Derivation tests")
    a1 = build_fixture('F1')
    test_closed_forms(a1)
    test_spec_checks(a1)
    for fx in ('F1', 'F2', 'F3', 'F4', 'F5', 'F6', 'F7'):
        test_d0_is_accepted_on_every_fixture(fx)
    test_d0_through_law_check_and_recovery()
    test_hom_spaces()
    test_generator_family_labels()
    test_derivation_law_holds_for_family()
    test_derivation_law_rejects_scaling()
    test_probe_recovery(a1)
    print("\n✅ All derivation tests passed!")

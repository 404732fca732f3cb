#!/usr/bin/env python3
"""
Runs every named property suite over the fixture algebras with small settings
"""

import os
import sys

import pytest

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import Settings
from errors import ConfigError
from fixtures import build_fixture, fixture_names
import suites
from suites import SUITES, morphism_suite, nilpotency_counterexample, reduction_suite, run_suite

SMALL = Settings(samples=12, max_degree=2, coord_bound=2, max_power=4, seed=1)

FAST_SUITES = ['jacobi', 'skew', 'leibniz', 'oracle', 'grading', 'eigen', 'derivation-law',
               'operator-identities', 'probe', 'cocycle-law', 'independence', 'nilpotency',
               'support-decrease', 'cyclic', 'eigen-membership', 'sandwich', 'tau']


@pytest.mark.parametrize('fixture', fixture_names())
@pytest.mark.parametrize('suite', FAST_SUITES)
def test_fast_suites_pass(suite, fixture):
    report = run_suite(suite, build_fixture(fixture), SMALL.override(samples=6 if suite == 'probe' else None))
    assert report.ok, (suite, fixture, report.counterexample)


def test_every_suite_is_covered():
    assert set(FAST_SUITES) | {'classical', 'reduction', 'morphism'} == set(SUITES)


def test_classical_agreement():
    print("🧪 Testing against the sympy brackets...")
    poly = run_suite('classical', build_fixture('F2'), SMALL)
    assert poly.ok and poly.notes['mode'] == 'polynomial'
    assert poly.total == poly.notes['monomials'] ** 2
    laurent = run_suite('classical', build_fixture('F1'), SMALL)
    assert laurent.ok and laurent.notes['mode'] == 'laurent'
    skipped = run_suite('classical', build_fixture('F3'), SMALL)
    assert skipped.total == 0 and 'skipped' in skipped.notes
    print("✅ structural bracket matches sympy")


def test_nilpotency_rejects_loose_bounds():
    f2 = build_fixture('F2')
    u, v = f2.t(1), f2.t(2, 2)
    assert nilpotency_counterexample(u, v) is None
    loose = nilpotency_counterexample(u, v, m=4)
    assert loose['m'] == 4 and loose['reason'] == 'ad_u^(m-1)(v) = 0'
    assert nilpotency_counterexample(u, v, m=2)['reason'] == 'ad_u^m(v) != 0'
    assert nilpotency_counterexample(f2.one(), f2.monomial((0, 0), (2, 2))) is None


@pytest.mark.parametrize('fixture', ['F2', 'F3', 'F5', 'F7'])
def test_reduction_suite_small_box(fixture):
    report = reduction_suite(build_fixture(fixture), SMALL, count=2, degree=2)
    assert report.ok, report.counterexample
    assert report.total == 2


def test_reduction_skips_l1_only():
    report = reduction_suite(build_fixture('F1'), SMALL, count=1, degree=1)
    assert report.total == 0 and 'skipped' in report.notes


@pytest.mark.parametrize('fixture', ['F1', 'F3', 'F4', 'F7'])
def test_morphism_suite(fixture):
    report = morphism_suite(build_fixture(fixture), SMALL.override(samples=4), count=2)
    assert report.ok, report.counterexample
    assert report.notes['isos_checked'] == 2


def test_morphism_suite_counts_missing_isos(monkeypatch):
    monkeypatch.setattr(suites, 'ISO_ATTEMPTS', 0)
    report = morphism_suite(build_fixture('F1'), SMALL.override(samples=4), count=3)
    assert not report.ok
    assert (report.passed, report.total) == (0, 3)
    assert report.counterexample['kind'] == 'shortfall'
    assert report.notes['isos_checked'] == 0


def test_aliases_and_unknown_names():
    f1 = build_fixture('F1')
    assert run_suite('skew-symmetry', f1, SMALL).name == 'skew'
    assert run_suite('oracle-equivalence', f1, SMALL).ok
    with pytest.raises(ConfigError):
        run_suite('no-such-suite', f1, SMALL)


def test_reports_are_seed_deterministic():
    f3 = build_fixture('F3')
    first = run_suite('jacobi', f3, SMALL).to_dict()
    again = run_suite('jacobi', f3, SMALL.override(n_jobs=2)).to_dict()
    assert first == again


if __name__ == "__main__":
    print("🔬 Suite tests")
    for name in FAST_SUITES:
        for fx in fixture_names():
            test_fast_suites_pass(name, fx)
        print(f"✅ {name}")
    test_every_suite_is_covered()
    test_classical_agreement()
    test_nilpotency_rejects_loose_bounds()
    for fx in ('F2', 'F3', 'F5', 'F7'):
        test_reduction_suite_small_box(fx)
    test_reduction_skips_l1_only()
    for fx in ('F1', 'F3', 'F4', 'F7'):
        test_morphism_suite(fx)
    test_aliases_and_unknown_names()
    test_reports_are_seed_deterministic()
    print("\n✅ All suite tests passed!")

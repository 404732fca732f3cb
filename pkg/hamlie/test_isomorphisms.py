#!/usr/bin/env python3
"""
Tests for preserving isomorphisms, characters and the induced algebra isomorphisms
"""

import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import pytest

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import Settings
from errors import FieldError, IsomorphismError
from fixtures import build_fixture, load_fixture_iso
from harness import sample_rng
from isomorphisms import (apply_tau, build_preserving_iso, build_theta, decompose_tau,
                          extend_character, identity_iso, inverse_tau,
                          random_preserving_iso, recompose_matrix, trivial_character,
                          validate_preserving, verify_morphism)
from lattice import build_lattice
from scalars import RationalField
from shape import build_shape

SMALL = Settings(samples=15, max_degree=2, coord_bound=2, seed=11)


def test_tau_on_vectors():
    print("🧪 Testing tau on exponent vectors...")
    f1 = build_fixture('F1')
    iso, _ = load_fixture_iso('f1_flip.iso', f1)
    assert apply_tau(iso, (1, 0)) == (-1, 0)
    assert apply_tau(iso, (0, 1)) == (2, 1)
    assert apply_tau(iso, f1.sigmas[1]) == (1, 1)
    assert inverse_tau(iso, apply_tau(iso, (3, -2))) == (3, -2)
    assert identity_iso(f1.shape, f1.field).is_identity()
    assert not iso.is_identity()
    print("✅ tau acts as the template matrix")


def test_iso_data_errors():
    f1 = build_fixture('F1')
    with pytest.raises(IsomorphismError):
        build_preserving_iso(f1.shape, f1.field, b={1: 0})
    f7 = build_fixture('F7')
    with pytest.raises(IsomorphismError):
        build_preserving_iso(f7.shape, f7.field, nu={1: 2, 2: 1})
    with pytest.raises(IsomorphismError):
        build_preserving_iso(f7.shape, f7.field, blocks={'B55': [[0]]})


def test_extend_character():
    print("🧪 Testing character extension...")
    shape = build_shape((1, 0, 0, 0, 0, 0, 0))
    half = build_lattice(shape, [(Fraction(1, 2), Fraction(1, 2)), (1, -1)], RationalField())
    chi = extend_character(half, {1: 9})
    assert chi.evaluate(half.sigma(1)) == 9
    assert chi.values[0] == 3
    with pytest.raises(FieldError):
        extend_character(half, {1: 2})
    f1 = build_fixture('F1')
    chi = extend_character(f1.lattice, {1: -1})
    assert chi.evaluate(f1.sigmas[1]) == -1
    print("✅ chi(sigma_p) = b_p solved with exact roots")


def test_decomposition_recomposes():
    f7 = build_fixture('F7')
    iso, _ = load_fixture_iso('f7_shear.iso', f7)
    nu_part, tau1, tau2 = decompose_tau(iso)
    assert nu_part.is_identity()
    assert recompose_matrix((nu_part, tau1, tau2)) == iso.matrix()
    assert not tau2.is_identity()


def test_identity_theta():
    f3 = build_fixture('F3')
    theta = build_theta(identity_iso(f3.shape, f3.field), trivial_character(f3.lattice), f3, f3)
    u = f3.x((1, 1)) + f3.t(1, 2)
    assert theta(u) == u
    assert verify_morphism(theta, SMALL, name='identity').ok


def test_fixture_isos_induce_morphisms():
    print("🧪 Testing theta for the shipped iso files...")
    for fixture, filename in (('F1', 'f1_flip.iso'), ('F7', 'f7_shear.iso')):
        algebra = build_fixture(fixture)
        iso, chi = load_fixture_iso(filename, algebra)
        assert validate_preserving(iso, algebra.lattice, algebra.lattice)['valid']
        theta = build_theta(iso, chi, algebra, algebra)
        report = verify_morphism(theta, SMALL, name=filename)
        assert report.ok, report.counterexample
    print("✅ both thetas preserve product and bracket")


def test_character_mismatch_rejected():
    f1 = build_fixture('F1')
    iso, _ = load_fixture_iso('f1_flip.iso', f1)
    with pytest.raises(IsomorphismError):
        build_theta(iso, trivial_character(f1.lattice), f1, f1)


def test_random_isos_on_integer_lattice():
    f3 = build_fixture('F3')
    for index in range(5):
        iso = random_preserving_iso(f3, sample_rng(7, index))
        assert validate_preserving(iso, f3.lattice, f3.lattice)['valid']
        b = {p: iso.b[p] for p in f3.shape.I(1, 4)}
        theta = build_theta(iso, extend_character(f3.lattice, b), f3, f3)
        assert verify_morphism(theta, SMALL.override(samples=5)).ok


@dataclass
class MappedAlgebra:
    """Any Element -> Element map with a source, in the shape verify_morphism expects."""
    source: object
    fn: object

    def __call__(self, u):
        return self.fn(u)


def test_doubling_is_not_a_morphism():
    f1 = build_fixture('F1')

    def doubled(u):
        return f1.element({(tuple(2 * a for a in alpha), i): c for (alpha, i), c in u.terms.items()})

    report = verify_morphism(MappedAlgebra(f1, doubled), SMALL, name='doubling')
    assert not report.ok
    assert report.counterexample['law'] == 'bracket'


if __name__ == "__main__":
    print("🔬 Isomorphism tests")
    test_tau_on_vectors()
    test_iso_data_errors()
    test_extend_character()
    test_decomposition_recomposes()
    test_identity_theta()
    test_fixture_isos_induce_morphisms()
    test_character_mismatch_rejected()
    test_random_isos_on_integer_lattice()
    test_doubling_is_not_a_morphism()
    print("\n✅ All isomorphism tests passed!")

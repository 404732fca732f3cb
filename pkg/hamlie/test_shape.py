#!/usr/bin/env python3
"""
Tests for the seven-block shape, the scalar fields and the lattice Gamma
"""

import os
import sys
from fractions import Fraction

import pytest

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import FieldError, LatticeError, ParseError, ShapeError
from lattice import build_lattice, probe_vectors
from linalg import column_hermite, mat_mul
from scalars import QuadraticField, QuadraticScalar, RationalField, field_from_name
from shape import build_shape

Q = RationalField()
F1_SHAPE = (1, 0, 0, 0, 0, 0, 0)


def test_shape_index_sets():
    print("🧪 Testing shape index sets...")
    s = build_shape(F1_SHAPE)
    assert s.n == 1
    assert s.indices == (1, 2)
    assert s.bar(1) == 2 and s.bar(2) == 1
    assert s.sigma(1) == (1, 1)

    s7 = build_shape((0, 0, 0, 0, 0, 0, 1))
    assert s7.I(7) == (1,)
    assert s7.sigma(1) == (0, 0)

    s2 = build_shape((0, 1, 0, 0, 0, 0, 0))
    assert s2.sigma(1) == (1, 0)
    assert s2.eta(2) == 0
    assert s2.eta(1) == 1
    print("✅ index sets, bar map and sigma match")


def test_written_order_positions():
    s = build_shape((2, 0, 0, 0, 0, 0, 0))
    assert [s.position(p) for p in (1, 3, 2, 4)] == [0, 1, 2, 3]
    assert all(s.index_at(s.position(p)) == p for p in s.indices)
    assert s.sigma_total == (1, 1, 1, 1)


def test_forbidden_and_zero_sets():
    s5 = build_shape((0, 0, 0, 0, 1, 0, 0))
    assert s5.forbidden_t == frozenset({1})
    assert s5.allowed_t == (2,)
    assert s5.zero_alpha == frozenset({2})
    s1 = build_shape(F1_SHAPE)
    assert s1.forbidden_t == frozenset({1, 2})
    assert s1.is_l1_only()
    assert not build_shape((1, 0, 0, 0, 1, 0, 0)).is_l1_only()


def test_shape_errors():
    with pytest.raises(ShapeError):
        build_shape((1, 0, 0))
    with pytest.raises(ShapeError):
        build_shape((1, -1, 0, 0, 0, 0, 0))
    with pytest.raises(ShapeError):
        build_shape((0,) * 7)
    with pytest.raises(ShapeError):
        build_shape(F1_SHAPE).bar(3)


def test_scalars():
    print("🧪 Testing scalar fields...")
    assert Q.parse('3/2') == Fraction(3, 2)
    assert Q.format(Fraction(-1, 2)) == '-1/2'
    assert Q.format(Fraction(4)) == '4'
    assert Q.format(Fraction(4), strict=True) == '4/1'
    with pytest.raises(ParseError):
        Q.parse('1/0')

    K = field_from_name('quadratic:2')
    r2 = K.parse('sqrt(2)')
    assert r2 == QuadraticScalar(0, 1, 2)
    assert r2 * r2 == 2
    assert K.format(K.parse('1/2-3*sqrt(2)')) == '1/2-3*sqrt(2)'
    assert K.nth_root(K.coerce(2), 2) == r2
    assert K.nth_root(K.parse('3+2*sqrt(2)'), 2) == K.parse('1+sqrt(2)')
    with pytest.raises(FieldError):
        QuadraticField(4)
    print("✅ rational and quadratic scalars behave exactly")


def test_exact_roots_and_square_free_checks():
    assert Q.nth_root(Fraction(8, 27), 3) == Fraction(2, 3)
    assert Q.nth_root(Fraction(-8), 3) == -2
    assert Q.nth_root(Fraction(10 ** 40), 4) == 10 ** 10
    assert Q.nth_root(Fraction(2), 2) is None
    assert Q.nth_root(Fraction(-4), 2) is None
    assert Q.nth_root(Fraction(9, 2), 2) is None
    assert QuadraticField(30).d == 30
    assert QuadraticField(-1).d == -1
    for d in (0, 1, 12, -18):
        with pytest.raises(FieldError):
            QuadraticField(d)


def test_integer_column_reduction():
    m = [[2, 4], [1, 3]]
    h, u, pivots = column_hermite(m)
    assert h == [[2, 0], [1, 1]]
    assert u == [[1, -2], [0, 1]]
    assert pivots == [(0, 0), (1, 1)]
    assert mat_mul(m, u) == h

    h, u, pivots = column_hermite([[-3, 6]])
    assert h == [[3, 0]] and u == [[-1, 2], [0, 1]] and pivots == [(0, 0)]
    assert all(isinstance(x, int) for row in h + u for x in row)
    assert column_hermite([]) == ([], [], [])


def test_lattice_membership():
    print("🧪 Testing lattice membership...")
    s = build_shape(F1_SHAPE)
    lat = build_lattice(s, [(1, 0), (0, 1)], Q)
    assert lat.contains((1, 1))
    assert not lat.contains((Fraction(1, 2), 0))

    half = build_lattice(s, [(Fraction(1, 2), Fraction(1, 2)), (1, -1)], Q)
    assert not half.contains((1, 0))
    assert half.contains((2, 0))
    assert half.integer_coordinates((2, 0)) == [2, 1]
    print("✅ membership solved exactly")


def test_lattice_validation():
    s = build_shape(F1_SHAPE)
    with pytest.raises(LatticeError):
        build_lattice(s, [(1, 1), (2, 2)], Q)
    with pytest.raises(LatticeError):
        build_lattice(s, [(1, 0, 0)], Q)
    s5 = build_shape((0, 0, 0, 0, 1, 0, 0))
    assert build_lattice(s5, [(1, 0)], Q).rank == 1
    with pytest.raises(LatticeError) as exc:
        build_lattice(s5, [(1, 1)], Q)
    assert exc.value.index_kind == 'p'


def test_epsilon_multiples():
    s = build_shape(F1_SHAPE)
    assert build_lattice(s, [(1, 0), (0, 1)], Q).epsilon_multiple(2) == 1
    half = build_lattice(s, [(Fraction(1, 2), Fraction(1, 2)), (1, -1)], Q)
    assert half.epsilon_multiple(1) == 2
    skew = build_lattice(s, [(1, 1), (1, -1)], Q)
    assert skew.epsilon_multiple(1) == 2
    lam, e = probe_vectors(skew)[1]
    assert e == 2 and lam == (0, 2)


def test_quadratic_lattice():
    K = field_from_name('quadratic:2')
    s = build_shape(F1_SHAPE)
    r2 = K.parse('sqrt(2)')
    lat = build_lattice(s, [(1, 0), (0, 1), (r2, -r2)], K)
    assert lat.rank == 3
    assert lat.contains((K.parse('1+sqrt(2)'), K.parse('1-sqrt(2)')))
    assert not lat.contains((r2, 0))


if __name__ == "__main__":
    print("🔬 Shape and lattice tests")
    test_shape_index_sets()
    test_written_order_positions()
    test_forbidden_and_zero_sets()
    test_shape_errors()
    test_scalars()
    test_exact_roots_and_square_free_checks()
    test_integer_column_reduction()
    test_lattice_membership()
    test_lattice_validation()
    test_epsilon_multiples()
    test_quadratic_lattice()
    print("\n✅ All shape and lattice tests passed!")

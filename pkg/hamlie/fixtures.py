"""Built-in fixture algebras F1-F7 and the .alg / .iso files shipped next to them."""

import os

import pandas as pd

from errors import ConfigError
from grammar import AlgebraSpecDocument, load_iso, load_spec
from scalars import field_from_name

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures')

# name -> (shape, basis rows as text, field, role)
FIXTURES = {
    'F1': ((1, 0, 0, 0, 0, 0, 0), [['1', '0'], ['0', '1']], 'rational',
           'one I_1 pair over Z^2; H^2 has dimension 2'),
    'F2': ((0, 0, 0, 0, 0, 0, 1), [], 'rational',
           'classical Hamiltonian algebra in t_1, t_2'),
    'F3': ((0, 0, 0, 1, 0, 0, 0), [['1', '0'], ['0', '1']], 'rational',
           'one mixed I_4 pair over Z^2; H^2 = 0'),
    'F4': ((0, 1, 0, 0, 0, 0, 0), [['1', '0'], ['0', '1']], 'rational',
           'one I_2 pair over Z^2'),
    'F5': ((0, 0, 0, 0, 1, 0, 0), [['1', '0']], 'rational',
           'one I_5 pair over Z*eps_1'),
    'F6': ((1, 0, 0, 0, 0, 0, 0), [['1', '0'], ['0', '1'], ['sqrt(2)', '-sqrt(2)']], 'quadratic:2',
           'F1 shape with a rank-3 lattice; Hom* has dimension 1'),
    'F7': ((1, 0, 0, 0, 1, 0, 0), [['1', '0', '0', '0'], ['0', '1', '0', '0'], ['0', '0', '1', '0']],
           'rational', 'I_1 plus I_5 over Z^3; case-c isomorphisms'),
}


def fixture_names():
    return list(FIXTURES)


def fixture_document(name):
    try:
        l, rows, field_name, _ = FIXTURES[name.upper()]
    except KeyError:
        raise ConfigError(f"unknown fixture {name!r}; choose one of {', '.join(FIXTURES)}")
    field = field_from_name(field_name)
    basis = tuple(tuple(field.parse(x) for x in row) for row in rows)
    return AlgebraSpecDocument(l, basis, field, name.upper())


def build_fixture(name):
    return fixture_document(name).build()


def fixture_path(filename):
    return os.path.join(FIXTURE_DIR, filename)


def load_fixture_file(name):
    """The shipped f<k>.alg document for a fixture name."""
    return load_spec(fixture_path(f'{name.lower()}.alg'))


def load_fixture_iso(filename, algebra):
    return load_iso(fixture_path(filename), algebra)


def fixture_table():
    rows = []
    for name, (l, rows_text, field_name, role) in FIXTURES.items():
        rows.append({
            'name': name,
            'shape': ','.join(str(x) for x in l),
            'rank': len(rows_text),
            'field': field_name,
            'role': role,
        })
    return pd.DataFrame(rows, columns=['name', 'shape', 'rank', 'field', 'role'])

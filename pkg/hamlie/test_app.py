#!/usr/bin/env python3
"""
CLI tests: drives every hamlie subcommand in-process through run_command
"""

import json
import os
import sys
from fractions import Fraction

import numpy as np

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from app import dump_json, run_command, to_serializable


def run(*argv):
    return run_command(list(argv))


def test_validate():
    print("🧪 Testing validate...")
    code, out = run('validate', '--spec', 'f1.alg')
    assert code == 0
    assert out.startswith('✅ valid')
    code, out = run('validate', '--fixture', 'F5', '--json')
    payload = json.loads(out)
    assert payload['shape'] == [0, 0, 0, 0, 1, 0, 0]
    assert payload['forbidden_t'] == [1]
    print("✅ validate accepts shipped specs")


def test_eval_examples():
    print("🧪 Testing eval...")
    assert run('eval', 'bracket', 'x[(1,0)]', 'x[(0,1)]', '--spec', 'f1.alg') == (0, 'x[(2,2)]')
    assert run('eval', 'bracket', 'x[(1,0)]', 'x[(0,1)]', '--fixture', 'F1', '--defining') == (0, 'x[(2,2)]')
    assert run('eval', 'bracket', 't1', 't2', '--fixture', 'F1', '--extended') == (0, 'x[(1,1)]')
    assert run('eval', 'product', 't1^2', 't1*t2', '--fixture', 'F2') == (0, 't1^3*t2')
    assert run('eval', 'derivation', 'd0', 'x[(1,0)]', '--fixture', 'F1') == (0, '2*x[(1,0)]')
    assert run('eval', 'cocycle', 'phi[1]', 'x[(2,1)]', 'x[(-2,-1)]', '--fixture', 'F1') == (0, '2')
    assert run('eval', 'operator', 'down', '1', 't1^3', '--fixture', 'F2') == (0, '3*t1^2')
    assert run('eval', 'pi', '(2,0)', '--fixture', 'F1') == (0, '(2)')
    assert run('eval', 'tau', 'f1_flip.iso', '(1,0)', '--fixture', 'F1') == (0, '(-1,0)')
    code, out = run('eval', 'probe', 'd0', '--fixture', 'F1')
    assert code == 0 and 'd0 = 1' in out.splitlines()
    print("✅ eval ops print normal forms")


def test_eval_json_records():
    code, out = run('eval', 'bracket', 'x[(1,0)]', 'x[(0,1)]', '--fixture', 'F1', '--json')
    assert code == 0
    payload = json.loads(out)
    assert payload['element'] == 'x[(2,2)]'
    assert payload['terms'] == [{'alpha': ['2/1', '2/1'], 'c': '1/1', 'i': [0, 0]}]


def test_json_is_deterministic():
    argv = ('check', 'jacobi', 'skew', '--fixture', 'F3', '--samples', '10', '--seed', '4', '--json')
    first = run(*argv)
    assert first == run(*argv)
    assert first[1] == json.dumps(json.loads(first[1]), sort_keys=True, separators=(',', ':'))


def test_check_command():
    print("🧪 Testing check...")
    code, out = run('check', 'jacobi', '--spec', 'f1.alg', '--samples', '20', '--seed', '7')
    assert code == 0
    assert 'jacobi' in out and 'ok' in out
    code, out = run('check', 'jacobi', '--fixture', 'F1', '--samples', '5', '--json')
    report = json.loads(out)
    assert report['ok'] and report['samples'] == 5
    assert report['reports'][0]['total'] == 5
    print("✅ check runs named suites")


def test_h2_command():
    assert run('h2', '--spec', 'f3.alg') == (0, 'dim 0')
    code, out = run('h2', '--fixture', 'F1', '--probe')
    assert code == 0
    assert out.splitlines() == ['dim 2', 'phi[1]', "phi'[1]", 'independent on probes']
    code, out = run('h2', '--fixture', 'F1', '--probe', '--combo', 'phi[1]')
    assert out.splitlines()[-1] == 'not a coboundary on probes'


def test_iso_command():
    print("🧪 Testing iso...")
    code, out = run('iso', 'f1_flip.iso', '--fixture', 'F1', '--verify', '--samples', '8')
    assert code == 0
    assert out.splitlines()[0] == '✅ tau preserves Gamma'
    code, out = run('iso', 'f1_flip.iso', '--fixture', 'F1', '--apply', 'x[(1,0)]')
    assert code == 0 and out.splitlines()[-1] == '-x[(-1,0)]'
    code, out = run('iso', 'f7_shear.iso', '--fixture', 'F7', '--normalize')
    assert code == 0 and '[blocks]' in out
    print("✅ iso files validate and induce morphisms")


def test_classify_command():
    code, out = run('classify', 'x[(1,0)]', '--fixture', 'F1', '--max-power', '3', '--target', 'x[(0,1)]')
    assert code == 0
    lines = out.splitlines()
    assert 'verdict not locally finite (structural)' in lines
    assert 'span dims 1 2 3 4' in lines
    code, out = run('classify', 'x[(-1,-1)]', '--fixture', 'F1', '--max-power', '3', '--json')
    payload = json.loads(out)
    assert payload['verdict'] == 'locally finite (structural)'
    assert payload['eigen']['M^F'] and not payload['eigen']['M^N']


def test_fixtures_and_format():
    code, out = run('fixtures', '--json')
    assert code == 0
    assert [row['name'] for row in json.loads(out)] == ['F1', 'F2', 'F3', 'F4', 'F5', 'F6', 'F7']
    code, out = run('format', '--spec', 'f1.alg')
    assert out.splitlines() == ['shape.l=[1,0,0,0,0,0,0]', 'gamma.basis=[[1,0],[0,1]]',
                                'field=rational', 'fixture=F1']
    assert run('format', '--fixture', 'F1', '--element', '3/2*x[(0,1)]+x[(1,0)]') == \
        (0, '3/2*x[(0,1)] + x[(1,0)]')


def test_error_exit_codes(tmp_path):
    print("🧪 Testing error handling...")
    code, out = run('eval', 'bracket', 'x[(1,0)', 'x[(0,1)]', '--fixture', 'F1')
    assert code == 2 and out.startswith('error: ')
    code, out = run('eval', 'bracket', 'x[(1,0)', 'x[(0,1)]', '--fixture', 'F1', '--json')
    assert code == 2 and json.loads(out)['kind'] == 'ParseError'
    assert run('validate')[0] == 2
    assert run('no-such-command')[0] == 2
    assert run('check', 'no-such-suite', '--fixture', 'F1')[0] == 2
    assert run('eval', 'derivation', "d0'", 'x[(1,0)]', '--fixture', 'F5')[0] == 1

    bad = tmp_path / 'bad.alg'
    bad.write_text("shape.l=[1,0,0,0,0,0,0]\ngamma.basis=[[1,1],[2,2]]\n", encoding='utf-8')
    code, out = run('validate', '--spec', str(bad), '--json')
    assert code == 1
    assert json.loads(out)['kind'] == 'LatticeError'
    print("✅ exit codes 1 and 2 as documented")


def test_to_serializable():
    assert to_serializable({'a': (Fraction(1, 2), np.int64(3))}) == {'a': ['1/2', 3]}
    assert dump_json({'b': 1, 'a': [1, 2]}) == '{"a":[1,2],"b":1}'


if __name__ == "__main__":
    print("🔬 CLI tests")
    test_validate()
    test_eval_examples()
    test_eval_json_records()
    test_json_is_deterministic()
    test_check_command()
    test_h2_command()
    test_iso_command()
    test_classify_command()
    test_fixtures_and_format()
    print("\n✅ All CLI tests passed!")

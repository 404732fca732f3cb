#!/usr/bin/env python3
"""
Tests for environment settings, the error dicts and the seeded sampling harness
"""

import os
import sys

import pytest

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import Settings, load_settings
from errors import ConfigError, HamlieError, LatticeError, ParseError
from fixtures import build_fixture
from harness import random_element, random_monomial, sample_rng


def test_defaults_and_override():
    s = Settings()
    assert (s.seed, s.samples, s.max_degree, s.coord_bound, s.max_power) == (0, 200, 4, 3, 6)
    t = s.override(samples=10, seed=None)
    assert t.samples == 10 and t.seed == 0
    assert s.samples == 200


def test_load_settings_from_env(monkeypatch):
    print("🧪 Testing environment settings...")
    monkeypatch.setenv('HAMLIE_SEED', '42')
    monkeypatch.setenv('HAMLIE_SAMPLES', '17')
    monkeypatch.setenv('HAMLIE_LOG_LEVEL', 'info')
    s = load_settings()
    assert s.seed == 42 and s.samples == 17 and s.log_level == 'INFO'
    monkeypatch.setenv('HAMLIE_MAX_POWER', 'many')
    with pytest.raises(ConfigError) as exc:
        load_settings()
    assert exc.value.to_dict()['variable'] == 'HAMLIE_MAX_POWER'
    assert exc.value.exit_code == 2
    print("✅ HAMLIE_* variables override the defaults")


def test_error_dicts():
    err = LatticeError("sigma_1 is not in Gamma", index_kind='p', index=1)
    assert err.to_dict() == {'error': 'sigma_1 is not in Gamma', 'kind': 'LatticeError',
                             'index_kind': 'p', 'index': 1}
    assert err.exit_code == 1
    assert HamlieError("plain").to_dict() == {'error': 'plain', 'kind': 'HamlieError'}
    parse = ParseError("unexpected ']'", line=2, column=5, clause='gamma.basis')
    assert str(parse) == "line 2, column 5 in gamma.basis: unexpected ']'"
    assert str(ParseError("missing shape.l", clause='document')) == "input in document: missing shape.l"


def test_sampling_is_seeded():
    f3 = build_fixture('F3')
    s = Settings(max_degree=2, coord_bound=2)
    first = [random_monomial(f3, sample_rng(5, k), s) for k in range(5)]
    again = [random_monomial(f3, sample_rng(5, k), s) for k in range(5)]
    assert first == again
    u = random_element(f3, sample_rng(1, 0), s)
    assert u.algebra == f3
    assert u == random_element(f3, sample_rng(1, 0), s)


if __name__ == "__main__":
    print("🔬 Config and harness tests")
    test_defaults_and_override()
    test_error_dicts()
    test_sampling_is_seeded()
    print("\n✅ All config tests passed!")

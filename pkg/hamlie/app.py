"""hamlie command line.

Subcommands: validate, eval, check, iso, h2, classify, fixtures, format.
Exit codes: 0 success, 1 mathematical failure, 2 usage or parse error.
"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np
import pandas as pd

import cohomology
import derivations
import isomorphisms
import locality
from config import load_settings
from errors import ConfigError, HamlieError
from fixtures import build_fixture, fixture_path, fixture_table
from formatting import element_records, format_element, format_key, format_vector
from grammar import (document_of, format_cocycle, format_derivation, format_iso, format_spec,
                     load_iso, load_spec, parse_cocycle, parse_derivation, parse_element, parse_spec)
from harness import CheckReport, sample_rng
from kernel import (apply_operator, bracket_defining, bracket_structural, monomial_stats, multiply, pi_map,
                    set_membership)
from scalars import QuadraticScalar
from suites import SUITES, run_suite

logger = logging.getLogger('hamlie')

EVAL_OPS = ('product', 'bracket', 'derivation', 'probe', 'cocycle', 'operator', 'pi', 'stats',
            'tau', 'theta')


def to_serializable(obj):
    """Convert reports, scalars and numpy/pandas values to plain JSON types."""
    if isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, (Fraction, QuadraticScalar)):
        return str(obj)
    elif isinstance(obj, CheckReport):
        return to_serializable(obj.to_dict())
    elif isinstance(obj, pd.DataFrame):
        return to_serializable(obj.to_dict(orient='records'))
    elif isinstance(obj, dict):
        return {str(key): to_serializable(value) for key, value in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [to_serializable(item) for item in obj]
    else:
        return obj


def dump_json(payload):
    return json.dumps(to_serializable(payload), sort_keys=True, separators=(',', ':'))


def configure_logging(settings, verbose):
    level = {0: settings.log_level, 1: 'INFO'}.get(verbose, 'DEBUG')
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.WARNING),
                        stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s', force=True)


def load_algebra(args, settings):
    if args.spec:
        path = args.spec
        if not os.path.exists(path) and os.path.exists(fixture_path(path)):
            path = fixture_path(path)
        if not os.path.exists(path):
            raise ConfigError(f"spec file not found: {args.spec}")
        algebra = load_spec(path, settings.field).build()
        logger.info("✅ loaded %s", path)
        return algebra
    if args.fixture:
        return build_fixture(args.fixture)
    raise ConfigError("give --spec FILE or --fixture NAME")


def _load_iso_file(path, algebra):
    if not os.path.exists(path) and os.path.exists(fixture_path(path)):
        path = fixture_path(path)
    if not os.path.exists(path):
        raise ConfigError(f"iso file not found: {path}")
    return load_iso(path, algebra)


def _theta_for(algebra, iso, chi):
    if chi is None:
        chi = isomorphisms.extend_character(algebra.lattice, iso.b)
    return isomorphisms.build_theta(iso, chi, algebra, algebra)


def _report_table(reports):
    rows = [{'suite': r.name, 'passed': r.passed, 'total': r.total,
             'status': 'skipped' if 'skipped' in r.notes else ('ok' if r.ok else 'FAILED')}
            for r in reports]
    return pd.DataFrame(rows, columns=['suite', 'passed', 'total', 'status'])


# Subcommands: each returns (exit code, JSON payload, text)


def cmd_validate(args, settings):
    algebra = load_algebra(args, settings)
    shape, lattice = algebra.shape, algebra.lattice
    payload = {
        'valid': True,
        'shape': list(shape.l),
        'dim': shape.dim,
        'rank': lattice.rank,
        'field': algebra.field.name,
        'sigma': {str(p): format_vector(algebra.field, algebra.sigmas[p]) for p in shape.I(1, 7)},
        'forbidden_t': list(shape.forbidden_t),
    }
    text = '\n'.join([
        f"✅ valid: {shape.describe()}",
        f"rank {lattice.rank} over {algebra.field.name}",
        'forbidden t: ' + (', '.join(f't{p}' for p in shape.forbidden_t) or 'none'),
    ])
    return 0, payload, text


def _element_out(u):
    return {'element': format_element(u), 'terms': element_records(u)}, format_element(u)


def _need(values, count, op):
    if len(values) != count:
        raise ConfigError(f"eval {op} needs {count} argument(s), got {len(values)}")
    return values


def cmd_eval(args, settings):
    algebra = load_algebra(args, settings)
    f = algebra.field
    op, values = args.op, args.args
    if op == 'product':
        a, b = _need(values, 2, op)
        return (0, *_element_out(multiply(parse_element(a, algebra), parse_element(b, algebra))))
    if op == 'bracket':
        a, b = _need(values, 2, op)
        target = algebra.extend() if args.extended else algebra
        u, v = parse_element(a, target), parse_element(b, target)
        br = bracket_defining(u, v) if args.defining else bracket_structural(u, v)
        return (0, *_element_out(br))
    if op == 'derivation':
        d, a = _need(values, 2, op)
        spec = parse_derivation(d, algebra)
        out = derivations.eval_derivation(spec, parse_element(a, algebra))
        payload, text = _element_out(out)
        payload['derivation'] = format_derivation(spec, f)
        return 0, payload, text
    if op == 'probe':
        d, = _need(values, 1, op)
        report = derivations.derivation_probe(parse_derivation(d, algebra), algebra)
        lines = [f"status {report['status']}"]
        lines += [f"{label} = {c}" for label, c in report.get('coordinates', {}).items()]
        return (0 if report['status'] == 'ok' else 1), report, '\n'.join(lines)
    if op == 'cocycle':
        c, a, b = _need(values, 3, op)
        spec = parse_cocycle(c, algebra)
        value = cohomology.eval_cocycle(spec, parse_element(a, algebra), parse_element(b, algebra))
        return 0, {'cocycle': format_cocycle(spec, f), 'value': f.format(value, strict=True)}, f.format(value)
    if op == 'operator':
        kind, p, a = _need(values, 3, op)
        try:
            index = int(p)
        except ValueError:
            raise ConfigError(f"operator index must be an integer, got {p!r}")
        return (0, *_element_out(apply_operator(kind, index, parse_element(a, algebra))))
    if op == 'pi':
        vec, = _need(values, 1, op)
        u = parse_element(f'x[{vec}]', algebra)
        (alpha, _), = u.terms
        mu = pi_map(algebra.lattice, alpha)
        return 0, {'pi': [f.format(m, strict=True) for m in mu]}, format_vector(f, mu)
    if op == 'stats':
        a, = _need(values, 1, op)
        rows = []
        for key, _ in parse_element(a, algebra).sorted_terms():
            level, support = monomial_stats(algebra.shape, key)
            rows.append({'monomial': format_key(algebra, key) or '1', 'level': level,
                         'support': ','.join(str(p) for p in support)})
        table = pd.DataFrame(rows, columns=['monomial', 'level', 'support'])
        return 0, rows, table.to_string(index=False)
    if op == 'tau':
        path, vec = _need(values, 2, op)
        iso, _ = _load_iso_file(path, algebra)
        (alpha, _), = parse_element(f'x[{vec}]', algebra).terms
        image = isomorphisms.apply_tau(iso, alpha)
        return 0, {'image': [f.format(x, strict=True) for x in image]}, format_vector(f, image)
    if op == 'theta':
        path, a = _need(values, 2, op)
        iso, chi = _load_iso_file(path, algebra)
        theta = _theta_for(algebra, iso, chi)
        return (0, *_element_out(theta(parse_element(a, algebra))))
    raise ConfigError(f"unknown eval op {op!r}")


def cmd_check(args, settings):
    algebra = load_algebra(args, settings)
    names = list(SUITES) if args.suites == ['all'] else args.suites
    reports = [run_suite(name, algebra, settings) for name in names]
    failed = [r for r in reports if not r.ok]
    text = _report_table(reports).to_string(index=False)
    for r in failed:
        text += f"\n❌ {r.name}: {json.dumps(to_serializable(r.counterexample), sort_keys=True)}"
    payload = {'ok': not failed, 'seed': settings.seed, 'samples': settings.samples,
               'reports': [r.to_dict() for r in reports]}
    return (1 if failed else 0), payload, text


def cmd_iso(args, settings):
    algebra = load_algebra(args, settings)
    f = algebra.field
    iso, chi = _load_iso_file(args.file, algebra)
    report = isomorphisms.validate_preserving(iso, algebra.lattice, algebra.lattice)
    payload = {'validation': report, 'matrix': [[f.format(x, strict=True) for x in row] for row in iso.matrix()]}
    lines = ['✅ tau preserves Gamma' if report['valid'] else
             f"❌ tau leaves Gamma ({report['direction']}, basis vector {report['basis_index']})"]
    if args.normalize:
        lines.append(format_iso(iso, chi).rstrip('\n'))
    if not report['valid']:
        return 1, payload, '\n'.join(lines)
    code = 0
    if args.apply or args.verify:
        theta = _theta_for(algebra, iso, chi)
        if args.apply:
            image = theta(parse_element(args.apply, algebra))
            payload['image'] = element_records(image)
            lines.append(format_element(image))
        if args.verify:
            check = isomorphisms.verify_morphism(theta, settings, name='iso-verify')
            payload['verify'] = check.to_dict()
            lines.append(_report_table([check]).to_string(index=False))
            code = 0 if check.ok else 1
    return code, payload, '\n'.join(lines)


def cmd_h2(args, settings):
    algebra = load_algebra(args, settings)
    report = cohomology.h2_report(algebra)
    lines = [f"dim {report['dimension']}"] + report['generators']
    code = 0
    if args.probe and algebra.shape.is_l1_only():
        combo = parse_cocycle(args.combo, algebra) if args.combo else None
        probe = cohomology.independence_probe(algebra, combo)
        report['probe'] = probe
        if combo is None:
            lines.append('independent on probes' if probe['independent'] else 'dependent on probes')
            code = 0 if probe['independent'] else 1
        else:
            lines.append('coboundary on probes' if probe['coboundary_on_probes']
                         else 'not a coboundary on probes')
    return code, report, '\n'.join(lines)


def cmd_classify(args, settings):
    algebra = load_algebra(args, settings)
    u = parse_element(args.element, algebra)
    rng = sample_rng(settings.seed, 0)
    report = locality.classify(u, settings, rng)
    report['eigen'] = locality.eigen_membership(u, rng, settings)
    if set_membership('M', u):
        in_mf, in_mn = locality.mf_mn_membership(u)
        report['eigen'].update({'M^F': in_mf, 'M^N': in_mn})
    lines = [f"element {report['element']}", f"verdict {report['verdict']}"]
    lines += [f"{name}: {'yes' if flag else 'no'}" for name, flag in report['structural'].items()]
    if args.target:
        orbit = locality.ad_orbit(u, parse_element(args.target, algebra), settings.max_power)
        report['orbit'] = orbit.to_dict()
        lines.append('span dims ' + ' '.join(str(d) for d in orbit.span_dims))
    growth = report['empirical'].get('growth')
    if growth and growth['found']:
        lines.append(f"growth witness x^{growth['beta']}")
    return (0 if report['consistent'] else 1), report, '\n'.join(lines)


def cmd_fixtures(args, settings):
    table = fixture_table()
    return 0, table, table.to_string(index=False)


def cmd_format(args, settings):
    if args.element:
        algebra = load_algebra(args, settings)
        u = parse_element(args.element, algebra)
        return (0, *_element_out(u))
    if args.spec:
        path = args.spec if os.path.exists(args.spec) else fixture_path(args.spec)
        with open(path, 'r', encoding='utf-8') as fh:
            doc = parse_spec(fh.read(), settings.field)
    else:
        doc = document_of(load_algebra(args, settings), args.fixture.upper() if args.fixture else None)
    doc.build()
    text = format_spec(doc).rstrip('\n')
    return 0, {'spec': text}, text


COMMANDS = {
    'validate': cmd_validate,
    'eval': cmd_eval,
    'check': cmd_check,
    'iso': cmd_iso,
    'h2': cmd_h2,
    'classify': cmd_classify,
    'fixtures': cmd_fixtures,
    'format': cmd_format,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--spec', help='algebra spec file (.alg); bare names resolve to shipped fixtures')
    common.add_argument('--fixture', help='built-in fixture name, F1..F7')
    common.add_argument('--json', action='store_true', help='machine-readable output')
    common.add_argument('--samples', type=int)
    common.add_argument('--seed', type=int)
    common.add_argument('--max-degree', type=int, dest='max_degree')
    common.add_argument('--max-power', type=int, dest='max_power')
    common.add_argument('--jobs', type=int, dest='n_jobs')
    common.add_argument('-v', '--verbose', action='count', default=0)

    parser = argparse.ArgumentParser(prog='hamlie', description='Exact kernel for H(l, Gamma)')
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('validate', parents=[common], help='validate a spec')

    ev = sub.add_parser('eval', parents=[common], help='evaluate one operation')
    ev.add_argument('op', choices=EVAL_OPS)
    ev.add_argument('args', nargs='*')
    ev.add_argument('--extended', action='store_true', help='bracket in the enlarged algebra')
    ev.add_argument('--defining', action='store_true', help='use the defining bracket formula')

    ck = sub.add_parser('check', parents=[common], help='run property suites')
    ck.add_argument('suites', nargs='+', help=f"suite names or 'all': {', '.join(SUITES)}")

    iso = sub.add_parser('iso', parents=[common], help='validate, apply or verify an iso file')
    iso.add_argument('file')
    iso.add_argument('--apply', metavar='ELEMENT')
    iso.add_argument('--verify', action='store_true')
    iso.add_argument('--normalize', action='store_true', help='re-emit the iso file in normal form')

    h2 = sub.add_parser('h2', parents=[common], help='second cohomology report')
    h2.add_argument('--probe', action='store_true', help='run the independence probe')
    h2.add_argument('--combo', help='cocycle combination to test against coboundaries')

    cl = sub.add_parser('classify', parents=[common], help='local-finiteness classification')
    cl.add_argument('element')
    cl.add_argument('--target', help='also report the ad-orbit of this element')

    sub.add_parser('fixtures', parents=[common], help='list built-in fixtures')

    fm = sub.add_parser('format', parents=[common], help='re-emit a spec or element in normal form')
    fm.add_argument('--element')
    return parser


def run_command(argv):
    """Parse argv, run one subcommand; returns (exit code, stdout text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), ''
    as_json = args.json
    try:
        settings = load_settings().override(seed=args.seed, samples=args.samples,
                                            max_degree=args.max_degree, max_power=args.max_power,
                                            n_jobs=args.n_jobs)
        configure_logging(settings, args.verbose)
        code, payload, text = COMMANDS[args.command](args, settings)
    except HamlieError as exc:
        logger.error("❌ %s", exc)
        if as_json:
            return exc.exit_code, dump_json(exc.to_dict())
        return exc.exit_code, f"error: {exc}"
    return code, dump_json(payload) if as_json else text


def main(argv=None):
    code, output = run_command(sys.argv[1:] if argv is None else argv)
    if output:
        print(output)
    return code


if __name__ == '__main__':
    sys.exit(main())

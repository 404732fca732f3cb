"""Named property suites: each takes (algebra, settings) and returns a CheckReport."""

import logging
from itertools import product

import sympy

import cohomology
import derivations
import isomorphisms
import locality
from config import Settings
from errors import ConfigError, HamlieError
from formatting import format_element, format_vector
from harness import (CheckReport, bind, random_element, random_group_vector, random_monomial,
                     run_property, sample_rng)
from kernel import (apply_operator, bracket_defining, bracket_structural, h1_keys, multiply,
                    pi_vector)

logger = logging.getLogger(__name__)

CLASSICAL_DEGREE = 6
CLASSICAL_BOX = 2
REDUCTION_DEGREE = 5
MORPHISM_ISOS = 20
COBOUNDARY_COUNT = 20
ISO_ATTEMPTS = 50


def _merge(name, reports, notes=None):
    merged = CheckReport(name=name, notes=dict(notes or {}))
    for label, report in reports:
        merged.passed += report.passed
        merged.total += report.total
        if report.counterexample is not None and merged.counterexample is None:
            merged.counterexample = dict(report.counterexample, part=label)
    merged.notes['parts'] = [label for label, _ in reports]
    return merged


def _skipped(name, reason):
    logger.info("⚠️ %s skipped: %s", name, reason)
    return CheckReport(name=name, notes={'skipped': reason})


def _pair(algebra, settings, rng):
    return random_monomial(algebra, rng, settings), random_monomial(algebra, rng, settings)


# Kernel laws


def _jacobi_sample(algebra, settings, rng):
    u, v = _pair(algebra, settings, rng)
    w = random_monomial(algebra, rng, settings)
    total = (bracket_structural(u, bracket_structural(v, w))
             + bracket_structural(v, bracket_structural(w, u))
             + bracket_structural(w, bracket_structural(u, v)))
    if total.is_zero():
        return None
    return {'u': format_element(u), 'v': format_element(v), 'w': format_element(w),
            'sum': format_element(total)}


def jacobi_suite(algebra, settings):
    return run_property('jacobi', bind(_jacobi_sample, algebra, settings), settings)


def _skew_sample(algebra, settings, rng):
    u = random_element(algebra, rng, settings)
    v = random_element(algebra, rng, settings)
    w = random_monomial(algebra, rng, settings)
    if not (bracket_structural(u, v) + bracket_structural(v, u)).is_zero():
        return {'law': 'skew-symmetry', 'u': format_element(u), 'v': format_element(v)}
    if not bracket_structural(u, u).is_zero():
        return {'law': '[u,u]=0', 'u': format_element(u)}
    if bracket_structural(u + w, v) != bracket_structural(u, v) + bracket_structural(w, v):
        return {'law': 'bilinearity', 'u': format_element(u), 'v': format_element(v),
                'w': format_element(w)}
    return None


def skew_suite(algebra, settings):
    return run_property('skew', bind(_skew_sample, algebra, settings), settings)


def _leibniz_sample(algebra, settings, rng):
    u, v = _pair(algebra, settings, rng)
    w = random_monomial(algebra, rng, settings)
    lhs = bracket_structural(u, multiply(v, w))
    rhs = multiply(bracket_structural(u, v), w) + multiply(v, bracket_structural(u, w))
    if lhs == rhs:
        return None
    return {'u': format_element(u), 'v': format_element(v), 'w': format_element(w),
            'lhs': format_element(lhs), 'rhs': format_element(rhs)}


def leibniz_suite(algebra, settings):
    return run_property('leibniz', bind(_leibniz_sample, algebra, settings), settings)


def _oracle_sample(algebra, settings, rng):
    target = algebra.extend() if rng.integers(0, 2) else algebra
    u, v = _pair(target, settings, rng)
    a = bracket_structural(u, v)
    b = bracket_defining(u, v)
    if a == b:
        return None
    return {'mode': 'extended' if target.extended else 'restricted', 'u': format_element(u),
            'v': format_element(v), 'structural': format_element(a), 'defining': format_element(b)}


def oracle_suite(algebra, settings):
    return run_property('oracle', bind(_oracle_sample, algebra, settings), settings)


def _grading_sample(algebra, settings, rng):
    u, v = _pair(algebra, settings, rng)
    (alpha, _), = u.terms
    (beta, _), = v.terms
    allowed = {tuple(s + a + b for s, a, b in zip(algebra.sigmas[p], alpha, beta))
               for p in algebra.shape.I(1, 7)}
    for gamma, _ in bracket_structural(u, v).terms:
        if gamma not in allowed:
            return {'u': format_element(u), 'v': format_element(v),
                    'group_part': format_vector(algebra.field, gamma)}
    return None


def grading_suite(algebra, settings):
    return run_property('grading', bind(_grading_sample, algebra, settings), settings)


def _expected_ad(algebra, kind, p, w):
    """The closed-form action of an H1 element: ad_{x^{-sigma_p}} or ad_{t_bar(q)}."""
    shape = algebra.shape
    hom = derivations.mu_component(algebra.lattice, p)
    out = derivations.eval_derivation(derivations.DMu(hom), w)
    block = shape.block_of(p)
    if kind == 'x' and block in (3, 4):
        out = out + apply_operator('down', p, w)
    if kind == 'x' and block == 4:
        out = out - apply_operator('down', shape.bar(p), w)
    if kind == 't' and block == 6:
        out = out - apply_operator('down', p, w)
    return out


def _h1_actions(algebra):
    shape = algebra.shape
    out = [('x', p, algebra.x_sigma(p, -1)) for p in shape.I(1, 4)]
    out += [('t', q, algebra.t(shape.bar(q))) for q in shape.I(5, 6)]
    return out


def _eigen_sample(algebra, settings, rng):
    actions = _h1_actions(algebra)
    kind, p, h = actions[int(rng.integers(0, len(actions)))]
    w = random_monomial(algebra, rng, settings)
    got = bracket_structural(h, w)
    want = _expected_ad(algebra, kind, p, w)
    if got == want:
        return None
    return {'h': format_element(h), 'w': format_element(w), 'got': format_element(got),
            'want': format_element(want)}


def eigen_suite(algebra, settings):
    if not _h1_actions(algebra):
        return _skipped('eigen', 'H1 is empty for this shape')
    return run_property('eigen', bind(_eigen_sample, algebra, settings), settings)


# Classical regressions


def _classical_mode(algebra):
    shape = algebra.shape
    l = shape.l
    if l[:6] == (0,) * 6 and algebra.lattice.rank == 0:
        return 'polynomial'
    units = tuple(tuple(1 if k == j else 0 for k in range(shape.dim)) for j in range(shape.dim))
    if l[1:] == (0,) * 6 and algebra.field.degree == 1 and algebra.lattice.basis == units:
        return 'laurent'
    return None


def _to_sympy(u, symbols, laurent):
    expr = sympy.Integer(0)
    for (alpha, i), c in u.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        exps = alpha if laurent else i
        for s, e in zip(symbols, exps):
            term *= s ** int(e)
        expr += term
    return expr


def sympy_bracket(f, g, symbols, shape, laurent):
    """Poisson bracket on polynomials, or the Laurent form sum x^{sigma_p}(D_p f D_pb g - D_pb f D_p g)
    with D_p = x_p d/dx_p."""
    total = sympy.Integer(0)
    for p in shape.I(1, 7):
        xp = symbols[shape.position(p)]
        xq = symbols[shape.position(shape.bar(p))]
        if laurent:
            dp = lambda h, s=xp: s * sympy.diff(h, s)
            dq = lambda h, s=xq: s * sympy.diff(h, s)
            total += xp * xq * (dp(f) * dq(g) - dq(f) * dp(g))
        else:
            total += sympy.diff(f, xp) * sympy.diff(g, xq) - sympy.diff(f, xq) * sympy.diff(g, xp)
    return sympy.expand(total)


def _classical_keys(algebra, mode):
    shape = algebra.shape
    dim = shape.dim
    if mode == 'polynomial':
        keys = []
        for exps in product(range(CLASSICAL_DEGREE + 1), repeat=dim):
            if sum(exps) <= CLASSICAL_DEGREE:
                keys.append((algebra.zero_alpha, tuple(exps)))
        return keys
    f = algebra.field
    return [(tuple(f.coerce(x) for x in exps), algebra.zero_index)
            for exps in product(range(-CLASSICAL_BOX, CLASSICAL_BOX + 1), repeat=dim)]


def classical_suite(algebra, settings):
    mode = _classical_mode(algebra)
    if mode is None:
        return _skipped('classical', 'needs an I_7-only shape with Gamma = 0 or an I_1-only shape over Z^2l')
    shape = algebra.shape
    laurent = mode == 'laurent'
    symbols = sympy.symbols(f'z0:{shape.dim}')
    monos = [algebra.element({k: 1}) for k in _classical_keys(algebra, mode)]
    exprs = [_to_sympy(m, symbols, laurent) for m in monos]
    report = CheckReport(name='classical', notes={'mode': mode, 'monomials': len(monos)})
    for a, fa in zip(monos, exprs):
        for b, fb in zip(monos, exprs):
            report.total += 1
            ours = _to_sympy(bracket_structural(a, b), symbols, laurent)
            if sympy.expand(ours - sympy_bracket(fa, fb, symbols, shape, laurent)) == 0:
                report.passed += 1
            elif report.counterexample is None:
                report.counterexample = {'u': format_element(a), 'v': format_element(b)}
    return report


# Derivations


def _generator_specs(algebra):
    return derivations.generator_family(algebra)


def derivation_law_suite(algebra, settings):
    reports = []
    for label, spec in _generator_specs(algebra):
        reports.append((label, derivations.check_derivation_law(spec, algebra, settings, name=label)))
    rng = sample_rng(settings.seed, 0)
    inner = derivations.Ad(random_element(algebra, rng, settings))
    reports.append(('ad', derivations.check_derivation_law(inner, algebra, settings, name='ad')))
    return _merge('derivation-law', reports)


def _operator_sample(algebra, settings, rng):
    shape = algebra.shape
    w = random_monomial(algebra, rng, settings)
    # d/dt_p = -sgn(p) ad_{t_bar(p)} on bar(I_5), bar(I_6) and J_7; I_6 goes through _expected_ad
    for p in shape.Ibar(5, 6) + shape.J(7):
        ext = algebra.extend()
        ad = bracket_structural(ext.t(shape.bar(p)), w.reflag(ext)).reflag(algebra)
        want = apply_operator('down', p, w)
        if ad.scale(-shape.sgn(p)) != want:
            return {'identity': f'dt[{p}]', 'w': format_element(w),
                    'got': format_element(ad), 'want': format_element(want)}
    for kind, p, h in _h1_actions(algebra):
        got = derivations.eval_derivation(derivations.Ad(h), w)
        want = _expected_ad(algebra, kind, p, w)
        if got != want:
            return {'identity': f'ad({format_element(h)})', 'w': format_element(w),
                    'got': format_element(got), 'want': format_element(want)}
    return None


def operator_identities_suite(algebra, settings):
    return run_property('operator-identities', bind(_operator_sample, algebra, settings), settings)


def _probe_sample(algebra, settings, rng):
    f = algebra.field
    family = _generator_specs(algebra)
    planted = {}
    terms = []
    for label, spec in family:
        c = int(rng.integers(-3, 4))
        planted[label] = f.format(f.coerce(c))
        if c:
            terms.append((f.coerce(c), spec))
    candidates = derivations.inner_candidates(algebra)
    if candidates:
        key = candidates[int(rng.integers(0, len(candidates)))]
        terms.append((f.one, derivations.Ad(algebra.element({key: int(rng.integers(1, 4))}))))
    d = derivations.LinearCombo(tuple(terms))
    report = derivations.derivation_probe(d, algebra)
    if report.get('status') != 'ok':
        return {'planted': planted, 'status': report.get('status')}
    if report['coordinates'] != planted:
        return {'planted': planted, 'recovered': report['coordinates']}
    return None


def probe_suite(algebra, settings):
    return run_property('probe', bind(_probe_sample, algebra, settings), settings,
                        samples=min(settings.samples, 50))


# Cohomology


def _coboundary_law_sample(algebra, settings, rng):
    box = [random_monomial(algebra, rng, settings).only_key() for _ in range(6)]
    fn = cohomology.random_functional(algebra, box, rng, density=1.0)
    psi = cohomology.Coboundary(fn)
    u, v = _pair(algebra, settings, rng)
    w = random_monomial(algebra, rng, settings)
    if cohomology.eval_cocycle(psi, u, v) + cohomology.eval_cocycle(psi, v, u) != 0:
        return {'law': 'skew-symmetry', 'u': format_element(u), 'v': format_element(v)}
    jac = (cohomology.eval_cocycle(psi, bracket_structural(u, v), w)
           + cohomology.eval_cocycle(psi, bracket_structural(v, w), u)
           + cohomology.eval_cocycle(psi, bracket_structural(w, u), v))
    if jac != 0:
        return {'law': 'jacobi', 'u': format_element(u), 'v': format_element(v), 'w': format_element(w)}
    return None


def cocycle_family(algebra):
    if not algebra.shape.is_l1_only():
        return []
    family = []
    for p in algebra.shape.I(1):
        family.append((f'phi[{p}]', cohomology.PhiP(p)))
        family.append((f"phi'[{p}]", cohomology.PhiPPrime(p)))
    for k, hom in enumerate(derivations.hom_star_complement(algebra.lattice)):
        family.append((f'phimu*{k + 1}', cohomology.PhiMu(hom)))
    if family:
        weights = tuple((algebra.field.coerce(k + 2), c) for k, (_, c) in enumerate(family))
        family.append(('combo', cohomology.Combo(weights)))
    return family


def cocycle_law_suite(algebra, settings):
    reports = [(label, cohomology.check_cocycle_laws(c, algebra, settings, name=label))
               for label, c in cocycle_family(algebra)]
    reports.append(('coboundary', run_property('coboundary', bind(_coboundary_law_sample, algebra, settings),
                                               settings)))
    return _merge('cocycle-law', reports)


def independence_suite(algebra, settings):
    if not algebra.shape.is_l1_only():
        return _skipped('independence', 'iota_7 != l_1, H^2 = 0')
    result = cohomology.independence_probe(algebra)
    report = CheckReport(name='independence', total=1, notes=result)
    if result['independent']:
        report.passed = 1
    else:
        report.counterexample = {'family': result['family']}
    return report


def reduction_suite(algebra, settings, count=None, degree=None):
    if algebra.shape.is_l1_only():
        return _skipped('reduction', 'reduction needs iota_7 != l_1')
    count = min(settings.samples, COBOUNDARY_COUNT) if count is None else count
    degree = REDUCTION_DEGREE if degree is None else degree
    box = cohomology.key_box(algebra, 1, degree)
    report = CheckReport(name='reduction', notes={'box': len(box)})
    for k in range(count):
        rng = sample_rng(settings.seed, k)
        psi = cohomology.Coboundary(cohomology.random_functional(algebra, box, rng))
        _, residual = cohomology.reduce_cocycle(psi, algebra, box)
        report.total += 1
        if residual['ok']:
            report.passed += 1
        elif report.counterexample is None:
            report.counterexample = dict(residual['witness'], sample=k)
    return report


# Locality


def random_h2_monomial(algebra, rng, settings):
    return locality.h2_probe_elements(algebra, rng, settings, count=1)[-1]


def nilpotency_counterexample(u, v, m=None):
    """None when ad_u^m(v) = 0 and, with a nonzero leading coefficient, ad_u^(m-1)(v) != 0."""
    result = locality.nilpotency_bound_check(u, v, m)
    if result['verified'] and (result['nonzero_before'] or not result['leading_nonzero']):
        return None
    reason = 'ad_u^m(v) != 0' if not result['verified'] else 'ad_u^(m-1)(v) = 0'
    return {'u': format_element(u), 'v': format_element(v), 'm': result['m'], 'reason': reason}


def _nilpotency_sample(algebra, settings, rng):
    u = random_h2_monomial(algebra, rng, settings)
    v = random_monomial(algebra, rng, settings, coef=1)
    return nilpotency_counterexample(u, v)


def nilpotency_suite(algebra, settings):
    return run_property('nilpotency', bind(_nilpotency_sample, algebra, settings), settings,
                        samples=min(settings.samples, 100))


def _support_sample(algebra, settings, rng):
    u = random_h2_monomial(algebra, rng, settings)
    v = random_monomial(algebra, rng, settings, coef=1)
    return locality.support_decrease_witness(u, v)


def support_decrease_suite(algebra, settings):
    return run_property('support-decrease', bind(_support_sample, algebra, settings), settings)


def _sigma_combination(algebra, rng):
    alpha = algebra.zero_alpha
    for p in algebra.shape.I(1, 4):
        c = int(rng.integers(-2, 3))
        alpha = tuple(a + c * s for a, s in zip(alpha, algebra.sigmas[p]))
    return alpha


def m_mu_sample(algebra, rng, settings):
    """x^beta plus a multiple of x^{beta + k sigma_p}: both terms share pi(beta)."""
    beta = random_group_vector(algebra.lattice, rng, settings.coord_bound)
    u = algebra.monomial(beta, check=False)
    shifted = tuple(b + s for b, s in zip(beta, _sigma_combination(algebra, rng)))
    if shifted != beta:
        u = u + algebra.monomial(shifted, None, int(rng.integers(1, 4)), check=False)
    return u


def _cyclic_sample(algebra, settings, rng):
    alpha = _sigma_combination(algebra, rng)
    u = m_mu_sample(algebra, rng, settings)
    result = locality.cyclic_probe(alpha, u)
    if result['equal']:
        return None
    return dict(result, alpha=format_vector(algebra.field, alpha), u=format_element(u))


def cyclic_suite(algebra, settings):
    if not algebra.shape.I(1, 4):
        return _skipped('cyclic', 'I_{1,4} is empty')
    return run_property('cyclic', bind(_cyclic_sample, algebra, settings), settings,
                        samples=min(settings.samples, 100))


def _eigen_membership_sample(algebra, settings, rng):
    shape = algebra.shape
    choice = int(rng.integers(0, 3))
    if choice == 0:
        u = m_mu_sample(algebra, rng, settings)
    elif choice == 1:
        u = random_monomial(algebra, rng, settings) + random_monomial(algebra, rng, settings)
        u = algebra.element({(a, algebra.zero_index): c for (a, _), c in u.terms.items()})
    else:
        # t-directions outside I_2, where H1 and H2 separate eigenvectors from the rest
        positions = [p for p in shape.allowed_t if shape.block_of(p) != 2]
        if not positions:
            u = m_mu_sample(algebra, rng, settings)
        else:
            p = positions[int(rng.integers(0, len(positions)))]
            beta = random_group_vector(algebra.lattice, rng, settings.coord_bound)
            i = [0] * shape.dim
            i[shape.position(p)] = int(rng.integers(1, 3))
            u = algebra.monomial(beta, tuple(i), check=False)
    result = locality.eigen_membership(u, rng, settings)
    if result['agree']:
        return None
    return dict(result, u=format_element(u))


def eigen_membership_suite(algebra, settings):
    return run_property('eigen-membership', bind(_eigen_membership_sample, algebra, settings), settings)


def _sandwich_sample(algebra, settings, rng):
    kind = int(rng.integers(0, 3))
    v = random_monomial(algebra, rng, settings, coef=1)
    if kind == 0 and h1_keys(algebra):
        keys = h1_keys(algebra)
        u = algebra.element({keys[int(rng.integers(0, len(keys)))]: 1})
        orbit = locality.ad_orbit(u, v, settings.max_power)
        if orbit.span_dims[-1] > locality.orbit_bound(u, v):
            return {'kind': 'H1', 'u': format_element(u), 'v': format_element(v),
                    'span_dims': orbit.span_dims}
        return None
    if kind == 1:
        u = random_h2_monomial(algebra, rng, settings)
        failure = nilpotency_counterexample(u, v)
        return None if failure is None else dict(failure, kind='H2')
    u = locality.outside_span_sample(algebra, rng, settings)
    if u is None:
        return None
    witness = locality.growth_witness(u, settings.max_power)
    if not witness['found']:
        return {'kind': 'outside', 'u': format_element(u)}
    return None


def sandwich_suite(algebra, settings):
    return run_property('sandwich', bind(_sandwich_sample, algebra, settings), settings,
                        samples=min(settings.samples, 50))


# Isomorphisms


def _random_valid_iso(algebra, rng):
    """A random preserving iso with tau(Gamma) = Gamma, or None after ISO_ATTEMPTS draws."""
    lattice = algebra.lattice
    for _ in range(ISO_ATTEMPTS):
        iso = isomorphisms.random_preserving_iso(algebra, rng)
        if isomorphisms.validate_preserving(iso, lattice, lattice)['valid']:
            return iso
    return None


def _random_theta(algebra, rng):
    iso = _random_valid_iso(algebra, rng)
    if iso is None:
        return None, None
    chi = isomorphisms.extend_character(algebra.lattice, iso.b)
    return iso, isomorphisms.build_theta(iso, chi, algebra, algebra)


def morphism_suite(algebra, settings, count=None):
    count = min(settings.samples, MORPHISM_ISOS) if count is None else count
    reports = []
    checked = 0
    for k in range(count):
        rng = sample_rng(settings.seed, 100000 + k)
        try:
            iso, theta = _random_theta(algebra, rng)
        except HamlieError as exc:
            failed = CheckReport(name=f'iso{k}', total=1, counterexample=exc.to_dict())
            reports.append((f'iso{k}', failed))
            continue
        if iso is None:
            logger.warning("⚠️ no Gamma-preserving iso drawn for sample %d", k)
            shortfall = {'error': f"no Gamma-preserving iso in {ISO_ATTEMPTS} draws", 'kind': 'shortfall'}
            reports.append((f'iso{k}', CheckReport(name=f'iso{k}', total=1, counterexample=shortfall)))
            continue
        checked += 1
        reports.append((f'iso{k}', isomorphisms.verify_morphism(theta, settings, name=f'iso{k}')))
    return _merge('morphism', reports, notes={'isos_requested': count, 'isos_checked': checked})


def _tau_sample(algebra, settings, rng):
    shape = algebra.shape
    iso = isomorphisms.random_preserving_iso(algebra, rng)
    for p in shape.I(1, 4):
        got = isomorphisms.apply_tau(iso, algebra.sigmas[p])
        if got != algebra.sigmas[iso.image(p)]:
            return {'law': 'tau(sigma_p) = sigma_nu(p)', 'p': p}
        A = iso.A(p)
        if A[0][0] * A[1][1] - A[0][1] * A[1][0] != algebra.field.coerce(iso.b[p]):
            return {'law': 'det A_p = b_p', 'p': p}
    a = random_group_vector(algebra.lattice, rng, settings.coord_bound)
    b = random_group_vector(algebra.lattice, rng, settings.coord_bound)
    ab = tuple(x + y for x, y in zip(a, b))
    tau = lambda v: isomorphisms.apply_tau(iso, v)
    if tau(ab) != tuple(x + y for x, y in zip(tau(a), tau(b))):
        return {'law': 'additivity', 'a': format_vector(algebra.field, a)}
    shifted = tuple(x + y for x, y in zip(a, _sigma_combination(algebra, rng)))
    if pi_vector(shape, tau(a)) != pi_vector(shape, tau(shifted)):
        return {'law': 'pi factorization', 'a': format_vector(algebra.field, a)}
    parts = isomorphisms.decompose_tau(iso)
    if isomorphisms.recompose_matrix(parts) != iso.matrix():
        return {'law': 'decomposition'}
    return None


def tau_suite(algebra, settings):
    return run_property('tau', bind(_tau_sample, algebra, settings), settings)


SUITES = {
    'jacobi': jacobi_suite,
    'skew': skew_suite,
    'leibniz': leibniz_suite,
    'oracle': oracle_suite,
    'grading': grading_suite,
    'eigen': eigen_suite,
    'classical': classical_suite,
    'derivation-law': derivation_law_suite,
    'operator-identities': operator_identities_suite,
    'probe': probe_suite,
    'cocycle-law': cocycle_law_suite,
    'independence': independence_suite,
    'reduction': reduction_suite,
    'nilpotency': nilpotency_suite,
    'support-decrease': support_decrease_suite,
    'morphism': morphism_suite,
    'tau': tau_suite,
    'cyclic': cyclic_suite,
    'eigen-membership': eigen_membership_suite,
    'sandwich': sandwich_suite,
}

ALIASES = {'oracle-equivalence': 'oracle', 'skew-symmetry': 'skew'}


def run_suite(name, algebra, settings=None):
    settings = settings or Settings()
    key = ALIASES.get(name, name)
    try:
        suite = SUITES[key]
    except KeyError:
        raise ConfigError(f"unknown suite {name!r}; choose one of {', '.join(SUITES)}")
    logger.info("🧪 running %s", key)
    return suite(algebra, settings)

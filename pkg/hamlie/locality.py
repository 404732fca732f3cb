"""ad-orbits, nilpotency bounds, eigenvector sets and the sandwich classifiers.

Every classifier answer is labeled: ``structural`` answers come from the
closed-form descriptions of H1, H2, H3, M^F and M^N; ``empirical`` answers
come from iterating ad on concrete targets and are only ever witnesses.
"""

import logging
from dataclasses import dataclass, field

import linalg
from errors import ElementError
from formatting import format_element, format_vector
from harness import random_group_vector, random_monomial
from kernel import bracket_structural, h1_keys, in_h3_key, monomial_stats, multiply, pi_vector, set_membership

logger = logging.getLogger(__name__)


@dataclass
class AdOrbitReport:
    u: object
    v: object
    powers: list = field(default_factory=list)
    span_dims: list = field(default_factory=list)
    nilpotent_at: int = None

    def grows_strictly(self):
        return all(d == n + 1 for n, d in enumerate(self.span_dims))

    def to_dict(self):
        return {
            'u': format_element(self.u),
            'v': format_element(self.v),
            'powers': [format_element(w) for w in self.powers],
            'span_dims': list(self.span_dims),
            'nilpotent_at': self.nilpotent_at,
        }


def _span_rank(elements):
    keys = sorted({k for w in elements for k in w.terms}, key=elements[0].algebra.key_sort)
    if not keys:
        return 0
    rows = [[w.coefficient(k) for k in keys] for w in elements]
    return linalg.rank(rows)


def ad_orbit(u, v, max_power):
    """ad_u^n(v) for n = 0..max_power with the exact span dimension after each power."""
    if max_power < 1:
        raise ElementError("the orbit needs at least one power")
    u._same(v)
    report = AdOrbitReport(u, v)
    current = v
    for n in range(max_power + 1):
        if n:
            current = bracket_structural(u, current)
        report.powers.append(current)
        if current.is_zero() and report.nilpotent_at is None:
            report.nilpotent_at = n
        report.span_dims.append(_span_rank(report.powers))
        if report.nilpotent_at is not None:
            # the rest of the orbit is zero
            report.span_dims.extend([report.span_dims[-1]] * (max_power - n))
            report.powers.extend([current] * (max_power - n))
            break
    return report


def _watched(u):
    shape = u.algebra.shape
    support = set()
    for key in u.terms:
        support |= set(monomial_stats(shape, key)[1])
    return support, [p for p in shape.Ibar(5, 6) + shape.J(7) if p not in support]


def nilpotency_bound(u, v):
    """m = 1 + sum of j_p over (bar(I_{5,6}) + J_7) minus supp(u), for v = x^{beta,j}."""
    shape = u.algebra.shape
    _, j = v.only_key()
    _, watched = _watched(u)
    return 1 + sum(j[shape.position(p)] for p in watched)


def leading_coefficient_nonzero(u, v):
    """True when every watched degree of v can be lowered by u, so ad_u^{m-1}(v) != 0."""
    shape = u.algebra.shape
    _, j = v.only_key()
    support, watched = _watched(u)
    return all(shape.bar(p) in support for p in watched if j[shape.position(p)])


def nilpotency_bound_check(u, v, m=None):
    if not set_membership('H2', u):
        raise ElementError(f"{format_element(u)} is not in H2")
    if not v.is_monomial():
        raise ElementError("the nilpotency bound needs a monomial target")
    m = nilpotency_bound(u, v) if m is None else m
    current = v
    before = v
    for _ in range(m):
        before = current
        current = bracket_structural(u, current)
    return {
        'm': m,
        'verified': current.is_zero(),
        'nonzero_before': not before.is_zero(),
        'leading_nonzero': leading_coefficient_nonzero(u, v),
        'witness': None if before.is_zero() else format_element(before),
    }


def support_decrease_witness(u, v):
    """A term of [u, v] that lowers no watched t-degree of v, or None (u in H2, v a monomial)."""
    shape = u.algebra.shape
    _, j = v.only_key()
    watched = [shape.position(p) for p in _watched(u)[1]]
    for key in bracket_structural(u, v).terms:
        _, k = key
        if not any(k[pos] < j[pos] for pos in watched):
            return {'u': format_element(u), 'v': format_element(v),
                    'term': format_element(u.algebra.element({key: 1}))}
    return None


def structural_eigen(u):
    """mu with every term of u a pure x^alpha of common pi(alpha) = mu, or None."""
    shape = u.algebra.shape
    mu = None
    for alpha, i in u.terms:
        if any(i):
            return None
        m = pi_vector(shape, alpha)
        if mu is None:
            mu = m
        elif m != mu:
            return None
    return mu


def _in_line(w, u):
    """w in F*u."""
    if w.is_zero():
        return True
    key = next(iter(u.terms))
    ratio = w.coefficient(key) / u.terms[key]
    return w == u.scale(ratio)


def h2_probe_elements(algebra, rng=None, settings=None, count=4):
    """Deterministic H2 generators plus ``count`` sampled H2 monomials."""
    shape = algebra.shape
    out = [algebra.one()]
    for p in shape.I(6, 7):
        out.append(algebra.t(p))
    for p in shape.Ibar(7):
        out.append(algebra.t(p))
    for q in shape.I(5, 6):
        out.append(algebra.monomial(algebra.lattice.unit(q), check=False))
    if rng is None:
        return out
    for _ in range(count):
        alpha = list(algebra.zero_alpha)
        for q in shape.I(5, 6):
            alpha[shape.position(q)] = algebra.field.coerce(int(rng.integers(-2, 3)))
        i = [0] * shape.dim
        for p in shape.I(6):
            i[shape.position(p)] = int(rng.integers(0, 3))
        for p in shape.I(7):
            k = int(rng.integers(0, 3))
            side = p if rng.integers(0, 2) else shape.bar(p)
            i[shape.position(side)] = k
        out.append(algebra.monomial(tuple(alpha), tuple(i), check=False))
    return out


def eigen_membership(u, rng=None, settings=None):
    """Structural M_mu answer plus the direct check [h, u] in F*u over H1 and H2 probes."""
    algebra = u.algebra
    if u.is_zero():
        return {'member': True, 'mu': None, 'direct': True, 'agree': True}
    mu = structural_eigen(u)
    probes = [algebra.element({k: 1}) for k in h1_keys(algebra)] + h2_probe_elements(algebra, rng, settings)
    direct = True
    witness = None
    for h in probes:
        if not _in_line(bracket_structural(h, u), u):
            direct = False
            witness = format_element(h)
            break
    report = {
        'member': mu is not None,
        'mu': None if mu is None else format_vector(algebra.field, mu),
        'direct': direct,
        'agree': (mu is not None) == direct,
    }
    if witness is not None:
        report['witness'] = witness
    return report


def _j14_zero(shape, alpha):
    return all(alpha[shape.position(p)] == 0 for p in shape.J(1, 4))


def mf_mn_membership(u):
    """(in M^F, in M^N) for u in M."""
    algebra = u.algebra
    shape = algebra.shape
    if not set_membership('M', u):
        raise ElementError(f"{format_element(u)} is not in M")
    minus_sigma = {tuple(-a for a in algebra.sigmas[p]) for p in shape.I(1, 4)}
    in_mn = all(_j14_zero(shape, alpha) for alpha, _ in u.terms)
    in_mf = all(_j14_zero(shape, alpha) or alpha in minus_sigma for alpha, _ in u.terms)
    return in_mf, in_mn


def cyclic_probe(alpha, u):
    """Both sides of [x^alpha, u] = -sum_p alpha_p mu_p x^{sigma_p + alpha} u for pi(alpha) = 0."""
    algebra = u.algebra
    shape = algebra.shape
    f = algebra.field
    if not shape.I(1, 4):
        raise ElementError("the cyclic identity needs I_{1,4} to be nonempty")
    alpha = tuple(f.coerce(a) for a in alpha)
    if any(m != 0 for m in pi_vector(shape, alpha)):
        raise ElementError(f"pi({format_vector(f, alpha)}) is not zero")
    mu = structural_eigen(u)
    if mu is None and not u.is_zero():
        raise ElementError(f"{format_element(u)} is not in any M_mu")
    x_alpha = algebra.monomial(alpha, check=False)
    lhs = bracket_structural(x_alpha, u)
    rhs = algebra.zero()
    if mu is not None:
        for k, p in enumerate(shape.I(1, 4)):
            c = alpha[shape.position(p)] * mu[k]
            if c != 0:
                shifted = algebra.monomial(tuple(s + a for s, a in zip(algebra.sigmas[p], alpha)), check=False)
                rhs = rhs - multiply(shifted, u).scale(c)
    return {'lhs': format_element(lhs), 'rhs': format_element(rhs), 'equal': lhs == rhs}


def _growth_directions(u):
    """Coordinates r for beta = b*eps_r, following the nonzero blocks of u."""
    shape = u.algebra.shape
    out = []
    for p in shape.I(1, 6):
        pb = shape.bar(p)
        P, Pb = shape.position(p), shape.position(pb)
        touched = any(a[P] != 0 or a[Pb] != 0 or i[P] or i[Pb] for a, i in u.terms)
        if not touched:
            continue
        if shape.block_of(p) <= 4:
            out.extend(r for r in (pb, p) if r not in out)
        elif p not in out:
            out.append(p)
    return out


def growth_witness(u, max_power, max_multiple=None):
    """A target x^beta whose ad_u-orbit grows strictly for max_power steps, or found=False."""
    algebra = u.algebra
    lat = algebra.lattice
    f = algebra.field
    shape = algebra.shape
    max_multiple = max_multiple or max_power + 2
    for r in _growth_directions(u):
        e = lat.epsilon_multiple(r) if shape.block_of(r) <= 4 else f.one
        for k in range(1, max_multiple + 1):
            for sign in (1, -1):
                b = e * k * sign
                beta = [f.zero] * shape.dim
                beta[shape.position(r)] = b
                v = algebra.monomial(tuple(beta), check=False)
                orbit = ad_orbit(u, v, max_power)
                if orbit.grows_strictly():
                    logger.debug("🔍 growth witness along eps_%s with b=%s", r, f.format(b))
                    return {'found': True, 'r': r, 'b': f.format(b),
                            'beta': format_vector(f, beta), 'span_dims': orbit.span_dims}
    return {'found': False}


def orbit_bound(u, v):
    """Upper bound on the ad_u-orbit dimension of v for u in H1: the t-monomials below v."""
    _, j = v.only_key()
    bound = 1
    for k in j:
        bound *= k + 1
    return bound


def in_span_h1_h3(u):
    shape = u.algebra.shape
    keys = set(h1_keys(u.algebra))
    return all(k in keys or in_h3_key(shape, k) for k in u.terms)


def classify(u, settings, rng=None):
    """Structural sandwich answers plus empirical orbit witnesses for one element."""
    algebra = u.algebra
    structural = {
        'H1': set_membership('H1', u),
        'H2': set_membership('H2', u),
        'H3': set_membership('H3', u),
        'span(H1+H3)': in_span_h1_h3(u),
    }
    finite = structural['H1'] or structural['H2']
    if finite:
        verdict = 'locally finite (structural)'
    elif not structural['span(H1+H3)']:
        verdict = 'not locally finite (structural)'
    else:
        verdict = 'undetermined'
    empirical = {}
    if not finite:
        empirical['growth'] = growth_witness(u, settings.max_power)
    if rng is not None:
        v = random_monomial(algebra, rng, settings)
        orbit = ad_orbit(u, v, settings.max_power)
        empirical['orbit'] = orbit.to_dict()
    contradiction = finite and empirical.get('growth', {}).get('found', False)
    if contradiction:
        logger.warning("❌ structural and empirical answers disagree for %s", format_element(u))
    return {'element': format_element(u), 'structural': structural, 'verdict': verdict,
            'empirical': empirical, 'consistent': not contradiction}


def outside_span_sample(algebra, rng, settings):
    """A monomial outside span(H1 + H3) built for a growth witness, or None if the shape has none."""
    shape = algebra.shape
    lat = algebra.lattice
    minus_sigma = {tuple(-a for a in algebra.sigmas[p]) for p in shape.I(1, 4)}
    if shape.I(1, 4):
        for _ in range(20):
            alpha = random_group_vector(lat, rng, settings.coord_bound)
            if not _j14_zero(shape, alpha) and alpha not in minus_sigma:
                return algebra.monomial(alpha, check=False)
    q_block = shape.I(5, 6)
    if q_block:
        q = q_block[int(rng.integers(0, len(q_block)))]
        return algebra.t(shape.bar(q), int(rng.integers(2, 4)))
    return None

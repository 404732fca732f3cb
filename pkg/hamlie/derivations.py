"""Derivations of H: the outer family d'_0, d_p, d_t, d_mu, inner ad's, and the probes on them."""

import logging
from dataclasses import dataclass
from fractions import Fraction

import linalg
from errors import DerivationError, SolveError
from formatting import format_element, format_key
from harness import bind, random_monomial, run_property
from kernel import apply_operator, bracket_structural, h1_keys, pi_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomPlus:
    """A group homomorphism mu: Gamma -> F, given by its values on the lattice basis."""

    lattice: object
    values: tuple

    def __call__(self, alpha):
        coords = self.lattice.coordinates(alpha)
        if coords is None:
            raise DerivationError(f"{self.lattice.format_vector(alpha)} is not in Gamma")
        total = self.lattice.field.zero
        for c, v in zip(coords, self.values):
            if c:
                total = total + v * c
        return total

    def is_plus(self):
        return all(self(self.lattice.sigma(p)) == 0 for p in self.lattice.shape.I(1, 4))


def build_hom(lattice, values, require_plus=True):
    field = lattice.field
    values = tuple(field.coerce(v) for v in values)
    if len(values) != lattice.rank:
        raise DerivationError(f"homomorphism needs {lattice.rank} basis values, got {len(values)}")
    hom = HomPlus(lattice, values)
    if require_plus:
        for p in lattice.shape.I(1, 4):
            if hom(lattice.sigma(p)) != 0:
                raise DerivationError(f"mu(sigma_{p}) must vanish", index=p)
    return hom


# Derivation specs


@dataclass(frozen=True)
class DPrime0:
    pass


@dataclass(frozen=True)
class D0:
    pass


@dataclass(frozen=True)
class DOuter:
    p: int


@dataclass(frozen=True)
class PartialT:
    q: int


@dataclass(frozen=True)
class DMu:
    hom: HomPlus


@dataclass(frozen=True)
class Ad:
    element: object


@dataclass(frozen=True)
class LinearCombo:
    terms: tuple


def combo(*pairs):
    return LinearCombo(tuple(pairs))


def outer_indices(shape):
    """Indices p of the outer d_p: J_1, the bars of I_{2,3}, and I_5 (p = 0 is d_0)."""
    return tuple(sorted(shape.forbidden_t))


def check_spec(d, algebra):
    shape = algebra.shape
    if isinstance(d, DPrime0):
        if not shape.is_l1_only():
            raise DerivationError("d0' exists only when iota_7 = l_1")
    elif isinstance(d, D0):
        pass
    elif isinstance(d, DOuter):
        if d.p != 0 and d.p not in shape.forbidden_t:
            raise DerivationError(f"d_{d.p} is not an outer derivation of this shape", index=d.p)
    elif isinstance(d, PartialT):
        shape.check_index(d.q)
        if d.q not in shape.allowed_t:
            raise DerivationError(f"d/dt_{d.q} is not defined on this algebra", index=d.q)
    elif isinstance(d, DMu):
        if d.hom.lattice != algebra.lattice:
            raise DerivationError("homomorphism belongs to another lattice")
    elif isinstance(d, Ad):
        if d.element.algebra != algebra:
            raise DerivationError("ad element belongs to another algebra")
    elif isinstance(d, LinearCombo):
        for _, part in d.terms:
            check_spec(part, algebra)
    else:
        raise DerivationError(f"unknown derivation {d!r}")


def d0_weight(shape, key):
    """sum of alpha_p over I_{1,4} minus the degrees in t over the bars of I_{5,6} and I_7."""
    alpha, i = key
    w = sum((alpha[shape.position(p)] for p in shape.I(1, 4)), Fraction(0))
    for p in shape.Ibar(5, 6) + shape.I(7):
        w -= i[shape.position(p)]
    return w


def _scale_terms(u, factor):
    f = u.algebra.field
    out = {}
    for key, c in u.terms.items():
        w = f.coerce(factor(key))
        if w != 0:
            out[key] = c * w
    return u.algebra.element(out)


def eval_derivation(d, u):
    alg = u.algebra
    if alg.extended:
        raise DerivationError("derivations act on H, not on the enlarged algebra")
    shape = alg.shape
    if isinstance(d, D0) or (isinstance(d, DOuter) and d.p == 0):
        return _scale_terms(u, lambda key: d0_weight(shape, key) + 1)
    if isinstance(d, DOuter):
        check_spec(d, alg)
        ext = alg.extend()
        return bracket_structural(ext.t(d.p), u.reflag(ext)).reflag(alg)
    if isinstance(d, PartialT):
        check_spec(d, alg)
        return apply_operator('down', d.q, u)
    if isinstance(d, DMu):
        return _scale_terms(u, lambda key: d.hom(key[0]))
    if isinstance(d, DPrime0):
        check_spec(d, alg)
        sigma = tuple(alg.field.coerce(x) for x in shape.sigma_total)
        c = u.coefficient((sigma, alg.zero_index))
        return alg.one().scale(c)
    if isinstance(d, Ad):
        return bracket_structural(d.element, u)
    if isinstance(d, LinearCombo):
        total = alg.zero()
        for c, part in d.terms:
            total = total + eval_derivation(part, u).scale(c)
        return total
    raise DerivationError(f"unknown derivation {d!r}")


def mu_component(lattice, p):
    """The p-th component of pi as a homomorphism."""
    shape = lattice.shape
    if p not in shape.I(1, 6):
        raise DerivationError(f"mu_{p} needs p in I_1..I_6", index=p)
    k = shape.I(1, 6).index(p)
    return HomPlus(lattice, tuple(lattice.field.coerce(pi_vector(shape, g)[k]) for g in lattice.basis))


def hom_plus_basis(lattice):
    """Basis of the homomorphisms killing every sigma_p, p in I_{1,4}."""
    rows = [lattice.integer_coordinates(lattice.sigma(p)) for p in lattice.shape.I(1, 4)]
    null = linalg.nullspace(rows, n_cols=lattice.rank)
    return [HomPlus(lattice, tuple(lattice.field.coerce(x) for x in vec)) for vec in null]


def hom_star_complement(lattice):
    """A complement of span{mu_p} inside Hom+, picking Hom+ basis vectors greedily in order."""
    span = [list(mu_component(lattice, p).values) for p in lattice.shape.I(1, 6)]
    current = linalg.rank(span) if span else 0
    complement = []
    for hom in hom_plus_basis(lattice):
        trial = span + [list(hom.values)]
        r = linalg.rank(trial)
        if r > current:
            span, current = trial, r
            complement.append(hom)
    return complement


def _derivation_law_sample(d, algebra, settings, rng):
    u = random_monomial(algebra, rng, settings)
    v = random_monomial(algebra, rng, settings)
    lhs = eval_derivation(d, bracket_structural(u, v))
    rhs = bracket_structural(eval_derivation(d, u), v) + bracket_structural(u, eval_derivation(d, v))
    if lhs == rhs:
        return None
    return {'u': format_element(u), 'v': format_element(v),
            'lhs': format_element(lhs), 'rhs': format_element(rhs)}


def _law_for_map(fn, algebra, settings, rng):
    u = random_monomial(algebra, rng, settings)
    v = random_monomial(algebra, rng, settings)
    lhs = fn(bracket_structural(u, v))
    rhs = bracket_structural(fn(u), v) + bracket_structural(u, fn(v))
    if lhs == rhs:
        return None
    return {'u': format_element(u), 'v': format_element(v),
            'lhs': format_element(lhs), 'rhs': format_element(rhs)}


def check_derivation_law(d, algebra, settings, name='derivation-law'):
    """d([u,v]) = [d(u),v] + [u,d(v)] on sampled monomial pairs.

    ``d`` is a DerivationSpec or any callable Element -> Element.
    """
    if callable(d) and not isinstance(d, (DPrime0, D0, DOuter, PartialT, DMu, Ad, LinearCombo)):
        return run_property(name, bind(_law_for_map, d, algebra, settings), settings)
    check_spec(d, algebra)
    return run_property(name, bind(_derivation_law_sample, d, algebra, settings), settings)


def generator_family(algebra):
    """The outer spanning family: (label, spec) pairs."""
    shape = algebra.shape
    family = []
    if shape.is_l1_only():
        family.append(("d0'", DPrime0()))
    family.append(('d0', D0()))
    family.extend((f'd[{p}]', DOuter(p)) for p in outer_indices(shape))
    family.extend((f'dt[{q}]', PartialT(q)) for q in shape.I(2, 3) + shape.J(4))
    for k, hom in enumerate(hom_star_complement(algebra.lattice)):
        family.append((f'dmu*{k + 1}', DMu(hom)))
    return family


def _ad_supports(d):
    if isinstance(d, Ad):
        return set(d.element.terms)
    if isinstance(d, LinearCombo):
        keys = set()
        for _, part in d.terms:
            keys |= _ad_supports(part)
        return keys
    return set()


def probe_elements(algebra):
    shape = algebra.shape
    lat = algebra.lattice
    probes = [algebra.one()]
    if shape.is_l1_only():
        sigma = tuple(algebra.field.coerce(x) for x in shape.sigma_total)
        probes.append(algebra.monomial(sigma, check=False))
    for p in shape.I(1, 4):
        probes.append(algebra.x_sigma(p, -1))
    for q in shape.I(5, 6):
        probes.append(algebra.monomial(lat.unit(q), check=False))
    for r in shape.Ibar(5, 6) + shape.J(7):
        probes.append(algebra.t(r))
    for p in shape.I(2, 3) + shape.J(4) + shape.I(6):
        probes.append(algebra.t(p))
    for g in lat.basis:
        probes.append(algebra.monomial(g, check=False))
    return probes


def inner_candidates(algebra, d=None):
    shape = algebra.shape
    keys = set(h1_keys(algebra))
    for g in algebra.lattice.basis:
        keys.add((g, algebra.zero_index))
        keys.add((tuple(-x for x in g), algebra.zero_index))
    for p in shape.allowed_t:
        keys.add((algebra.zero_alpha, algebra.t(p).only_key()[1]))
    if d is not None:
        keys |= _ad_supports(d)
    keys.discard((algebra.zero_alpha, algebra.zero_index))
    return sorted(keys, key=algebra.key_sort)


def derivation_probe(d, algebra):
    """Recover the outer coordinates of d from its values on the probe set.

    Returns a report dict; ``status`` is ``ok`` when every outer coordinate is
    uniquely determined, ``singular`` otherwise, ``inconsistent`` when d is not
    in the span of the family on the probes.
    """
    check_spec(d, algebra)
    field = algebra.field
    probes = probe_elements(algebra)
    family = generator_family(algebra)
    inner = inner_candidates(algebra, d)
    columns = [[eval_derivation(spec, w) for w in probes] for _, spec in family]
    for key in inner:
        ad = Ad(algebra.element({key: 1}))
        columns.append([eval_derivation(ad, w) for w in probes])
    target = [eval_derivation(d, w) for w in probes]

    rows = []
    index = {}
    for w_idx in range(len(probes)):
        keys = set(target[w_idx].terms)
        for col in columns:
            keys |= set(col[w_idx].terms)
        for key in sorted(keys, key=algebra.key_sort):
            index[(w_idx, key)] = len(rows)
            rows.append((w_idx, key))
    a = [[col[w].coefficient(key) for col in columns] for w, key in rows]
    b = [target[w].coefficient(key) for w, key in rows]
    n_outer = len(family)
    labels = [label for label, _ in family]
    report = {'outer': labels, 'n_inner_candidates': len(inner), 'equations': len(rows)}
    n_cols = len(columns)
    if not rows:
        report.update(status='ok', coordinates={label: '0' for label in labels})
        return report
    if not linalg.is_consistent(a, b):
        report['status'] = 'inconsistent'
        logger.warning("⚠️ derivation is not in the span of the probe family")
        return report
    x = linalg.solve(a, b, zero=field.zero, n_cols=n_cols)
    null = linalg.nullspace(a, n_cols=n_cols, one=field.one, zero=field.zero)
    undetermined = [labels[k] for k in range(n_outer) if any(vec[k] != 0 for vec in null)]
    if undetermined:
        report.update(status='singular', undetermined=undetermined)
        logger.warning("⚠️ probe system does not determine %s", ', '.join(undetermined))
        return report
    report['status'] = 'ok'
    report['coordinates'] = {labels[k]: field.format(x[k]) for k in range(n_outer)}
    inner_unique = not any(any(vec[k] != 0 for k in range(n_outer, n_cols)) for vec in null)
    report['inner_unique'] = inner_unique
    report['inner'] = {format_key(algebra, inner[k - n_outer]) or '1': field.format(x[k])
                       for k in range(n_outer, n_cols) if x[k] != 0}
    logger.info("🔍 probe recovered %d outer coordinates", n_outer)
    return report


def recovered(report, label):
    """Outer coordinate ``label`` from a probe report, as a string scalar."""
    if report.get('status') != 'ok':
        raise SolveError(f"probe status {report.get('status')}")
    return report['coordinates'][label]

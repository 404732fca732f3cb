"""2-cocycles on H: the phi family, coboundaries, the law checks, H^2 reports and probes."""

import logging
from dataclasses import dataclass
from itertools import product

import linalg
from derivations import HomPlus, hom_star_complement
from errors import CocycleError
from formatting import format_element, format_key
from harness import bind, random_monomial, run_property
from kernel import bracket_structural
from lattice import probe_vectors

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LinearFunctional:
    """f: H -> F, zero outside ``values``; ``box`` (if given) is the declared support."""

    algebra: object
    values: dict
    box: frozenset = None

    def __post_init__(self):
        if self.box is not None:
            outside = [k for k in self.values if k not in self.box]
            if outside:
                raise CocycleError("functional has support outside its box",
                                   key=format_key(self.algebra, outside[0]))

    def __call__(self, u):
        total = self.algebra.field.zero
        for key, c in u.terms.items():
            v = self.values.get(key)
            if v is not None:
                total = total + c * v
        return total


@dataclass(frozen=True)
class PhiP:
    p: int


@dataclass(frozen=True)
class PhiPPrime:
    p: int


@dataclass(frozen=True)
class PhiMu:
    hom: HomPlus


@dataclass(frozen=True)
class Coboundary:
    f: LinearFunctional


@dataclass(frozen=True, eq=False)
class Table:
    algebra: object
    entries: dict
    box: frozenset


@dataclass(frozen=True)
class Combo:
    terms: tuple


def _require_l1(algebra, what):
    if not algebra.shape.is_l1_only():
        raise CocycleError(f"{what} exists only when iota_7 = l_1")


def check_cocycle_spec(c, algebra):
    if isinstance(c, (PhiP, PhiPPrime)):
        _require_l1(algebra, 'phi' if isinstance(c, PhiP) else "phi'")
        if c.p not in algebra.shape.I(1):
            raise CocycleError(f"phi needs p in I_1, got {c.p}", index=c.p)
    elif isinstance(c, PhiMu):
        _require_l1(algebra, 'phi_mu')
    elif isinstance(c, Combo):
        for _, part in c.terms:
            check_cocycle_spec(part, algebra)


def _sigma(algebra):
    return tuple(algebra.field.coerce(x) for x in algebra.shape.sigma_total)


def _pair_value(c, algebra, k1, k2):
    """Value on two basis monomials, for the closed-form cocycles."""
    shape = algebra.shape
    (alpha, i), (beta, j) = k1, k2
    if any(i) or any(j):
        return algebra.field.zero
    total = tuple(a + b for a, b in zip(alpha, beta))
    sigma = _sigma(algebra)
    if isinstance(c, (PhiP, PhiPPrime)):
        target = tuple(s - t for s, t in zip(sigma, algebra.sigmas[c.p]))
        if total != target:
            return algebra.field.zero
        q = c.p if isinstance(c, PhiP) else shape.bar(c.p)
        return alpha[shape.position(q)]
    if total != sigma:
        return algebra.field.zero
    return c.hom(alpha)


def eval_cocycle(c, u, v):
    algebra = u.algebra
    u._same(v)
    f = algebra.field
    if isinstance(c, Coboundary):
        return c.f(bracket_structural(u, v))
    if isinstance(c, Combo):
        total = f.zero
        for w, part in c.terms:
            total = total + f.coerce(w) * eval_cocycle(part, u, v)
        return total
    if isinstance(c, Table):
        total = f.zero
        for k1, a in u.terms.items():
            for k2, b in v.terms.items():
                if k1 not in c.box or k2 not in c.box:
                    raise CocycleError("table queried outside its box",
                                       key=format_key(algebra, k1 if k1 not in c.box else k2))
                val = c.entries.get((k1, k2))
                if val is not None:
                    total = total + a * b * val
        return total
    check_cocycle_spec(c, algebra)
    total = f.zero
    for k1, a in u.terms.items():
        for k2, b in v.terms.items():
            val = _pair_value(c, algebra, k1, k2)
            if val != 0:
                total = total + a * b * val
    return total


def _sample_triple(c, algebra, settings, rng):
    if isinstance(c, Table):
        keys = sorted(c.box, key=algebra.key_sort)
        return [algebra.element({keys[int(rng.integers(0, len(keys)))]: 1}) for _ in range(3)]
    u = random_monomial(algebra, rng, settings)
    v = random_monomial(algebra, rng, settings)
    if rng.integers(0, 2) and algebra.shape.I(1, 4):
        # land the third exponent where the delta-type cocycles are nonzero
        idx = algebra.shape.I(1, 4)
        shift = list(_sigma(algebra))
        for _ in range(int(rng.integers(0, 3))):
            p = idx[int(rng.integers(0, len(idx)))]
            shift = [s - t for s, t in zip(shift, algebra.sigmas[p])]
        (a, _), = u.terms
        (b, _), = v.terms
        gamma = tuple(s - x - y for s, x, y in zip(shift, a, b))
        w = algebra.monomial(gamma, None, 1, check=False)
    else:
        w = random_monomial(algebra, rng, settings)
    return [u, v, w]


def _cocycle_sample(c, algebra, settings, rng):
    u, v, w = _sample_triple(c, algebra, settings, rng)
    skew = eval_cocycle(c, u, v) + eval_cocycle(c, v, u)
    if skew != 0:
        return {'law': 'skew-symmetry', 'u': format_element(u), 'v': format_element(v),
                'value': algebra.field.format(skew)}
    jac = (eval_cocycle(c, bracket_structural(u, v), w)
           + eval_cocycle(c, bracket_structural(v, w), u)
           + eval_cocycle(c, bracket_structural(w, u), v))
    if jac != 0:
        return {'law': 'jacobi', 'u': format_element(u), 'v': format_element(v),
                'w': format_element(w), 'value': algebra.field.format(jac)}
    return None


def check_cocycle_laws(c, algebra, settings, name='cocycle-law'):
    check_cocycle_spec(c, algebra)
    return run_property(name, bind(_cocycle_sample, c, algebra, settings), settings)


def key_box(algebra, coord_bound, max_degree):
    """Keys with lattice coordinates in [-b, b] and t-degree at most max_degree."""
    lat = algebra.lattice
    shape = algebra.shape
    alphas = [lat.combine(c) for c in product(range(-coord_bound, coord_bound + 1), repeat=lat.rank)]
    positions = [shape.position(p) for p in shape.allowed_t]
    indices = []
    for exps in product(range(max_degree + 1), repeat=len(positions)):
        if sum(exps) <= max_degree:
            i = [0] * shape.dim
            for pos, e in zip(positions, exps):
                i[pos] = e
            indices.append(tuple(i))
    keys = [(a, i) for a in alphas for i in indices]
    return sorted(keys, key=algebra.key_sort)


def random_functional(algebra, box, rng, density=0.5):
    values = {}
    for key in box:
        if rng.random() < density:
            val = int(rng.integers(-3, 4))
            if val:
                values[key] = algebra.field.coerce(val)
    return LinearFunctional(algebra, values, frozenset(box))


def reduction_index(shape):
    """The index whose t drives the reduction: I_4 first, then I_6, I_7, then bar(I_5)."""
    for block in (4, 6, 7, 5):
        if shape.l[block - 1]:
            p = shape.I(block)[0]
            return shape.bar(p) if block == 5 else p
    raise CocycleError("reduction needs a block other than I_1..I_3 to be nonempty")


def reduce_cocycle(psi, algebra, box, p=None):
    """Build f with psi - psi_f vanishing on the box; returns (f, residual report)."""
    shape = algebra.shape
    if shape.is_l1_only():
        raise CocycleError("reduction applies only when iota_7 != l_1")
    p = reduction_index(shape) if p is None else p
    if p not in shape.allowed_t or shape.block_of(p) in (2, 3) or \
            (shape.block_of(p) == 5 and not shape.is_barred(p)):
        raise CocycleError(f"t_{p} cannot drive the reduction", index=p)
    f = algebra.field
    box = list(box)
    box_set = set(box)
    values = {}
    if shape.block_of(p) == 5:
        q = shape.bar(p)
        Q, Qb = shape.position(q), shape.position(p)
        eps = algebra.lattice.unit(q)
        t_q = algebra.t(p)
        x_eps = algebra.monomial(eps, check=False)
        for key in box:
            gamma, i = key
            if gamma[Q] != 0:
                val = eval_cocycle(psi, t_q, algebra.element({key: 1})) / (-gamma[Q])
            else:
                up = list(i)
                up[Qb] += 1
                src = (tuple(g - e for g, e in zip(gamma, eps)), tuple(up))
                val = eval_cocycle(psi, x_eps, algebra.element({src: 1})) / (i[Qb] + 1)
            if val != 0:
                values[key] = f.coerce(val)
    else:
        pb = shape.bar(p)
        Pb = shape.position(pb)
        sig = algebra.sigmas[p]
        t_p = algebra.t(p)
        for key in sorted(box, key=lambda k: (k[1][Pb], algebra.key_sort(k))):
            gamma, i = key
            alpha = tuple(g - s for g, s in zip(gamma, sig))
            a_pb = alpha[Pb]
            if a_pb != 0:
                val = eval_cocycle(psi, t_p, algebra.element({(alpha, i): 1}))
                if i[Pb]:
                    down = list(i)
                    down[Pb] -= 1
                    prev = (gamma, tuple(down))
                    if prev not in box_set:
                        raise CocycleError("box does not close the recursion",
                                           key=format_key(algebra, prev) or '1')
                    val = val - i[Pb] * values.get(prev, f.zero)
                val = val / a_pb
            else:
                up = list(i)
                up[Pb] += 1
                val = eval_cocycle(psi, t_p, algebra.element({(alpha, tuple(up)): 1})) / (i[Pb] + 1)
            if val != 0:
                values[key] = f.coerce(val)
    fn = LinearFunctional(algebra, values, frozenset(box_set))
    report = residual_report(psi, fn, algebra, box)
    logger.info("🧪 reduction on %d keys: residual %s", len(box), 'zero' if report['ok'] else 'nonzero')
    return fn, report


def residual_report(psi, fn, algebra, box):
    """psi - psi_f on every pair of box monomials whose bracket stays in the box."""
    box_set = set(box)
    checked = 0
    witness = None
    monos = [algebra.element({k: 1}) for k in box]
    for a in range(len(monos)):
        for b in range(a + 1, len(monos)):
            br = bracket_structural(monos[a], monos[b])
            if any(k not in box_set for k in br.terms):
                continue
            checked += 1
            val = eval_cocycle(psi, monos[a], monos[b]) - fn(br)
            if val != 0 and witness is None:
                witness = {'u': format_element(monos[a]), 'v': format_element(monos[b]),
                           'value': algebra.field.format(val)}
    return {'ok': witness is None, 'pairs_checked': checked, 'witness': witness}


def h2_report(algebra):
    shape = algebra.shape
    if not shape.is_l1_only():
        return {'dimension': 0, 'generators': []}
    f = algebra.field
    gens = []
    for p in shape.I(1):
        gens.append(f'phi[{p}]')
        gens.append(f"phi'[{p}]")
    for hom in hom_star_complement(algebra.lattice):
        gens.append('phimu{' + ','.join(f.format(v) for v in hom.values) + '}')
    return {'dimension': len(gens), 'generators': gens}


def probe_pairs(algebra):
    """The pairs (x^{-sigma_p}, x^sigma), (x^{lambda_p}, x^{sigma-lambda_p-sigma_p}), (x^a, x^{sigma-a})."""
    lat = algebra.lattice
    shape = algebra.shape
    sigma = _sigma(algebra)
    mono = lambda v: algebra.monomial(tuple(v), check=False)
    probes = probe_vectors(lat)
    pairs = []
    lambdas = []
    for p in shape.I(1):
        pairs.append((algebra.x_sigma(p, -1), mono(sigma)))
        lam, _ = probes[p]
        lambdas.append(lam)
        rest = tuple(s - l - t for s, l, t in zip(sigma, lam, algebra.sigmas[p]))
        pairs.append((mono(lam), mono(rest)))
    alphas = list(lat.basis) + [tuple(-x for x in g) for g in lat.basis] + lambdas
    for a in alphas:
        pairs.append((mono(a), mono(tuple(s - x for s, x in zip(sigma, a)))))
    return pairs


def independence_probe(algebra, combo=None):
    """Without combo: does every probe solution have a = b = mu = 0?

    With combo: is there an f making combo + psi_f vanish on every probe pair?
    """
    _require_l1(algebra, 'the independence probe')
    f = algebra.field
    pairs = probe_pairs(algebra)
    brackets = [bracket_structural(u, v) for u, v in pairs]
    f_keys = sorted({k for br in brackets for k in br.terms}, key=algebra.key_sort)
    f_index = {k: n for n, k in enumerate(f_keys)}
    if combo is not None:
        check_cocycle_spec(combo, algebra)
        a = []
        rhs = []
        for (u, v), br in zip(pairs, brackets):
            row = [f.zero] * len(f_keys)
            for k, c in br.terms.items():
                row[f_index[k]] = c
            a.append(row)
            rhs.append(-eval_cocycle(combo, u, v))
        consistent = linalg.is_consistent(a, rhs) if f_keys else all(r == 0 for r in rhs)
        return {'mode': 'combo', 'coboundary_on_probes': consistent, 'probe_pairs': len(pairs)}
    family = []
    for p in algebra.shape.I(1):
        family.append((f'phi[{p}]', PhiP(p)))
        family.append((f"phi'[{p}]", PhiPPrime(p)))
    for k, hom in enumerate(hom_star_complement(algebra.lattice)):
        family.append((f'phimu*{k + 1}', PhiMu(hom)))
    a = []
    for (u, v), br in zip(pairs, brackets):
        row = [eval_cocycle(c, u, v) for _, c in family] + [f.zero] * len(f_keys)
        for k, c in br.terms.items():
            row[len(family) + f_index[k]] = c
        a.append(row)
    n_cols = len(family) + len(f_keys)
    null = linalg.nullspace(a, n_cols=n_cols, one=f.one, zero=f.zero)
    independent = not any(any(vec[j] != 0 for j in range(len(family))) for vec in null)
    if independent:
        logger.info("✅ cocycle classes independent on %d probe pairs", len(pairs))
    return {'mode': 'homogeneous', 'independent': independent, 'family': [lbl for lbl, _ in family],
            'probe_pairs': len(pairs)}


def coboundary_of(values, algebra, box=None):
    return Coboundary(LinearFunctional(algebra, values, None if box is None else frozenset(box)))



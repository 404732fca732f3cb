"""Preserving isomorphisms tau: Gamma -> Gamma', characters, and the induced algebra maps theta.

Every tau is stored as a written-order matrix M acting on row vectors
(alpha* = alpha M). A theta is x^{alpha,i} -> chi(alpha) x'^{alpha M} prod s_p^{i_p},
so composing thetas multiplies matrices and characters and maps t-images.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations

import linalg
from errors import FieldError, IsomorphismError, SolveError
from formatting import format_element, format_vector
from harness import CheckReport, bind, random_element, run_property
from kernel import Algebra, bracket_structural, multiply
from lattice import Lattice

logger = logging.getLogger(__name__)

BLOCKS = ('B15', 'B25', 'B55', 'B16', 'B26', 'B36', 'B56', 'B66')


def block_rows(shape, name):
    return {'1': shape.I(1), '2': shape.I(2), '3': shape.I(3, 4),
            '5': shape.I(5), '6': shape.I(6)}[name[1]]


def block_cols(shape, name):
    return shape.I(5) if name[2] == '5' else shape.I(6)


def _row_terms(shape, k):
    """Linear form feeding row k of a B block: (position, sign) pairs."""
    block = shape.block_of(k)
    P, Pb = shape.position(k), shape.position(shape.bar(k))
    if block in (1, 3, 4):
        return ((P, 1), (Pb, -1))
    if block == 2:
        return ((Pb, -1),)
    return ((P, 1),)


@dataclass
class PreservingIso:
    shape: object
    field: object
    nu: dict
    a: dict
    b: dict
    blocks: dict

    def image(self, p):
        return self.nu.get(p, p)

    def A(self, p):
        """The 2x2 matrix A_p of the template for p's block."""
        f = self.field
        a, b = f.coerce(self.a[p]), f.coerce(self.b[p])
        one = f.one
        block = self.shape.block_of(p)
        if block in (1, 4):
            return [[a + b, a], [one - a - b, one - a]]
        if block == 2:
            return [[one, f.zero], [a, b]]
        return [[b, f.zero], [one - b, one]]

    def matrix(self):
        shape = self.shape
        f = self.field
        dim = shape.dim
        m = [[f.zero] * dim for _ in range(dim)]
        for p in shape.I(1, 4):
            q = self.image(p)
            A = self.A(p)
            src = (shape.position(p), shape.position(shape.bar(p)))
            dst = (shape.position(q), shape.position(shape.bar(q)))
            for r in range(2):
                for c in range(2):
                    m[src[r]][dst[c]] = m[src[r]][dst[c]] + A[r][c]
        for name in BLOCKS:
            mat = self.blocks[name]
            for ri, k in enumerate(block_rows(shape, name)):
                for ci, col in enumerate(block_cols(shape, name)):
                    val = mat[ri][ci]
                    if val == 0:
                        continue
                    for pos, sign in _row_terms(shape, k):
                        m[pos][shape.position(col)] += val * sign
        return m

    def is_identity(self):
        ident = linalg.identity(self.shape.dim, self.field.one, self.field.zero)
        for p in self.shape.zero_alpha:
            pos = self.shape.position(p)
            ident[pos][pos] = self.field.zero
        return self.matrix() == ident


def _zero_block(field, rows, cols):
    return [[field.zero] * cols for _ in range(rows)]


def build_preserving_iso(shape, field, nu=None, a=None, b=None, blocks=None):
    """Validate Definition-style data and fill identity defaults."""
    nu = {int(k): int(v) for k, v in (nu or {}).items()}
    for p in shape.I(1, 4):
        nu.setdefault(p, p)
    if sorted(nu) != list(shape.I(1, 4)) or sorted(nu.values()) != list(shape.I(1, 4)):
        raise IsomorphismError("nu must be a permutation of I_1..I_4")
    for p, q in nu.items():
        if shape.block_of(p) != shape.block_of(q):
            raise IsomorphismError(f"nu maps {p} out of its block", index=p)
    a_vals = {p: field.coerce((a or {}).get(p, 0)) for p in shape.I(1, 4)}
    b_vals = {p: field.coerce((b or {}).get(p, 1)) for p in shape.I(1, 4)}
    for p, v in b_vals.items():
        if v == 0:
            raise IsomorphismError(f"b_{p} must be nonzero", index=p)
    given = blocks or {}
    unknown = set(given) - set(BLOCKS)
    if unknown:
        raise IsomorphismError(f"unknown blocks {sorted(unknown)}")
    mats = {}
    for name in BLOCKS:
        rows, cols = len(block_rows(shape, name)), len(block_cols(shape, name))
        if name in given:
            mat = [[field.coerce(x) for x in row] for row in given[name]]
            if len(mat) != rows or any(len(row) != cols for row in mat):
                raise IsomorphismError(f"{name} must be {rows}x{cols}", block=name)
        elif name in ('B55', 'B66'):
            mat = linalg.identity(rows, field.one, field.zero)
        else:
            mat = _zero_block(field, rows, cols)
        mats[name] = mat
    for name in ('B55', 'B66'):
        if mats[name] and linalg.determinant(mats[name]) == 0:
            raise IsomorphismError(f"{name} must be invertible", block=name)
    return PreservingIso(shape, field, nu, a_vals, b_vals, mats)


def identity_iso(shape, field):
    return build_preserving_iso(shape, field)


def apply_tau(iso, alpha):
    alpha = [iso.field.coerce(x) for x in alpha]
    return tuple(linalg.vec_mat(alpha, iso.matrix()))


def _group_positions(shape):
    return [shape.position(p) for p in sorted(shape.group_coords, key=shape.position)]


def inverse_tau(iso, alpha):
    shape = iso.shape
    pos = _group_positions(shape)
    m = iso.matrix()
    sub = [[m[r][c] for c in pos] for r in pos]
    inv = linalg.inverse(sub, iso.field.one, iso.field.zero)
    vals = linalg.vec_mat([iso.field.coerce(alpha[c]) for c in pos], inv)
    out = [iso.field.zero] * shape.dim
    for k, c in enumerate(pos):
        out[c] = vals[k]
    return tuple(out)


def validate_preserving(iso, source, target):
    """Check tau(Gamma) = Gamma'; returns a report dict."""
    if source.shape != target.shape or iso.shape != source.shape:
        raise IsomorphismError("preserving isomorphisms need equal shapes")
    for k, g in enumerate(source.basis):
        img = apply_tau(iso, g)
        if not target.contains(img):
            logger.info("❌ tau(g_%d) = %s is not in Gamma'", k + 1, format_vector(iso.field, img))
            return {'valid': False, 'direction': 'forward', 'basis_index': k + 1,
                    'image': format_vector(iso.field, img)}
    for k, g in enumerate(target.basis):
        pre = inverse_tau(iso, g)
        if not source.contains(pre):
            return {'valid': False, 'direction': 'inverse', 'basis_index': k + 1,
                    'image': format_vector(iso.field, pre)}
    return {'valid': True}


def decompose_tau(iso):
    """(nu part, tau1, tau2) with tau = nu o tau1 o tau2, tau2 applied first."""
    shape, f = iso.shape, iso.field
    nu_part = build_preserving_iso(shape, f, nu=iso.nu)
    tau1 = build_preserving_iso(shape, f, a=iso.a, b=iso.b,
                                blocks={'B55': iso.blocks['B55'], 'B66': iso.blocks['B66']})
    inv55 = linalg.inverse(iso.blocks['B55'], f.one, f.zero) if iso.blocks['B55'] else []
    inv66 = linalg.inverse(iso.blocks['B66'], f.one, f.zero) if iso.blocks['B66'] else []
    blocks = {}
    for name in BLOCKS:
        if name in ('B55', 'B66'):
            continue
        inv = inv55 if name[2] == '5' else inv66
        blocks[name] = linalg.mat_mul(iso.blocks[name], inv) if iso.blocks[name] and inv else iso.blocks[name]
    tau2 = build_preserving_iso(shape, f, blocks=blocks)
    return nu_part, tau1, tau2


def recompose_matrix(parts):
    nu_part, tau1, tau2 = parts
    return linalg.mat_mul(linalg.mat_mul(tau2.matrix(), tau1.matrix()), nu_part.matrix())


@dataclass(frozen=True)
class Character:
    """chi: Gamma -> F^x by its values on the lattice basis."""

    lattice: Lattice
    values: tuple

    def evaluate(self, alpha):
        coords = self.lattice.integer_coordinates(alpha)
        out = self.lattice.field.one
        for c, v in zip(coords, self.values):
            if c:
                out = out * (v ** c)
        return out


def trivial_character(lattice):
    return Character(lattice, tuple(lattice.field.one for _ in lattice.basis))


def build_character(lattice, values):
    f = lattice.field
    values = tuple(f.coerce(v) for v in values)
    if len(values) != lattice.rank or any(v == 0 for v in values):
        raise IsomorphismError(f"character needs {lattice.rank} nonzero basis values")
    return Character(lattice, values)


def extend_character(lattice, b):
    """A character with chi(sigma_p) = b_p, via integer column reduction of the sigma coordinates."""
    f = lattice.field
    shape = lattice.shape
    rows = list(shape.I(1, 4))
    m = [lattice.integer_coordinates(lattice.sigma(p)) for p in rows]
    n = lattice.rank
    if not m:
        return trivial_character(lattice)
    h, u, pivots = linalg.column_hermite(m)
    pivot_of = dict(pivots)
    w = [None] * n
    for r, p in enumerate(rows):
        target = f.coerce(b[p])
        known = f.one
        for j in range(n):
            if h[r][j] and j != pivot_of.get(r):
                known = known * (w[j] ** h[r][j])
        if r in pivot_of:
            j = pivot_of[r]
            radicand = target / known
            root = f.nth_root(radicand, h[r][j])
            if root is None:
                equation = f"chi(w{j + 1})^{h[r][j]} = {f.format(radicand)}"
                raise FieldError("character not representable in the working field",
                                 equation=equation)
            w[j] = root
        elif known != target:
            raise IsomorphismError(f"inconsistent character values at sigma_{p}", index=p)
    w = [f.one if x is None else x for x in w]
    values = []
    for k in range(n):
        v = f.one
        for j in range(n):
            if u[k][j]:
                v = v * (w[j] ** u[k][j])
        values.append(v)
    chi = Character(lattice, tuple(values))
    logger.debug("✅ character extended: %s", [f.format(v) for v in values])
    return chi


@dataclass
class AlgebraMorphism:
    source: Algebra
    target: Algebra
    matrix: list
    character: Character
    t_images: dict
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def tau(self, alpha):
        return tuple(linalg.vec_mat(list(alpha), self.matrix))

    def _t_power(self, p, k):
        key = (p, k)
        if key not in self._cache:
            self._cache[key] = (self.target.one() if k == 0
                                else multiply(self._t_power(p, k - 1), self.t_images[p]))
        return self._cache[key]

    def apply_key(self, alpha, i):
        shape = self.source.shape
        coef = self.character.evaluate(alpha)
        out = self.target.monomial(self.tau(alpha), None, coef, check=False)
        for p in shape.indices:
            k = i[shape.position(p)]
            if k:
                out = multiply(out, self._t_power(p, k))
        return out

    def __call__(self, u):
        if u.algebra != self.source:
            raise IsomorphismError("element does not belong to the morphism source")
        total = self.target.zero()
        for (alpha, i), c in u.terms.items():
            total = total + self.apply_key(alpha, i).scale(c)
        return total


def identity_morphism(algebra):
    f = algebra.field
    images = {p: algebra.t(p) for p in algebra.shape.allowed_t}
    m = linalg.identity(algebra.shape.dim, f.one, f.zero)
    return AlgebraMorphism(algebra, algebra, m, trivial_character(algebra.lattice), images)


def compose(outer, inner):
    """outer o inner."""
    if inner.target != outer.source:
        raise IsomorphismError("morphisms do not compose")
    lat = inner.source.lattice
    values = tuple(inner.character.evaluate(g) * outer.character.evaluate(inner.tau(g))
                   for g in lat.basis)
    images = {p: outer(img) for p, img in inner.t_images.items()}
    return AlgebraMorphism(inner.source, outer.target, linalg.mat_mul(inner.matrix, outer.matrix),
                           Character(lat, values), images)


def _image_algebra(iso, algebra):
    lat = algebra.lattice
    basis = [apply_tau(iso, g) for g in lat.basis]
    return Algebra(algebra.shape, Lattice.unchecked(algebra.shape, lat.field, basis))


def theta_nu(iso, source, target):
    """theta_nu(x^{alpha,i}) = x^{alpha*,i*}, the index permutation of both parts."""
    shape = source.shape
    images = {}
    for p in shape.allowed_t:
        q = p
        if shape.block_of(p) <= 4:
            base = shape.bar(p) if shape.is_barred(p) else p
            q = iso.image(base)
            q = shape.bar(q) if shape.is_barred(p) else q
        images[p] = target.t(q)
    return AlgebraMorphism(source, target, iso.matrix(), trivial_character(source.lattice), images)


def theta_scaling(iso, chi, source, target):
    """theta for the block-diagonal part: x^alpha -> chi(alpha) x'^{alpha*} and the t-images."""
    shape, f = source.shape, source.field
    images = {}
    tp = target.t
    for p in shape.I(2):
        images[p] = tp(p)
    for q in shape.I(3):
        images[q] = tp(q).scale(iso.b[q])
    for r in shape.I(4):
        rb = shape.bar(r)
        inv = linalg.inverse(iso.A(r), f.one, f.zero)
        b = iso.b[r]
        w0 = (tp(rb).scale(-inv[0][0]) + tp(r).scale(inv[1][0])).scale(b)
        w1 = (tp(rb).scale(-inv[0][1]) + tp(r).scale(inv[1][1])).scale(b)
        images[rb] = -w0
        images[r] = w1
    for name, idx in (('B55', shape.I(5)), ('B66', shape.I(6))):
        if not idx:
            continue
        inv = linalg.inverse(iso.blocks[name], f.one, f.zero)
        for c, r in enumerate(idx):
            s = target.zero()
            for k, kk in enumerate(idx):
                s = s + tp(shape.bar(kk)).scale(inv[k][c])
            images[shape.bar(r)] = s
    b66 = iso.blocks['B66']
    for c, q in enumerate(shape.I(6)):
        s = target.zero()
        for k, kk in enumerate(shape.I(6)):
            s = s + tp(kk).scale(b66[c][k])
        images[q] = s
    for p in shape.J(7):
        images[p] = tp(p)
    return AlgebraMorphism(source, target, iso.matrix(), chi, images)


def solve_affine(residual, n_unknowns, field, label=None):
    """Solve residual(e) = 0 for an affine residual returning a list of elements.

    Columns come from probing residual(0) and residual(unit_k); free unknowns are 0.
    """
    zero_e = [field.zero] * n_unknowns
    base = residual(zero_e)
    cols = []
    for k in range(n_unknowns):
        e = list(zero_e)
        e[k] = field.one
        cols.append([r - r0 for r, r0 in zip(residual(e), base)])
    rows = []
    for idx, r0 in enumerate(base):
        keys = set(r0.terms)
        for col in cols:
            keys |= set(col[idx].terms)
        algebra = r0.algebra
        for key in sorted(keys, key=algebra.key_sort):
            rows.append((idx, key))
    a = [[col[idx].coefficient(key) for col in cols] for idx, key in rows]
    rhs = [-base[idx].coefficient(key) for idx, key in rows]
    labels = [label(idx, key) if label else (idx, key) for idx, key in rows]
    if not rows:
        return zero_e
    return linalg.solve(a, rhs, zero=field.zero, labels=labels, n_cols=n_unknowns)


@dataclass
class CaseCSolution:
    t_images: dict
    E: dict


def _pair_label(pairs):
    def label(idx, key):
        u, v = pairs[idx]
        return f"[{format_element(u)}, {format_element(v)}] at {format_vector(u.algebra.field, key[0])}"
    return label


def solve_case_c(tau2, source, target):
    """t-images for the unipotent part, solved in two affine stages and verified."""
    shape, f = source.shape, source.field
    matrix = tau2.matrix()
    chi = trivial_character(source.lattice)
    identity = {p: target.t(p) for p in shape.allowed_t}
    barred56 = shape.Ibar(5, 6)
    first = shape.I(2, 3) + shape.J(4)
    stage1 = [(p, target.t(k)) for p in barred56 for k in barred56]
    stage1 += [(p, target.x_sigma(k, -1)) for p in barred56 for k in shape.I(1, 4)]
    stage2 = [(p, target.t(q)) for p in first + barred56 for q in shape.I(6)]

    def images_for(unknowns, values, fixed):
        images = dict(fixed)
        for (p, cand), e in zip(unknowns, values):
            if e != 0:
                images[p] = images[p] + cand.scale(e)
        return images

    def residual_for(pairs, unknowns, fixed):
        def residual(values):
            theta = AlgebraMorphism(source, target, matrix, chi, images_for(unknowns, values, fixed))
            return [theta(bracket_structural(u, v)) - bracket_structural(theta(u), theta(v))
                    for u, v in pairs]
        return residual

    basis_x = [source.monomial(g, check=False) for g in source.lattice.basis]
    pairs1 = [(source.t(p), x) for p in barred56 for x in basis_x]
    e1 = solve_affine(residual_for(pairs1, stage1, identity), len(stage1), f, _pair_label(pairs1))
    fixed = images_for(stage1, e1, identity)
    gens = [source.t(p) for p in shape.allowed_t]
    pairs2 = list(combinations(gens, 2))
    e2 = solve_affine(residual_for(pairs2, stage2, fixed), len(stage2), f, _pair_label(pairs2))
    images = images_for(stage2, e2, fixed)

    theta = AlgebraMorphism(source, target, matrix, chi, images)
    for u, v in pairs1 + pairs2 + [(x, y) for x, y in combinations(basis_x, 2)]:
        if theta(bracket_structural(u, v)) != bracket_structural(theta(u), theta(v)):
            raise SolveError("case-c images fail the bracket law",
                             row=f"[{format_element(u)}, {format_element(v)}]")
    return CaseCSolution(images, _e_matrices(shape, f, stage1 + stage2, list(e1) + list(e2)))


def _e_matrices(shape, f, unknowns, values):
    """Arrange solved coefficients into E1..E4 in the bar-vector convention."""
    first = shape.I(2, 3) + shape.J(4)
    barred56 = shape.Ibar(5, 6)
    E = {
        'E1': [[f.zero] * len(first) for _ in shape.I(6)],
        'E2': linalg.identity(len(barred56), f.one, f.zero),
        'E3': [[f.zero] * len(barred56) for _ in shape.I(6)],
        'E4': [[f.zero] * len(barred56) for _ in shape.I(1, 4)],
    }
    for (p, cand), e in zip(unknowns, values):
        (alpha, i) = cand.only_key()
        if p in first:
            q = shape.index_at(i.index(1))
            sign = -1 if shape.is_barred(p) else 1
            E['E1'][shape.I(6).index(q)][first.index(p)] += sign * e
        elif any(i):
            k = shape.index_at(i.index(1))
            col = barred56.index(p)
            if k in barred56:
                E['E2'][barred56.index(k)][col] += e
            else:
                E['E3'][shape.I(6).index(k)][col] -= e
        else:
            k = next(q for q in shape.I(1, 4)
                     if tuple(-x for x in shape.sigma(q)) == tuple(alpha))
            E['E4'][shape.I(1, 4).index(k)][barred56.index(p)] -= e
    return E


def build_theta(iso, chi, source, target):
    """theta = theta_nu o theta_1 o theta_2 for a validated iso and a character on Gamma."""
    report = validate_preserving(iso, source.lattice, target.lattice)
    if not report['valid']:
        raise IsomorphismError("tau does not map Gamma onto Gamma'", **report)
    for p in source.shape.I(1, 4):
        if chi.evaluate(source.lattice.sigma(p)) != iso.b[p]:
            raise IsomorphismError(f"character mismatch: chi(sigma_{p}) != b_{p}", index=p)
    nu_part, tau1, tau2 = decompose_tau(iso)
    alg2 = _image_algebra(tau2, source)
    alg1 = _image_algebra(tau1, alg2)
    if tau2.is_identity():
        theta2 = AlgebraMorphism(source, alg2, tau2.matrix(), trivial_character(source.lattice),
                                 {p: alg2.t(p) for p in source.shape.allowed_t})
    else:
        sol = solve_case_c(tau2, source, alg2)
        theta2 = AlgebraMorphism(source, alg2, tau2.matrix(), trivial_character(source.lattice),
                                 sol.t_images)
    chi2 = Character(alg2.lattice, chi.values)
    theta1 = theta_scaling(tau1, chi2, alg2, alg1)
    theta_n = theta_nu(nu_part, alg1, target)
    theta = compose(theta_n, compose(theta1, theta2))
    logger.info("✅ theta built for shape %s", source.shape.l)
    return theta


def _generators(algebra):
    gens = []
    for g in algebra.lattice.basis:
        gens.append(algebra.monomial(g, check=False))
        gens.append(algebra.monomial(tuple(-x for x in g), check=False))
    gens.extend(algebra.t(p) for p in algebra.shape.allowed_t)
    return gens


def _morphism_witness(theta, u, v):
    lhs = theta(bracket_structural(u, v))
    rhs = bracket_structural(theta(u), theta(v))
    if lhs != rhs:
        return {'law': 'bracket', 'u': format_element(u), 'v': format_element(v),
                'lhs': format_element(lhs), 'rhs': format_element(rhs)}
    lhs = theta(multiply(u, v))
    rhs = multiply(theta(u), theta(v))
    if lhs != rhs:
        return {'law': 'product', 'u': format_element(u), 'v': format_element(v),
                'lhs': format_element(lhs), 'rhs': format_element(rhs)}
    return None


def _morphism_sample(theta, settings, rng):
    u = random_element(theta.source, rng, settings)
    v = random_element(theta.source, rng, settings)
    return _morphism_witness(theta, u, v)


def verify_morphism(theta, settings, name='morphism'):
    """Bracket and product laws on the generator pairs, then on sampled pairs."""
    gens = _generators(theta.source)
    pairs = list(combinations(gens, 2))
    report = CheckReport(name=name)
    for u, v in pairs:
        report.total += 1
        witness = _morphism_witness(theta, u, v)
        if witness is None:
            report.passed += 1
        elif report.counterexample is None:
            report.counterexample = dict(witness, sample='generators')
    sampled = run_property(name, bind(_morphism_sample, theta, settings), settings)
    report.total += sampled.total
    report.passed += sampled.passed
    if report.counterexample is None:
        report.counterexample = sampled.counterexample
    report.notes['generator_pairs'] = len(pairs)
    return report


def random_preserving_iso(algebra, rng):
    """Integer preserving data with unimodular blocks, so tau(Z^n) = Z^n."""
    shape, f = algebra.shape, algebra.field
    nu = {}
    for k in range(1, 5):
        block = list(shape.I(k))
        perm = [block[int(j)] for j in rng.permutation(len(block))]
        nu.update(dict(zip(block, perm)))
    a = {p: int(rng.integers(-2, 3)) for p in shape.I(1, 4)}
    b = {p: int(rng.choice([-1, 1])) for p in shape.I(1, 4)}
    blocks = {}
    for name in BLOCKS:
        rows, cols = len(block_rows(shape, name)), len(block_cols(shape, name))
        if name in ('B55', 'B66'):
            mat = [[0] * cols for _ in range(rows)]
            for r in range(rows):
                mat[r][r] = int(rng.choice([-1, 1]))
                for c in range(r + 1, cols):
                    mat[r][c] = int(rng.integers(-1, 2))
        else:
            mat = [[int(x) for x in rng.integers(-2, 3, size=cols)] for _ in range(rows)]
        blocks[name] = mat
    return build_preserving_iso(shape, f, nu=nu, a=a, b=b, blocks=blocks)

"""The algebra H(l, Gamma): elements, product, both brackets, operators, pi, distinguished sets.

An element is a sparse map from keys (alpha, i) to nonzero scalars, where
alpha is a group vector in Gamma and i a multi-index, both in written order.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

from errors import AlgebraMismatchError, ElementError, ShapeError
from formatting import format_element
from lattice import add_vectors

logger = logging.getLogger(__name__)

OPERATOR_KINDS = {
    'grading': 'grading', 'd*': 'grading', 'dstar': 'grading',
    'down': 'down', 'dt': 'down', 'down-grading': 'down',
    'mixed': 'mixed', 'd': 'mixed',
}


@dataclass(frozen=True, eq=False)
class Algebra:
    shape: object
    lattice: object
    extended: bool = False

    @property
    def field(self):
        return self.lattice.field

    def __eq__(self, other):
        return (isinstance(other, Algebra) and self.extended == other.extended
                and self.lattice == other.lattice)

    def __hash__(self):
        return hash((self.lattice, self.extended))

    def __reduce__(self):
        return (Algebra, (self.shape, self.lattice, self.extended))

    def extend(self):
        """The enlarged algebra with the multi-index constraint waived."""
        return Algebra(self.shape, self.lattice, True)

    def restrict(self):
        return Algebra(self.shape, self.lattice, False)

    @cached_property
    def sigmas(self):
        return {p: self.lattice.sigma(p) for p in self.shape.indices}

    @cached_property
    def zero_alpha(self):
        return self.lattice.zero_vector()

    @cached_property
    def zero_index(self):
        return (0,) * self.shape.dim

    @cached_property
    def bracket_plan(self):
        """Per-sum lists of (sigma_p, pos(p), pos(bar p)) for the structural bracket."""
        s = self.shape

        def entries(idx):
            return tuple((self.sigmas[p], s.position(p), s.position(s.bar(p))) for p in idx)

        if self.extended:
            ranges = (s.I(1, 4), s.I(1, 6), s.I(1, 4), s.I(1, 7))
        else:
            ranges = (s.I(1, 4), s.I(4, 6), s.I(2, 4), s.I(4) + s.I(6, 7))
        return tuple(entries(r) for r in ranges)

    def check_key(self, alpha, i):
        s = self.shape
        if len(alpha) != s.dim or len(i) != s.dim:
            raise ElementError(f"key has the wrong length for shape {s.l}")
        if any((not isinstance(k, int)) or k < 0 for k in i):
            raise ElementError(f"multi-index {list(i)} must be nonnegative integers")
        if not self.extended:
            for p in s.forbidden_t:
                if i[s.position(p)]:
                    raise ElementError(f"t_{p} is not allowed in this algebra", index=p)
        if not self.lattice.contains(alpha):
            raise ElementError(f"exponent {self.lattice.format_vector(alpha)} is not in Gamma")

    def element(self, terms):
        """Build an element from a key -> scalar map, dropping zeros (no validation)."""
        f = self.field
        clean = {}
        for key, c in terms.items():
            c = f.coerce(c)
            if c != 0:
                clean[key] = c
        return Element(self, clean)

    def monomial(self, alpha, i=None, coef=1, check=True):
        alpha = tuple(self.field.coerce(a) for a in alpha)
        i = self.zero_index if i is None else tuple(int(k) for k in i)
        if check:
            self.check_key(alpha, i)
        return self.element({(alpha, i): coef})

    def x(self, alpha, coef=1):
        return self.monomial(alpha, None, coef)

    def t(self, p, k=1):
        i = [0] * self.shape.dim
        i[self.shape.position(p)] = k
        return self.monomial(self.zero_alpha, i)

    def x_sigma(self, p, sign=1):
        """x^{sign * sigma_p}."""
        alpha = tuple(sign * a for a in self.sigmas[p])
        return self.monomial(alpha, None, check=False)

    def zero(self):
        return Element(self, {})

    def one(self):
        return self.element({(self.zero_alpha, self.zero_index): 1})

    def key_sort(self, key):
        alpha, i = key
        return (tuple(self.field.sort_key(a) for a in alpha), i)


class Element:
    """Finite formal sum of monomials x^{alpha,i}; immutable."""

    __slots__ = ('algebra', 'terms')

    def __init__(self, algebra, terms):
        self.algebra = algebra
        self.terms = terms

    def _same(self, other):
        if self.algebra is not other.algebra and self.algebra != other.algebra:
            raise AlgebraMismatchError("operands belong to different algebras")

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.algebra.key_sort(kv[0]))

    def is_zero(self):
        return not self.terms

    def is_monomial(self):
        return len(self.terms) == 1

    def only_key(self):
        if len(self.terms) != 1:
            raise ElementError("expected a single monomial")
        return next(iter(self.terms))

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return Element(self.algebra, out)

    def __neg__(self):
        return Element(self.algebra, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def scale(self, c):
        c = self.algebra.field.coerce(c)
        if c == 0:
            return Element(self.algebra, {})
        return Element(self.algebra, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Element({format_element(self)})"

    def coefficient(self, key):
        return self.terms.get(key, self.algebra.field.zero)

    def reflag(self, algebra):
        """The same term map viewed in another algebra over the same lattice."""
        return Element(algebra, self.terms)


def _check_pair(u, v):
    u._same(v)
    return u.algebra


def _accumulate(out, key, c):
    s = out.get(key)
    s = c if s is None else s + c
    if s == 0:
        out.pop(key, None)
    else:
        out[key] = s


def multiply(u, v):
    """Associative commutative product x^{a,i} x^{b,j} = x^{a+b,i+j}."""
    alg = _check_pair(u, v)
    out = {}
    for (a, i), c in u.terms.items():
        for (b, j), d in v.terms.items():
            key = (add_vectors(a, b), tuple(x + y for x, y in zip(i, j)))
            _accumulate(out, key, c * d)
    return Element(alg, out)


def power(u, k):
    result = u.algebra.one()
    for _ in range(k):
        result = multiply(result, u)
    return result


def _minus(i, *positions):
    lst = list(i)
    for pos in positions:
        lst[pos] -= 1
    return tuple(lst)


def monomial_bracket(algebra, alpha, i, beta, j):
    """Structural bracket of two monomials as a key -> coefficient dict."""
    s1, s2, s3, s4 = algebra.bracket_plan
    base = add_vectors(alpha, beta)
    ij = tuple(x + y for x, y in zip(i, j))
    out = {}
    for sig, P, Pb in s1:
        c = alpha[P] * beta[Pb] - alpha[Pb] * beta[P]
        if c != 0:
            _accumulate(out, (add_vectors(sig, base), ij), c)
    for sig, P, Pb in s2:
        c = alpha[P] * j[Pb] - i[Pb] * beta[P]
        if c != 0:
            _accumulate(out, (add_vectors(sig, base), _minus(ij, Pb)), c)
    for sig, P, Pb in s3:
        c = i[P] * beta[Pb] - j[P] * alpha[Pb]
        if c != 0:
            _accumulate(out, (add_vectors(sig, base), _minus(ij, P)), c)
    for sig, P, Pb in s4:
        c = i[P] * j[Pb] - i[Pb] * j[P]
        if c != 0:
            _accumulate(out, (add_vectors(sig, base), _minus(ij, P, Pb)), c)
    return out


def bracket_structural(u, v):
    """Bilinear extension of the four-sum bracket formula."""
    alg = _check_pair(u, v)
    out = {}
    for (a, i), c in u.terms.items():
        for (b, j), d in v.terms.items():
            cd = c * d
            for key, e in monomial_bracket(alg, a, i, b, j).items():
                _accumulate(out, key, cd * e)
    return Element(alg, {k: alg.field.coerce(c) for k, c in out.items()})


def apply_operator(kind, p, u):
    """Grading d*_p, down-grading d_{t_p}, or mixed d_p = d*_p + d_{t_p}."""
    alg = u.algebra
    shape = alg.shape
    try:
        kind = OPERATOR_KINDS[kind]
    except KeyError:
        raise ShapeError(f"unknown operator kind {kind!r}")
    shape.check_index(p)
    pos = shape.position(p)
    out = {}
    for (a, i), c in u.terms.items():
        if kind in ('grading', 'mixed') and a[pos] != 0:
            _accumulate(out, (a, i), c * a[pos])
        if kind in ('down', 'mixed') and i[pos] > 0:
            _accumulate(out, (a, _minus(i, pos)), c * i[pos])
    return Element(alg, {k: alg.field.coerce(c) for k, c in out.items()})


def bracket_defining(u, v):
    """sum_p x^{sigma_p} (d_p u d_bar(p) v - d_bar(p) u d_p v) over p in I."""
    alg = _check_pair(u, v)
    shape = alg.shape
    total = alg.zero()
    for p in shape.I(1, 7):
        q = shape.bar(p)
        du_p = apply_operator('mixed', p, u)
        du_q = apply_operator('mixed', q, u)
        if du_p.is_zero() and du_q.is_zero():
            continue
        dv_p = apply_operator('mixed', p, v)
        dv_q = apply_operator('mixed', q, v)
        inner = multiply(du_p, dv_q) - multiply(du_q, dv_p)
        if inner.is_zero():
            continue
        total = total + multiply(alg.x_sigma(p), inner)
    return total


def pi_vector(shape, alpha):
    """pi(alpha) as a tuple indexed by p = 1..iota_6 (no membership check)."""
    out = []
    for p in shape.I(1, 6):
        k = shape.block_of(p)
        a_p = alpha[shape.position(p)]
        a_q = alpha[shape.position(shape.bar(p))]
        if k in (1, 3, 4):
            out.append(a_p - a_q)
        elif k == 2:
            out.append(-a_q)
        else:
            out.append(-a_p)
    return tuple(out)


def pi_map(lattice, alpha):
    alpha = tuple(lattice.field.coerce(a) for a in alpha)
    if not lattice.contains(alpha):
        raise ElementError(f"{lattice.format_vector(alpha)} is not in Gamma")
    return pi_vector(lattice.shape, alpha)


def monomial_stats(shape, key):
    """(level, support) of a key."""
    alpha, i = key
    level = sum(i)
    support = tuple(p for p in shape.indices
                    if alpha[shape.position(p)] != 0 or i[shape.position(p)] != 0)
    return level, support


def h1_keys(algebra):
    """Keys of the monomials x^{-sigma_p} (p in I_{1,4}) and t_bar(q) (q in I_{5,6})."""
    shape = algebra.shape
    keys = []
    for p in shape.I(1, 4):
        keys.append((tuple(-a for a in algebra.sigmas[p]), algebra.zero_index))
    for q in shape.I(5, 6):
        i = [0] * shape.dim
        i[shape.position(shape.bar(q))] = 1
        keys.append((algebra.zero_alpha, tuple(i)))
    return keys


def in_h3_key(shape, key):
    alpha, i = key
    for p in shape.J(1, 4):
        pos = shape.position(p)
        if alpha[pos] != 0 or i[pos] != 0:
            return False
    return all(i[shape.position(p)] == 0 for p in shape.Ibar(5, 6))


def in_h2_key(shape, key):
    if not in_h3_key(shape, key):
        return False
    _, i = key
    return all(i[shape.position(p)] * i[shape.position(shape.bar(p))] == 0 for p in shape.I(7))


def set_membership(which, u, mu=None):
    """Membership of u in H1, H2, H3, M or M_mu."""
    alg = u.algebra
    shape = alg.shape
    which = which.upper().replace('_', '')
    if which in ('H1', 'H2'):
        if u.is_zero():
            return True
        if not u.is_monomial():
            return False
        key = u.only_key()
        if which == 'H1':
            return key in h1_keys(alg)
        return in_h2_key(shape, key)
    if which == 'H3':
        return all(in_h3_key(shape, k) for k in u.terms)
    if which == 'M':
        return all(not any(i) for _, i in u.terms)
    if which in ('MMU', 'MU'):
        if mu is None:
            raise ElementError("M_mu membership needs mu")
        mu = tuple(alg.field.coerce(m) for m in mu)
        return all(not any(i) and pi_vector(shape, a) == mu for a, i in u.terms)
    raise ElementError(f"unknown set {which!r}")

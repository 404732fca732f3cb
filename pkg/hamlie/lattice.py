"""The free abelian group Gamma: a finite basis of group vectors plus membership queries."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import linalg
from errors import LatticeError

logger = logging.getLogger(__name__)


def as_vector(field, values):
    return tuple(field.coerce(x) for x in values)


def add_vectors(u, v):
    return tuple(a + b for a, b in zip(u, v))


def scale_vector(c, v):
    return tuple(c * a for a in v)


def _lcm(a, b):
    return a * b // gcd(a, b)


def _primitive(vec):
    """Scale a rational vector to a primitive integer vector."""
    den = 1
    for x in vec:
        den = _lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return [x // g for x in ints] if g else ints


@dataclass(frozen=True, eq=False)
class Lattice:
    shape: object
    field: object
    basis: tuple

    def __eq__(self, other):
        return (isinstance(other, Lattice) and self.shape == other.shape
                and self.field == other.field and self.basis == other.basis)

    def __hash__(self):
        return hash((self.shape, self.field, self.basis))

    @property
    def rank(self):
        return len(self.basis)

    def _expand(self, v):
        """Rational coordinates of a field vector (each scalar split into its rational parts)."""
        out = []
        for x in v:
            out.extend(self.field.rational_parts(x))
        return out

    def _system(self):
        cached = self.__dict__.get('_system_cache')
        if cached is None:
            cols = [self._expand(g) for g in self.basis]
            rows = len(cols[0]) if cols else self.shape.dim * self.field.degree
            cached = [[cols[k][r] for k in range(len(cols))] for r in range(rows)]
            self.__dict__['_system_cache'] = cached
        return cached

    def coordinates(self, v):
        """Rational coordinates of v in the basis, or None outside the rational span."""
        v = as_vector(self.field, v)
        if len(v) != self.shape.dim:
            raise LatticeError(f"vector has length {len(v)}, expected {self.shape.dim}")
        rhs = self._expand(v)
        if not self.basis:
            return [] if all(x == 0 for x in rhs) else None
        a = self._system()
        if not linalg.is_consistent(a, rhs):
            return None
        return linalg.solve(a, rhs)

    def contains(self, v):
        coords = self.coordinates(v)
        return coords is not None and all(Fraction(c).denominator == 1 for c in coords)

    def integer_coordinates(self, v):
        coords = self.coordinates(v)
        if coords is None or any(Fraction(c).denominator != 1 for c in coords):
            raise LatticeError(f"{self.format_vector(v)} is not in Gamma")
        return [int(c) for c in coords]

    def combine(self, coords):
        """The vector sum_k c_k g_k."""
        v = tuple(self.field.zero for _ in range(self.shape.dim))
        for c, g in zip(coords, self.basis):
            if c:
                v = add_vectors(v, scale_vector(c, g))
        return v

    def epsilon_multiple(self, r):
        """Positive e with e * eps_r in Gamma, from the primitive integer solution."""
        shape = self.shape
        pos = shape.position(r)
        rows = []
        for k in range(shape.dim):
            if k == pos:
                continue
            for part in range(self.field.degree):
                rows.append([self.field.rational_parts(g[k])[part] for g in self.basis])
        null = linalg.nullspace(rows, n_cols=self.rank) if self.basis else []
        best = None
        for vec in null:
            c = _primitive(vec)
            e = self.combine(c)[pos]
            if e == 0:
                continue
            if not self.field.is_positive(e):
                e = -e
            key = max(abs(p) for p in self.field.rational_parts(e))
            if best is None or key < best[0]:
                best = (key, e)
        if best is None:
            raise LatticeError(f"no nonzero multiple of eps_{r} lies in Gamma", index_kind='r', index=r)
        return best[1]

    def lambda_vector(self, p):
        """lambda_p = e_p * eps_bar(p) for p in I_{1,4}."""
        shape = self.shape
        q = shape.bar(p)
        e = self.epsilon_multiple(q)
        v = [self.field.zero] * shape.dim
        v[shape.position(q)] = e
        return tuple(v), e

    def format_vector(self, v):
        return '(' + ','.join(self.field.format(x) for x in v) + ')'

    def sigma(self, p):
        return as_vector(self.field, self.shape.sigma(p))

    def unit(self, p):
        return as_vector(self.field, self.shape.unit(p))

    def zero_vector(self):
        return tuple(self.field.zero for _ in range(self.shape.dim))

    @classmethod
    def unchecked(cls, shape, field, basis):
        """A lattice that skips validation (images of a valid lattice under a group map)."""
        return cls(shape, field, tuple(as_vector(field, g) for g in basis))


def build_lattice(shape, basis, field):
    """Validate the basis against the shape and return the Lattice."""
    basis = tuple(as_vector(field, g) for g in basis)
    for k, g in enumerate(basis):
        if len(g) != shape.dim:
            raise LatticeError(f"basis vector {k + 1} has length {len(g)}, expected {shape.dim}",
                               index_kind='basis', index=k + 1)
        for p in sorted(shape.zero_alpha):
            if g[shape.position(p)] != 0:
                raise LatticeError(f"basis vector {k + 1} has nonzero coordinate {p}, "
                                   f"which must vanish in Gamma", index_kind='p', index=p)
    lattice = Lattice(shape, field, basis)
    if basis and linalg.rank(lattice._system()) < len(basis):
        raise LatticeError("basis vectors are rationally dependent", index_kind='basis')
    for p in shape.I(1, 4):
        if not lattice.contains(lattice.sigma(p)):
            raise LatticeError(f"sigma_{p} is not in Gamma", index_kind='p', index=p)
    for q in shape.I(5, 6):
        if not lattice.contains(lattice.unit(q)):
            raise LatticeError(f"eps_{q} is not in Gamma", index_kind='q', index=q)
    for r in shape.J(1, 4):
        lattice.epsilon_multiple(r)
    logger.debug("✅ lattice of rank %d validated for shape %s", lattice.rank, shape.l)
    return lattice


def probe_vectors(lattice):
    """p -> (lambda_p, e_p) for every p in I_{1,4}."""
    return {p: lattice.lambda_vector(p) for p in lattice.shape.I(1, 4)}

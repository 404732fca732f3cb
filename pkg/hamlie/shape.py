"""The seven-block shape of an algebra and every index set derived from it.

Indices are 1-based as in the notation: I = {1..n}, bar(p) = p + n for
p <= n, and J = {1..2n} with n = iota_7. Vectors are stored in the written
(interleaved) order (a_1, a_bar1, a_2, a_bar2, ...), so position(p) maps an
index to its slot.
"""

from dataclasses import dataclass, field
from functools import cached_property

from errors import ShapeError


@dataclass(frozen=True)
class Shape:
    l: tuple
    iota: tuple = field(init=False)

    def __post_init__(self):
        l = tuple(int(x) for x in self.l)
        if len(l) != 7:
            raise ShapeError(f"shape needs seven block sizes, got {len(l)}")
        if any(x < 0 for x in l):
            raise ShapeError("block sizes must be nonnegative", l=list(l))
        if not any(l):
            raise ShapeError("shape (0,0,0,0,0,0,0) is not allowed")
        iota = [0]
        for x in l:
            iota.append(iota[-1] + x)
        object.__setattr__(self, 'l', l)
        object.__setattr__(self, 'iota', tuple(iota))

    @property
    def n(self):
        """iota_7, the number of unbarred indices."""
        return self.iota[7]

    @property
    def dim(self):
        return 2 * self.n

    def block(self, i):
        return tuple(range(self.iota[i - 1] + 1, self.iota[i] + 1))

    def I(self, i, j=None):
        j = i if j is None else j
        return tuple(range(self.iota[i - 1] + 1, self.iota[j] + 1))

    def Ibar(self, i, j=None):
        return tuple(self.bar(p) for p in self.I(i, j))

    def J(self, i, j=None):
        return self.I(i, j) + self.Ibar(i, j)

    @property
    def indices(self):
        return tuple(range(1, self.dim + 1))

    def bar(self, p):
        self.check_index(p)
        return p + self.n if p <= self.n else p - self.n

    def is_barred(self, p):
        return p > self.n

    def sgn(self, p):
        return -1 if self.is_barred(p) else 1

    def check_index(self, p):
        if not 1 <= p <= self.dim:
            raise ShapeError(f"index {p} outside J = 1..{self.dim}")

    def block_of(self, p):
        """Block number 1..7 of p (barred indices belong to the block of bar(p))."""
        self.check_index(p)
        q = p if p <= self.n else p - self.n
        for k in range(1, 8):
            if q <= self.iota[k]:
                return k
        raise ShapeError(f"index {p} has no block")

    def position(self, p):
        self.check_index(p)
        if p <= self.n:
            return 2 * (p - 1)
        return 2 * (p - self.n - 1) + 1

    def index_at(self, pos):
        return pos // 2 + 1 if pos % 2 == 0 else pos // 2 + 1 + self.n

    def unit(self, p):
        v = [0] * self.dim
        v[self.position(p)] = 1
        return tuple(v)

    def sigma(self, p):
        """Integer vector sigma_p; sigma_bar(p) = sigma_p."""
        q = p if p <= self.n else p - self.n
        k = self.block_of(q)
        v = [0] * self.dim
        if k in (1, 3, 4):
            v[self.position(q)] = 1
            v[self.position(self.bar(q))] = 1
        elif k == 2:
            v[self.position(q)] = 1
        return tuple(v)

    def eta(self, q):
        """eta on J_{1,4}: 1 on I_{1,4}, -1 on the bars of I_1 and I_{3,4}, 0 on the bars of I_2."""
        k = self.block_of(q)
        if k > 4:
            raise ShapeError(f"eta is defined on J_1..J_4 only, not on {q}")
        if not self.is_barred(q):
            return 1
        return 0 if k == 2 else -1

    @cached_property
    def sigma_total(self):
        """sigma = sum of sigma_p over I_{1,4}."""
        v = [0] * self.dim
        for p in self.I(1, 4):
            for k, x in enumerate(self.sigma(p)):
                v[k] += x
        return tuple(v)

    @cached_property
    def forbidden_t(self):
        """Indices p with i_p = 0 forced in H: J_1, the bars of I_{2,3}, and I_5."""
        return frozenset(self.J(1) + self.Ibar(2, 3) + self.I(5))

    @cached_property
    def zero_alpha(self):
        """Indices p with alpha_p = 0 for every alpha in Gamma."""
        return frozenset(self.Ibar(5, 6) + self.J(7))

    @cached_property
    def allowed_t(self):
        return tuple(p for p in self.indices if p not in self.forbidden_t)

    @cached_property
    def group_coords(self):
        """Indices whose alpha coordinate may be nonzero: J_{1,4} and I_{5,6}."""
        return tuple(p for p in self.indices if p not in self.zero_alpha)

    def is_l1_only(self):
        """iota_7 = l_1, the case with nontrivial second cohomology."""
        return self.n == self.l[0]

    def describe(self):
        return {
            'l': list(self.l),
            'iota': list(self.iota),
            'J': list(self.indices),
            'bar': {p: self.bar(p) for p in self.indices},
            'sigma': {p: list(self.sigma(p)) for p in self.I(1, 7)},
        }


def build_shape(l):
    return Shape(tuple(l))

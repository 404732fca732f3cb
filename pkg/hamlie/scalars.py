"""Exact scalar fields: the rationals and quadratic extensions Q(sqrt d)."""

import re
from fractions import Fraction
from functools import total_ordering

from sympy import factorint, integer_nthroot

from errors import FieldError, ParseError

_RATIONAL_RE = re.compile(r'^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$')


def parse_rational(text):
    """Parse "p" or "p/q" into a Fraction."""
    match = _RATIONAL_RE.match(str(text))
    if not match:
        raise ParseError(f"malformed rational {text!r}", clause="scalar")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}", clause="scalar")
    return Fraction(num, den)


def format_rational(x, strict=False):
    x = Fraction(x)
    if x.denominator == 1 and not strict:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _int_root(m, n):
    """Exact integer n-th root of m >= 0, or None."""
    root, exact = integer_nthroot(m, n)
    return int(root) if exact else None


def rational_root(x, n):
    """Real n-th root of a rational inside Q, positive root first; None if absent."""
    x = Fraction(x)
    if n == 1:
        return x
    if x < 0:
        if n % 2 == 0:
            return None
        root = rational_root(-x, n)
        return None if root is None else -root
    num = _int_root(x.numerator, n)
    den = _int_root(x.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _squarefree(d):
    d = int(d)
    if d in (0, 1):
        return False
    return all(e == 1 for e in factorint(abs(d)).values())


@total_ordering
class QuadraticScalar:
    """a + b*sqrt(d) with rational a, b."""

    __slots__ = ('a', 'b', 'd')

    def __init__(self, a, b, d):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _lift(self, other):
        if isinstance(other, QuadraticScalar):
            if other.d != self.d:
                raise FieldError(f"mixing sqrt({self.d}) and sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticScalar(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadraticScalar(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticScalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadraticScalar(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadraticScalar(self.a * o.a + self.d * self.b * o.b,
                               self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def norm(self):
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero scalar")
        return QuadraticScalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadraticScalar(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, QuadraticScalar):
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def sign(self):
        """Sign of the real embedding with sqrt(d) > 0 (d > 0 assumed)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # a and b*sqrt(d) have opposite signs
        diff = self.a * self.a - self.d * self.b * self.b
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __repr__(self):
        return f"QuadraticScalar({self.a}, {self.b}, {self.d})"


class RationalField:
    """The field Q; scalars are Fractions."""

    name = 'rational'
    d = None

    def coerce(self, x):
        if isinstance(x, QuadraticScalar):
            if x.b != 0:
                raise FieldError(f"{x!r} is not rational")
            return x.a
        return Fraction(x)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def parse(self, text):
        return parse_rational(text)

    def format(self, x, strict=False):
        return format_rational(x, strict)

    def sort_key(self, x):
        return (x, Fraction(0))

    def rational_parts(self, x):
        return (Fraction(x),)

    def from_rational_parts(self, parts):
        return Fraction(parts[0])

    @property
    def degree(self):
        return 1

    def is_positive(self, x):
        return x > 0

    def nth_root(self, x, n):
        return rational_root(x, n)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash('rational')

    def __repr__(self):
        return 'rational'


class QuadraticField:
    """The field Q(sqrt d) for a square-free integer d."""

    def __init__(self, d):
        if not _squarefree(d):
            raise FieldError(f"quadratic field needs a square-free d != 0, 1; got {d}")
        self.d = int(d)
        self.name = f'quadratic:{self.d}'
        self._scalar_re = re.compile(
            r'^\s*([+-]?\d+(?:/\d+)?)?\s*(?:([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*sqrt\(\s*'
            + re.escape(str(self.d)) + r'\s*\))?\s*$')

    def coerce(self, x):
        if isinstance(x, QuadraticScalar):
            if x.d != self.d:
                raise FieldError(f"scalar from sqrt({x.d}) used in {self.name}")
            return x
        return QuadraticScalar(x, 0, self.d)

    @property
    def zero(self):
        return QuadraticScalar(0, 0, self.d)

    @property
    def one(self):
        return QuadraticScalar(1, 0, self.d)

    def parse(self, text):
        """Accept "p/q", "p/q+r/s*sqrt(d)", "r/s*sqrt(d)", "-sqrt(d)"."""
        text = str(text).strip()
        match = self._scalar_re.match(text)
        if not match or (match.group(1) is None and 'sqrt' not in text):
            raise ParseError(f"malformed scalar {text!r} for {self.name}", clause="scalar")
        a = parse_rational(match.group(1)) if match.group(1) else Fraction(0)
        b = Fraction(0)
        if 'sqrt' in text:
            b = parse_rational(match.group(3)) if match.group(3) else Fraction(1)
            if match.group(2) == '-':
                b = -b
        return QuadraticScalar(a, b, self.d)

    def format(self, x, strict=False):
        x = self.coerce(x)
        if x.b == 0:
            return format_rational(x.a, strict)
        coef = '' if abs(x.b) == 1 and not strict else format_rational(abs(x.b), strict) + '*'
        surd = f"{coef}sqrt({self.d})"
        if x.a == 0 and not strict:
            return ('-' if x.b < 0 else '') + surd
        return f"{format_rational(x.a, strict)}{'-' if x.b < 0 else '+'}{surd}"

    def sort_key(self, x):
        x = self.coerce(x)
        return (x.a, x.b)

    def rational_parts(self, x):
        x = self.coerce(x)
        return (x.a, x.b)

    def from_rational_parts(self, parts):
        return QuadraticScalar(parts[0], parts[1], self.d)

    @property
    def degree(self):
        return 2

    def is_positive(self, x):
        return self.coerce(x).sign() > 0

    def _sqrt(self, x):
        """Square roots of x inside the field, positive first."""
        x = self.coerce(x)
        roots = []
        if x.b == 0:
            r = rational_root(x.a, 2)
            if r is not None:
                roots.append(QuadraticScalar(r, 0, self.d))
            c = rational_root(x.a / self.d, 2)
            if c is not None:
                roots.append(QuadraticScalar(0, c, self.d))
        else:
            # (u + v sqrt d)^2 = a + b sqrt d  <=>  u^2 + d v^2 = a, 2uv = b
            disc = rational_root(x.a * x.a - self.d * x.b * x.b, 2)
            if disc is not None:
                for u2 in ((x.a + disc) / 2, (x.a - disc) / 2):
                    u = rational_root(u2, 2)
                    if u:
                        roots.append(QuadraticScalar(u, x.b / (2 * u), self.d))
        roots = [r if r.sign() >= 0 else -r for r in roots]
        for r in roots:
            if r * r == x:
                return r
        return None

    def nth_root(self, x, n):
        x = self.coerce(x)
        if n == 1:
            return x
        if n % 2 == 0:
            half = self._sqrt(x)
            if half is None:
                return None
            return self.nth_root(half, n // 2)
        if x.b == 0:
            r = rational_root(x.a, n)
            return None if r is None else QuadraticScalar(r, 0, self.d)
        return None

    def __eq__(self, other):
        return isinstance(other, QuadraticField) and other.d == self.d

    def __hash__(self):
        return hash(('quadratic', self.d))

    def __repr__(self):
        return self.name


def field_from_name(name):
    """Resolve "rational" or "quadratic:<d>"."""
    name = (name or 'rational').strip()
    if name == 'rational':
        return RationalField()
    if name.startswith('quadratic:'):
        try:
            d = int(name.split(':', 1)[1])
        except ValueError:
            raise ParseError(f"bad field name {name!r}", clause="field")
        return QuadraticField(d)
    raise ParseError(f"unknown field {name!r}", clause="field")

"""Text surface: algebra spec documents, element / derivation / cocycle expressions, iso files.

One lark grammar covers every expression kind; the start rule picks which
kind the caller expects. Errors always come back as ParseError with a line
and column.
"""

import configparser
import logging
import re
from dataclasses import dataclass

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from cohomology import Coboundary, Combo, LinearFunctional, PhiMu, PhiP, PhiPPrime
from derivations import Ad, D0, DMu, DOuter, DPrime0, LinearCombo, PartialT, build_hom
from errors import HamlieError, ParseError
from formatting import format_element, format_key
from isomorphisms import BLOCKS, block_cols, block_rows, build_character, build_preserving_iso
from kernel import Algebra, Element, multiply
from lattice import build_lattice
from scalars import field_from_name
from shape import build_shape

logger = logging.getLogger(__name__)

EXPR_GRAMMAR = r"""
    element: sum
    derivation: sum
    cocycle: sum

    ?sum: product
        | sum "+" product        -> add
        | sum "-" product        -> sub
    ?product: unary
        | product "*" unary      -> mul
    ?unary: atom
        | "-" unary              -> neg
    ?atom: rational
        | "sqrt" "(" INT ")"     -> sqrt
        | "x" "[" vector "]"     -> xmono
        | TVAR "^" INT           -> tpow
        | TVAR                   -> tvar
        | "d0'"                  -> dprime0
        | "d0"                   -> d0
        | "d" "[" INT "]"        -> douter
        | "dt" "[" INT "]"       -> partial_t
        | "dmu" "{" values "}"   -> dmu
        | "ad" "(" sum ")"       -> ad
        | "phi" "[" INT "]"      -> phi
        | "phi'" "[" INT "]"     -> phi_prime
        | "phimu" "{" values "}" -> phimu
        | "cb" "{" [entry ("," entry)*] "}" -> coboundary
        | "(" sum ")"

    rational: INT ("/" INT)?
    vector: "(" [sum ("," sum)*] ")"
    values: [sum ("," sum)*]
    entry: sum ":" sum

    TVAR: /t[0-9]+/

    %import common.INT
    %import common.WS
    %ignore WS
"""

DOC_GRAMMAR = r"""
    document: _NL? (statement _NL?)*
    statement: "shape.l" "=" "[" [SIGNED_INT ("," SIGNED_INT)*] "]" -> shape_stmt
             | "gamma.basis" "=" "[" [row ("," row)*] "]"            -> basis_stmt
             | "field" "=" FIELDNAME                                   -> field_stmt
             | "fixture" "=" NAME                                      -> fixture_stmt
    row: "[" [scalar ("," scalar)*] "]"
    scalar: /[^,\[\]\n]+/

    FIELDNAME: /rational|quadratic:-?[0-9]+/
    NAME: /[A-Za-z][A-Za-z0-9_-]*/
    COMMENT: /#[^\n]*/
    _NL: /(\r?\n[\t ]*(#[^\n]*)?)+/

    %import common.SIGNED_INT
    %ignore /[ \t]+/
    %ignore COMMENT
"""

_expr_parser = Lark(EXPR_GRAMMAR, start=['element', 'derivation', 'cocycle'],
                    parser='lalr', propagate_positions=True)
_doc_parser = Lark(DOC_GRAMMAR, start='document', parser='lalr', propagate_positions=True)


def _location(exc):
    line = getattr(exc, 'line', None)
    column = getattr(exc, 'column', None)
    if line is not None and line < 0:
        line, column = None, None
    return line, column


def _parse_tree(parser, text, start, clause):
    try:
        return parser.parse(text, start=start) if start else parser.parse(text)
    except UnexpectedInput as exc:
        line, column = _location(exc)
        token = getattr(exc, 'token', None)
        what = f"unexpected {token!r}" if token is not None else "unexpected input"
        raise ParseError(what, line=line, column=column, clause=clause)


# Expressions


@dataclass(frozen=True)
class _Weighted:
    """A derivation or cocycle term list collected while evaluating."""

    kind: str
    terms: tuple


def _kind_of(value):
    if isinstance(value, Element):
        return 'element'
    if isinstance(value, _Weighted):
        return value.kind
    return 'scalar'


@v_args(meta=True)
class ExprEvaluator(Transformer):
    """Evaluates a parse tree over one algebra; scalars, elements and specs mix by kind."""

    def __init__(self, algebra):
        super().__init__()
        self.algebra = algebra
        self.field = algebra.field

    def _fail(self, meta, message):
        raise ParseError(message, line=getattr(meta, 'line', None),
                         column=getattr(meta, 'column', None), clause='expression')

    def _as_element(self, meta, value):
        kind = _kind_of(value)
        if kind == 'element':
            return value
        if kind == 'scalar':
            return self.algebra.one().scale(value)
        self._fail(meta, f"cannot use a {kind} as an element")

    # literals

    def rational(self, meta, children):
        text = '/'.join(str(c) for c in children)
        try:
            return self.field.parse(text)
        except ParseError as exc:
            self._fail(meta, exc.message)

    def sqrt(self, meta, children):
        d = int(children[0])
        if getattr(self.field, 'd', None) != d:
            self._fail(meta, f"sqrt({d}) is not in the {self.field.name} field")
        return self.field.parse(f"sqrt({d})")

    def vector(self, meta, children):
        out = []
        for c in children:
            if c is None:
                continue
            if _kind_of(c) != 'scalar':
                self._fail(meta, "vector entries must be scalars")
            out.append(c)
        return tuple(out)

    def values(self, meta, children):
        return self.vector(meta, children)

    def entry(self, meta, children):
        return tuple(children)

    def element(self, meta, children):
        return children[0]

    def derivation(self, meta, children):
        return children[0]

    def cocycle(self, meta, children):
        return children[0]

    def xmono(self, meta, children):
        alpha = children[0]
        try:
            return self.algebra.x(alpha)
        except HamlieError as exc:
            self._fail(meta, exc.message)

    def _t(self, meta, name, k):
        p = int(str(name)[1:])
        try:
            return self.algebra.t(p, k)
        except HamlieError as exc:
            self._fail(meta, exc.message)

    def tvar(self, meta, children):
        return self._t(meta, children[0], 1)

    def tpow(self, meta, children):
        return self._t(meta, children[0], int(children[1]))

    # derivations

    def _spec(self, meta, kind, build):
        try:
            return _Weighted(kind, ((self.field.one, build()),))
        except HamlieError as exc:
            self._fail(meta, exc.message)

    def dprime0(self, meta, children):
        return self._spec(meta, 'derivation', DPrime0)

    def d0(self, meta, children):
        return self._spec(meta, 'derivation', D0)

    def douter(self, meta, children):
        return self._spec(meta, 'derivation', lambda: DOuter(int(children[0])))

    def partial_t(self, meta, children):
        return self._spec(meta, 'derivation', lambda: PartialT(int(children[0])))

    def dmu(self, meta, children):
        return self._spec(meta, 'derivation',
                          lambda: DMu(build_hom(self.algebra.lattice, children[0])))

    def ad(self, meta, children):
        element = self._as_element(meta, children[0])
        return self._spec(meta, 'derivation', lambda: Ad(element))

    # cocycles

    def phi(self, meta, children):
        return self._spec(meta, 'cocycle', lambda: PhiP(int(children[0])))

    def phi_prime(self, meta, children):
        return self._spec(meta, 'cocycle', lambda: PhiPPrime(int(children[0])))

    def phimu(self, meta, children):
        return self._spec(meta, 'cocycle',
                          lambda: PhiMu(build_hom(self.algebra.lattice, children[0], require_plus=False)))

    def coboundary(self, meta, children):
        values = {}
        for item in children:
            if item is None:
                continue
            key_value, scalar = item
            key_elt = self._as_element(meta, key_value)
            if not key_elt.is_monomial() or _kind_of(scalar) != 'scalar':
                self._fail(meta, "functional entries must be 'monomial: scalar'")
            key, c = next(iter(key_elt.terms.items()))
            values[key] = values.get(key, self.field.zero) + scalar / c
        values = {k: v for k, v in values.items() if v != 0}
        return _Weighted('cocycle', ((self.field.one, Coboundary(LinearFunctional(self.algebra, values))),))

    # arithmetic

    def add(self, meta, children):
        a, b = children
        ka, kb = _kind_of(a), _kind_of(b)
        if ka == kb == 'scalar':
            return a + b
        if ka in ('scalar', 'element') and kb in ('scalar', 'element'):
            return self._as_element(meta, a) + self._as_element(meta, b)
        if ka == kb:
            return _Weighted(ka, a.terms + b.terms)
        self._fail(meta, f"cannot add a {ka} and a {kb}")

    def neg(self, meta, children):
        a = children[0]
        if isinstance(a, _Weighted):
            return _Weighted(a.kind, tuple((-w, s) for w, s in a.terms))
        return -a

    def sub(self, meta, children):
        a, b = children
        return self.add(meta, [a, self.neg(meta, [b])])

    def mul(self, meta, children):
        a, b = children
        ka, kb = _kind_of(a), _kind_of(b)
        if ka == kb == 'scalar':
            return a * b
        if ka == 'scalar' and kb == 'element':
            return b.scale(a)
        if ka == 'element' and kb == 'scalar':
            return a.scale(b)
        if ka == kb == 'element':
            return multiply(a, b)
        if ka == 'scalar' and isinstance(b, _Weighted):
            return _Weighted(b.kind, tuple((a * w, s) for w, s in b.terms))
        if kb == 'scalar' and isinstance(a, _Weighted):
            return _Weighted(a.kind, tuple((w * b, s) for w, s in a.terms))
        self._fail(meta, f"cannot multiply a {ka} and a {kb}")


def _evaluate(text, algebra, start):
    tree = _parse_tree(_expr_parser, text, start, start)
    try:
        value = ExprEvaluator(algebra).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, HamlieError):
            raise exc.orig_exc
        raise
    return value


def parse_element(text, algebra):
    value = _evaluate(text, algebra, 'element')
    kind = _kind_of(value)
    if kind == 'scalar':
        return algebra.one().scale(value)
    if kind != 'element':
        raise ParseError(f"expected an element, got a {kind}", clause='element')
    return value


def parse_scalar(text, field):
    return field.parse(text)


def _collapse(weighted, combo_cls):
    if len(weighted.terms) == 1 and weighted.terms[0][0] == 1:
        return weighted.terms[0][1]
    return combo_cls(tuple(weighted.terms))


def parse_derivation(text, algebra):
    value = _evaluate(text, algebra, 'derivation')
    if _kind_of(value) != 'derivation':
        raise ParseError(f"expected a derivation, got a {_kind_of(value)}", clause='derivation')
    return _collapse(value, LinearCombo)


def parse_cocycle(text, algebra):
    value = _evaluate(text, algebra, 'cocycle')
    if _kind_of(value) != 'cocycle':
        raise ParseError(f"expected a cocycle, got a {_kind_of(value)}", clause='cocycle')
    return _collapse(value, Combo)


def format_derivation(d, field):
    if isinstance(d, DPrime0):
        return "d0'"
    if isinstance(d, D0):
        return 'd0'
    if isinstance(d, DOuter):
        return 'd0' if d.p == 0 else f'd[{d.p}]'
    if isinstance(d, PartialT):
        return f'dt[{d.q}]'
    if isinstance(d, DMu):
        return 'dmu{' + ','.join(field.format(v) for v in d.hom.values) + '}'
    if isinstance(d, Ad):
        return f'ad({format_element(d.element)})'
    return _format_combo(d.terms, field, format_derivation)


def format_cocycle(c, field):
    if isinstance(c, PhiP):
        return f'phi[{c.p}]'
    if isinstance(c, PhiPPrime):
        return f"phi'[{c.p}]"
    if isinstance(c, PhiMu):
        return 'phimu{' + ','.join(field.format(v) for v in c.hom.values) + '}'
    if isinstance(c, Coboundary):
        fn = c.f
        items = sorted(fn.values.items(), key=lambda kv: fn.algebra.key_sort(kv[0]))
        entries = [f"{format_key(fn.algebra, k) or '1'}: {field.format(v)}" for k, v in items]
        return 'cb{' + ', '.join(entries) + '}'
    return _format_combo(c.terms, field, format_cocycle)


def _format_combo(terms, field, fmt):
    parts = []
    for w, spec in terms:
        text = fmt(spec, field)
        coef = field.format(w)
        if coef == '1':
            parts.append(text)
        else:
            parts.append(f'({coef})*{text}' if any(ch in coef[1:] for ch in '+-') else f'{coef}*{text}')
    return ' + '.join(parts) if parts else '0'


# Spec documents


@dataclass(frozen=True)
class AlgebraSpecDocument:
    l: tuple
    basis: tuple
    field: object
    fixture: str = None

    def build(self):
        shape = build_shape(self.l)
        lattice = build_lattice(shape, self.basis, self.field)
        return Algebra(shape, lattice)


@v_args(meta=True)
class _DocCollector(Transformer):
    def shape_stmt(self, meta, children):
        return ('shape.l', meta, [int(c) for c in children if c is not None])

    def basis_stmt(self, meta, children):
        return ('gamma.basis', meta, [c for c in children if c is not None])

    def field_stmt(self, meta, children):
        return ('field', meta, str(children[0]))

    def fixture_stmt(self, meta, children):
        return ('fixture', meta, str(children[0]))

    def row(self, meta, children):
        return (meta, [c for c in children if c is not None])

    def scalar(self, meta, children):
        return (meta, str(children[0]).strip())

    def document(self, meta, children):
        return children


def parse_spec(text, default_field='rational'):
    """Parse an .alg document; shape and lattice validation happen in build()."""
    tree = _parse_tree(_doc_parser, text, None, 'document')
    statements = _DocCollector().transform(tree)
    seen = {}
    for key, meta, value in statements:
        if key in seen:
            raise ParseError(f"duplicate {key}", line=meta.line, column=meta.column, clause=key)
        seen[key] = (meta, value)
    if 'shape.l' not in seen:
        raise ParseError("missing shape.l", clause='document')
    meta, l = seen['shape.l']
    if len(l) != 7:
        raise ParseError(f"shape.l needs seven entries, got {len(l)}",
                         line=meta.line, column=meta.column, clause='shape.l')
    try:
        shape = build_shape(l)
    except HamlieError as exc:
        raise ParseError(exc.message, line=meta.line, column=meta.column, clause='shape.l')
    field_name = seen['field'][1] if 'field' in seen else default_field
    try:
        field = field_from_name(field_name)
    except HamlieError as exc:
        meta = seen['field'][0] if 'field' in seen else None
        raise ParseError(exc.message, line=getattr(meta, 'line', None),
                         column=getattr(meta, 'column', None), clause='field')
    basis = []
    for row_meta, entries in (seen['gamma.basis'][1] if 'gamma.basis' in seen else []):
        if len(entries) != shape.dim:
            raise ParseError(f"basis row has {len(entries)} entries, expected {shape.dim}",
                             line=row_meta.line, column=row_meta.column, clause='gamma.basis')
        vec = []
        for s_meta, s_text in entries:
            try:
                vec.append(field.parse(s_text))
            except HamlieError as exc:
                raise ParseError(exc.message, line=s_meta.line, column=s_meta.column,
                                 clause='gamma.basis')
        basis.append(tuple(vec))
    fixture = seen['fixture'][1] if 'fixture' in seen else None
    return AlgebraSpecDocument(tuple(l), tuple(basis), field, fixture)


def format_spec(doc):
    f = doc.field
    rows = ','.join('[' + ','.join(f.format(x) for x in g) + ']' for g in doc.basis)
    lines = [
        'shape.l=[' + ','.join(str(x) for x in doc.l) + ']',
        f'gamma.basis=[{rows}]',
        f'field={f.name}',
    ]
    if doc.fixture:
        lines.append(f'fixture={doc.fixture}')
    return '\n'.join(lines) + '\n'


def load_spec(path, default_field='rational'):
    with open(path, 'r', encoding='utf-8') as fh:
        return parse_spec(fh.read(), default_field)


def document_of(algebra, fixture=None):
    return AlgebraSpecDocument(algebra.shape.l, algebra.lattice.basis, algebra.field, fixture)


# Iso files

_PAIR_RE = re.compile(r'\(\s*(\d+)\s*,\s*(\d+)\s*\)')


def _scalar_list(text, field, clause):
    items = [s for s in re.split(r'[,\s]+', text.strip()) if s]
    try:
        return [field.parse(s) for s in items]
    except HamlieError as exc:
        raise ParseError(exc.message, clause=clause)


def parse_iso(text, algebra):
    """Read an .iso file into (PreservingIso, character values or None)."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc).splitlines()[0], line=getattr(exc, 'lineno', None), clause='iso')
    shape = algebra.shape
    field = algebra.field
    nu = {}
    if cp.has_section('permutation'):
        for p, q in _PAIR_RE.findall(cp.get('permutation', 'pairs', fallback='')):
            nu[int(p)] = int(q)
    a, b = {}, {}
    if cp.has_section('parameters'):
        for key, value in cp.items('parameters'):
            match = re.fullmatch(r'([ab])(\d+)', key)
            if not match:
                raise ParseError(f"unknown parameter {key!r}", clause='parameters')
            target = a if match.group(1) == 'a' else b
            target[int(match.group(2))] = field.parse(value)
    blocks = {}
    if cp.has_section('blocks'):
        for key, value in cp.items('blocks'):
            if key not in BLOCKS:
                raise ParseError(f"unknown block {key!r}", clause='blocks')
            entries = _scalar_list(value, field, key)
            rows, cols = len(block_rows(shape, key)), len(block_cols(shape, key))
            if len(entries) != rows * cols:
                raise ParseError(f"{key} needs {rows * cols} entries, got {len(entries)}", clause=key)
            blocks[key] = [entries[r * cols:(r + 1) * cols] for r in range(rows)]
    iso = build_preserving_iso(shape, field, nu, a, b, blocks)
    chi = None
    if cp.has_section('character'):
        values = _scalar_list(cp.get('character', 'values', fallback=''), field, 'character')
        chi = build_character(algebra.lattice, values)
    return iso, chi


def load_iso(path, algebra):
    with open(path, 'r', encoding='utf-8') as fh:
        return parse_iso(fh.read(), algebra)


def format_iso(iso, chi=None):
    f = iso.field
    shape = iso.shape
    lines = ['[permutation]',
             'pairs = ' + ' '.join(f'({p},{q})' for p, q in sorted(iso.nu.items())),
             '', '[parameters]']
    for p in shape.I(1, 4):
        lines.append(f'a{p} = {f.format(iso.a[p])}')
        lines.append(f'b{p} = {f.format(iso.b[p])}')
    lines += ['', '[blocks]']
    for name in BLOCKS:
        mat = iso.blocks[name]
        if mat and mat[0]:
            lines.append(f'{name} = ' + ', '.join(f.format(x) for row in mat for x in row))
    if chi is not None:
        lines += ['', '[character]', 'values = ' + ', '.join(f.format(v) for v in chi.values)]
    return '\n'.join(lines) + '\n'

"""Normal-form text and canonical JSON records for scalars, vectors and elements."""


def format_scalar(field, c):
    return field.format(c)


def format_vector(field, v):
    return '(' + ','.join(field.format(x) for x in v) + ')'


def _is_compound(text):
    return any(ch in text[1:] for ch in '+-')


def format_key(algebra, key):
    """The monomial part of a term: x[...] and t-powers joined by '*', or '' for 1."""
    alpha, i = key
    shape = algebra.shape
    parts = []
    if any(a != 0 for a in alpha):
        parts.append('x[' + format_vector(algebra.field, alpha) + ']')
    for p in shape.indices:
        k = i[shape.position(p)]
        if k == 1:
            parts.append(f't{p}')
        elif k > 1:
            parts.append(f't{p}^{k}')
    return '*'.join(parts)


def format_element(u):
    """Canonical text of an element; parse_element reads it back to the same element."""
    if u.is_zero():
        return '0'
    field = u.algebra.field
    out = []
    for key, c in u.sorted_terms():
        mono = format_key(u.algebra, key)
        text = field.format(c)
        negative = text.startswith('-') and not _is_compound(text)
        if negative:
            text = text[1:]
        if _is_compound(text):
            text = f'({text})'
        if mono:
            term = mono if text == '1' else f'{text}*{mono}'
        else:
            term = text
        if not out:
            out.append(('-' if negative else '') + term)
        else:
            out.append((' - ' if negative else ' + ') + term)
    return ''.join(out)


def element_records(u):
    """Machine form: [{alpha, i, c}] in canonical term order with strict scalars."""
    field = u.algebra.field
    return [{'alpha': [field.format(a, strict=True) for a in alpha],
             'i': list(i),
             'c': field.format(c, strict=True)}
            for (alpha, i), c in u.sorted_terms()]

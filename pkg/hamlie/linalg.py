"""Exact dense linear algebra over any field whose scalars support + - * /.

Matrices are lists of rows. Nothing here rounds: pivots are chosen as the
first nonzero entry, so results are deterministic.
"""

from fractions import Fraction

from sympy import Matrix, eye

from errors import SolveError


def copy_matrix(m):
    return [list(row) for row in m]


def identity(n, one=1, zero=0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(m, n_cols=None):
    if not m:
        return [[] for _ in range(n_cols or 0)]
    return [list(col) for col in zip(*m)]


def mat_mul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum((row[k] * b[k][j] for k in range(inner)), 0 * row[0] if row else 0)
             for j in range(cols)] for row in a]


def vec_mat(v, m):
    """Row vector times matrix."""
    if not m:
        return []
    return [sum((v[k] * m[k][j] for k in range(len(m))), 0 * v[0] if v else 0)
            for j in range(len(m[0]))]


def form_echelon(m, t=None):
    """Row-reduce m in place (and the right-hand side t); return (pivot_cols, free_cols)."""
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots, free = [], []
    piv_r = 0
    for piv_c in range(n_cols):
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            free.append(piv_c)
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
            if t is not None:
                t[piv_r], t[i_row] = t[i_row], t[piv_r]
        fp = m[piv_r][piv_c]
        for r in range(n_rows):
            if r == piv_r:
                continue
            fr = m[r][piv_c]
            if fr == 0:
                continue
            frp = fr / fp
            for c in range(piv_c, n_cols):
                m[r][c] -= m[piv_r][c] * frp
            if t is not None:
                t[r] -= t[piv_r] * frp
        pivots.append(piv_c)
        piv_r += 1
        if piv_r == n_rows:
            free.extend(range(piv_c + 1, n_cols))
            break
    return pivots, free


def rank(m):
    if not m or not m[0]:
        return 0
    pivots, _ = form_echelon(copy_matrix(m))
    return len(pivots)


def solve(a, b, zero=Fraction(0), labels=None, n_cols=None):
    """One solution of a x = b with free variables set to zero.

    Raises SolveError naming the first inconsistent equation (by label when given).
    """
    n_cols = len(a[0]) if a else (n_cols or 0)
    m = copy_matrix(a)
    t = list(b)
    pivots, _ = form_echelon(m, t)
    for r in range(len(pivots), len(m)):
        if t[r] != 0:
            culprit = _first_inconsistent(a, b, zero)
            label = labels[culprit] if labels is not None and culprit is not None else culprit
            raise SolveError("inconsistent linear system", row=label)
    x = [zero] * n_cols
    for r, c in enumerate(pivots):
        x[c] = t[r] / m[r][c]
    return x


def _first_inconsistent(a, b, zero):
    """Smallest k such that the first k+1 equations are already inconsistent."""
    for k in range(len(a)):
        m = copy_matrix(a[:k + 1])
        t = list(b[:k + 1])
        pivots, _ = form_echelon(m, t)
        if any(t[r] != 0 for r in range(len(pivots), len(m))):
            return k
    return None


def is_consistent(a, b):
    if not a:
        return True
    m = copy_matrix(a)
    t = list(b)
    pivots, _ = form_echelon(m, t)
    return all(t[r] == 0 for r in range(len(pivots), len(m)))


def nullspace(a, n_cols=None, one=Fraction(1), zero=Fraction(0)):
    """Basis of {x : a x = 0}; one vector per free column, with 1 in that column."""
    n_cols = len(a[0]) if a else (n_cols or 0)
    if not a:
        return [[one if i == j else zero for i in range(n_cols)] for j in range(n_cols)]
    m = copy_matrix(a)
    pivots, free = form_echelon(m)
    basis = []
    for f in free:
        v = [zero] * n_cols
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = -m[r][f] / m[r][c]
        basis.append(v)
    return basis


def inverse(a, one=Fraction(1), zero=Fraction(0)):
    n = len(a)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    pivots, _ = form_echelon(aug)
    if pivots[:n] != list(range(n)):
        raise SolveError("matrix is singular")
    return [[aug[i][n + j] / aug[i][i] for j in range(n)] for i in range(n)]


def determinant(a):
    n = len(a)
    m = copy_matrix(a)
    det = 1
    for c in range(n):
        for r in range(c, n):
            if m[r][c] != 0:
                break
        else:
            return 0 * det
        if r != c:
            m[r], m[c] = m[c], m[r]
            det = -det
        det = det * m[c][c]
        for rr in range(c + 1, n):
            f = m[rr][c] / m[c][c]
            for cc in range(c, n):
                m[rr][cc] -= f * m[c][cc]
    return det


def column_hermite(m):
    """Integer column reduction: return (h, u, pivots) with h = m u lower echelon, u unimodular.

    Rows are processed top to bottom; in each row the Euclid loop keeps the
    column with the smallest nonzero absolute value (leftmost on ties).
    """
    n_cols = len(m[0]) if m else 0
    if not m or n_cols == 0:
        return [list(row) for row in m], identity(n_cols), []
    h = Matrix([[int(x) for x in row] for row in m])
    u = eye(n_cols)

    def col_sub(dst, src, q):
        h.col_op(dst, lambda val, r: val - q * h[r, src])
        u.col_op(dst, lambda val, r: val - q * u[r, src])

    def col_swap(i, j):
        h.col_swap(i, j)
        u.col_swap(i, j)

    def col_neg(j):
        h.col_op(j, lambda val, r: -val)
        u.col_op(j, lambda val, r: -val)

    col = 0
    pivots = []
    for row in range(h.rows):
        if col >= n_cols:
            break
        while True:
            nonzero = [j for j in range(col, n_cols) if h[row, j] != 0]
            if len(nonzero) <= 1:
                break
            j0 = min(nonzero, key=lambda j: (abs(h[row, j]), j))
            for j in nonzero:
                if j != j0:
                    col_sub(j, j0, h[row, j] // h[row, j0])
        nonzero = [j for j in range(col, n_cols) if h[row, j] != 0]
        if not nonzero:
            continue
        if nonzero[0] != col:
            col_swap(nonzero[0], col)
        if h[row, col] < 0:
            col_neg(col)
        pivots.append((row, col))
        col += 1

    def as_ints(mat):
        return [[int(x) for x in row] for row in mat.tolist()]

    return as_ints(h), as_ints(u), pivots

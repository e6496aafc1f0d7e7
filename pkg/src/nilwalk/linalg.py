"""Exact linear algebra over Fraction for small dense systems.

Everything here works on lists of lists of Fractions (or ints).  Matrices
are tiny (a few hundred rows at most), so plain Gaussian elimination with
exact rational arithmetic is both fast enough and free of pivoting
subtleties.
"""

from __future__ import annotations

from fractions import Fraction


def _rows_copy(rows):
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows):
    """Reduced row echelon form.

    Returns (echelon, pivots) where echelon contains the nonzero rows and
    pivots[i] is the column of the leading 1 in echelon[i].  The input is
    not modified.
    """
    m = _rows_copy(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        # find a pivot in column c at row >= r
        pivot = None
        for i in range(r, len(m)):
            if m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows):
    return len(rref(rows)[0])


def in_span(echelon, pivots, vec):
    """Whether vec lies in the row span of an rref matrix (exact)."""
    v = [Fraction(x) for x in vec]
    for row, p in zip(echelon, pivots):
        if v[p]:
            f = v[p]
            v = [a - f * b for a, b in zip(v, row)]
    return not any(v)


def left_kernel_vector(rows):
    """First nonzero vector lam with lam @ rows == 0, or None.

    Elimination tracks the row operations in an identity block, so a row
    that cancels to zero hands back the exact dependence certificate.
    """
    m = _rows_copy(rows)
    nrows = len(m)
    if nrows == 0:
        return None
    ncols = len(m[0])
    track = [[Fraction(int(i == j)) for j in range(nrows)] for i in range(nrows)]
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        track[r], track[pivot] = track[pivot], track[r]
        for i in range(r + 1, nrows):
            if m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
                track[i] = [a - f * b for a, b in zip(track[i], track[r])]
        r += 1
        if r == nrows:
            break
    for i in range(nrows):
        if not any(m[i]):
            return track[i]
    return None


def nullspace(rows):
    """Basis of the right null space {x : rows @ x == 0}."""
    if not rows:
        return []
    ncols = len(rows[0])
    echelon, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, p in zip(echelon, pivots):
            v[p] = -row[fc]
        basis.append(v)
    return basis

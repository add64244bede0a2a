"""Dense linear algebra over any :class:`~polylef.fields.Field` backend.

Matrices are 2-d numpy arrays whose dtype is the backend's ``dtype``
(``uint64`` for GF(2^k), ``int64`` for small primes, ``object`` otherwise).
Pivots are searched column by column so that pivot columns come out in
index order; cokernel representatives therefore follow the ambient basis
order, which is what makes coset bases reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Field


def as_matrix(field: Field, rows) -> np.ndarray:
    rows = [list(r) for r in rows]
    if not rows:
        return field.zeros((0, 0))
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    out = field.zeros((len(rows), ncols))
    for i, r in enumerate(rows):
        if ncols:
            out[i] = field.array(r)
    return out


def _eliminate(field: Field, a: np.ndarray, reduced: bool) -> tuple[np.ndarray, list[int]]:
    m = a.copy()
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = field.nonzero(m[r:, c])
        if not nz.any():
            continue
        cand = np.flatnonzero(nz) + r
        p = int(cand[field.choose_pivot(m[cand, c])])
        if p != r:
            m[[r, p]] = m[[p, r]]
        piv = m[r, c]
        if not (field.eq(piv, field.one)):
            m[r, c:] = field.scale(field.inv(piv), m[r, c:])
        below = field.nonzero(m[r + 1 :, c])
        targets = np.flatnonzero(below) + r + 1
        if reduced and r:
            above = np.flatnonzero(field.nonzero(m[:r, c]))
            targets = np.concatenate([above, targets])
        if targets.size:
            block = m[np.ix_(targets, np.arange(c, ncols))]
            m[np.ix_(targets, np.arange(c, ncols))] = field.arr_sub(
                block, field.outer(m[targets, c], m[r, c:])
            )
        pivots.append(c)
        r += 1
    return m, pivots


def rref(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m, pivots = _eliminate(field, a, reduced=True)
    return m[: len(pivots)], pivots


def rank(field: Field, a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = a.T
    return len(_eliminate(field, a, reduced=False)[1])


def nullspace(field: Field, a: np.ndarray) -> np.ndarray:
    """Rows spanning {x : a x = 0}, in reduced form."""
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return field.identity(ncols)
    r, pivots = rref(field, a)
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = field.zeros((len(free), ncols))
    for k, f in enumerate(free):
        out[k, f] = field.one
        for i, pc in enumerate(pivots):
            out[k, pc] = field.neg(r[i, f])
    return out


def left_nullspace(field: Field, a: np.ndarray) -> np.ndarray:
    """Rows y with y a = 0."""
    return nullspace(field, a.T.copy())


def solve(field: Field, a: np.ndarray, b) -> np.ndarray | None:
    """One solution x of a x = b, or None if inconsistent."""
    b = field.array(b) if not isinstance(b, np.ndarray) else b
    aug = field.zeros((a.shape[0], a.shape[1] + 1))
    if a.size:
        aug[:, :-1] = a
    aug[:, -1] = b
    r, pivots = rref(field, aug)
    if pivots and pivots[-1] == a.shape[1]:
        return None
    x = field.zeros((a.shape[1],))
    for i, pc in enumerate(pivots):
        x[pc] = r[i, -1]
    return x


def matmul(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    out = field.zeros((a.shape[0], b.shape[1]))
    for k in range(a.shape[1]):
        out = field.arr_add(out, field.outer(a[:, k], b[k, :]))
    return out


def matvec(field: Field, a: np.ndarray, v: np.ndarray) -> np.ndarray:
    return matmul(field, a, v.reshape(-1, 1)).reshape(-1)


@dataclass(frozen=True)
class Cokernel:
    """Quotient of k^m by the column space U of a relation matrix.

    ``basis`` lists the ambient indices chosen greedily (in index order) as
    coset representatives; ``projection`` is the s x m matrix sending each
    ambient unit vector to its coordinates in that basis.  Its kernel is U
    and its restriction to ``basis`` is the identity.
    """

    basis: tuple[int, ...]
    projection: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis)


def cokernel_basis(field: Field, relations: np.ndarray, ambient_dim: int | None = None) -> Cokernel:
    """Greedy (lowest index first) coset basis of k^m / colspace(relations).

    One elimination of the relation rows with the column order reversed: the
    pivot of each reduced row is then its highest ambient index, the
    non-pivot indices are exactly the greedy choice, and each reduced row
    expresses its pivot unit vector in terms of them.
    """
    m = relations.shape[0] if ambient_dim is None else ambient_dim
    if relations.size == 0:
        return Cokernel(tuple(range(m)), field.identity(m))
    rows = relations.T[:, ::-1].copy()
    red, piv_rev = rref(field, rows)
    pivots = {m - 1 - c for c in piv_rev}
    basis = [j for j in range(m) if j not in pivots]
    proj = field.zeros((len(basis), m))
    pos = {j: i for i, j in enumerate(basis)}
    for i, j in enumerate(basis):
        proj[i, j] = field.one
    if basis:
        cols = np.array([m - 1 - j for j in basis], dtype=np.intp)
        for r, c in enumerate(piv_rev):
            proj[:, m - 1 - c] = field.scale(field.neg(field.one), red[r, cols])
    return Cokernel(tuple(basis), proj)


def cokernel_basis_by_annihilator(field: Field, relations: np.ndarray, ambient_dim: int | None = None) -> Cokernel:
    """Same result through the reduced left nullspace; kept as a cross-check."""
    m = relations.shape[0] if ambient_dim is None else ambient_dim
    if relations.size == 0:
        return Cokernel(tuple(range(m)), field.identity(m))
    n = left_nullspace(field, relations)
    if n.shape[0] == 0:
        return Cokernel((), field.zeros((0, m)))
    proj, pivots = rref(field, n)
    return Cokernel(tuple(pivots), proj)

SMALL_DET = 6


def _det_scalar(field: Field, m: list[list]):
    """Elimination with scalar field calls; faster than array ops for tiny matrices."""
    n = len(m)
    out = field.one
    for c in range(n):
        p = next((r for r in range(c, n) if not field.is_zero(m[r][c])), None)
        if p is None:
            return field.zero
        if p != c:
            m[c], m[p] = m[p], m[c]
            out = field.neg(out)
        piv = m[c][c]
        out = field.mul(out, piv)
        inv = field.inv(piv)
        for r in range(c + 1, n):
            if field.is_zero(m[r][c]):
                continue
            f = field.mul(m[r][c], inv)
            m[r] = m[r][:c] + [field.sub(x, field.mul(f, y)) for x, y in zip(m[r][c:], m[c][c:])]
    return out


def det(field: Field, a: np.ndarray):
    """Determinant of a square matrix by elimination."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n <= SMALL_DET:
        return _det_scalar(field, [list(row) for row in a])
    m = a.copy()
    out = field.one
    for c in range(n):
        nz = np.flatnonzero(field.nonzero(m[c:, c]))
        if nz.size == 0:
            return field.zero
        p = int(nz[field.choose_pivot(m[nz + c, c])]) + c
        if p != c:
            m[[c, p]] = m[[p, c]]
            out = field.neg(out)
        piv = m[c, c]
        out = field.mul(out, piv)
        if c + 1 < n:
            f = field.scale(field.inv(piv), m[c + 1 :, c])
            m[c + 1 :, c:] = field.arr_sub(m[c + 1 :, c:], field.outer(f, m[c, c:]))
    return out

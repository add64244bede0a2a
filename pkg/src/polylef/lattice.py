"""Exact integer geometry of lattice polytopes.

A :class:`LatticePolytope` always works in coordinates of the lattice of its
own affine span: lower-dimensional input is mapped onto Z^dim by a
lattice-preserving affine chart, kept in ``embedding`` so points can be
reported in the original coordinates.  All point lists are sorted
lexicographically; downstream matrices index by that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd

import numpy as np

from . import linalg
from .fields import QQ


class PolytopeError(ValueError):
    """Invalid or degenerate polytope input."""


Point = tuple[int, ...]


# ---------------------------------------------------------------------------
# integer linear algebra


def integer_kernel(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of {x in Z^ncols : rows @ x = 0} by unimodular column operations."""
    a = [list(map(int, r)) for r in rows]
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(dst: int, src: int, q: int) -> None:
        for m in (a, u):
            for row in m:
                row[dst] -= q * row[src]

    def swap(i: int, j: int) -> None:
        for m in (a, u):
            for row in m:
                row[i], row[j] = row[j], row[i]

    r = 0
    for row in a:
        if r == ncols:
            break
        for j in range(r + 1, ncols):
            while row[j]:
                if row[r] == 0 or abs(row[j]) < abs(row[r]):
                    swap(r, j)
                    continue
                colop(j, r, row[j] // row[r])
        if row[r]:
            r += 1
    return [[u[i][j] for i in range(ncols)] for j in range(r, ncols)]


def primitive(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return [x // g for x in v] if g else list(v)


def affine_rank(points: list[Point]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    diffs = [[x - y for x, y in zip(p, base)] for p in points[1:]]
    return linalg.rank(QQ, linalg.as_matrix(QQ, diffs))


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True, order=True)
class ConeMonomial:
    """Lattice point of cone(P) at a given height (a monomial of k[P])."""

    point: Point
    height: int
    interior: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class FacetInequality:
    """``normal . x <= offset`` on P; ``normal`` is primitive."""

    normal: Point
    offset: int

    def value(self, x) -> int:
        return sum(a * b for a, b in zip(self.normal, x))


@dataclass(frozen=True)
class Face:
    vertices: frozenset[int]
    dim: int

    @property
    def rank(self) -> int:
        return self.dim + 1


@dataclass(frozen=True)
class FaceLattice:
    faces: tuple[Face, ...]

    def __len__(self):
        return len(self.faces)

    @cached_property
    def bottom(self) -> Face:
        return self.faces[0]

    @cached_property
    def top(self) -> Face:
        return self.faces[-1]

    def interval(self, lo: Face, hi: Face) -> list[Face]:
        return [f for f in self.faces if lo.vertices <= f.vertices <= hi.vertices]

    def f_vector(self) -> tuple[int, ...]:
        top = self.top.dim
        return tuple(sum(1 for f in self.faces if f.dim == k) for k in range(-1, top + 1))

    def is_eulerian(self, lo: Face, hi: Face) -> bool:
        faces = self.interval(lo, hi)
        if len(faces) < 2:
            return True
        return sum((-1) ** f.rank for f in faces) == 0


@dataclass(frozen=True)
class Embedding:
    """Affine chart ``x = origin + basis @ y`` from Z^dim into the input lattice."""

    origin: Point
    basis: tuple[Point, ...]  # columns, each of length ambient_dim

    def to_ambient(self, y) -> Point:
        out = list(self.origin)
        for coeff, col in zip(y, self.basis):
            for i, c in enumerate(col):
                out[i] += coeff * c
        return tuple(out)

    def to_ambient_cone(self, y, height: int) -> Point:
        out = [height * o for o in self.origin]
        for coeff, col in zip(y, self.basis):
            for i, c in enumerate(col):
                out[i] += coeff * c
        return tuple(out)


@dataclass(frozen=True, eq=False)
class LatticePolytope:
    name: str
    vertices: tuple[Point, ...]
    dim: int
    ambient_dim: int
    embedding: Embedding | None = None

    @classmethod
    def from_points(cls, name: str, points, dim: int | None = None) -> LatticePolytope:
        pts = sorted({tuple(int(c) for c in p) for p in points})
        if not pts:
            raise PolytopeError(f"{name}: no points")
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise PolytopeError(f"{name}: vertex rows have different lengths")
        d = affine_rank(pts)
        if dim is not None and d != dim:
            raise PolytopeError(f"{name}: points span dimension {d}, expected {dim}")
        embedding = None
        local = pts
        if d < n:
            embedding, local = _project(pts, d)
        verts = _vertices(local, d)
        return cls(name, tuple(verts), d, n, embedding)

    # -- identity
    def __hash__(self):
        return hash((self.name, self.vertices))

    def __eq__(self, other):
        return (
            isinstance(other, LatticePolytope)
            and self.vertices == other.vertices
            and self.embedding == other.embedding
        )

    def __repr__(self):
        return f"LatticePolytope({self.name!r}, dim={self.dim}, {len(self.vertices)} vertices)"

    def to_ambient(self, y, height: int = 1) -> Point:
        if self.embedding is None:
            return tuple(y)
        return self.embedding.to_ambient_cone(y, height)

    # -- geometry
    @cached_property
    def facets(self) -> tuple[FacetInequality, ...]:
        return tuple(_facets(list(self.vertices), self.dim))

    @cached_property
    def face_lattice(self) -> FaceLattice:
        return _face_lattice(self)

    def points(self, h: int) -> tuple[ConeMonomial, ...]:
        return _dilate(self, h)

    @cached_property
    def lattice_points(self) -> tuple[Point, ...]:
        return tuple(m.point for m in self.points(1))

    @cached_property
    def interior_points(self) -> tuple[Point, ...]:
        return tuple(m.point for m in self.points(1) if m.interior)

    def contains(self, x, h: int = 1) -> bool:
        return all(f.value(x) <= h * f.offset for f in self.facets)

    def is_interior(self, x, h: int = 1) -> bool:
        if h == 0:
            return False
        return all(f.value(x) < h * f.offset for f in self.facets)

    def face(self, face: Face, name: str | None = None) -> LatticePolytope:
        verts = [self.vertices[i] for i in sorted(face.vertices)]
        label = name or f"{self.name}/face{sorted(face.vertices)}"
        return LatticePolytope.from_points(label, verts)


# ---------------------------------------------------------------------------
# construction helpers


def _project(pts: list[Point], d: int) -> tuple[Embedding, list[Point]]:
    n = len(pts[0])
    base = pts[0]
    diffs = [[x - y for x, y in zip(p, base)] for p in pts[1:]]
    normals = integer_kernel(diffs, n)
    basis = integer_kernel(normals, n) if normals else [
        [int(i == j) for i in range(n)] for j in range(n)
    ]
    assert len(basis) == d
    b = linalg.as_matrix(QQ, [[basis[j][i] for j in range(d)] for i in range(n)])
    local = []
    for p in pts:
        y = linalg.solve(QQ, b, [x - o for x, o in zip(p, base)])
        if y is None or any(v.denominator != 1 for v in y):
            raise PolytopeError("point outside the saturated lattice of its span")
        local.append(tuple(int(v) for v in y))
    emb = Embedding(tuple(base), tuple(tuple(col) for col in basis))
    return emb, sorted(local)


def _facets(pts: list[Point], d: int) -> list[FacetInequality]:
    if d == 0:
        return []
    if d == 1:
        xs = [p[0] for p in pts]
        return [FacetInequality((-1,), -min(xs)), FacetInequality((1,), max(xs))]
    found: dict[tuple[Point, int], FacetInequality] = {}
    arr = np.array(pts, dtype=object)
    for subset in itertools.combinations(range(len(pts)), d):
        s0 = pts[subset[0]]
        diffs = [[x - y for x, y in zip(pts[i], s0)] for i in subset[1:]]
        ker = integer_kernel(diffs, d)
        if len(ker) != 1:
            continue
        normal = primitive(ker[0])
        offset = sum(a * b for a, b in zip(normal, s0))
        vals = arr.dot(np.array(normal, dtype=object))
        if all(v <= offset for v in vals):
            key = (tuple(normal), offset)
        elif all(v >= offset for v in vals):
            key = (tuple(-a for a in normal), -offset)
        else:
            continue
        found.setdefault(key, FacetInequality(*key))
    if len(found) < d + 1:
        raise PolytopeError("degenerate input: fewer than dim+1 facets")
    return sorted(found.values(), key=lambda f: (f.normal, f.offset))


def _vertices(pts: list[Point], d: int) -> list[Point]:
    if d == 0:
        return pts[:1]
    facets = _facets(pts, d)
    out = []
    for p in pts:
        tight = [list(f.normal) for f in facets if f.value(p) == f.offset]
        if tight and linalg.rank(QQ, linalg.as_matrix(QQ, tight)) == d:
            out.append(p)
    return out


def _face_lattice(poly: LatticePolytope) -> FaceLattice:
    verts = poly.vertices
    everything = frozenset(range(len(verts)))
    sets = {
        frozenset(i for i, v in enumerate(verts) if f.value(v) == f.offset) for f in poly.facets
    }
    frontier = set(sets)
    while frontier:
        new = set()
        for a in frontier:
            for b in sets:
                c = a & b
                if c and c not in sets:
                    new.add(c)
        sets |= new
        frontier = new
    sets.add(everything)
    faces = [Face(frozenset(), -1)]
    for s in sets:
        faces.append(Face(s, affine_rank([verts[i] for i in sorted(s)])))
    faces.sort(key=lambda f: (f.dim, sorted(f.vertices)))
    return FaceLattice(tuple(faces))


@lru_cache(maxsize=4096)
def _dilate(poly: LatticePolytope, h: int) -> tuple[ConeMonomial, ...]:
    if h < 0:
        raise ValueError("height must be nonnegative")
    d = poly.dim
    if h == 0:
        return (ConeMonomial((0,) * d, 0, False),)
    if d == 0:
        return (ConeMonomial((), h, True),)
    verts = np.array(poly.vertices, dtype=np.int64)
    lo, hi = verts.min(axis=0) * h, verts.max(axis=0) * h
    grids = np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij")
    cand = np.stack([g.ravel() for g in grids], axis=1)
    normals = np.array([f.normal for f in poly.facets], dtype=np.int64)
    offsets = np.array([f.offset for f in poly.facets], dtype=np.int64) * h
    vals = cand @ normals.T
    inside = (vals <= offsets).all(axis=1)
    strict = (vals < offsets).all(axis=1)
    out = [
        ConeMonomial(tuple(int(c) for c in row), h, bool(s))
        for row, ok, s in zip(cand, inside, strict)
        if ok
    ]
    return tuple(out)


# ---------------------------------------------------------------------------
# operations


def enumerate_dilate_points(poly: LatticePolytope, h: int) -> list[ConeMonomial]:
    return list(poly.points(h))


def facet_description(poly: LatticePolytope) -> list[FacetInequality]:
    return list(poly.facets)


def face_lattice(poly: LatticePolytope) -> FaceLattice:
    return poly.face_lattice


def _decomposes(q: Point, h: int, poly: LatticePolytope, level: set[Point]) -> bool:
    for p in poly.lattice_points:
        if tuple(a - b for a, b in zip(q, p)) in level:
            return True
    return False


def is_idp(poly: LatticePolytope) -> tuple[bool, ConeMonomial | None]:
    """IDP test up to the generation bound max(2, dim-1); returns a witness on failure."""
    top = max(2, poly.dim - 1)
    for h in range(2, top + 1):
        level = {m.point for m in poly.points(h - 1)}
        for m in poly.points(h):
            if not _decomposes(m.point, h, poly, level):
                return False, m
    return True, None


def is_reflexive(poly: LatticePolytope) -> bool:
    interior = poly.interior_points
    if poly.dim == 0 or len(interior) != 1:
        return False
    p = interior[0]
    return all(f.offset - f.value(p) == 1 for f in poly.facets)


def interior_generation_height(poly: LatticePolytope) -> int:
    """Least j such that interior cone points of height <= dim+1 are generated at height <= j."""
    d = poly.dim
    interior = {h: [m.point for m in poly.points(h) if m.interior] for h in range(1, d + 2)}
    cone = {h: {m.point for m in poly.points(h)} for h in range(0, d + 2)}
    first = min(h for h in interior if interior[h])
    for j in range(first, d + 2):
        ok = True
        for h in range(j + 1, d + 2):
            for q in interior[h]:
                if not any(
                    tuple(a - b for a, b in zip(q, g)) in cone[h - hg]
                    for hg in range(1, j + 1)
                    for g in interior[hg]
                ):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return j
    return d + 1

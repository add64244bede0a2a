"""Graded pieces of k[P], k[P, dP] and k[dP], and their generic Artinian reductions.

Monomials are cone points; the product of two monomials is the point sum.
In the boundary algebra k[dP] = k[P] / k[P, dP] a product is zero as soon as
the sum is interior, which happens exactly when the two points share no
facet cone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .fields import Field, warn_if_small
from .lattice import ConeMonomial, LatticePolytope, Point
from .polys import PolyRing2, RationalFunctionField2

EXACT_VARIABLE_CAP = 12


class Kind(str, enum.Enum):
    RING = "ring"
    RELATIVE = "relative-module"
    BOUNDARY = "boundary-complex"


class AlgebraError(ValueError):
    pass


class VariableCapExceeded(AlgebraError):
    pass


@dataclass(frozen=True)
class GradedBasis:
    kind: Kind
    height: int
    monomials: tuple[ConeMonomial, ...]

    @cached_property
    def index(self) -> dict[Point, int]:
        return {m.point: i for i, m in enumerate(self.monomials)}

    def __len__(self):
        return len(self.monomials)


def graded_basis(poly: LatticePolytope, kind: Kind | str, k: int) -> GradedBasis:
    kind = Kind(kind)
    if k < 0:
        raise ValueError("degree must be nonnegative")
    pts = poly.points(k)
    if kind is Kind.RELATIVE:
        pts = tuple(m for m in pts if m.interior)
    elif kind is Kind.BOUNDARY:
        pts = tuple(m for m in pts if not m.interior)
    return GradedBasis(kind, k, pts)


def multiply(
    poly: LatticePolytope, a: ConeMonomial, b: ConeMonomial, kind: Kind | str = Kind.RING
) -> ConeMonomial | None:
    """Product of two monomials; None is the zero of the boundary algebra."""
    kind = Kind(kind)
    h = a.height + b.height
    pt = tuple(x + y for x, y in zip(a.point, b.point))
    interior = poly.is_interior(pt, h)
    if kind is Kind.BOUNDARY and interior:
        return None
    return ConeMonomial(pt, h, interior)


# ---------------------------------------------------------------------------
# parameters


@dataclass(eq=False)
class ParameterMatrix:
    """Coefficients theta[i, p] of the linear forms theta_i = sum_p theta[i, p] x_p."""

    field: Field
    values: np.ndarray  # (dim + 1) x |P cap Lambda|
    points: tuple[Point, ...]
    backend: str  # "symbolic" or "specialized"
    seed: int | None = None
    ring: PolyRing2 | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    def column(self, p: Point) -> int:
        return self.points.index(p)

    def restrict_rows(self, n: int) -> ParameterMatrix:
        return ParameterMatrix(self.field, self.values[:n], self.points, self.backend, self.seed, self.ring)

    @classmethod
    def random(cls, poly: LatticePolytope, field: Field, seed: int) -> ParameterMatrix:
        values = specialize(field, seed, poly)
        return cls(field, values, poly.lattice_points, "specialized", seed)

    @classmethod
    def symbolic(cls, poly: LatticePolytope, allow_large: bool = False) -> ParameterMatrix:
        pts = poly.lattice_points
        nvars = (poly.dim + 1) * len(pts)
        if nvars > EXACT_VARIABLE_CAP and not allow_large:
            raise VariableCapExceeded(
                f"{poly.name}: exact mode needs {nvars} variables (cap {EXACT_VARIABLE_CAP})"
            )
        ring = PolyRing2([(i, p) for i in range(poly.dim + 1) for p in pts])
        fld = RationalFunctionField2(ring)
        values = fld.zeros((poly.dim + 1, len(pts)))
        for i in range(poly.dim + 1):
            for j, p in enumerate(pts):
                values[i, j] = fld.var((i, p))
        return cls(fld, values, pts, "symbolic", None, ring)

    def specialize(self, field: Field, seed: int) -> ParameterMatrix:
        """Specialized copy; variable (i, p) gets the same value as ``random``."""
        return ParameterMatrix(
            field, specialize(field, seed, None, self.rows, self.points), self.points, "specialized", seed
        )


def specialize(
    field: Field,
    seed: int,
    poly: LatticePolytope | None,
    rows: int | None = None,
    points: tuple[Point, ...] | None = None,
    tag: str = "theta",
) -> np.ndarray:
    """Counter-based assignment: entry (i, p) is a hash of (tag, seed, i, p).

    The value depends only on those four items, so reruns and sub-computations
    reproduce it bit for bit.
    """
    warn_if_small(field)
    if poly is not None:
        rows = poly.dim + 1 if rows is None else rows
        points = poly.lattice_points
    out = field.zeros((rows, len(points)))
    for i in range(rows):
        out[i] = field.array(field.element_from_key(tag, seed, i, p) for p in points)
    return out


def assignment(field: Field, seed: int, poly: LatticePolytope) -> dict[tuple[int, Point], object]:
    vals = specialize(field, seed, poly)
    return {
        (i, p): vals[i, j] for i in range(vals.shape[0]) for j, p in enumerate(poly.lattice_points)
    }


# ---------------------------------------------------------------------------
# linear elements


@dataclass(frozen=True, eq=False)
class LinearElement:
    """Degree-one element sum_p coeffs[p] x_p, aligned with ``points``."""

    field: Field
    points: tuple[Point, ...]
    coeffs: np.ndarray

    def support(self) -> list[Point]:
        nz = self.field.nonzero(self.coeffs)
        return [p for p, z in zip(self.points, nz) if z]


def linear_element(poly: LatticePolytope, field: Field, coefficients: dict) -> LinearElement:
    pts = poly.lattice_points
    unknown = set(coefficients) - set(pts)
    if unknown:
        raise AlgebraError(f"coefficients outside P: {sorted(unknown)}")
    coeffs = field.array(coefficients.get(p, field.zero) for p in pts)
    return LinearElement(field, pts, coeffs)


def monomial_element(poly: LatticePolytope, field: Field, p: Point) -> LinearElement:
    return linear_element(poly, field, {tuple(p): field.one})


def random_linear_element(poly: LatticePolytope, field: Field, seed: int) -> LinearElement:
    vals = specialize(field, seed, poly, rows=1, tag="ell")[0]
    return LinearElement(field, poly.lattice_points, vals)


# ---------------------------------------------------------------------------
# Artinian reductions


@dataclass(frozen=True)
class QuotientPresentation:
    ambient: GradedBasis
    relation_image: np.ndarray
    cokernel: linalg.Cokernel

    @property
    def dim(self) -> int:
        return self.cokernel.dim

    @property
    def coset_basis(self) -> tuple[int, ...]:
        return self.cokernel.basis

    @property
    def coset_monomials(self) -> list[ConeMonomial]:
        return [self.ambient.monomials[i] for i in self.cokernel.basis]

    @property
    def projection(self) -> np.ndarray:
        return self.cokernel.projection


def _shift_table(source: GradedBasis, target: GradedBasis, points: tuple[Point, ...]) -> np.ndarray:
    """S[a, j] = index of source[a] + points[j] in target, or -1."""
    table = np.full((len(source), len(points)), -1, dtype=np.intp)
    idx = target.index
    for a, m in enumerate(source.monomials):
        for j, p in enumerate(points):
            table[a, j] = idx.get(tuple(x + y for x, y in zip(m.point, p)), -1)
    return table


def relation_matrix(poly: LatticePolytope, theta: ParameterMatrix, kind: Kind, k: int) -> np.ndarray:
    fld = theta.field
    ambient = graded_basis(poly, kind, k)
    nrows = poly.dim if kind is Kind.BOUNDARY else poly.dim + 1
    if k == 0:
        return fld.zeros((len(ambient), 0))
    prev = graded_basis(poly, kind, k - 1)
    table = _shift_table(prev, ambient, theta.points)
    out = fld.zeros((len(ambient), nrows * len(prev)))
    for i in range(nrows):
        for a in range(len(prev)):
            col = i * len(prev) + a
            for j in range(len(theta.points)):
                t = table[a, j]
                if t >= 0:
                    out[t, col] = theta.values[i, j]
    return out


def artinian_reduction(
    poly: LatticePolytope, theta: ParameterMatrix, kind: Kind | str, k: int
) -> QuotientPresentation:
    """A^k of the given kind: degree-k piece modulo sum_i theta_i * (degree k-1 piece)."""
    kind = Kind(kind)
    key = ("A", kind, k)
    cached = theta._cache.get(key)
    if cached is not None:
        return cached
    ambient = graded_basis(poly, kind, k)
    rel = relation_matrix(poly, theta, kind, k)
    cok = linalg.cokernel_basis(theta.field, rel, len(ambient))
    out = QuotientPresentation(ambient, rel, cok)
    theta._cache[key] = out
    return out


def dims(poly: LatticePolytope, theta: ParameterMatrix, kind: Kind | str) -> list[int]:
    top = poly.dim + 1
    return [artinian_reduction(poly, theta, kind, k).dim for k in range(top + 1)]


# ---------------------------------------------------------------------------
# multiplication maps


def _step_kind(current: Kind, target: Kind, elem: LinearElement, poly: LatticePolytope) -> Kind:
    if current is Kind.RING and target is Kind.RELATIVE:
        interior = set(poly.interior_points)
        if not set(elem.support()) <= interior:
            raise AlgebraError("ring -> relative needs an element supported on interior points")
        return Kind.RELATIVE
    return current


def _multiply_vectors(
    poly: LatticePolytope, field: Field, vecs: np.ndarray, src: GradedBasis, dst: GradedBasis,
    elem: LinearElement,
) -> np.ndarray:
    out = field.zeros((len(dst), vecs.shape[1]))
    table = _shift_table(src, dst, elem.points)
    nz = field.nonzero(elem.coeffs)
    for j in np.flatnonzero(nz):
        valid = table[:, j] >= 0
        if not valid.any():
            continue
        targets = table[valid, j]
        block = vecs[valid]
        contrib = field.scale(elem.coeffs[j], block.reshape(-1)).reshape(block.shape)
        out[targets] = field.arr_add(out[targets], contrib)
    return out


def _include(field: Field, vecs: np.ndarray, src: GradedBasis, dst: GradedBasis) -> np.ndarray:
    out = field.zeros((len(dst), vecs.shape[1]))
    idx = dst.index
    for a, m in enumerate(src.monomials):
        out[idx[m.point]] = vecs[a]
    return out


def product_map(
    poly: LatticePolytope,
    theta: ParameterMatrix,
    kind_from: Kind | str,
    kind_to: Kind | str,
    k_from: int,
    elements: list[LinearElement],
) -> np.ndarray:
    """Matrix of multiplication by a product of linear elements between coset bases.

    Columns are indexed by the coset basis of the source piece, rows by that
    of the target piece.  The product is formed in the semigroup algebra and
    reduced once at the end.
    """
    kind_from, kind_to = Kind(kind_from), Kind(kind_to)
    allowed = {
        (Kind.RING, Kind.RING), (Kind.RELATIVE, Kind.RELATIVE), (Kind.BOUNDARY, Kind.BOUNDARY),
        (Kind.RELATIVE, Kind.RING), (Kind.RING, Kind.RELATIVE),
    }
    if (kind_from, kind_to) not in allowed:
        raise AlgebraError(f"incompatible kinds {kind_from.value} -> {kind_to.value}")
    fld = theta.field
    k_to = k_from + len(elements)
    if k_to > poly.dim + 1:
        raise AlgebraError("target degree exceeds dim + 1")
    src = artinian_reduction(poly, theta, kind_from, k_from)
    tgt = artinian_reduction(poly, theta, kind_to, k_to)
    vecs = fld.zeros((len(src.ambient), src.dim))
    for col, b in enumerate(src.coset_basis):
        vecs[b, col] = fld.one
    cur_kind, cur_basis = kind_from, src.ambient
    for h, elem in enumerate(elements):
        nxt = _step_kind(cur_kind, kind_to, elem, poly)
        nb = graded_basis(poly, nxt, k_from + h + 1)
        vecs = _multiply_vectors(poly, fld, vecs, cur_basis, nb, elem)
        cur_kind, cur_basis = nxt, nb
    if cur_kind is not kind_to:
        if (cur_kind, kind_to) != (Kind.RELATIVE, Kind.RING):
            raise AlgebraError(f"cannot land in {kind_to.value} from {kind_from.value}")
        vecs = _include(fld, vecs, cur_basis, tgt.ambient)
    if tgt.dim == 0 or vecs.shape[1] == 0:
        return fld.zeros((tgt.dim, src.dim))
    return linalg.matmul(fld, tgt.projection, vecs)


def multiplication_map(
    poly: LatticePolytope,
    theta: ParameterMatrix,
    kind_from: Kind | str,
    kind_to: Kind | str,
    k_from: int,
    element: LinearElement | None,
    power: int,
) -> np.ndarray:
    if power < 0:
        raise ValueError("power must be nonnegative")
    if power and element is None:
        raise ValueError("element required for positive powers")
    return product_map(poly, theta, kind_from, kind_to, k_from, [element] * power)


def image_dimensions(poly: LatticePolytope, field: Field, seed: int) -> list[int]:
    """dim of the image of A^k(P, dP) -> A^k(P) for k = 0..dim+1."""
    theta = ParameterMatrix.random(poly, field, seed)
    out = []
    for k in range(poly.dim + 2):
        m = multiplication_map(poly, theta, Kind.RELATIVE, Kind.RING, k, None, 0)
        out.append(linalg.rank(field, m))
    return out


def lefschetz_quotient_dims(
    poly: LatticePolytope, theta: ParameterMatrix, kind: Kind | str, ell: LinearElement
) -> list[int]:
    """Hilbert function of A / ell A for the given kind."""
    kind = Kind(kind)
    top = poly.dim if kind is Kind.BOUNDARY else poly.dim + 1
    out = []
    for k in range(top + 1):
        a = artinian_reduction(poly, theta, kind, k).dim
        if k == 0:
            out.append(a)
            continue
        m = multiplication_map(poly, theta, kind, kind, k - 1, ell, 1)
        out.append(a - linalg.rank(theta.field, m))
    return out


def face_rank_deficiencies(poly: LatticePolytope, theta: ParameterMatrix) -> list[dict]:
    """Faces on which theta restricts to fewer than dim(F) + 1 independent forms."""
    bad = []
    cols = {p: j for j, p in enumerate(theta.points)}
    for face in poly.face_lattice.faces:
        if face.dim < 0:
            continue
        pts = face_points(poly, face)
        sub = theta.values[:, [cols[p] for p in pts]]
        r = linalg.rank(theta.field, sub)
        if r < face.dim + 1:
            bad.append({"face": sorted(face.vertices), "rank": r, "needed": face.dim + 1})
    return bad


def face_points(poly: LatticePolytope, face) -> list[Point]:
    """Lattice points of P lying on the face."""
    if face.dim == poly.dim:
        return list(poly.lattice_points)
    verts = [poly.vertices[i] for i in face.vertices]
    tight = [f for f in poly.facets if all(f.value(v) == f.offset for v in verts)]
    return [p for p in poly.lattice_points if all(f.value(p) == f.offset for f in tight)]

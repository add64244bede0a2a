"""The normalized integration map deg: A^{d+1}(P, dP) -> k and the identities it satisfies.

deg is fixed up to scale as the functional vanishing on the relation image
of the top relative piece; the scale comes from a face flag
tau_0 < tau_1 < ... < tau_d = P through

    1 = sum over coherent sigma of deg(x_sigma) * det(Theta|sigma),

sigma taking one lattice point from each stratum tau_i minus tau_{i-1}.
All identity checks work at one parameter matrix, symbolic or specialized.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import (
    AlgebraError,
    Kind,
    ParameterMatrix,
    artinian_reduction,
    face_points,
)
from .lattice import Face, LatticePolytope, Point


class NormalizationDegenerate(ArithmeticError):
    """The normalizing sum vanished at this specialization; try another seed."""


class TopPieceNotOneDimensional(AlgebraError):
    pass


def _add(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def _sum_points(points, dim: int) -> Point:
    out = (0,) * dim
    for p in points:
        out = _add(out, p)
    return out


# ---------------------------------------------------------------------------
# flags and coherent sets


@dataclass(frozen=True)
class FaceFlag:
    faces: tuple[Face, ...]  # tau_0 (a vertex), ..., tau_d = P

    def label(self, poly: LatticePolytope) -> list[list[int]]:
        return [sorted(f.vertices) for f in self.faces]


def enumerate_flags(poly: LatticePolytope) -> list[FaceFlag]:
    """All complete flags, in lexicographic order of their vertex sets."""
    lattice = poly.face_lattice
    by_dim: dict[int, list[Face]] = {}
    for f in lattice.faces:
        by_dim.setdefault(f.dim, []).append(f)
    for faces in by_dim.values():
        faces.sort(key=lambda f: sorted(f.vertices))

    def extend(chain: list[Face]) -> list[list[Face]]:
        top = chain[0]
        if top.dim == 0:
            return [chain]
        out = []
        for f in by_dim.get(top.dim - 1, []):
            if f.vertices < top.vertices:
                out.extend(extend([f] + chain))
        return out

    chains = extend([lattice.top])
    chains.sort(key=lambda c: [sorted(f.vertices) for f in c])
    return [FaceFlag(tuple(c)) for c in chains]


def select_flags(poly: LatticePolytope, strategy: str = "first") -> list[FaceFlag]:
    flags = enumerate_flags(poly)
    if strategy == "first":
        return flags[:1]
    if strategy == "all":
        return flags
    if strategy.startswith("count:"):
        n = int(strategy.split(":", 1)[1])
        if n < 1:
            raise ValueError("flag count must be positive")
        return flags[:n]
    raise ValueError(f"unknown flag strategy {strategy!r}")


def flag_strata(poly: LatticePolytope, flag: FaceFlag) -> list[list[Point]]:
    out, seen = [], set()
    for face in flag.faces:
        pts = face_points(poly, face)
        out.append([p for p in pts if p not in seen])
        seen.update(pts)
    return out


def enumerate_coherent_sets(poly: LatticePolytope, flag: FaceFlag) -> list[tuple[Point, ...]]:
    strata = flag_strata(poly, flag)
    assert all(strata), "empty stratum in a face flag"
    return list(itertools.product(*strata))


# ---------------------------------------------------------------------------
# the functional


def theta_minor(theta: ParameterMatrix, cols: tuple[Point, ...]):
    key = ("minor", cols)
    if key not in theta._cache:
        idx = [theta.column(p) for p in cols]
        theta._cache[key] = linalg.det(theta.field, theta.values[:, idx])
    return theta._cache[key]


@dataclass(frozen=True, eq=False)
class DegreeFunctional:
    poly: LatticePolytope
    theta: ParameterMatrix
    flag: FaceFlag
    raw: np.ndarray  # lambda on the top relative ambient basis
    scale: object  # c
    values: np.ndarray  # lambda / c
    non_interior_sums: int = 0
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def field(self):
        return self.theta.field

    def at(self, point: Point):
        """deg of the monomial with the given point at height d+1 (0 if not interior)."""
        if not self._index:
            top = artinian_reduction(self.poly, self.theta, Kind.RELATIVE, self.poly.dim + 1)
            self._index.update(top.ambient.index)
        i = self._index.get(tuple(point))
        return self.field.zero if i is None else self.values[i]

    def of(self, points) -> object:
        """deg of the product of height-one monomials x_p over ``points``."""
        points = list(points)
        if len(points) != self.poly.dim + 1:
            raise ValueError("need d+1 factors")
        return self.at(_sum_points(points, self.poly.dim))

    def combination(self, terms: dict[Point, object]):
        f = self.field
        return f.sum(f.mul(c, self.at(p)) for p, c in terms.items())


def unnormalized_functional(poly: LatticePolytope, theta: ParameterMatrix) -> np.ndarray:
    top = artinian_reduction(poly, theta, Kind.RELATIVE, poly.dim + 1)
    if top.dim != 1:
        raise TopPieceNotOneDimensional(
            f"{poly.name}: top relative piece has dimension {top.dim} at this parameter matrix"
        )
    return top.projection[0]


def degree_functional(
    poly: LatticePolytope, theta: ParameterMatrix, flag: FaceFlag | None = None
) -> DegreeFunctional:
    flag = flag or enumerate_flags(poly)[0]
    f = theta.field
    lam = unnormalized_functional(poly, theta)
    top = artinian_reduction(poly, theta, Kind.RELATIVE, poly.dim + 1)
    index = top.ambient.index
    c, skipped = f.zero, 0
    for sigma in enumerate_coherent_sets(poly, flag):
        i = index.get(_sum_points(sigma, poly.dim))
        if i is None:
            skipped += 1
            continue
        if f.is_zero(lam[i]):
            continue
        c = f.add(c, f.mul(lam[i], theta_minor(theta, sigma)))
    if f.is_zero(c):
        raise NormalizationDegenerate(f"{poly.name}: normalizing sum vanished")
    inv = f.inv(c)
    values = f.array(f.mul(x, inv) for x in lam)
    return DegreeFunctional(poly, theta, flag, lam, c, values, skipped)


def flag_independence_check(
    poly: LatticePolytope, theta: ParameterMatrix, flags: list[FaceFlag]
) -> dict:
    if len(flags) < 2:
        raise ValueError("need at least two flags")
    funcs = [degree_functional(poly, theta, fl) for fl in flags]
    f = theta.field
    base = funcs[0].values
    mismatches = [
        sum(not f.eq(a, b) for a, b in zip(base, g.values)) for g in funcs[1:]
    ]
    return {
        "flags": [fl.label(poly) for fl in flags],
        "max_discrepancy": max(mismatches),
        "holds": not any(mismatches),
        "non_interior_sums": [g.non_interior_sums for g in funcs],
    }


# ---------------------------------------------------------------------------
# identities


@dataclass(frozen=True)
class IdentityResult:
    holds: bool | None  # None when the identity is not claimed for the input
    lhs: object = None
    rhs: object = None
    reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.holds is None


def _as_point(poly: LatticePolytope, mono, height: int) -> Point:
    """Accept a point at the given height or a sequence of ``height`` height-one points."""
    mono = tuple(mono)
    if mono and isinstance(mono[0], (tuple, list)):
        if len(mono) != height:
            raise ValueError(f"expected {height} factors")
        return _sum_points([tuple(p) for p in mono], poly.dim)
    return mono


def linear_identity_check(deg: DegreeFunctional, s: int, monomial) -> IdentityResult:
    """sum_p theta_{s,p} deg(x_I x_p) = 0 for x_I interior of degree d."""
    poly, theta, f = deg.poly, deg.theta, deg.field
    d = poly.dim
    if not 0 <= s <= d:
        raise ValueError("row index out of range")
    point = _as_point(poly, monomial, d)
    if not poly.is_interior(point, d):
        return IdentityResult(None, reason="x_I is not a monomial of the relative module")
    total = f.sum(
        f.mul(theta.values[s, j], deg.at(_add(point, p))) for j, p in enumerate(theta.points)
    )
    return IdentityResult(f.is_zero(total), total, f.zero)


def balancing_identity_check(deg: DegreeFunctional, I, J) -> IdentityResult:
    """R_{I,J} = sum_p det(Theta|J,p) deg(x_I x_p) = 0 when I meets the interior."""
    poly, theta, f = deg.poly, deg.theta, deg.field
    I, J = [tuple(p) for p in I], [tuple(p) for p in J]
    if len(I) != poly.dim or len(J) != poly.dim:
        raise ValueError("I and J need d points each")
    interior = set(poly.interior_points)
    if not any(p in interior for p in I):
        return IdentityResult(None, reason="no point of I is interior to P")
    xi = _sum_points(I, poly.dim)
    total = f.zero
    for p in theta.points:
        val = deg.at(_add(xi, p))
        if f.is_zero(val):
            continue
        total = f.add(total, f.mul(theta_minor(theta, tuple(J) + (p,)), val))
    return IdentityResult(f.is_zero(total), total, f.zero)


def product_weights(theta: ParameterMatrix) -> dict[Point, object]:
    """W(s) = sum over ordered beta with sum s of prod_i theta_{i, beta_i}.

    Equal to the ordered sum over (P cap Lambda)^{d+1}, grouped by the point sum.
    """
    f = theta.field
    dim = len(theta.points[0])
    cur = {(0,) * dim: f.one}
    for i in range(theta.rows):
        nxt: dict[Point, object] = {}
        for s, w in cur.items():
            for j, p in enumerate(theta.points):
                t = theta.values[i, j]
                if f.is_zero(t):
                    continue
                key = _add(s, p)
                nxt[key] = f.add(nxt.get(key, f.zero), f.mul(w, t))
        cur = nxt
    return cur


def _half(point: Point) -> Point | None:
    if any(x % 2 for x in point):
        return None
    return tuple(x // 2 for x in point)


def _require_char2(f) -> None:
    if f.characteristic != 2:
        raise ValueError("Parseval identities hold in characteristic 2 only")


def parseval_check(deg: DegreeFunctional, alpha) -> IdentityResult:
    """deg(x_alpha) = sum_beta deg(x_{(alpha+beta)/2})^2 prod_i theta_{i,beta_i}."""
    poly, f = deg.poly, deg.field
    _require_char2(f)
    a = _as_point(poly, alpha, poly.dim + 1)
    if not poly.is_interior(a, poly.dim + 1):
        return IdentityResult(None, reason="x_alpha is not interior")
    lhs = deg.at(a)
    rhs = f.zero
    for s, w in product_weights(deg.theta).items():
        g = _half(_add(a, s))
        if g is None:
            continue
        v = deg.at(g)
        if not f.is_zero(v):
            rhs = f.add(rhs, f.mul(f.mul(v, v), w))
    return IdentityResult(f.eq(lhs, rhs), lhs, rhs)


def parseval_brute_force(deg: DegreeFunctional, alpha) -> object:
    """Right-hand side of the disguised identity by direct ordered summation."""
    poly, theta, f = deg.poly, deg.theta, deg.field
    a = _as_point(poly, alpha, poly.dim + 1)
    rhs = f.zero
    n = len(theta.points)
    for beta in itertools.product(range(n), repeat=theta.rows):
        g = _half(_add(a, _sum_points([theta.points[j] for j in beta], poly.dim)))
        if g is None:
            continue
        v = deg.at(g)
        if f.is_zero(v):
            continue
        w = f.one
        for i, j in enumerate(beta):
            w = f.mul(w, theta.values[i, j])
        rhs = f.add(rhs, f.mul(f.mul(v, v), w))
    return rhs


def _square_of(deg: DegreeFunctional, u: dict[Point, object]):
    f = deg.field
    terms = list(u.items())
    total = f.zero
    for (a, ca), (b, cb) in itertools.product(terms, repeat=2):
        total = f.add(total, f.mul(f.mul(ca, cb), deg.at(_add(a, b))))
    return total


def parseval_revealed_check(deg: DegreeFunctional, u: dict[Point, object]) -> IdentityResult:
    """deg(u^2) = sum_beta deg(u x_{beta/2})^2 prod_i theta_{i,beta_i}, for d+1 even."""
    poly, f = deg.poly, deg.field
    _require_char2(f)
    if (poly.dim + 1) % 2:
        return IdentityResult(None, reason="d+1 is odd")
    k = (poly.dim + 1) // 2
    u = {tuple(p): c for p, c in u.items() if not f.is_zero(c)}
    for p in u:
        if not poly.contains(p, k):
            raise ValueError(f"{p} is not a cone point at height {k}")
    lhs = _square_of(deg, u)
    frobenius = f.sum(f.mul(f.mul(c, c), deg.at(_add(a, a))) for a, c in u.items())
    if not f.eq(lhs, frobenius):
        return IdentityResult(False, lhs, frobenius, reason="Frobenius expansion disagrees")
    rhs = f.zero
    for s, w in product_weights(deg.theta).items():
        g = _half(s)
        if g is None:
            continue
        v = f.sum(f.mul(c, deg.at(_add(a, g))) for a, c in u.items())
        if not f.is_zero(v):
            rhs = f.add(rhs, f.mul(f.mul(v, v), w))
    return IdentityResult(f.eq(lhs, rhs), lhs, rhs)


def differential_variables(F) -> list[tuple[int, Point]]:
    """theta_{0,f1}, theta_{1,f1}, theta_{2,f2}, theta_{3,f2}, ..."""
    out = []
    for i, p in enumerate(F):
        out += [(2 * i, tuple(p)), (2 * i + 1, tuple(p))]
    return out


def differential_identity_check(deg: DegreeFunctional, u: dict[Point, object], F) -> IdentityResult:
    """d_F deg(u^2) = deg(u x_F)^2 as rational functions in the theta variables."""
    poly, theta, f = deg.poly, deg.theta, deg.field
    if theta.backend != "symbolic":
        raise ValueError("the differential identity needs the symbolic backend")
    if poly.dim % 2 == 0:
        return IdentityResult(None, reason="dimension is even")
    k = (poly.dim + 1) // 2
    F = [tuple(p) for p in F]
    if len(F) != k or len(set(F)) != k:
        raise ValueError(f"F must be {k} distinct lattice points")
    u = {tuple(p): c for p, c in u.items() if not f.is_zero(c)}
    value = _square_of(deg, u)
    for var in differential_variables(F):
        value = value.derivative(var)
    xf = _sum_points(F, poly.dim)
    v = f.sum(f.mul(c, deg.at(_add(a, xf))) for a, c in u.items())
    rhs = f.mul(v, v)
    return IdentityResult(f.eq(value, rhs), value, rhs)

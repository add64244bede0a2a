"""Ehrhart counts, h*-vectors, toric g-polynomials and local h*.

Polynomials are plain coefficient lists, constant term first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .lattice import Face, FaceLattice, LatticePolytope


class NotEulerianError(ValueError):
    pass


@dataclass(frozen=True)
class HStarData:
    h_star: tuple[int, ...]
    counts: tuple[int, ...]  # L(0), ..., L(d+1)

    @property
    def degree(self) -> int:
        nz = [i for i, c in enumerate(self.h_star) if c]
        return nz[-1] if nz else -1

    @property
    def volume(self) -> int:
        """Normalized volume, the sum of the h*-coefficients."""
        return sum(self.h_star)


@dataclass
class LocalHStarData:
    ell_star: tuple[int, ...]
    per_face: dict[frozenset, tuple[int, ...]] = field(default_factory=dict, repr=False)


def _transform(counts: list[int], exponent: int, length: int) -> list[int]:
    """Coefficients of (1-t)^exponent * sum_i counts[i] t^i, truncated."""
    return [
        sum((-1) ** (j - i) * comb(exponent, j - i) * counts[i] for i in range(j + 1))
        for j in range(length)
    ]


def ehrhart_counts(poly: LatticePolytope, upto: int) -> list[int]:
    return [len(poly.points(i)) for i in range(upto + 1)]


def hstar(poly: LatticePolytope) -> HStarData:
    d = poly.dim
    counts = ehrhart_counts(poly, d + 1)
    h = _transform(counts, d + 1, d + 2)
    if h[d + 1] != 0:
        raise AssertionError(f"{poly.name}: Ehrhart transform left a degree-{d + 1} term")
    return HStarData(tuple(h[: d + 1]), tuple(counts))


def boundary_counts(poly: LatticePolytope, upto: int) -> list[int]:
    return [1] + [sum(1 for m in poly.points(i) if not m.interior) for i in range(1, upto + 1)]


def boundary_hstar(poly: LatticePolytope) -> HStarData:
    """h* of the boundary complex (Stapledon's a-polynomial)."""
    d = poly.dim
    counts = boundary_counts(poly, d + 1)
    h = _transform(counts, d, d + 2)
    if any(h[d + 1 :]):
        raise AssertionError(f"{poly.name}: boundary transform has degree > {d}")
    return HStarData(tuple(h[: d + 1]), tuple(counts))


def ehrhart_polynomial(counts: list[int], degree: int) -> list[Fraction]:
    """Coefficients of the interpolating polynomial through (i, counts[i]), i <= degree."""
    xs = list(range(degree + 1))
    coeffs = [Fraction(0)] * (degree + 1)
    for i in xs:
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in xs:
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= j * basis[k + 1]
            denom *= i - j
        for k, c in enumerate(basis):
            coeffs[k] += counts[i] * c / denom
    return coeffs


def eval_poly(coeffs, x):
    return sum(c * x**k for k, c in enumerate(coeffs))


# ---------------------------------------------------------------------------
# toric g


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _trim(a: list[int]) -> list[int]:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


class ToricPolynomials:
    """Toric f- and g-polynomials of intervals of one face lattice, memoized."""

    def __init__(self, lattice: FaceLattice):
        self.lattice = lattice
        self._g: dict[tuple[frozenset, frozenset], list[int]] = {}

    def g(self, lo: Face, hi: Face) -> list[int]:
        key = (lo.vertices, hi.vertices)
        if key in self._g:
            return self._g[key]
        r = hi.rank - lo.rank
        if r == 0:
            out = [1]
        else:
            if not self.lattice.is_eulerian(lo, hi):
                raise NotEulerianError(f"interval of rank {r} is not Eulerian")
            f = self.f(lo, hi)
            m = (r - 1) // 2
            f = f + [0] * (m + 1 - len(f))
            out = [f[0]] + [f[i] - f[i - 1] for i in range(1, m + 1)]
        self._g[key] = _trim(out)
        return self._g[key]

    def f(self, lo: Face, hi: Face) -> list[int]:
        r = hi.rank - lo.rank
        if r == 0:
            return [1]
        total = [0]
        for x in self.lattice.interval(lo, hi):
            if x.vertices == hi.vertices and x.dim == hi.dim:
                continue
            term = self.g(lo, x)
            for _ in range(r - 1 - (x.rank - lo.rank)):
                term = _poly_mul(term, [-1, 1])
            total = _poly_add(total, term)
        return total + [0] * (r - len(total))


def toric_g(lattice: FaceLattice, lo: Face, hi: Face) -> list[int]:
    return ToricPolynomials(lattice).g(lo, hi)


# ---------------------------------------------------------------------------
# local h*


def local_hstar(poly: LatticePolytope) -> LocalHStarData:
    """Invert h*_F = sum_{G <= F} l*_G g([G, F]) over the face lattice."""
    lattice = poly.face_lattice
    toric = ToricPolynomials(lattice)
    memo: dict[frozenset, list[int]] = {}
    for face in lattice.faces:  # sorted by dimension
        if face.dim < 0:
            memo[face.vertices] = [1]
            continue
        h = list(hstar(poly.face(face)).h_star)
        acc = h + [0] * (face.dim + 2 - len(h))
        for sub in lattice.faces:
            if sub.dim >= face.dim or not sub.vertices <= face.vertices:
                continue
            term = _poly_mul(memo[sub.vertices], toric.g(sub, face))
            for i, c in enumerate(term):
                acc[i] -= c
        memo[face.vertices] = acc[: face.dim + 2]
    top = lattice.top
    ell = memo[top.vertices]
    ell = ell + [0] * (poly.dim + 2 - len(ell))
    return LocalHStarData(tuple(ell), {k: tuple(v) for k, v in memo.items()})


def stanley_sum(poly: LatticePolytope, data: LocalHStarData | None = None) -> list[int]:
    """sum over all faces F of l*_F * g([F, P]); equals h*_P."""
    data = data or local_hstar(poly)
    lattice = poly.face_lattice
    toric = ToricPolynomials(lattice)
    total = [0] * (poly.dim + 2)
    for face in lattice.faces:
        term = _poly_mul(list(data.per_face[face.vertices]), toric.g(face, lattice.top))
        total = _poly_add(total, term)
    return total[: poly.dim + 2]


def g_star_boundary(poly: LatticePolytope) -> list[int]:
    """g*_k = a_k - a_{k-1} for k <= floor(d/2), zero beyond; length d+2."""
    a = boundary_hstar(poly).h_star
    d = poly.dim
    out = [0] * (d + 2)
    for k in range(d // 2 + 1):
        out[k] = a[k] - (a[k - 1] if k else 0)
    return out


def h_minus_g(poly: LatticePolytope) -> list[int]:
    h = list(hstar(poly).h_star) + [0]
    g = g_star_boundary(poly)
    return [x - y for x, y in zip(h, g)]


def ell_equals_h_minus_g_check(poly: LatticePolytope, field=None, seed: int = 0) -> dict:
    """Compare l* from the recursion, from h* - g*, and (IDP only) algebraically.

    The algebraic side is the dimension of the image of A(P, dP) -> A(P) in
    each degree at one random specialization.
    """
    recursion = list(local_hstar(poly).ell_star)
    difference = h_minus_g(poly)
    out = {"recursion": recursion, "h_minus_g": difference, "algebraic": None}
    from .lattice import is_idp

    if is_idp(poly)[0]:
        from .algebra import image_dimensions
        from .fields import gf2k_field

        out["algebraic"] = image_dimensions(poly, field or gf2k_field(32), seed)
    agree = recursion == difference and (out["algebraic"] in (None, recursion))
    out["agree"] = agree
    return out


# ---------------------------------------------------------------------------
# numeric criteria


def macaulay_representation(a: int, i: int) -> list[tuple[int, int]]:
    """Greedy i-binomial expansion a = C(k_i, i) + C(k_{i-1}, i-1) + ..."""
    out = []
    while a > 0 and i > 0:
        k = i
        while comb(k + 1, i) <= a:
            k += 1
        out.append((k, i))
        a -= comb(k, i)
        i -= 1
    return out


def macaulay_bound(a: int, i: int) -> int:
    """a^<i>, the largest value allowed after a in degree i."""
    return sum(comb(k + 1, j + 1) for k, j in macaulay_representation(a, i))


def macaulay_check(v) -> bool:
    """True iff v is an O-sequence (the Hilbert function of a standard graded algebra)."""
    v = list(v)
    if not v or not any(v):
        return True
    if v[0] != 1 or any(x < 0 for x in v):
        return False
    for i in range(1, len(v) - 1):
        if v[i + 1] > macaulay_bound(v[i], i):
            return False
    return True


def eisenbud_harris_check(h) -> bool:
    """h_0 + ... + h_k <= h_s + ... + h_{s-k} for all k <= s, s = deg h."""
    h = list(h.h_star if isinstance(h, HStarData) else h)
    nz = [i for i, c in enumerate(h) if c]
    if not nz:
        return True
    s = nz[-1]
    return all(sum(h[: k + 1]) <= sum(h[s - k : s + 1]) for k in range(s + 1))


def is_unimodal(v) -> bool:
    v = list(v)
    i = 0
    while i + 1 < len(v) and v[i] <= v[i + 1]:
        i += 1
    while i + 1 < len(v) and v[i] >= v[i + 1]:
        i += 1
    return i == len(v) - 1


def is_palindromic(v) -> bool:
    v = list(v)
    return v == v[::-1]

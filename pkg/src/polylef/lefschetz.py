"""Rank-level checks of the Lefschetz and anisotropy statements.

Each check runs at one specialization (Theta, ell) and returns the ranks it
saw; the ``*_report`` wrappers loop over seeds and attach a status.  A full
rank found at a specialization is a certificate for the generic Artinian
reduction, since ranks can only drop under specialization.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from . import ehrhart, linalg
from .algebra import (
    Kind,
    ParameterMatrix,
    VariableCapExceeded,
    artinian_reduction,
    lefschetz_quotient_dims,
    monomial_element,
    multiplication_map,
    product_map,
    random_linear_element,
)
from .fields import Field, gf2k_field
from .integration import degree_functional
from .lattice import LatticePolytope, interior_generation_height, is_idp, is_reflexive
from .polys import RationalFn2, RationalFunctionField2, square_free_split
from .reports import Status, VerificationReport, failure_bound, skipped

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankCheck:
    name: str
    k: int
    shape: tuple[int, int]
    rank: int
    expected: int
    witness: list | None = None

    @property
    def ok(self) -> bool:
        return self.rank == self.expected

    def to_json(self) -> dict:
        out = {"map": self.name, "k": self.k, "shape": list(self.shape), "rank": self.rank,
               "expected": self.expected}
        if self.witness is not None:
            out["kernel_vector"] = self.witness
        return out


def _rank_check(name: str, k: int, field: Field, m: np.ndarray, expected: int) -> RankCheck:
    r = linalg.rank(field, m) if m.size else 0
    witness = None
    if r < expected and m.shape[1]:
        null = linalg.nullspace(field, m)
        if null.shape[0]:
            witness = [field.to_json(x) for x in null[0]]
    return RankCheck(name, k, tuple(m.shape), r, expected, witness)


def _idp_gate(poly: LatticePolytope, claim: str) -> VerificationReport | None:
    ok, witness = is_idp(poly)
    if not ok:
        return skipped(
            claim, poly.name, "not IDP",
            witness={"point": list(witness.point), "height": witness.height},
        )
    return None


# ---------------------------------------------------------------------------
# single specializations


def relative_lefschetz_check(
    poly: LatticePolytope, theta: ParameterMatrix, ell, k: int
) -> RankCheck:
    """ell^{d+1-2k}: A^k(P, dP) -> A^{d+1-k}(P) is bijective."""
    d = poly.dim
    if not 0 <= 2 * k <= d + 1:
        raise ValueError("need 0 <= k <= (d+1)/2")
    m = multiplication_map(poly, theta, Kind.RELATIVE, Kind.RING, k, ell, d + 1 - 2 * k)
    if m.shape[0] != m.shape[1]:
        raise AssertionError(
            f"{poly.name}: dim A^{k}(P,dP) = {m.shape[1]} but dim A^{d + 1 - k}(P) = {m.shape[0]}"
        )
    return _rank_check("relative", k, theta.field, m, m.shape[0])


def reflexive_lefschetz_check(
    poly: LatticePolytope, theta: ParameterMatrix, ell, k: int
) -> list[RankCheck]:
    """x_p: A^k(P) -> A^{k+1}(P, dP), then ell^{d-2k-1} into A^{d-k}(P).

    Also compares the composition with the map of the product x_p ell^{d-2k-1}
    and checks ell^{d-2k} directly.
    """
    d, f = poly.dim, theta.field
    if not 0 <= 2 * k <= d:
        raise ValueError("need 0 <= k <= d/2")
    (p,) = poly.interior_points
    xp = monomial_element(poly, f, p)
    shift = multiplication_map(poly, theta, Kind.RING, Kind.RELATIVE, k, xp, 1)
    checks = [_rank_check("x_p", k, f, shift, max(shift.shape))]
    if shift.shape[0] != shift.shape[1]:
        checks[-1] = RankCheck("x_p", k, tuple(shift.shape), checks[-1].rank, -1)
        return checks
    hk = shift.shape[1]
    if d - 2 * k - 1 >= 0:
        tail = multiplication_map(poly, theta, Kind.RELATIVE, Kind.RING, k + 1, ell, d - 2 * k - 1)
        comp = linalg.matmul(f, tail, shift) if hk else tail[:, :0]
        checks.append(_rank_check("composition", k, f, comp, hk))
        direct = product_map(poly, theta, Kind.RING, Kind.RING, k, [xp] + [ell] * (d - 2 * k - 1))
        same = bool((f.nonzero(f.arr_sub(direct, comp)) == 0).all()) if comp.size else True
        checks.append(RankCheck("associativity", k, tuple(comp.shape), int(same), 1))
    lpow = multiplication_map(poly, theta, Kind.RING, Kind.RING, k, ell, d - 2 * k)
    checks.append(_rank_check("ell_power", k, f, lpow, min(lpow.shape)))
    return checks


def boundary_sphere_lefschetz_check(
    poly: LatticePolytope, theta: ParameterMatrix, ell, k: int
) -> RankCheck:
    """ell^{d-2k}: A^k(dP) -> A^{d-k}(dP) is bijective (rows 0..d-1 of Theta)."""
    d = poly.dim
    if not 0 <= 2 * k <= d:
        raise ValueError("need 0 <= k <= d/2")
    m = multiplication_map(poly, theta, Kind.BOUNDARY, Kind.BOUNDARY, k, ell, d - 2 * k)
    return _rank_check("boundary", k, theta.field, m, max(m.shape))


# ---------------------------------------------------------------------------
# anisotropy


def _middle_degree(poly: LatticePolytope) -> int | None:
    return (poly.dim + 1) // 2 if (poly.dim + 1) % 2 == 0 else None


def anisotropy_direct(poly: LatticePolytope, k: int | None = None, allow_large: bool = False,
                      eval_seeds: int = 3) -> VerificationReport:
    """Exact anisotropy in the middle degree over GF(2)(theta).

    In characteristic 2, u = sum_a lambda_a x_a has deg(u^2) = sum_a lambda_a^2 deg(x_a^2),
    so anisotropy says the values deg(x_a^2) are independent over the subfield
    of squares.  Writing each value as a combination of square-free monomials
    with coefficients in the squares turns this into a rank question over
    GF(2)(y), y = theta^2.  Full rank at a point of GF(2^32) certifies it.
    """
    claim = "anisotropy"
    mid = _middle_degree(poly)
    if mid is None or (k is not None and k != mid):
        return skipped(claim, poly.name, "only the middle degree 2k = d+1 is checked")
    k = mid
    gate = _idp_gate(poly, claim)
    if gate:
        return gate
    try:
        theta = ParameterMatrix.symbolic(poly, allow_large=allow_large)
    except VariableCapExceeded as exc:
        return skipped(claim, poly.name, f"{exc}; use the duality check", backend="symbolic")
    piece = artinian_reduction(poly, theta, Kind.RELATIVE, k)
    base = dict(claim=claim, polytope=poly.name, backend="symbolic GF(2)(theta)", degrees=[k])
    if piece.dim == 0:
        return VerificationReport(status=Status.VERIFIED_EXACT, reason="A^k(P,dP) = 0, vacuous", **base)
    deg = degree_functional(poly, theta)
    rows = []
    for m in piece.coset_monomials:
        val = deg.at(tuple(2 * x for x in m.point))
        rows.append(square_free_split(val.num * val.den_poly()))
    keys = sorted(set().union(*rows), reverse=True)
    ring = theta.ring
    poly_rows = [[r.get(e, ring.zero()) for e in keys] for r in rows]
    big = gf2k_field(32)
    for s in range(eval_seeds):
        point = [big.element_from_key("anisotropy-eval", s, i) for i in range(ring.nvars)]
        mat = linalg.as_matrix(big, [[p.evaluate(big, point) for p in row] for row in poly_rows])
        r = linalg.rank(big, mat)
        if r == piece.dim:
            return VerificationReport(
                status=Status.VERIFIED_EXACT,
                ranks=[{"map": "square-coordinates", "k": k, "shape": [piece.dim, len(keys)],
                        "rank": r, "expected": piece.dim, "certified_by": f"evaluation seed {s}"}],
                **base,
            )
    # evaluation inconclusive: eliminate over GF(2)(y) itself
    fld = RationalFunctionField2(ring)
    mat = linalg.as_matrix(fld, [[RationalFn2(p) for p in row] for row in poly_rows])
    r = linalg.rank(fld, mat)
    ranks = [{"map": "square-coordinates", "k": k, "shape": [piece.dim, len(keys)], "rank": r,
              "expected": piece.dim, "certified_by": "exact elimination"}]
    if r == piece.dim:
        return VerificationReport(status=Status.VERIFIED_EXACT, ranks=ranks, **base)
    null = linalg.left_nullspace(fld, mat)
    witness = {"coset_basis": [list(m.point) for m in piece.coset_monomials],
               "square_root_coefficients": [repr(x) for x in null[0]]}
    return VerificationReport(status=Status.REFUTED, ranks=ranks, witness=witness, **base)


def pairing_matrix(poly: LatticePolytope, theta: ParameterMatrix, k: int) -> np.ndarray:
    """M[a, F] = deg(x_a x_F): a over the coset basis of A^k(P, dP), F over k-subsets."""
    deg = degree_functional(poly, theta)
    piece = artinian_reduction(poly, theta, Kind.RELATIVE, k)
    subsets = list(itertools.combinations(poly.lattice_points, k))
    f = theta.field
    m = f.zeros((piece.dim, len(subsets)))
    for i, a in enumerate(piece.coset_monomials):
        for j, F in enumerate(subsets):
            pt = a.point
            for q in F:
                pt = tuple(x + y for x, y in zip(pt, q))
            m[i, j] = deg.at(pt)
    return m


def anisotropy_via_duality(
    poly: LatticePolytope, field: Field, seeds, k: int | None = None
) -> VerificationReport:
    claim = "anisotropy"
    seeds = list(seeds)
    mid = _middle_degree(poly)
    if mid is None or (k is not None and k != mid):
        return skipped(claim, poly.name, "only the middle degree 2k = d+1 is checked")
    k = mid
    gate = _idp_gate(poly, claim)
    if gate:
        return gate
    ranks, bad = [], []
    for s in seeds:
        theta = ParameterMatrix.random(poly, field, s)
        m = pairing_matrix(poly, theta, k)
        rc = _rank_check("pairing", k, field, m.T.copy(), m.shape[0])
        ranks.append({**rc.to_json(), "seed": s})
        if not rc.ok:
            bad.append(s)
    base = dict(claim=claim, polytope=poly.name, backend=field.name, seeds=seeds, trials=len(seeds),
                degrees=[k], ranks=ranks)
    if len(bad) == len(seeds):
        return VerificationReport(status=Status.REFUTED, witness={"seeds": bad}, **base,
                                  reason="pairing rank-deficient at every seed")
    return VerificationReport(
        status=Status.VERIFIED_PROBABILISTIC,
        bound=failure_bound(field, poly.dim, len(seeds) - len(bad)),
        details={"inference": "full row rank of deg(x_a x_F) at a specialization gives a nonzero "
                 "pairing generically; the differential identity then makes deg(u^2) nonzero"},
        **base,
    )


# ---------------------------------------------------------------------------
# reports over seeds


def _seeded(poly, field, seed):
    return ParameterMatrix.random(poly, field, seed), random_linear_element(poly, field, seed)


def _collect(claim, poly, field, seeds, checks_by_seed, degrees, details=None) -> VerificationReport:
    ranks, failed = [], None
    for s, checks in checks_by_seed:
        for c in checks:
            ranks.append({**c.to_json(), "seed": s})
            if not c.ok and failed is None:
                failed = {"seed": s, **c.to_json()}
    base = dict(claim=claim, polytope=poly.name, backend=field.name, seeds=list(seeds),
                trials=len(seeds), degrees=degrees, ranks=ranks, details=details or {})
    if failed:
        return VerificationReport(status=Status.REFUTED, witness=failed, **base)
    return VerificationReport(status=Status.VERIFIED_PROBABILISTIC,
                              bound=failure_bound(field, poly.dim, len(seeds)), **base)


def relative_lefschetz_report(poly, field, seeds) -> VerificationReport:
    gate = _idp_gate(poly, "relative-lefschetz")
    if gate:
        return gate
    # k = 0 is vacuous: A^0(P, dP) = 0 = A^{d+1}(P)
    degrees = list(range(1, (poly.dim + 1) // 2 + 1))
    runs = []
    for s in seeds:
        theta, ell = _seeded(poly, field, s)
        runs.append((s, [relative_lefschetz_check(poly, theta, ell, k) for k in degrees]))
    return _collect("relative-lefschetz", poly, field, seeds, runs, degrees)


def reflexive_lefschetz_report(poly, field, seeds) -> VerificationReport:
    gate = _idp_gate(poly, "lefschetz")
    if gate:
        return gate
    if not is_reflexive(poly):
        return skipped("lefschetz", poly.name, "not reflexive")
    degrees = list(range(poly.dim // 2 + 1))
    runs = []
    for s in seeds:
        theta, ell = _seeded(poly, field, s)
        runs.append((s, [c for k in degrees for c in reflexive_lefschetz_check(poly, theta, ell, k)]))
    return _collect("lefschetz", poly, field, seeds, runs, degrees)


def boundary_sphere_lefschetz_report(poly, field, seeds) -> VerificationReport:
    claim = "boundary-lefschetz"
    if poly.dim < 1:
        return skipped(claim, poly.name, "boundary of a point")
    for face in poly.face_lattice.faces:
        if face.dim == poly.dim - 1:
            ok, w = is_idp(poly.face(face))
            if not ok:
                return skipped(claim, poly.name, "facet not IDP",
                               witness={"facet": sorted(face.vertices), "height": w.height})
    degrees = list(range(poly.dim // 2 + 1))
    expected_g = ehrhart.g_star_boundary(poly)[: poly.dim + 1]
    a = list(ehrhart.boundary_hstar(poly).h_star)
    runs, quotients = [], []
    for s in seeds:
        theta, ell = _seeded(poly, field, s)
        checks = [boundary_sphere_lefschetz_check(poly, theta, ell, k) for k in degrees]
        dims = [artinian_reduction(poly, theta, Kind.BOUNDARY, k).dim for k in range(poly.dim + 1)]
        checks.append(RankCheck("hilbert_function", -1, (len(dims), 1), int(dims == a), 1))
        q = lefschetz_quotient_dims(poly, theta, Kind.BOUNDARY, ell)
        quotients.append(q)
        checks.append(RankCheck("quotient_vs_g_star", -1, (len(q), 1), int(q == expected_g), 1))
        runs.append((s, checks))
    return _collect(claim, poly, field, seeds, runs, degrees,
                    {"a_polynomial": a, "g_star": expected_g, "quotient_dims": quotients[0] if quotients else []})


# ---------------------------------------------------------------------------
# numeric corollaries


def corollary_checks(poly: LatticePolytope) -> dict:
    """Numeric consequences of the Lefschetz statements, with their hypotheses."""
    h = list(ehrhart.hstar(poly).h_star)
    d = poly.dim
    hh = h + [0]  # h_{d+1} = 0
    idp = is_idp(poly)[0]
    refl = is_reflexive(poly)
    j = interior_generation_height(poly)
    a = list(ehrhart.boundary_hstar(poly).h_star)
    top = -(-(d - j) // 2) if d >= j else 0  # ceil((d-j)/2)
    checks = {
        # as stated: h_{floor(d/2)} >= ... >= h_d
        "second_half_decreasing": all(h[i] >= h[i + 1] for i in range(d // 2, d)),
        # what the surjections A^{d-k} -> A^{d+1-k}, k <= floor(d/2), give
        "second_half_decreasing_from_surjections": all(
            h[i] >= h[i + 1] for i in range(d - d // 2, d)
        ),
        "h_k_ge_h_d1k": all(hh[k] >= hh[d + 1 - k] for k in range((d + 1) // 2 + 1)),
        "initial_increasing": all(h[i] <= h[i + 1] for i in range(top)),
        "h_k_le_h_d1jk": all(
            hh[k] <= (hh[d + 1 - j - k] if 0 <= d + 1 - j - k <= d + 1 else 0) for k in range(top + 1)
        ),
        "a_unimodal": ehrhart.is_unimodal(a),
        "unimodal": ehrhart.is_unimodal(h),
        "symmetric": ehrhart.is_palindromic(h),
        "m_vector": ehrhart.macaulay_check(m_vector(h)),
        "eisenbud_harris": ehrhart.eisenbud_harris_check(h),
    }
    hypotheses = {
        "second_half_decreasing": idp, "second_half_decreasing_from_surjections": idp,
        "h_k_ge_h_d1k": idp, "initial_increasing": idp,
        "h_k_le_h_d1jk": idp, "a_unimodal": idp, "unimodal": idp and refl,
        "symmetric": refl, "m_vector": idp and refl, "eisenbud_harris": True,
    }
    return {"h_star": h, "a_polynomial": a, "idp": idp, "reflexive": refl, "j": j,
            "checks": checks, "hypotheses": hypotheses}


def m_vector(h) -> list[int]:
    """(h_0, h_1 - h_0, ..., h_m - h_{m-1}) with m = floor(d/2)."""
    h = list(h)
    d = len(h) - 1
    return [h[0]] + [h[i] - h[i - 1] for i in range(1, d // 2 + 1)]


def corollary_suite(poly: LatticePolytope, field: Field | None = None, seeds=()) -> VerificationReport:
    data = corollary_checks(poly)
    checks, hyp = data["checks"], data["hypotheses"]
    failures = [n for n, ok in checks.items() if hyp[n] and not ok]
    outside = [n for n, ok in checks.items() if not hyp[n] and not ok]
    details = dict(data)
    details["outside_hypothesis"] = outside
    if outside:
        details["note"] = "failures outside the hypotheses are expected and not refutations"
    seeds = list(seeds)
    if field is not None and seeds and data["idp"] and data["reflexive"]:
        theta, ell = _seeded(poly, field, seeds[0])
        q = lefschetz_quotient_dims(poly, theta, Kind.RING, ell)
        mv = m_vector(data["h_star"])
        details["quotient_dims"] = q
        if q[: len(mv)] != mv or any(q[len(mv):]):
            failures.append("m_vector_algebraic")
    status = Status.REFUTED if failures else Status.VERIFIED_EXACT
    return VerificationReport(
        "corollaries", poly.name, status, backend="integer", seeds=seeds[:1],
        witness={"failed": failures} if failures else None, details=details,
    )


def local_hstar_report(poly: LatticePolytope, field: Field, seeds) -> VerificationReport:
    seeds = list(seeds)
    idp = is_idp(poly)[0]
    recursion = list(ehrhart.local_hstar(poly).ell_star)
    difference = ehrhart.h_minus_g(poly)
    algebraic = []
    if idp:
        from .algebra import image_dimensions

        algebraic = [image_dimensions(poly, field, s) for s in seeds]
    agree = recursion == difference and all(a == recursion for a in algebraic)
    d = poly.dim
    half = (d + 2) // 2  # ceil((d+1)/2)
    unimodal = all(recursion[i] <= recursion[i + 1] for i in range(1, half))
    details = {"recursion": recursion, "h_minus_g": difference, "algebraic": algebraic,
               "palindromic": recursion == recursion[::-1], "unimodal": unimodal,
               "algebraic_matches_h_minus_g": all(a == difference for a in algebraic)}
    if not details["palindromic"]:
        log.warning("%s: local h* is not palindromic", poly.name)
    base = dict(claim="local-hstar", polytope=poly.name, backend=field.name if idp else "integer",
                seeds=seeds if idp else [], trials=len(seeds) if idp else 0, details=details)
    if not agree or (idp and not unimodal):
        which = []
        if recursion != difference:
            which.append("recursion != h*-g*")
        if any(a != recursion for a in algebraic):
            which.append("recursion != image dimensions")
        if idp and not unimodal:
            which.append("not unimodal")
        return VerificationReport(status=Status.REFUTED, witness={"disagreement": which}, **base)
    if not idp:
        return VerificationReport(status=Status.VERIFIED_EXACT,
                                  reason="not IDP: combinatorial sides only", **base)
    return VerificationReport(status=Status.VERIFIED_PROBABILISTIC,
                              bound=failure_bound(field, d, len(seeds)), **base)

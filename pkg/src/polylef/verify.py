"""Claim dispatch: one VerificationReport per (claim, polytope, run configuration)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import lefschetz
from .algebra import Kind, ParameterMatrix, VariableCapExceeded, artinian_reduction
from .fields import Field, gf2k_field, prime_field
from .integration import (
    NormalizationDegenerate,
    TopPieceNotOneDimensional,
    balancing_identity_check,
    degree_functional,
    differential_identity_check,
    enumerate_flags,
    flag_independence_check,
    linear_identity_check,
    parseval_check,
    parseval_revealed_check,
    select_flags,
)
from .lattice import LatticePolytope, is_idp
from .reports import Status, VerificationReport, failure_bound, skipped

CLAIMS = (
    "lefschetz",
    "relative-lefschetz",
    "boundary-lefschetz",
    "anisotropy",
    "parseval",
    "parseval-revealed",
    "balancing",
    "linear",
    "differential",
    "flag-independence",
    "corollaries",
    "local-hstar",
)

RANK_CLAIMS = {"lefschetz", "relative-lefschetz", "boundary-lefschetz", "local-hstar"}
BALANCING_PAIR_CAP = 400


@dataclass(frozen=True)
class RunConfig:
    mode: str = "random"  # or "exact"
    char: int = 2
    field_bits: int = 32
    seed: int = 0
    trials: int = 5
    flag_strategy: str = "first"
    allow_large: bool = False

    def __post_init__(self):
        if self.mode not in ("random", "exact"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.mode == "exact" and self.char != 2:
            raise ValueError("exact mode works over GF(2)(theta) only")

    @property
    def seeds(self) -> list[int]:
        return list(range(self.seed, self.seed + self.trials))

    def field(self) -> Field:
        if self.char == 2:
            return gf2k_field(self.field_bits)
        return prime_field(self.char)

    def to_json(self) -> dict:
        return {"mode": self.mode, "char": self.char, "field_bits": self.field_bits,
                "seed": self.seed, "trials": self.trials, "flag_strategy": self.flag_strategy}


# ---------------------------------------------------------------------------
# identity claims


def _thetas(poly: LatticePolytope, cfg: RunConfig):
    """(label, Theta) pairs: one symbolic matrix in exact mode, one per seed otherwise."""
    if cfg.mode == "exact":
        return [(None, ParameterMatrix.symbolic(poly, allow_large=cfg.allow_large))]
    fld = cfg.field()
    return [(s, ParameterMatrix.random(poly, fld, s)) for s in cfg.seeds]


def _interior(poly: LatticePolytope, h: int):
    return [m.point for m in poly.points(h) if m.interior]


def _linear_cases(poly, deg, seed):
    for s in range(poly.dim + 1):
        for pt in _interior(poly, poly.dim):
            yield {"row": s, "x_I": list(pt)}, linear_identity_check(deg, s, pt)


def _balancing_pairs(poly: LatticePolytope):
    pts = poly.lattice_points
    inner = poly.interior_points
    d = poly.dim
    Is = [(q,) + rest for q in inner for rest in itertools.combinations_with_replacement(pts, d - 1)]
    Js = list(itertools.combinations_with_replacement(pts, d))
    return list(itertools.islice(itertools.product(Is, Js), BALANCING_PAIR_CAP))


def _balancing_cases(poly, deg, seed):
    for I, J in _balancing_pairs(poly):
        yield {"I": [list(p) for p in I], "J": [list(p) for p in J]}, balancing_identity_check(deg, I, J)


def _parseval_cases(poly, deg, seed):
    for pt in _interior(poly, poly.dim + 1):
        yield {"alpha": list(pt)}, parseval_check(deg, pt)


def _revealed_cases(poly, deg, seed):
    f = deg.field
    k = (poly.dim + 1) // 2
    mons = _interior(poly, k)
    if seed is None:
        for a in mons:
            yield {"u": [list(a)]}, parseval_revealed_check(deg, {a: f.one})
        if len(mons) > 1:
            yield {"u": [list(a) for a in mons]}, parseval_revealed_check(deg, {a: f.one for a in mons})
        return
    u = {a: f.element_from_key("u", seed, a) for a in mons}
    yield {"u": "seeded combination of interior monomials"}, parseval_revealed_check(deg, u)


def _differential_cases(poly, deg, seed):
    f = deg.field
    k = (poly.dim + 1) // 2
    for a in _interior(poly, k):
        for F in itertools.combinations(poly.lattice_points, k):
            yield {"u": list(a), "F": [list(p) for p in F]}, differential_identity_check(deg, {a: f.one}, F)


IDENTITIES = {
    "linear": _linear_cases,
    "balancing": _balancing_cases,
    "parseval": _parseval_cases,
    "parseval-revealed": _revealed_cases,
    "differential": _differential_cases,
}


def _json_value(field: Field, x) -> str:
    return field.to_json(x)


def identity_report(claim: str, poly: LatticePolytope, cfg: RunConfig) -> VerificationReport:
    char2 = cfg.char == 2
    if claim in ("parseval", "parseval-revealed", "differential") and not char2:
        return skipped(claim, poly.name, "identity is stated in characteristic 2")
    if claim == "differential" and cfg.mode != "exact":
        return skipped(claim, poly.name, "needs the exact symbolic backend (--mode exact)")
    if claim == "differential" and poly.dim % 2 == 0:
        return skipped(claim, poly.name, "dimension must be odd")
    if claim == "parseval-revealed" and (poly.dim + 1) % 2:
        return skipped(claim, poly.name, "d+1 must be even")
    if claim in ("parseval", "parseval-revealed") and not is_idp(poly)[0]:
        return skipped(claim, poly.name, "not IDP")
    try:
        thetas = _thetas(poly, cfg)
    except VariableCapExceeded as exc:
        return skipped(claim, poly.name, str(exc), backend="symbolic")
    flag = select_flags(poly, cfg.flag_strategy)[0]
    checked = skipped_cases = 0
    backend = thetas[0][1].field.name
    for seed, theta in thetas:
        try:
            deg = degree_functional(poly, theta, flag)
        except (NormalizationDegenerate, TopPieceNotOneDimensional) as exc:
            return VerificationReport(claim, poly.name, Status.REFUTED, backend=backend,
                                      seeds=cfg.seeds if seed is not None else [],
                                      witness={"seed": seed, "error": str(exc)})
        for case, res in IDENTITIES[claim](poly, deg, seed):
            if res.skipped:
                skipped_cases += 1
                continue
            checked += 1
            if not res.holds:
                f = theta.field
                witness = {"seed": seed, **case, "lhs": _json_value(f, res.lhs), "rhs": _json_value(f, res.rhs)}
                return VerificationReport(claim, poly.name, Status.REFUTED, backend=backend,
                                          seeds=[seed] if seed is not None else [], witness=witness)
    details = {"cases": checked, "cases_outside_hypothesis": skipped_cases, "flag": flag.label(poly)}
    if checked == 0:
        return skipped(claim, poly.name, "no instance satisfies the hypotheses", details=details)
    if cfg.mode == "exact":
        return VerificationReport(claim, poly.name, Status.VERIFIED_EXACT, backend=backend,
                                  degrees=[poly.dim + 1], details=details)
    fld = cfg.field()
    return _probabilistic(claim, poly, fld, cfg, details)


def _probabilistic(claim, poly, fld, cfg, details) -> VerificationReport:
    if cfg.char != 2:
        details = {**details, "corroboration_only": True,
                   "note": "characteristic p runs corroborate; certification is in characteristic 2"}
    return VerificationReport(claim, poly.name, Status.VERIFIED_PROBABILISTIC, backend=fld.name,
                              seeds=cfg.seeds, trials=cfg.trials, degrees=[poly.dim + 1],
                              bound=failure_bound(fld, poly.dim, cfg.trials), details=details)


def flag_report(poly: LatticePolytope, cfg: RunConfig) -> VerificationReport:
    claim = "flag-independence"
    flags = select_flags(poly, cfg.flag_strategy)
    if len(flags) < 2:
        flags = enumerate_flags(poly)[:3]
    if len(flags) < 2:
        return skipped(claim, poly.name, "fewer than two flags")
    try:
        thetas = _thetas(poly, cfg)
    except VariableCapExceeded as exc:
        return skipped(claim, poly.name, str(exc))
    backend = thetas[0][1].field.name
    for seed, theta in thetas:
        res = flag_independence_check(poly, theta, flags)
        if not res["holds"]:
            return VerificationReport(claim, poly.name, Status.REFUTED, backend=backend,
                                      seeds=[seed] if seed is not None else [],
                                      witness={"seed": seed, **res})
    details = {"flags": [fl.label(poly) for fl in flags]}
    if cfg.mode == "exact":
        return VerificationReport(claim, poly.name, Status.VERIFIED_EXACT, backend=backend, details=details)
    return _probabilistic(claim, poly, cfg.field(), cfg, details)


# ---------------------------------------------------------------------------
# dispatch


def _mark_corroboration(report: VerificationReport, cfg: RunConfig) -> VerificationReport:
    if cfg.char != 2 and report.status is Status.VERIFIED_PROBABILISTIC:
        report.details = {**report.details, "corroboration_only": True}
    return report


def verify_claim(claim: str, poly: LatticePolytope, cfg: RunConfig) -> VerificationReport:
    if claim not in CLAIMS:
        raise ValueError(f"unknown claim {claim!r}")
    if claim == "corollaries":
        fld = cfg.field() if cfg.mode == "random" else gf2k_field(cfg.field_bits)
        return lefschetz.corollary_suite(poly, fld, cfg.seeds[:1])
    if claim == "anisotropy":
        if cfg.mode == "exact":
            return lefschetz.anisotropy_direct(poly, allow_large=cfg.allow_large)
        if cfg.char != 2:
            return skipped(claim, poly.name, "anisotropy is stated in characteristic 2")
        return lefschetz.anisotropy_via_duality(poly, cfg.field(), cfg.seeds)
    if claim == "flag-independence":
        return flag_report(poly, cfg)
    if claim in IDENTITIES:
        return identity_report(claim, poly, cfg)
    if cfg.mode == "exact":
        return skipped(claim, poly.name, "rank claims run at specializations (--mode random)")
    fld, seeds = cfg.field(), cfg.seeds
    runner = {
        "lefschetz": lefschetz.reflexive_lefschetz_report,
        "relative-lefschetz": lefschetz.relative_lefschetz_report,
        "boundary-lefschetz": lefschetz.boundary_sphere_lefschetz_report,
        "local-hstar": lefschetz.local_hstar_report,
    }[claim]
    return _mark_corroboration(runner(poly, fld, seeds), cfg)


def hilbert_dims(poly: LatticePolytope, field: Field, seed: int) -> dict[str, list[int]]:
    theta = ParameterMatrix.random(poly, field, seed)
    top = poly.dim + 1
    return {
        kind.value: [artinian_reduction(poly, theta, kind, k).dim
                     for k in range(top + (0 if kind is Kind.BOUNDARY else 1))]
        for kind in Kind
    }

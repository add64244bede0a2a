"""Command-line entry point: info, verify, scan and export-corpus."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import corpus, ehrhart
from .lattice import LatticePolytope, PolytopeError, is_idp
from .lefschetz import corollary_checks, corollary_suite
from .reports import Status, dumps, envelope
from .verify import CLAIMS, RunConfig, verify_claim

log = logging.getLogger("polylef")

EXIT_OK, EXIT_REFUTED, EXIT_INPUT = 0, 1, 2
BUILTIN_DIR = "builtin"


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polytope files


def parse_record(record, default_name: str = "polytope") -> LatticePolytope:
    if not isinstance(record, dict) or "vertices" not in record:
        raise InputError('expected an object with a "vertices" array')
    verts = record["vertices"]
    if not isinstance(verts, list) or not verts:
        raise InputError('"vertices" must be a non-empty array')
    for row in verts:
        if not isinstance(row, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in row):
            raise InputError("every vertex must be an array of integers")
    name = record.get("name", default_name)
    if not isinstance(name, str):
        raise InputError('"name" must be a string')
    try:
        poly = LatticePolytope.from_points(name, verts)
    except PolytopeError as exc:
        raise InputError(str(exc)) from exc
    if poly.dim == 0:
        raise InputError(f"{name}: a single point is not a full polytope")
    return poly


def load_polytope(source: str) -> LatticePolytope:
    """A JSON polytope file, or the name of a built-in."""
    path = Path(source)
    if path.is_file():
        try:
            record = json.loads(path.read_text())
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise InputError(f"{source}: {exc}") from exc
        return parse_record(record, path.stem)
    try:
        return corpus.get(source)
    except KeyError:
        raise InputError(f"{source}: no such file or built-in polytope") from None


# ---------------------------------------------------------------------------
# commands


def info(poly: LatticePolytope) -> dict:
    data = corollary_checks(poly)
    _, witness = is_idp(poly)
    return {
        "name": poly.name,
        "dim": poly.dim,
        "ambient_dim": poly.ambient_dim,
        "vertices": len(poly.vertices),
        "lattice_points": len(poly.lattice_points),
        "interior_points": len(poly.interior_points),
        "idp": data["idp"],
        "idp_witness": None if witness is None else {"point": list(witness.point), "height": witness.height},
        "reflexive": data["reflexive"],
        "j": data["j"],
        "h_star": data["h_star"],
        "a_polynomial": data["a_polynomial"],
        "ell_star": list(ehrhart.local_hstar(poly).ell_star),
        "macaulay": data["checks"]["m_vector"],
        "eisenbud_harris": data["checks"]["eisenbud_harris"],
        "unimodal": data["checks"]["unimodal"],
    }


def info_text(d: dict) -> str:
    lines = [f"{d['name']}: dim {d['dim']} (ambient {d['ambient_dim']}), {d['vertices']} vertices"]
    lines.append(f"  lattice points {d['lattice_points']}, interior {d['interior_points']}")
    idp = "yes" if d["idp"] else f"no (witness {d['idp_witness']})"
    lines.append(f"  IDP {idp}; reflexive {'yes' if d['reflexive'] else 'no'}; j = {d['j']}")
    for key in ("h_star", "a_polynomial", "ell_star"):
        lines.append(f"  {key:<13} {tuple(d[key])}")
    lines.append(f"  Macaulay {d['macaulay']}; Eisenbud-Harris {d['eisenbud_harris']}; unimodal {d['unimodal']}")
    return "\n".join(lines)


def verify(poly: LatticePolytope, claims: list[str], cfg: RunConfig) -> list:
    return [verify_claim(c, poly, cfg) for c in claims]


def _scan_one(args) -> tuple[str, dict | None, str | None]:
    label, source, cfg = args
    try:
        poly = parse_record(source, label) if isinstance(source, dict) else load_polytope(source)
    except InputError as exc:
        return label, None, str(exc)
    rep = corollary_suite(poly, cfg.field(), cfg.seeds[:1])
    row = info(poly)
    row["file"] = label
    row["corollaries"] = rep.status.value
    row["outside_hypothesis"] = rep.details["outside_hypothesis"]
    row["refuted_checks"] = (rep.witness or {}).get("failed", [])
    row["hypotheses"] = rep.details["hypotheses"]
    return label, row, None


def _scan_sources(target: str) -> list[tuple[str, object]]:
    if target == BUILTIN_DIR:
        return [(n, corpus.record(n)) for n in sorted(corpus.names())]
    path = Path(target)
    if not path.is_dir():
        raise InputError(f"{target}: not a directory")
    return [(p.name, str(p)) for p in sorted(path.glob("*.json"))]


def scan(target: str, cfg: RunConfig, jobs: int = 1) -> dict:
    tasks = [(label, src, cfg) for label, src in _scan_sources(target)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_one, tasks))
    else:
        results = [_scan_one(t) for t in tasks]
    rows, warnings = [], []
    for label, row, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            log.warning("skipping %s", err)
            warnings.append({"file": label, "error": err})
        else:
            rows.append(row)
    return {
        "config": cfg.to_json(),
        "rows": rows,
        "warnings": warnings,
        "refutations": sum(r["corollaries"] == Status.REFUTED.value for r in rows),
    }


def scan_text(result: dict) -> str:
    head = f"{'file':<24} {'dim':>3} {'IDP':>5} {'refl':>5} {'unimodal':>8}  {'h*':<20} corollaries"
    lines = [head]
    for r in result["rows"]:
        lines.append(
            f"{r['file']:<24} {r['dim']:>3} {str(r['idp']):>5} {str(r['reflexive']):>5} "
            f"{str(r['unimodal']):>8}  {str(tuple(r['h_star'])):<20} {r['corollaries']}"
            + (f" outside hypotheses: {', '.join(r['outside_hypothesis'])}" if r["outside_hypothesis"] else "")
        )
    for w in result["warnings"]:
        lines.append(f"warning: {w['file']}: {w['error']}")
    lines.append(f"{len(result['rows'])} polytopes, {result['refutations']} refutations")
    return "\n".join(lines)


def export_corpus(directory: str) -> list[str]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(corpus.names()):
        path = out / f"{name}.json"
        path.write_text(dumps(corpus.record(name)))
        written.append(str(path))
    return written


# ---------------------------------------------------------------------------
# argument parsing


def _claims(value: str) -> list[str]:
    items = [c.strip() for c in value.split(",") if c.strip()]
    if items == ["all"]:
        return list(CLAIMS)
    bad = [c for c in items if c not in CLAIMS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"unknown claim(s) {bad}; choose from {', '.join(CLAIMS)} or all")
    return items


def _char(value: str) -> int:
    try:
        p = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("characteristic must be an integer") from None
    return p


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("exact", "random"), default="random")
    p.add_argument("--char", type=_char, default=2, help="2, or an odd prime p for GF(p) corroboration runs")
    p.add_argument("--field-bits", type=int, default=32, help="k for GF(2^k) (default 32)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--flag-strategy", default="first", help="first, all or count:n")
    p.add_argument("--allow-large", action="store_true", help="lift the exact-mode variable cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polylef", description=__doc__)
    parser.add_argument("--output", choices=("json", "text"), default="text")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="Ehrhart and lattice data for one polytope")
    p.add_argument("polytope", help="polytope JSON file or built-in name")

    p = sub.add_parser("verify", help="run claim checks on one polytope")
    p.add_argument("polytope")
    p.add_argument("--claims", type=_claims, default=list(CLAIMS), help="comma-separated claims or 'all'")
    _add_config(p)

    p = sub.add_parser("scan", help="info and corollary checks for every polytope file in a directory")
    p.add_argument("directory", help=f"directory of *.json files, or '{BUILTIN_DIR}' for the built-in corpus")
    p.add_argument("--jobs", type=int, default=1)
    _add_config(p)

    p = sub.add_parser("export-corpus", help="write the built-in corpus as polytope files")
    p.add_argument("directory")
    return parser


def select_flags_check(strategy: str) -> None:
    if strategy in ("first", "all"):
        return
    if not strategy.startswith("count:") or not strategy[6:].isdigit() or int(strategy[6:]) < 1:
        raise ValueError(f"unknown flag strategy {strategy!r}")


def _config(args) -> RunConfig:
    return RunConfig(mode=args.mode, char=args.char, field_bits=args.field_bits, seed=args.seed,
                     trials=args.trials, flag_strategy=args.flag_strategy, allow_large=args.allow_large)


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    as_json = args.output == "json"
    try:
        if args.command == "info":
            body = info(load_polytope(args.polytope))
            out.write(dumps(envelope("info", body)) if as_json else info_text(body) + "\n")
            return EXIT_OK
        if args.command == "export-corpus":
            for path in export_corpus(args.directory):
                out.write(path + "\n")
            return EXIT_OK
        try:
            cfg = _config(args)
            cfg.field()
            select_flags_check(args.flag_strategy)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        if args.command == "verify":
            poly = load_polytope(args.polytope)
            reports = verify(poly, args.claims, cfg)
            if as_json:
                body = {"polytope": poly.name, "config": cfg.to_json(), "reports": [r.to_json() for r in reports]}
                out.write(dumps(envelope("verify", body)))
            else:
                out.write("\n".join(r.summary() for r in reports) + "\n")
            return EXIT_OK if all(r.ok for r in reports) else EXIT_REFUTED
        if args.command == "scan":
            result = scan(args.directory, cfg, args.jobs)
            out.write(dumps(envelope("scan", result)) if as_json else scan_text(result) + "\n")
            return EXIT_REFUTED if result["refutations"] else EXIT_OK
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_INPUT


def main() -> None:
    sys.exit(run())

import io
import json
from pathlib import Path

import pytest

from polylef import cli, corpus
from polylef.reports import Status, VerificationReport, dumps, failure_bound
from polylef.fields import gf2k_field
from polylef.verify import CLAIMS, RunConfig, verify_claim


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run("--output", "json", *argv)
    payload = json.loads(text)
    assert payload["schema"] == 1
    return code, payload["result"]


def test_info_builtin_cube():
    code, res = run_json("info", "cube3pm1")
    assert code == 0
    assert res["reflexive"] and res["idp"] and res["h_star"] == [1, 23, 23, 1]


def test_info_reeve_has_witness():
    code, res = run_json("info", "reeve2")
    assert code == 0 and not res["idp"]
    assert res["idp_witness"]["height"] == 2


def test_info_text_output():
    code, text = run("info", "square_pm1")
    assert code == 0 and "(1, 6, 1)" in text


def test_info_from_file(tmp_path):
    path = tmp_path / "tri.json"
    path.write_text(json.dumps({"name": "tri", "vertices": [[0, 0], [2, 0], [0, 2]]}))
    code, res = run_json("info", str(path))
    assert code == 0 and res["name"] == "tri" and res["h_star"] == [1, 3, 0]


@pytest.mark.parametrize("content", [
    "{bad json",
    json.dumps({"name": "x"}),
    json.dumps({"vertices": [[0, 0], [1]]}),
    json.dumps({"vertices": [[0, 0.5], [1, 1]]}),
    json.dumps({"vertices": [[1, 1]]}),
    json.dumps([1, 2]),
])
def test_bad_input_exits_2(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, _ = run("info", str(path))
    assert code == 2


def test_unknown_builtin_exits_2():
    assert run("info", "no-such-polytope")[0] == 2


def test_bad_config_exits_2():
    assert run("verify", "segment02", "--char", "100")[0] == 2
    assert run("verify", "segment02", "--flag-strategy", "count:0")[0] == 2
    assert run("verify", "segment02", "--mode", "exact", "--char", "101")[0] == 2
    assert run("verify", "segment02", "--trials", "0")[0] == 2


def test_verify_all_square():
    code, res = run_json("verify", "square_pm1", "--claims", "all", "--seed", "7", "--trials", "5")
    assert code == 0
    statuses = {r["claim"]: r["status"] for r in res["reports"]}
    assert set(statuses) == set(CLAIMS)
    assert "refuted" not in statuses.values()
    # everything that applies to a reflexive polygon in random mode is verified
    applicable = set(CLAIMS) - {"anisotropy", "parseval-revealed", "differential"}
    assert all(statuses[c].startswith("verified") for c in applicable)


def test_verify_differential_exact():
    code, res = run_json("verify", "segment02", "--claims", "differential", "--mode", "exact")
    assert code == 0 and res["reports"][0]["status"] == "verified-exact"


def test_verify_lefschetz_reeve_skipped():
    code, res = run_json("verify", "reeve2", "--claims", "lefschetz")
    assert code == 0
    rep = res["reports"][0]
    assert rep["status"] == "skipped" and rep["reason"] == "not IDP"


def test_verify_refutation_exits_1():
    code, text = run("verify", "segment03", "--claims", "corollaries")
    assert code == 1 and "refuted" in text


def test_verify_json_is_deterministic():
    a = run("--output", "json", "verify", "cross2", "--claims", "linear,balancing", "--seed", "3")
    b = run("--output", "json", "verify", "cross2", "--claims", "linear,balancing", "--seed", "3")
    assert a == b


def test_exact_mode_rank_claims_are_skipped():
    rep = verify_claim("relative-lefschetz", corpus.get("segment02"), RunConfig(mode="exact"))
    assert rep.status is Status.SKIPPED


def test_odd_characteristic_is_corroboration_only():
    cfg = RunConfig(char=2**31 - 1, trials=2)
    rep = verify_claim("relative-lefschetz", corpus.get("square_pm1"), cfg)
    assert rep.status is Status.VERIFIED_PROBABILISTIC and rep.details["corroboration_only"]
    assert verify_claim("parseval", corpus.get("square_pm1"), cfg).status is Status.SKIPPED


def test_identity_claims_report_bounds():
    rep = verify_claim("parseval", corpus.get("reflexive_simplex3"), RunConfig(trials=5))
    assert rep.status is Status.VERIFIED_PROBABILISTIC
    assert rep.bound["per_trial"] < 2**-20 and rep.bound["trials"] == 5


def test_flag_independence_uses_several_flags():
    rep = verify_claim("flag-independence", corpus.get("square_pm1"), RunConfig(trials=1))
    assert len(rep.details["flags"]) == 3


def write_corpus(directory, names):
    directory.mkdir(exist_ok=True)
    for n in names:
        (directory / f"{n}.json").write_text(dumps(corpus.record(n)))


EIGHT = ["simplex2", "unit_square", "unit_cube", "square_pm1", "cube3pm1", "cross2",
         "reflexive_triangle", "reeve2"]


def test_scan_eight_builtins(tmp_path):
    write_corpus(tmp_path / "c", EIGHT)
    code, res = run_json("scan", str(tmp_path / "c"), "--seed", "1")
    assert code == 0
    assert len(res["rows"]) == 8 and res["refutations"] == 0 and res["warnings"] == []


def test_scan_empty_dir(tmp_path):
    code, res = run_json("scan", str(tmp_path))
    assert code == 0 and res["rows"] == []


def test_scan_skips_bad_file(tmp_path):
    write_corpus(tmp_path, ["square_pm1", "segment02"])
    (tmp_path / "broken.json").write_text("{")
    code, res = run_json("scan", str(tmp_path))
    assert code == 0
    assert len(res["rows"]) == 2 and [w["file"] for w in res["warnings"]] == ["broken.json"]


def test_scan_missing_dir_exits_2(tmp_path):
    assert run("scan", str(tmp_path / "missing"))[0] == 2


def test_scan_parallel_matches_serial():
    a = run("--output", "json", "scan", "builtin", "--seed", "2")
    b = run("--output", "json", "scan", "builtin", "--seed", "2", "--jobs", "3")
    assert a == b


def test_export_corpus_roundtrip(tmp_path):
    code, text = run("export-corpus", str(tmp_path))
    assert code == 0 and len(text.splitlines()) == len(corpus.names())
    for name in corpus.names():
        assert cli.load_polytope(str(tmp_path / f"{name}.json")) == corpus.get(name)


def test_shipped_corpus_matches_builtins():
    shipped = Path(__file__).resolve().parents[1] / "corpus"
    for name in corpus.names():
        assert json.loads((shipped / f"{name}.json").read_text()) == corpus.record(name)


def test_report_serialization():
    rep = VerificationReport("linear", "p", Status.VERIFIED_PROBABILISTIC,
                             bound=failure_bound(gf2k_field(32), 2, 5))
    data = rep.to_json()
    assert data["status"] == "verified-probabilistic"
    assert data["bound"]["degree_bound"] == 36 and data["bound"]["field_order"] == 2**32
    assert "failure bound" in rep.summary()
    assert dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'

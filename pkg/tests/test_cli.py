import json
import os
import re

from folsing.cli import EXIT_FIELD, EXIT_PASS, EXIT_USAGE, SCHEMA, _render_text, main
from folsing.corpus import family_files
from folsing.foliation import read_fol

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS = os.path.join(ROOT, "corpus")


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, "--json", *argv)
    return code, json.loads(out)


def leaves(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from leaves(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from leaves(v)
    else:
        yield obj


def test_analyze_omega_a(capsys):
    code, rep = run_json(capsys, "analyze", os.path.join(CORPUS, "omega_a_1.fol"))
    assert code == EXIT_PASS and rep["schema"] == SCHEMA
    assert rep["degree"] == 3 and rep["singular_points"] == 1
    pt = rep["singular_locus"][0]
    assert pt["mu"] == 13 and pt["bb"] == "25" and pt["classification"].startswith("SaddleNode")


def test_analyze_inline_linear(capsys):
    code, rep = run_json(capsys, "analyze", "--form", "(2*y) dx + (-x) dy")
    assert code == EXIT_PASS and rep["singular_points"] == 3


def test_analyze_nilpotent_curves(capsys):
    code, rep = run_json(capsys, "analyze", os.path.join(CORPUS, "nilpotent4_0001.fol"), "--curves", "5")
    assert code == EXIT_PASS
    assert rep["curve_search"]["verdict"] == "none"
    assert rep["singular_locus"][0]["reduction"]["bb_fold"] == "25"


def test_report_is_deterministic_and_exact(capsys):
    args = ("analyze", os.path.join(CORPUS, "example_b_0002.fol"))
    _, a = run(capsys, "--json", *args)
    _, b = run(capsys, "--json", *args)
    assert a == b
    assert not re.search(r"\d\.\d", a)


def test_text_and_json_carry_same_data(capsys):
    _, rep = run_json(capsys, "analyze", "--form", "(2*y) dx + (-3*x) dy")
    _, text = run(capsys, "analyze", "--form", "(2*y) dx + (-3*x) dy")
    assert text == "\n".join(_render_text(rep)) + "\n"
    for v in leaves(rep):
        assert str(v) in text


def test_parse_error_exit(capsys):
    code, rep = run_json(capsys, "analyze", "--form", "(y dx")
    assert code == EXIT_USAGE and rep["error"]["category"] == "parse"


def test_field_support_exit(capsys):
    code, rep = run_json(capsys, "analyze", "--form", "(y) dx + (x^5 - x - 1) dy")
    assert code == EXIT_FIELD and rep["error"]["category"] == "field-support"


def test_usage_exit(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE
    capsys.readouterr()


def test_missing_input(capsys):
    code, rep = run_json(capsys, "analyze")
    assert code == EXIT_USAGE and rep["error"]["category"] == "usage"


def test_verify_recursion_audit(capsys):
    code, rep = run_json(capsys, "verify", "recursion-audit")
    assert code == EXIT_PASS and len(rep["cases"]) >= 10


def test_verify_elimination(capsys):
    code, rep = run_json(capsys, "verify", "elimination")
    assert code == EXIT_PASS and rep["verdict"] == "pass"


def test_eliminate_partial(capsys):
    code, rep = run_json(capsys, "eliminate", "--through", "d6")
    assert code == EXIT_PASS
    assert any("p21" in c["case"] for c in rep["cases"])
    assert main(["eliminate", "--through", "d99"]) == EXIT_USAGE
    capsys.readouterr()


def test_families_generate_roundtrip(capsys, tmp_path):
    out = tmp_path / "b.fol"
    code, rep = run_json(capsys, "families", "generate", "--id", "example_b", "--params", "b=3", "--out", str(out))
    assert code == EXIT_PASS
    name, params, om = read_fol(str(out))
    assert name == "example_b" and params == {"b": 3}


def test_families_generate_bad_domain(capsys):
    code, rep = run_json(capsys, "families", "generate", "--id", "example_b", "--params", "b=2")
    assert code == EXIT_USAGE and rep["error"]["category"] == "precondition"


def test_nilcat_verify(capsys):
    code, rep = run_json(capsys, "nilcat", "verify", "--n", "6", "--p", "2", "--U", "1 + x")
    assert code == EXIT_PASS and rep["case"] == "3"


def test_check_commands(capsys):
    code, rep = run_json(capsys, "check", "sums", "--form", "(2*y) dx + (-x) dy")
    assert code == EXIT_PASS
    code, rep = run_json(capsys, "check", "curve", "--form", "(2*y) dx + (-x) dy", "--curve", "y")
    assert code == EXIT_PASS and all(s["ok"] for s in rep["sums"])
    code, rep = run_json(capsys, "check", "curve", "--form", "(2*y) dx + (-x) dy", "--curve", "x + y")
    assert code == EXIT_USAGE


def test_search_refusal_is_precondition(capsys):
    code, rep = run_json(capsys, "search", "curves", "--form", "(2*y) dx + (-x) dy", "--max-degree", "1")
    assert code == EXIT_USAGE and rep["error"]["category"] == "precondition"


def test_corpus_files_match_generators():
    for fname, text in family_files():
        with open(os.path.join(CORPUS, fname), encoding="utf-8") as fh:
            assert fh.read() == text


def test_verify_all_writes_corpus(tmp_path, capsys):
    assert main(["--jobs", "2", "families", "verify-all", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert len(names) == 15 and "omega_a_1.fol" in names

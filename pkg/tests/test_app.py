import json

import pytest

import app
from errors import DeclaredDataError
from utils.tables import grid, render_report


def run(capsys, *argv):
    code = app.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_calw_c8_example(capsys):
    code, out = run(capsys, "calw", "-g", "c8", "-k", "q_i_sqrt10")
    assert code == 0
    report = json.loads(out)
    assert report["calw"]["order"] == 2
    assert report["calw"]["forms_agree"] is True
    top = next(e for e in report["calw"]["per_tau"] if e["tau_order"] == 8)
    assert top["exponent"] == "7/2"
    assert top["w_order"] == 1


def test_output_is_deterministic(capsys):
    _, first = run(capsys, "e-fields", "-g", "modular3_3", "-k", "Q")
    _, second = run(capsys, "e-fields", "-g", "modular3_3", "-k", "Q")
    assert first == second
    rows = json.loads(first)["e_fields"]
    assert {"m": 9, "s": [1, 4, 7]} in [{"m": r["m"], "s": r["s"]} for r in rows]


def test_analyze_group(capsys):
    code, out = run(capsys, "analyze-group", "-g", "heis3")
    assert code == 0
    report = json.loads(out)
    assert report["order"] == 27 and report["exponent"] == 3
    assert report["center_order"] == 3
    assert report["aprime"] is None
    assert report["classification"]["kind"] == "exponent_l"
    assert all(c["e_tau"] == 3 for c in report["cyclic_classes"])


def test_classify_table_format(capsys):
    code, out = run(capsys, "classify", "-g", "modular3_3", "--format", "table")
    assert code == 0
    assert "exponent_l3_modular" in out


def test_certify(capsys):
    code, out = run(capsys, "certify", "-g", "c7sdc3", "-k", "imag5")
    assert code == 0
    assert json.loads(out)["certificate"]["route"] == "aprime"


def test_admissible(capsys):
    code, out = run(capsys, "admissible", "-g", "C9", "-k", "imag5", "--tau", "1", "--cls", "1")
    assert code == 0
    assert json.loads(out)["admissible"] is True


def test_admissible_rejects_identity(capsys):
    code, _ = run(capsys, "admissible", "-g", "C9", "-k", "imag5", "--tau", "0")
    assert code == 2


@pytest.mark.parametrize("name, scenario", [
    ("c8_example", "c8_example"),
    ("espl", "exponent_ell"),
    pytest.param("gruppiacta", "max_exponent", marks=pytest.mark.slow),
    pytest.param("qualiWkl", "max_normalizer", marks=pytest.mark.slow),
])
def test_reproduce_by_label(capsys, name, scenario):
    code, out = run(capsys, "reproduce", name)
    assert code == 0
    report = json.loads(out)
    assert report["scenario"] == scenario
    assert report["passed"] is True


@pytest.mark.slow
def test_verify_report_carries_lemma(capsys):
    code, out = run(capsys, "verify", "--suite", "powers")
    assert code == 0
    checks = json.loads(out)["checks"]
    assert checks["divisor_inclusion"]["lemma"] == "An2inclusione"
    assert checks["gcd_join"]["lemma"] == "Agcd"


def test_list_fixtures(capsys):
    code, out = run(capsys, "list-fixtures")
    assert code == 0
    report = json.loads(out)
    assert "c8_example" in report["scenarios"]
    assert "rationals" in report["fields"]


def test_unknown_group_is_exit_2(capsys):
    code, out = run(capsys, "classify", "-g", "no_such_group")
    assert code == 2
    assert out == ""


def test_empty_fixture_dir_is_exit_2(capsys, tmp_path):
    code, _ = run(capsys, "verify", "--suite", "all", "--fixtures", str(tmp_path))
    assert code == 2


def test_fixture_env_override(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("STEINITZ_FIXTURES", str(tmp_path))
    code, _ = run(capsys, "list-fixtures")
    assert code == 2


def test_contradictory_declared_field_is_exit_4(capsys, tmp_path):
    path = tmp_path / "bad_field.json"
    path.write_text(json.dumps({
        "kind": "declared",
        "gal": {"8": [1, 5], "4": [1, 3]},
        "class_group": [2],
    }), encoding="utf-8")
    code, _ = run(capsys, "calw", "-g", "C8", "-k", str(path))
    assert code == DeclaredDataError.exit_code == 4


@pytest.mark.slow
def test_log_file_receives_failures(capsys, tmp_path):
    log_file = tmp_path / "run.log"
    code, _ = run(capsys, "verify", "--suite", "burnside", "--bound", "50", "--log-file", str(log_file))
    assert code == 0
    assert log_file.exists()
    assert (tmp_path / "run.log.failures").read_text(encoding="utf-8") == ""


def test_bad_bound_is_exit_2(capsys):
    code, _ = run(capsys, "calw", "-g", "C3", "-k", "Q", "--bound", "1")
    assert code == 2


def test_argparse_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        app.main(["verify", "--suite", "nonsense"])


def test_render_report_sections():
    text = render_report({"group": "C9", "rows": [{"a": 1, "b": None}], "nested": {"x": [1, 2]}})
    assert text.splitlines()[0].startswith("group")
    assert "[rows]" in text and "[nested]" in text
    assert "-" in grid(["a"], [[None]]).splitlines()[-1]

import csv
import json

import jsonschema
import pytest

from rauzy import reporting
from rauzy.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, run


def test_bound_json(tmp_path):
    out = tmp_path / "b.json"
    assert run(["bound", "--d", "3", "--kmax", "1e4", "--tol", "1e-7", "--json", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, reporting.BOUND_SCHEMA)
    assert doc["schema"] == 1
    assert doc["verdict"] is True and doc["dim_upper_bound"] < 2
    assert doc["exact_certificate"]["upper_bound"] == "496516427/592704000"
    assert doc["exact_certificate"]["upper_bound_float"] == pytest.approx(0.8377, abs=1e-4)


def test_xsum_csv(tmp_path):
    out = tmp_path / "x.csv"
    assert run(["xsum", "--d", "3", "--n", "2", "--exact", "--csv", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == reporting.CSV_HEADER
    row2 = next(r for r in rows if r["n"] == "2" and r["k"] == "")
    assert (row2["value_num"], row2["value_den"], row2["word_count"]) == ("7", "12", "9")


def test_xsum_float_json(tmp_path):
    out = tmp_path / "x.json"
    assert run(["xsum", "--n", "3", "--delta", "0.9", "--json", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, reporting.XSUM_SCHEMA)
    assert doc["parameters"]["delta"] == 0.9


def test_xsum_flags_exclusive():
    assert run(["xsum", "--n", "2", "--exact", "--delta", "0.5"]) == EXIT_USAGE


def test_xsum_budget_exit_code():
    assert run(["xsum", "--n", "9", "--budget", "1000"]) == EXIT_BUDGET


def test_verify_section6(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--suite", "section6", "--json", str(out)]) == EXIT_OK
    text = out.read_text()
    assert "574898507/592704000" in text
    doc = json.loads(text)
    jsonschema.validate(doc, reporting.VERIFY_SCHEMA)
    assert isinstance(doc, list) and doc[0]["pass"] is True


def test_verify_lemma53_n_max(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--suite", "lemma53", "--n-max", "5", "--json", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc[0]["parameters"]["n_max"] == 5


def test_verify_failure_exit_code(monkeypatch, tmp_path):
    from rauzy import verify

    monkeypatch.setitem(
        verify.SUITES, "section6", lambda workers=None: [verify.CheckReport("fake", {}, False, witness={"x": 1})]
    )
    out = tmp_path / "v.json"
    assert run(["verify", "--suite", "section6", "--json", str(out)]) == 1
    jsonschema.validate(json.loads(out.read_text()), reporting.VERIFY_SCHEMA)


def test_render_svg(tmp_path):
    out = tmp_path / "g.svg"
    assert run(["render", "--depth", "2", "--min-volume", "1/20", "--out", str(out)]) == EXIT_OK
    assert out.read_text().count("<path ") == 3


def test_render_ppm(tmp_path):
    out = tmp_path / "g.ppm"
    assert run(["render", "--depth", "3", "--format", "ppm", "--size", "128", "--out", str(out)]) == EXIT_OK
    assert out.read_bytes().startswith(b"P6\n")


def test_boxdim(tmp_path, capsys):
    out = tmp_path / "b.json"
    assert run(["boxdim", "--points", "20000", "--kmin", "3", "--kmax", "6", "--seed", "1", "--json", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, reporting.BOXDIM_SCHEMA)
    assert 1.0 < doc["slope"] < 2.0
    assert "slope" in capsys.readouterr().out


def test_usage_errors():
    assert run([]) == EXIT_USAGE
    assert run(["bound", "--d", "2"]) == EXIT_USAGE
    assert run(["render", "--depth", "2"]) == EXIT_USAGE


def test_threads_flag_and_env(monkeypatch, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["xsum", "--n", "5", "--threads", "2", "--csv", str(a)]) == EXIT_OK
    monkeypatch.setenv("RAUZY_THREADS", "3")
    assert run(["xsum", "--n", "5", "--csv", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_identical_invocations_identical_bytes(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"v{i}.json"
        run(["verify", "--suite", "appendix", "--json", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]

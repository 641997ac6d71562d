import csv
import io
import json
import math

import jsonschema
import pytest

from cylwave import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(csv_text):
    body = [ln for ln in csv_text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def as_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, cli.load_schema())
    return doc


def test_cutoffs_hollow_tm(capsys):
    code, out, _ = run(capsys, "cutoffs", "--geometry", "hollow", "--family", "TM", "--n", "0",
                       "--m-max", "3", "--a", "1")
    assert code == 0
    xs = [float(r["x"]) for r in rows_of(out)]
    assert xs == pytest.approx([2.404826, 5.520078, 8.653728], abs=1e-6)
    r = rows_of(out)[0]
    assert float(r["f_c"]) == pytest.approx(float(r["omega_c"]) / (2 * math.pi), rel=1e-15)


def test_cutoffs_tem(capsys):
    doc = as_json(capsys, "cutoffs", "--family", "TEM")
    assert len(doc["rows"]) == 1 and doc["rows"][0]["k_c"] == 0.0
    assert "no cutoff" in doc["meta"]["note"]


def test_cutoffs_hollow_tem_is_usage_error(capsys):
    code, _, err = run(capsys, "cutoffs", "--geometry", "hollow", "--family", "TEM")
    assert code == 2 and "no TEM mode" in err


def test_mode_examples(capsys):
    doc = as_json(capsys, "mode", "--family", "TEM", "--a", "1", "--b", repr(math.e))
    assert doc["data"]["h_eff"] == pytest.approx(1.0, rel=1e-15)
    doc = as_json(capsys, "mode", "--geometry", "hollow", "--family", "TM", "--n", "0", "--a", "0.02")
    assert doc["data"]["h_eff"] == pytest.approx(0.01, rel=1e-13)
    doc = as_json(capsys, "mode", "--family", "TE", "--n", "1", "--m", "1")
    assert doc["data"]["photon_mass"] > 0 and doc["data"]["gap"] > 0


def test_mode_defaults_to_json(capsys):
    code, out, _ = run(capsys, "mode", "--family", "TM")
    assert code == 0 and json.loads(out)["command"] == "mode"


def test_fields(capsys):
    code, out, _ = run(capsys, "fields", "--family", "TM", "--n", "1", "--nr", "4", "--ntheta", "5")
    assert code == 0
    assert len(rows_of(out)) == 20
    assert "# units:" in out
    _, out, _ = run(capsys, "fields", "--X", "0", "--Y", "0", "--nr", "3", "--ntheta", "3")
    for r in rows_of(out):
        assert all(float(r[k]) == 0.0 for k in ("E_r", "E_theta", "E_z", "B_r", "B_theta", "B_z"))
    _, out, _ = run(capsys, "fields", "--family", "TEM", "--nr", "3", "--ntheta", "3", "--Y", "0.5")
    for r in rows_of(out):
        assert float(r["E_z"]) == 0.0 and float(r["B_z"]) == 0.0
        assert float(r["E_r"]) != 0.0


def test_currents_hollow_te0(capsys):
    doc = as_json(capsys, "currents", "--geometry", "hollow", "--family", "TE", "--n", "0",
                  "--npts", "7", "--t", "1e-12", "--Y", "0.3")
    rows = doc["rows"]
    front = [r for r in rows if r["electrode"] == "front"]
    back = [r for r in rows if r["electrode"] == "back"]
    assert [(r["sigma"], r["j_z"], r["j_transverse"]) for r in front] == \
        [(r["sigma"], r["j_z"], r["j_transverse"]) for r in back]
    junction = [r["junction_mismatch"] for r in rows if r["junction_mismatch"] is not None]
    assert junction and max(junction) < 1e-10


def test_currents_tem_has_no_azimuthal_current(capsys):
    doc = as_json(capsys, "currents", "--family", "TEM", "--npts", "5", "--t", "3e-12")
    assert all(r["j_transverse"] == 0.0 for r in doc["rows"])
    assert doc["summary"]["q_line"] != 0.0


def test_fig3(capsys):
    doc = as_json(capsys, "fig3", "--ratios", "2,1.01", "--ms", "1,4", "--npts", "101")
    s = doc["summary"]
    assert s["max_abs_difference[b/a=2,m=1]"] < 0.15
    assert s["max_abs_difference[b/a=2,m=4]"] < s["max_abs_difference[b/a=2,m=1]"]
    assert s["max_abs_difference[b/a=1.01,m=1]"] < s["max_abs_difference[b/a=2,m=1]"]
    profile = [r for r in doc["rows"] if r["kind"] == "profile"]
    assert len(profile) == 4 * 101


def test_fig3_bad_list(capsys):
    code, _, err = run(capsys, "fig3", "--ratios", "two")
    assert code == 2 and "--ratios" in err


def test_usage_errors(capsys):
    assert run(capsys, "mode", "--family", "XX")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "mode", "--family", "TM", "--m", "0")[0] == 2
    assert run(capsys, "mode", "--a", "3e-3", "--b", "2e-3")[0] == 2
    assert run(capsys, "mode", "--l", "0")[0] == 2
    assert run(capsys, "fields", "--nr", "0")[0] == 2


def test_numerical_failure_exit_code(capsys, monkeypatch):
    from cylwave import specfun

    def boom(*a, **k):
        raise specfun.RootSearchError("no convergence")

    monkeypatch.setattr(cli, "cutoff_roots", boom)
    assert run(capsys, "cutoffs", "--family", "TM")[0] == 3


@pytest.mark.parametrize("argv", [
    ("cutoffs", "--family", "TE", "--n", "2"),
    ("mode", "--family", "TE", "--n", "0", "--geometry", "hollow"),
    ("fields", "--family", "TM", "--n", "2", "--geometry", "hollow"),
    ("currents", "--family", "TE", "--n", "0"),
    ("fig3", "--npts", "11"),
])
def test_deterministic_output(capsys, argv):
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    c = run(capsys, *argv, "--format", "json")[1]
    jsonschema.validate(json.loads(c), cli.load_schema())


def test_float_format():
    assert cli.fmt(0.1) == "1.0000000000000001e-01"
    assert len(cli.fmt(math.pi).split("e")[0].replace(".", "").lstrip("-")) == 17
    assert cli.to_json({"a": [1, 2.5, None, True]}) == \
        '{\n  "a": [\n    1,\n    2.5000000000000000e+00,\n    null,\n    true\n  ]\n}'


def _cfg(tmp_path, obj):
    p = tmp_path / "cfg.json"
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


SMALL = {"grid": {"ratios": [2.0], "ns": [1], "ms": [1], "hollow": False, "n_points": 16},
         "cartesian_ratios": [1.01]}


def test_verify_small_config(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, text, _ = run(capsys, "verify", "--config", _cfg(tmp_path, SMALL), "--out", str(out))
    assert code == 0 and "checks passed" in text
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, cli.load_schema())
    assert doc["summary"]["failed"] == 0


def test_verify_failure_exit_code(capsys, tmp_path):
    cfg = dict(SMALL, tolerances={"maxwell": 1e-300})
    code, out, _ = run(capsys, "verify", "--config", _cfg(tmp_path, cfg))
    assert code == 1
    assert json.loads(out)["summary"]["failed"] >= 1


def test_verify_text_format(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--config", _cfg(tmp_path, SMALL), "--format", "csv")
    assert code == 0 and out.splitlines()[-1].endswith("checks passed")


@pytest.mark.parametrize("cfg,field", [
    ({"grdi": {}}, "grdi"),
    ({"grid": {"ratio": [2]}}, "grid.ratio"),
    ({"tolerances": {"maxwel": 1e-6}}, "tolerances.maxwel"),
    ({"tolerances": {"maxwell": -1}}, "tolerances.maxwell"),
    ("{\n  \"grid\": [1,,]\n}", "line 2"),
])
def test_verify_malformed_config(capsys, tmp_path, cfg, field):
    code, _, err = run(capsys, "verify", "--config", _cfg(tmp_path, cfg))
    assert code == 2 and field in err


def test_verify_missing_config(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--config", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err

import json
import subprocess
import sys

import pytest

from qhodge import checks, cli


def run(main, argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_empty_manifest_passes(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"checks": []}))
    code, out = run(cli.checks_main, ["--manifest", str(path)], capsys)
    assert code == 0
    assert json.loads(out.out) == {"checks": [], "passed": "0", "total": "0"}


def test_bundled_manifest_passes(capsys):
    code, out = run(cli.checks_main, ["--jobs", "3"], capsys)
    report = json.loads(out.out)
    assert code == 0, report
    assert report["passed"] == report["total"]


def test_every_published_example_is_in_the_manifest():
    names = {c.name for c in checks.Manifest.load().checks if c.tag == "published"}
    assert names == {
        "qring.q_integer_4_is_phi2_phi4", "polyqdr.q_partial_x_cubed", "polyqdr.n1_filtration_shape",
        "qpd.gamma_tilde_2", "qpd.derivative_identity_2", "kufix.genuine_m3_degree4",
        "kufix.hfp_comparison_m2", "kufix.m_series_2", "kufix.geometric_localized_m2",
        "kufix.geometric_p_complete_p2", "kufix.tc_minus_p3",
    }


def test_divisibility_check_passes_with_witness(tmp_path, capsys):
    m = checks.Manifest.load()
    entry = [c for c in m.to_json()["checks"] if c["name"] == "qpd.divisibility_p2_alpha2"]
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"checks": entry}))
    code, out = run(cli.checks_main, ["--manifest", str(path)], capsys)
    assert code == 0
    assert entry[0]["expected"]["witness"]


def test_corrupted_digest_fails_with_diff(tmp_path, capsys):
    entry = [c for c in checks.Manifest.load().to_json()["checks"] if c["name"] == "qring.q_integer_3"][0]
    entry["digest"] = "f" * 64
    entry["expected"]["coeffs"][0] = "4"
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"checks": [entry]}))
    code, out = run(cli.checks_main, ["--manifest", str(path), "--format", "table"], capsys)
    assert code == 1
    assert '-  "4",' in out.out and '+  "3",' in out.out


@pytest.mark.parametrize("text", ["{not json", json.dumps({"checks": [{"name": "a"}]}),
                                  json.dumps({"checks": [{"name": "a", "module": "qring", "operation": "q_integer",
                                                          "tag": "guess"}]})])
def test_malformed_manifest_is_config_error(tmp_path, capsys, text):
    path = tmp_path / "m.json"
    path.write_text(text)
    code, _ = run(cli.checks_main, ["--manifest", str(path)], capsys)
    assert code == 2


def test_precision_status_is_distinct(tmp_path, capsys):
    entry = {"name": "pb", "module": "kufix", "operation": "pullback", "params": {"p": 2, "max_deg": 4, "pprec": 1},
             "tag": "derived", "precision": {"p": "2^1"}, "digest": ""}
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"checks": [entry]}))
    code, out = run(cli.checks_main, ["--manifest", str(path)], capsys)
    assert code == 2
    assert json.loads(out.out)["checks"][0]["status"] == "precision"


def test_filter_selects_by_glob(capsys):
    code, out = run(cli.checks_main, ["--filter", "kufix.m_series*"], capsys)
    assert [r["name"] for r in json.loads(out.out)["checks"]] == ["kufix.m_series_2"]


def test_numbers_are_strings(capsys):
    code, out = run(cli.ku_main, ["pi", "--which", "genuine", "--m", "3", "--max-deg", "4"], capsys)
    data = json.loads(out.out)
    assert code == 0
    assert data["components"][2]["rank"] == "3"


def test_bad_context_is_config_error(capsys):
    code, out = run(cli.qdr_main, ["build", "--ctx", "Q;(q-1)^3"], capsys)
    assert code == 2
    assert "error" in out.err


def test_qpd_verify_exit_code(capsys):
    code, out = run(cli.qpd_main, ["verify", "--p", "2", "--alpha", "1", "--deg", "4"], capsys)
    assert code == 0
    assert json.loads(out.out)["status"] == "pass"


def test_fracture_mismatch_exit_code(capsys):
    code, _ = run(cli.ku_main, ["fracture", "--m", "4", "--max-deg", "2"], capsys)
    assert code == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qhodge", "ku", "pi", "--which", "geom", "--m", "6",
                        "--max-deg", "2", "--format", "table"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "inverted_primes: [2, 3]" in r.stdout

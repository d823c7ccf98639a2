import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pi2asym import cli, verification

SQ3 = math.sqrt(3.0)


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("x, t, regime", [
    ("0", "-4", "AlgebraicNegT"),
    ("0", "4", "Elliptic"),
    (repr(-2 * SQ3 * 8), "4", "EdgePII"),
])
def test_classify_examples(x, t, regime, capsys):
    code, out = run(["--subcommand", "classify", "--x-range", x, "--t-range", t], capsys)
    assert code == 0
    assert rows(out)[0]["regime"] == regime


def test_classify_t_zero_is_per_record(capsys):
    code, out = run(["--subcommand", "classify", "--x-range", "-1:1:3", "--t-range", "-1:1:3"], capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 9
    assert [v["t"] for v in r[:3]] == ["-1", "-1", "-1"]  # t-major
    assert all(v["error"] for v in r[3:6])
    assert not any(v["error"] for v in r[:3] + r[6:])


def test_csv_format(capsys):
    _, out = run(["--subcommand", "eval", "--s-range", "0", "--t-range", "-1e4"], capsys)
    assert out.splitlines()[0] == ",".join(cli.HEADERS["eval"])
    assert "\r" not in out
    r = rows(out)[0]
    assert float(r["value"]) == 0.0
    assert r["regime"] == "AlgebraicNegT"


def test_eval_elliptic_form_check(capsys):
    _, out = run(["--subcommand", "eval", "--s-range", "0", "--t-range", "1e4", "--format", "json"], capsys)
    doc = json.loads(out)
    rec = doc["records"][0]
    assert rec["regime"] == "Elliptic" and rec["error"] == ""
    assert doc["meta"]["version"] and doc["meta"]["schema_version"] == cli.SCHEMA_VERSION
    assert doc["meta"]["config"]["subcommand"] == "eval"


def test_boundary_pair(capsys):
    lo, hi = -2 * SQ3 - 1e-6, -2 * SQ3 + 1e-6
    _, out = run(["--subcommand", "sweep", "--s-range", f"{lo!r}:{hi!r}:2", "--t-range", "1e6",
                  "--edge-width", "0"], capsys)
    a, b = rows(out)
    assert (a["regime"], b["regime"]) == ("AlgebraicPosT", "Elliptic")
    assert abs(float(a["leading"]) - float(b["leading"])) <= 1e-4 * 1e3


def test_parallel_output_identical(capsys):
    base = ["--subcommand", "sweep", "--s-range", "-4:1:6", "--t-range", "-5:5:3"]
    _, serial = run(base, capsys)
    _, parallel = run(base + ["--jobs", "3"], capsys)
    _, seeded = run(base + ["--seed", "17"], capsys)
    assert serial == parallel == seeded


def test_modulation_and_out_file(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code, printed = run(["--subcommand", "modulation", "--s-range", "-3.4641016151377544:0:5",
                         "--out", str(out)], capsys)
    assert code == 0 and printed == ""
    r = rows(out.read_text())
    assert len(r) == 5
    assert float(r[0]["beta1"]) == pytest.approx(4 * SQ3, abs=1e-9)


def test_hm_table(capsys):
    _, out = run(["--subcommand", "hm-table", "--x-range", "-1:1:3"], capsys)
    r = rows(out)
    assert float(r[1]["q"]) == pytest.approx(0.36706155, abs=1e-7)


def test_verify_single_check(capsys):
    code, out = run(["--subcommand", "verify", "--only", "modulation-endpoints"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert {c["check"] for c in doc["checks"]} == {"modulation-endpoints"}


def test_verify_zero_tolerance_fails(capsys):
    code, out = run(["--subcommand", "verify", "--only", "dual-form", "--tol", "all=0"], capsys)
    doc = json.loads(out)
    assert code != 0 and not doc["passed"]
    assert doc["records"][0]["tolerance"] == 0.0


def test_verify_metric_override(capsys):
    code, _ = run(["--subcommand", "verify", "--only", "hm-tails", "--tol", "hm-tails.left_tail=1e-9"],
                  capsys)
    assert code == 1


def test_full_verify_reports_known_failures(capsys):
    code, out = run(["--subcommand", "verify"], capsys)
    doc = json.loads(out)
    names = [c["check"] for c in doc["checks"]]
    assert names == list(verification.CHECKS)
    failed = {c["check"] for c in doc["checks"] if not c["passed"]}
    # both are documented limitations of the stated criteria
    assert failed == {"whitham-order", "boundary-matching"}
    assert code == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--subcommand", "eval", "--t-range", "1"])
    with pytest.raises(SystemExit):
        cli.main(["--subcommand", "eval", "--s-range", "0:1:0", "--t-range", "1"])
    with pytest.raises(SystemExit):
        cli.main(["--subcommand", "nope"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pi2asym", "--subcommand", "classify",
                           "--x-range", "0", "--t-range", "-4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "AlgebraicNegT" in proc.stdout

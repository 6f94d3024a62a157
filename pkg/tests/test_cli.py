import io
import json
import subprocess
import sys

import pytest

from lhmaass.cli import main


def run(*argv):
    out = io.StringIO()
    rc = main(list(argv), stdout=out)
    return rc, out.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_eval_human_and_json():
    rc, text = run("eval", "--k", "2", "--level", "7", "--d0", "29", "--d", "37", "--x", "1/2", "--x", "3/2")
    assert rc == 0 and text.count("144") == 2
    rc, text = run("--json", "--no-timing", "eval", "--level", "7", "--d0", "29", "--d", "37", "--x", "1/2")
    rec = records(text)[0]
    assert rec["script_P"] == "144" and "elapsed_s" not in rec


def test_tsv():
    rc, text = run("--tsv", "--no-timing", "eval", "--level", "7", "--d0", "29", "--d", "37", "--d", "92", "--x", "1/2")
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert rc == 0
    assert lines[0].split("\t")[:4] == ["k", "N", "D0", "D"]
    assert len(lines) == 3


@pytest.mark.parametrize(
    "argv,code",
    [
        (("eval", "--level", "7", "--d0", "29", "--d", "36", "--x", "1/2"), 2),
        (("eval", "--level", "7", "--d0", "29", "--x", "1/2"), 2),
        (("hecke", "--level", "15", "--d0", "61", "--d", "181", "--preset", "nope", "--x", "1/2"), 2),
        (("lvalue", "--fixture", "/nonexistent/f.json", "--d", "92"), 4),
        (("lvalue", "--label", "7.4.a.a", "--d", "41"), 2),
    ],
)
def test_exit_codes(argv, code, capsys):
    rc, _ = run(*argv)
    assert rc == code
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert set(err) == {"error", "message"}


def test_verify_table_and_determinism():
    rc1, a = run("--json", "--no-timing", "--threads", "1", "verify-table", "15")
    rc3, b = run("--json", "--no-timing", "--threads", "3", "verify-table", "15")
    assert rc1 == rc3 == 0
    assert a == b
    recs = records(a)
    cells = [r for r in recs if "ok" in r]
    assert len(cells) == 36 and all(r["ok"] for r in cells)
    assert any(r.get("printed_x") == "1/19" for r in cells)


def test_cinfty_compare():
    rc, text = run("--json", "--no-timing", "cinfty", "--level", "7", "--d0", "29", "--d", "92", "--compare")
    rec = records(text)[0]
    assert rc == 0 and rec["ok"] and rec["closed_gamma"] == pytest.approx(576, abs=1e-9)


def test_hecke_detect():
    rc, text = run("--json", "--no-timing", "hecke", "--level", "7", "--d0", "29", "--d", "37", "--detect")
    assert rc == 0
    assert records(text)


def test_phi_and_splitting():
    rc, text = run("--json", "--no-timing", "phi", "--level", "7", "--d0", "29", "--d", "57", "--splitting-check")
    assert rc == 0
    rec = records(text)[0]
    assert abs(rec["residual"]) < 0.1


def test_lvalue():
    rc, text = run("--json", "--no-timing", "lvalue", "--label", "7.4.a.a", "--d", "92", "--d", "29")
    recs = records(text)
    assert rc == 0
    assert recs[0]["zero"] and not recs[1]["zero"]


def test_config_overlay(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"level": 7, "d0": 29, "d": [37, 92], "x": ["1/2"]}))
    rc, text = run("--json", "--no-timing", "--config", str(cfg), "eval")
    assert rc == 0 and [r["D"] for r in records(text)] == [37, 92]
    # command-line flags replace the file's list rather than appending
    rc, text = run("--json", "--no-timing", "--config", str(cfg), "eval", "--d", "57")
    assert [r["D"] for r in records(text)] == [57]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lhmaass", "--json", "--no-timing", "eval", "--level", "7", "--d0", "29", "--d", "37", "--x", "1/2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and '"script_P": "144"' in proc.stdout

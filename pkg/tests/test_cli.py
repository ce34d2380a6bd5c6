"""Command-line interface: config resolution, headers, exit codes."""

import shutil
import subprocess

import pytest

from shimor import __version__
from shimor.cli import main


def _lines(path):
    return path.read_text().splitlines()


def test_modelmap_curves_output(tmp_path):
    out = tmp_path / "curves.csv"
    assert main(["modelmap-curves", "--out", str(out)]) == 0
    lines = _lines(out)
    assert lines[0] == f"# shimor {__version__} modelmap-curves"
    assert lines[1].startswith("# config ")
    assert len(lines[1].split()[-1]) == 16
    header_keys = [ln[2:].split(" = ")[0] for ln in lines if " = " in ln]
    assert header_keys == sorted(header_keys)
    assert "# A = 0.63" in lines
    schema_at = lines.index("kind,mu,A,nu")
    rows = lines[schema_at + 1:]
    assert len(rows) == 7
    assert rows[0].startswith("l1,0.0,")
    assert any(ln.startswith("# residual l_SN ") for ln in lines)


def test_byte_determinism(tmp_path):
    out = tmp_path / "curves.csv"
    args = ["modelmap-curves", "--out", str(out), "--A", "0.5", "--nu", "0.7"]
    assert main(args) == 0
    first = out.read_bytes()
    assert main(args) == 0
    assert out.read_bytes() == first


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nA = 0.5\n\nnu = 0.85  # inline comment\n")
    out = tmp_path / "o.csv"

    assert main(["modelmap-curves", "--config", str(cfg), "--out", str(out)]) == 0
    assert "# A = 0.5" in _lines(out) and "# nu = 0.85" in _lines(out)

    monkeypatch.setenv("SHIMOR_OPT_A", "0.55")
    assert main(["modelmap-curves", "--config", str(cfg), "--out", str(out)]) == 0
    assert "# A = 0.55" in _lines(out)

    assert main(["modelmap-curves", "--config", str(cfg), "--out", str(out),
                 "--A", "0.6"]) == 0
    assert "# A = 0.6" in _lines(out)
    # the file layer still owns keys the upper layers left alone
    assert "# nu = 0.85" in _lines(out)


def test_env_keys_are_case_sensitive(tmp_path, monkeypatch):
    out = tmp_path / "o.csv"
    # schema key is "A"; a lowercase variable must not bind to it
    monkeypatch.setenv("SHIMOR_OPT_a", "0.11")
    assert main(["modelmap-curves", "--out", str(out)]) == 0
    assert "# A = 0.63" in _lines(out)


def test_config_error_exits_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("alpha = 0.4\n")
    out = tmp_path / "o.csv"
    assert main(["modelmap-curves", "--config", str(bad),
                 "--out", str(out)]) == 2
    assert not out.exists()
    assert main(["modelmap-curves", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(out)]) == 2
    unparsable = tmp_path / "unparsable.cfg"
    unparsable.write_text("just words\n")
    assert main(["modelmap-curves", "--config", str(unparsable),
                 "--out", str(out)]) == 2


def test_bad_value_exits_2(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["modelmap-curves", "--A", "zero", "--out", str(out)]) == 2
    assert main(["chart", "--rotated", "maybe", "--out", str(out)]) == 2


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as ei:
        main(["modelmap-curves", "--amplitude", "1.0"])
    assert ei.value.code == 2


def test_numeric_failure_exits_3(tmp_path, capsys):
    out = tmp_path / "o.csv"
    # both bracket endpoints share kneading symbol 0, bisection refuses
    assert main(["bisect-homoclinic", "--symbol_index", "0",
                 "--out", str(out)]) == 3
    assert "numeric failure" in capsys.readouterr().err


def test_kneading_row_matches_library(tmp_path):
    out = tmp_path / "kn.csv"
    assert main(["kneading", "--N", "12", "--out", str(out)]) == 0
    lines = _lines(out)
    assert "# termination completed" in lines
    assert lines[-1] == "0.4,0.9,100100110010"


def test_spectrum_output(tmp_path):
    out = tmp_path / "sp.csv"
    assert main(["spectrum", "--T", "200", "--transient", "50",
                 "--out", str(out)]) == 0
    lines = _lines(out)
    assert lines.index("alpha,lambda,L1,L2,L3,T") == len(lines) - 2
    row = lines[-1].split(",")
    assert len(row) == 6 and row[0] == "0.4" and row[1] == "0.9"
    assert any(ln.startswith("# error_bar ") for ln in lines)
    assert any(ln.startswith("# converged ") for ln in lines)


def test_bisect_output(tmp_path):
    out = tmp_path / "bi.csv"
    assert main(["bisect-homoclinic", "--tol", "1e-4", "--out", str(out)]) == 0
    row = _lines(out)[-1].split(",")
    assert abs(float(row[1]) - 1.20539) < 1e-3
    assert row[2] == "1"


def test_chart_subcommand(tmp_path):
    out = tmp_path / "chart.csv"
    args = ["chart", "--job", "kneading",
            "--axis1_lo", "0.4", "--axis1_hi", "0.5", "--axis1_n", "2",
            "--axis2_lo", "0.9", "--axis2_hi", "0.9", "--axis2_n", "1",
            "--out", str(out)]
    assert main(args) == 0
    lines = _lines(out)
    assert lines[0] == f"# shimor {__version__} chart"
    assert any(ln.startswith("# chart job=kneading") for ln in lines)
    data = [ln for ln in lines if not ln.startswith("#")
            and ln != "axis1,axis2,value,status"]
    assert len(data) == 2 and all(ln.endswith(",ok") for ln in data)


def test_chart_resume_identical_csv(tmp_path):
    common = ["chart", "--job", "kneading",
              "--axis1_lo", "0.4", "--axis1_hi", "0.5", "--axis1_n", "2",
              "--axis2_lo", "0.9", "--axis2_hi", "1.0", "--axis2_n", "2"]
    full_out = tmp_path / "full.csv"
    assert main(common + ["--out", str(full_out),
                          "--checkpoint", str(tmp_path / "a.ckpt")]) == 0
    part_out = tmp_path / "part.csv"
    ck = str(tmp_path / "b.ckpt")
    assert main(common + ["--out", str(part_out), "--checkpoint", ck,
                          "--max_cells", "2"]) == 0
    assert main(common + ["--out", str(part_out), "--checkpoint", ck,
                          "--resume", "true"]) == 0
    full = [ln for ln in _lines(full_out) if not ln.startswith("# out")
            and not ln.startswith("# config")
            and not ln.startswith("# max_cells")
            and not ln.startswith("# resume")
            and not ln.startswith("# checkpoint")]
    part = [ln for ln in _lines(part_out) if not ln.startswith("# out")
            and not ln.startswith("# config")
            and not ln.startswith("# max_cells")
            and not ln.startswith("# resume")
            and not ln.startswith("# checkpoint")]
    assert full == part


def test_unknown_beta_preset_exits_2(tmp_path):
    assert main(["verdict", "--beta_preset", "fig99",
                 "--out", str(tmp_path / "v.csv")]) == 2


def test_installed_entry_point(tmp_path):
    exe = shutil.which("shimor")
    assert exe, "console script not on PATH"
    r = subprocess.run([exe, "--version"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.strip() == f"shimor {__version__}"
    out = tmp_path / "c.csv"
    r = subprocess.run([exe, "modelmap-curves", "--out", str(out)],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "wrote 7 rows" in r.stderr
    assert out.exists()

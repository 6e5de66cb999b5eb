import json
import subprocess
import sys
from pathlib import Path

import pytest

from coneforms.cli import main


def run_cli(args, tmp_path):
    """Run the CLI in-process, capturing stdout."""
    import contextlib
    import io
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


def test_sphere_audit_passes_and_exits_zero(tmp_path):
    code, out = run_cli(["verify", "--suite", "sphere-audit",
                         "--cache-dir", str(tmp_path)], tmp_path)
    assert code == 0
    assert "checks passed, 0 failed" in out


def test_json_report_is_deterministic(tmp_path):
    args = ["verify", "--suite", "sphere-audit", "--format", "json",
            "--seed", "11", "--cache-dir", str(tmp_path)]
    code1, out1 = run_cli(args, tmp_path)
    code2, out2 = run_cli(args, tmp_path)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["schema"].startswith("coneforms-report/")
    assert doc["summary"]["failed"] == 0
    assert all("anchor" in c for c in doc["checks"])


def test_build_command_renders_maxwell(tmp_path):
    code, out = run_cli(["build", "--n", "4", "--k", "1", "--ell", "1",
                         "--cache-dir", str(tmp_path)], tmp_path)
    assert code == 0
    assert "order 2" in out
    # the Maxwell instance has pure second-order entries
    assert "dx" in out


def test_build_critical_power(tmp_path):
    code, out = run_cli(["build", "--n", "4", "--k", "0", "--ell", "2",
                         "--cache-dir", str(tmp_path)], tmp_path)
    assert code == 0
    assert "order 4" in out


def test_cache_list_and_clear(tmp_path):
    run_cli(["build", "--n", "4", "--k", "1", "--ell", "0",
             "--cache-dir", str(tmp_path)], tmp_path)
    code, out = run_cli(["cache", "list", "--cache-dir", str(tmp_path)],
                        tmp_path)
    assert code == 0 and "L_n4" in out
    code, out = run_cli(["cache", "clear", "--cache-dir", str(tmp_path)],
                        tmp_path)
    assert code == 0 and "removed" in out
    code, out = run_cli(["cache", "list", "--cache-dir", str(tmp_path)],
                        tmp_path)
    assert out.strip() == ""


def test_cache_files_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        run_cli(["build", "--n", "4", "--k", "1", "--ell", "1",
                 "--cache-dir", str(d)], tmp_path)
    fa = next(a.glob("*.json"))
    fb = b / fa.name
    assert fa.read_bytes() == fb.read_bytes()


def test_config_file_and_flag_override(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("[verify]\nn = 4\nseed = 3\nsphere-ns = 4,6\n",
                       encoding="utf-8")
    code, out = run_cli(["--config", str(cfgfile), "verify",
                         "--suite", "sphere-audit", "--format", "json",
                         "--cache-dir", str(tmp_path)], tmp_path)
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["sphere_ns"] == "4,6"
    assert doc["config"]["seed"] == "3"
    # flag overrides the file
    code, out = run_cli(["--config", str(cfgfile), "verify",
                         "--suite", "sphere-audit", "--format", "json",
                         "--seed", "9", "--cache-dir", str(tmp_path)],
                        tmp_path)
    doc = json.loads(out)
    assert doc["config"]["seed"] == "9"


def test_bad_config_exits_two(tmp_path):
    code, _ = run_cli(["verify", "--suite", "sphere-audit",
                       "--config", str(tmp_path / "missing.cfg")], tmp_path)
    assert code == 2
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("[verify]\ntrials = zero\n", encoding="utf-8")
    code, _ = run_cli(["--config", str(cfgfile), "verify",
                       "--suite", "sphere-audit"], tmp_path)
    assert code == 2
    cfgfile.write_text("[verify]\nsignature = 9,9\n", encoding="utf-8")
    code, _ = run_cli(["--config", str(cfgfile), "verify",
                       "--suite", "sphere-audit"], tmp_path)
    assert code == 2


def test_report_rendering_roundtrip(tmp_path):
    out_path = tmp_path / "report.json"
    code, _ = run_cli(["verify", "--suite", "sphere-audit",
                       "--output", str(out_path),
                       "--cache-dir", str(tmp_path)], tmp_path)
    assert code == 0 and out_path.exists()
    code, out = run_cli(["report", str(out_path)], tmp_path)
    assert code == 0
    assert "checks passed" in out


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "coneforms.cli", "verify", "--suite",
         "sphere-audit"], capture_output=True, text=True, cwd="/tmp")
    assert proc.returncode == 0


def test_scale_registry_loads_and_validates(tmp_path):
    reg = tmp_path / "scales.cfg"
    reg.write_text("# extra scales\nhyper = 1/3\n", encoding="utf-8")
    code, out = run_cli(["verify", "--suite", "sphere-audit",
                         "--scales", str(reg),
                         "--cache-dir", str(tmp_path)], tmp_path)
    assert code == 0
    from coneforms.factory import get_context
    assert "hyper" in get_context(4, 4, 0).scales
    bad = tmp_path / "bad.cfg"
    bad.write_text("oops\n", encoding="utf-8")
    code, _ = run_cli(["verify", "--suite", "sphere-audit",
                       "--scales", str(bad)], tmp_path)
    assert code == 2

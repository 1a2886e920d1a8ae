import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from arealaw import cli
from arealaw.cli import ConfigError, fmt, main, parse_int_list, parse_kinds, parse_number_list
from arealaw.fits import FitResult
from arealaw.quadform import DistributionKind


def run(tmp_path, *args, name="out.csv"):
    target = tmp_path / name
    code = main([*args, "--output", str(target)])
    return code, target


def data_rows(path):
    lines = [line for line in Path(path).read_text().splitlines() if not line.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_number_formatting_round_trips():
    for value in (0.1, 1 / 3, -2.5e-300, 12345.678901234567):
        assert float(fmt(value)) == value
    assert fmt(None) == "" and fmt(7) == "7" and fmt(0.0) == "0"


def test_list_syntax():
    assert parse_int_list("1,3:5,10:20:5") == [1, 3, 4, 5, 10, 15, 20]
    assert parse_number_list("1, 1/2,0.25") == [1.0, 0.5, 0.25]
    assert parse_kinds("husimi,wigner") == [DistributionKind.WIGNER, DistributionKind.HUSIMI]
    assert parse_kinds("all") == list(DistributionKind)
    for bad in ("", "1:2:0", "a"):
        with pytest.raises((ConfigError, ValueError)):
            parse_int_list(bad)
    with pytest.raises(ConfigError):
        parse_kinds("wehrl")


def test_vacuum_scan_is_all_zero(tmp_path):
    code, out = run(tmp_path, "scan", "--sites", "8", "--spacing", "0.25", "--state", "vacuum",
                    "--orders", "2,3")
    assert code == 0
    rows = data_rows(out)
    assert len(rows) == 7 * 4 * 2
    assert all(float(r["subtracted"]) == 0.0 and float(r["delta_s"]) == 0.0 for r in rows)
    assert all((r["wehrl_offset_subtracted"] != "") == (r["kind"] == "husimi") for r in rows)
    assert all(r["runtime_ms"] == "" for r in rows)


def test_scan_row_order_and_header(tmp_path):
    code, out = run(tmp_path, "scan", "--sites", "6", "--state", "particle", "--momentum", "edge",
                    "--orders", "4,2", "--kinds", "husimi,field", "--regions", "3,1")
    assert code == 0
    text = out.read_text()
    assert "\r" not in text and text.endswith("\n")
    assert "# command=scan" in text and "# momentum=edge" in text
    keys = [(int(r["M"]), r["kind"], float(r["r"])) for r in data_rows(out)]
    assert keys == [(m, kind, r) for m in (1, 3) for kind in ("field", "husimi") for r in (2.0, 4.0)]
    assert all(row["state"] == "particle(k=3)" for row in data_rows(out))


def test_mutual_information_of_vacuum_and_ground_state(tmp_path):
    code, out = run(tmp_path, "mutual-info", "--sites", "10", "--state", "vacuum")
    assert code == 0
    assert all(float(r["mutual_information"]) == 0.0 for r in data_rows(out))
    code, out = run(tmp_path, "mutual-info", "--sites", "40", "--spacing", "0.25", "--state", "thermal",
                    "--temperature", "0.5", name="thermal.csv")
    rows = data_rows(out)
    assert code == 0 and len(rows) == 39 * 4
    assert min(float(r["mutual_information"]) for r in rows) >= -1e-8
    footer = [line for line in out.read_text().splitlines() if line.startswith("# fit")]
    assert len(footer) == 8 and all("model=finite_size" in l or "model=chord" in l for l in footer)


@pytest.mark.parametrize("args", [
    ["scan", "--sites", "1"],
    ["scan", "--sites", "8", "--state", "thermal"],
    ["scan", "--sites", "8", "--temperature", "1"],
    ["scan", "--sites", "8", "--regions", "0:3"],
    ["scan", "--sites", "8", "--state", "particle", "--momentum", "9"],
    ["scan", "--sites", "8", "--state", "particle", "--momentum", "1", "--orders", "1.5"],
    ["scan", "--sites", "8", "--kinds", "wehrl"],
    ["scan", "--sites", "8", "--threads", "0"],
    ["mutual-info", "--sites", "8", "--regions", "8"],
    ["central-charge", "--length", "20", "--spacings", "1", "--max-length", "4"],
    ["central-charge", "--length", "20", "--spacings", "1,1/2,1/3,1/4", "--max-length", "4.1"],
])
def test_invalid_configs_exit_nonzero_without_output(tmp_path, capsys, args):
    code, out = run(tmp_path, *args)
    assert code != 0
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nsites = 12\nspacing = 1/4\nstate = thermal\ntemperature = 2\n"
                   "kinds = field\nregions = 2:4\n")
    code, out = run(tmp_path, "scan", "--config", str(cfg), "--kinds", "momentum")
    assert code == 0
    text = out.read_text()
    assert "# spacing=0.25" in text and "# kinds=momentum" in text
    assert {r["kind"] for r in data_rows(out)} == {"momentum"}
    assert [r["M"] for r in data_rows(out)] == ["2", "3", "4"]


def test_bad_config_file_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sites = 12\ncolour = blue\n")
    code, out = run(tmp_path, "scan", "--config", str(cfg))
    assert code == 2 and not out.exists()


def test_central_charge_recovers_injected_prefactors(tmp_path, monkeypatch):
    spacings = [1.0, 0.5, 0.25, 0.2, 0.1]

    def injected(lengths, values, spacing):
        a = 0.25 + 0.3 * spacing**1.5
        return FitResult("log", {"a": a, "b": 0.0}, 0.0, np.zeros(1), len(lengths))

    monkeypatch.setattr(cli, "fit_log_area_law", injected)
    code, out = run(tmp_path, "central-charge", "--length", "20", "--mass", "0.1", "--kinds", "wigner",
                    "--spacings", ",".join(map(str, spacings)), "--max-length", "2")
    assert code == 0
    footer = next(l for l in out.read_text().splitlines() if l.startswith("# continuum"))
    params = dict(item.split("=") for item in footer.split()[2:])
    assert float(params["c1"]) == pytest.approx(0.25, abs=1e-9)
    assert float(params["c2"]) == pytest.approx(0.3, abs=1e-9)
    assert float(params["c3"]) == pytest.approx(1.5, abs=1e-9)


@pytest.mark.parametrize("args", [
    ["scan", "--length", "10", "--spacing", "0.1", "--mass", "10", "--state", "particle",
     "--momentum", "edge", "--orders", "2,3,4", "--regions", "5:95:10"],
    ["mutual-info", "--sites", "200", "--spacing", "0.1", "--mass", "1e-6", "--state", "thermal",
     "--temperature", "0.1"],
    ["central-charge", "--length", "20", "--mass", "1e-3", "--spacings", "1,1/2,1/4,1/5",
     "--max-length", "4"],
])
def test_output_is_independent_of_thread_count(tmp_path, args):
    outputs = []
    for threads in ("1", "8", "1", "8"):
        code, out = run(tmp_path, *args, "--threads", threads, name=f"t{threads}-{len(outputs)}.csv")
        assert code == 0
        outputs.append(out.read_bytes())
    assert all(blob == outputs[0] for blob in outputs)
    assert b"threads" not in outputs[0]


def test_timing_fills_runtime_column(tmp_path):
    code, out = run(tmp_path, "scan", "--sites", "6", "--regions", "2", "--kinds", "field", "--timing")
    assert code == 0
    assert float(data_rows(out)[0]["runtime_ms"]) >= 0.0


def test_oracle_toggle_checks_small_regions(tmp_path):
    code, out = run(tmp_path, "scan", "--sites", "3", "--state", "particle", "--momentum", "1",
                    "--orders", "2,3", "--oracle")
    assert code == 0
    footer = [l for l in out.read_text().splitlines() if l.startswith("# oracle checked")][0]
    assert "checked=16" in footer


def test_verify_command_passes(capsys):
    assert main(["verify"]) == 0
    table = capsys.readouterr().out
    assert table.count("PASS") == 5 and "FAIL" not in table


def test_module_entry_point_without_numba(tmp_path):
    env = dict(os.environ, AREALAW_DISABLE_NUMBA="1")
    out = tmp_path / "numpy.csv"
    subprocess.run([sys.executable, "-m", "arealaw", "scan", "--sites", "5", "--state", "particle",
                    "--momentum", "2", "--orders", "2", "--output", str(out)], env=env, check=True)
    assert len(data_rows(out)) == 4 * 4

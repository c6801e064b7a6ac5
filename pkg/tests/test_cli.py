import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from harma.cli import main, replicate_path
from harma.covariance import AcvfTable
from harma.simulate import TimeSeries
from harma.spectral import SpectrumGrid

FIG2 = ["--family", "pincherle", "--nu", "0.3", "--u", "0.1", "--phi", "0.5"]

COMMAND_LINES = {
    "coeffs": ["coeffs", "--family", "horadam-pethe", "--trunc", "30"],
    "validate": ["validate", *FIG2],
    "simulate": ["simulate", *FIG2, "--n", "200", "--seed", "4"],
    "spectrum": ["spectrum", "--family", "gegenbauer", "--u", "0.3", "--points", "64"],
    "acvf": ["acvf", "--family", "gegenbauer", "--u", "0.4", "--lags", "5", "--trunc", "500"],
    "singularities": ["singularities", "--family", "pincherle", "--u", "0"],
    "periodogram": ["periodogram", "--family", "gegenbauer", "--u", "0.5", "--n", "256"],
}


def run_to(tmp_path, argv, name="out.csv"):
    out = tmp_path / name
    status = main([*argv, "--out", str(out)])
    return status, out


def test_validate_fig2_status_zero(tmp_path):
    status, out = run_to(tmp_path, COMMAND_LINES["validate"])
    assert status == 0
    assert "stationary,true" in out.read_text()


def test_simulate_nu_out_of_range_is_status_3(capsys):
    assert main(["simulate", "--nu", "0.6"]) == 3
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["status"] == 3 and record["error"] == "ValidationError"


def test_validate_non_stationary_reports_and_returns_3(tmp_path):
    status, out = run_to(tmp_path, ["validate", "--nu", "0.7"])
    assert status == 3
    assert "stationary,false" in out.read_text()


def test_parse_error_is_status_2(capsys):
    assert main(["spectrum", "--points", "many"]) == 2
    assert json.loads(capsys.readouterr().err)["status"] == 2
    assert main(["nope"]) == 2


def test_family_conflict_is_status_2():
    assert main(["coeffs", "--family", "pincherle", "--m", "2"]) == 2


def test_bad_config_file_is_status_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json and no config line")
    assert main(["coeffs", "--config", str(bad)]) == 2
    assert main(["coeffs", "--config", str(tmp_path / "missing.json")]) == 2
    typo = tmp_path / "typo.json"
    typo.write_text(json.dumps({"nuu": 0.2}))
    assert main(["coeffs", "--config", str(typo)]) == 2


def test_nonintegrable_spectrum_is_status_3():
    # double root with 4 nu >= 1: the model lies outside the spectral route's domain
    assert main(["acvf", "--family", "gegenbauer", "--u", "1", "--nu", "0.3",
                 "--method", "spectral"]) == 3


def test_quadrature_failure_is_status_4(capsys):
    assert main(["acvf", "--family", "gegenbauer", "--u", "0.4", "--method", "spectral",
                 "--tol", "1e-300", "--lags", "1"]) == 4
    assert json.loads(capsys.readouterr().err)["error"] == "QuadratureError"


def test_spectrum_marks_poles(tmp_path):
    status, out = run_to(tmp_path, COMMAND_LINES["spectrum"])
    assert status == 0
    with open(out) as fh:
        grid = SpectrumGrid.from_csv(fh)
    assert grid.omegas[grid.is_singular] == pytest.approx([-math.acos(0.3), math.acos(0.3)])


@pytest.mark.parametrize("command", sorted(COMMAND_LINES))
@pytest.mark.filterwarnings("ignore::UserWarning")
def test_byte_identical_reruns(tmp_path, command):
    s1, a = run_to(tmp_path, COMMAND_LINES[command], "a.csv")
    s2, b = run_to(tmp_path, COMMAND_LINES[command], "b.csv")
    assert s1 == s2 == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("command", sorted(COMMAND_LINES))
@pytest.mark.filterwarnings("ignore::UserWarning")
def test_config_echo_reruns_identically(tmp_path, command):
    _, first = run_to(tmp_path, COMMAND_LINES[command], "first.csv")
    _, again = run_to(tmp_path, [command, "--config", str(first)], "again.csv")
    assert first.read_bytes() == again.read_bytes()


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "gegenbauer", "nu": 0.2, "u": 0.5, "trunc": 4}))
    _, out = run_to(tmp_path, ["coeffs", "--config", str(cfg), "--nu", "0.1"])
    text = out.read_text()
    assert '"nu":0.1' in text and '"trunc":4' in text and '"m":2' in text


def test_family_flag_overrides_config_family(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "gegenbauer", "variant": "type2", "m": 2}))
    status, out = run_to(tmp_path, ["coeffs", "--config", str(cfg), "--family", "pincherle"])
    assert status == 0
    assert '"m":3' in out.read_text()


def test_csv_artifacts_parse_back(tmp_path):
    _, sim = run_to(tmp_path, COMMAND_LINES["simulate"], "sim.csv")
    with open(sim) as fh:
        ts = TimeSeries.from_csv(fh)
    assert len(ts) == 200 and ts.seed == 4
    _, ac = run_to(tmp_path, COMMAND_LINES["acvf"], "acvf.csv")
    with open(ac) as fh:
        table = AcvfTable.from_csv(fh)
    assert table.method == "ma_convolution" and len(table.values) == 6


def test_periodogram_from_input_matches_inline(tmp_path):
    _, sim = run_to(tmp_path, ["simulate", "--family", "gegenbauer", "--u", "0.5", "--n",
                               "256"], "sim.csv")
    _, p1 = run_to(tmp_path, ["periodogram", "--input", str(sim)], "p1.csv")
    _, p2 = run_to(tmp_path, COMMAND_LINES["periodogram"], "p2.csv")
    strip = lambda p: [ln for ln in p.read_text().splitlines() if not ln.startswith("#")]
    assert strip(p1) == strip(p2)


def test_json_format_encodes_inf(tmp_path):
    _, out = run_to(tmp_path, [*COMMAND_LINES["spectrum"], "--format", "json"], "s.json")
    doc = json.loads(out.read_text())
    assert "inf" in doc["data"]["value"]
    assert doc["provenance"]["tool"].startswith("harma ")
    # a JSON artifact is also a valid --config source
    _, again = run_to(tmp_path, ["spectrum", "--config", str(out), "--format", "json"],
                      "t.json")
    assert again.read_bytes() == out.read_bytes()


def test_replicates_write_files_and_manifest(tmp_path):
    out = tmp_path / "rep.csv"
    argv = ["simulate", "--family", "gegenbauer", "--u", "0.5", "--n", "50",
            "--seed", "10", "--replicates", "3", "--out", str(out)]
    assert main(argv) == 0
    manifest = json.loads((tmp_path / "rep_manifest.json").read_text())
    assert [e["seed"] for e in manifest["replicates"]] == [10, 11, 12]
    paths = [replicate_path(str(out), i) for i in range(3)]
    series = []
    for p in paths:
        with open(p) as fh:
            series.append(TimeSeries.from_csv(fh).values)
    assert not np.array_equal(series[0], series[1])
    # replicate i equals a single run at seed 10 + i
    single = tmp_path / "single.csv"
    main(["simulate", "--family", "gegenbauer", "--u", "0.5", "--n", "50", "--seed", "11",
          "--out", str(single)])
    with open(single) as fh:
        assert np.array_equal(TimeSeries.from_csv(fh).values, series[1])


def test_replicates_need_out():
    assert main(["simulate", "--replicates", "2"]) == 2


def test_stdout_when_no_out(capsys):
    assert main(["coeffs", "--trunc", "2"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("# tool: harma ")
    assert text.splitlines()[-1].startswith("2,")


def test_console_script_module_entry():
    res = subprocess.run([sys.executable, "-m", "harma.cli", "singularities", "--family",
                          "gegenbauer", "--u", "0"], capture_output=True, text=True)
    assert res.returncode == 0
    rows = [ln for ln in io.StringIO(res.stdout) if not ln.startswith("#")]
    assert rows[0].strip() == "omega,kind,U"
    assert len(rows) == 3

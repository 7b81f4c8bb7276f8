"""CLI behaviour and golden files.

Set ENOSE_REGEN_GOLDEN=1 to rewrite tests/golden/ after an intended change.
"""
import io
import os
from pathlib import Path

import numpy as np
import pytest

from enose import can
from enose.classifier import FingerprintLibrary, predict_ratios
from enose.cli import main, read_ratios
from enose.config import default_text
from enose.errors import ParseError
from enose.gas_model import GasSpecies
from enose.pack import default_pack

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("ENOSE_REGEN_GOLDEN") == "1"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def check_golden(produced: Path, name: str):
    golden = GOLDEN / name
    files = sorted(p.name for p in produced.iterdir())
    if REGEN:
        golden.mkdir(parents=True, exist_ok=True)
        for f in files:
            (golden / f).write_bytes((produced / f).read_bytes())
    assert files == sorted(p.name for p in golden.iterdir())
    for f in files:
        assert (produced / f).read_bytes() == (golden / f).read_bytes(), f


@pytest.fixture(scope="module")
def methane_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("methane")
    code, stdout, err = run("simulate", "--gas", "methane=500", "--seed", 42, "--out", out)
    assert code == 0, err
    return out, stdout


def test_simulate_methane(methane_run):
    out, stdout = methane_run
    row = (out / "classification.csv").read_text().splitlines()[1]
    assert row.startswith("Methane,")
    assert float(row.split(",")[1]) == pytest.approx(500.0, rel=0.02)
    log = can.parse_log((out / "bus.log").read_text())
    assert log[-1].frame.id == can.CLASSIFICATION_ID
    assert stdout.splitlines()[-1] == row


def test_simulate_golden(methane_run):
    check_golden(methane_run[0], "simulate_methane_500_seed42")


def test_simulate_clean_air(tmp_path):
    code, _, err = run("simulate", "--seed", 42, "--out", tmp_path)
    assert code == 0, err
    assert (tmp_path / "classification.csv").read_text().splitlines()[1].startswith("Unknown,0,")
    ids = [e.frame.id for e in can.parse_log((tmp_path / "bus.log").read_text())]
    assert can.ALERT_ID not in ids


def test_simulate_high_concentration_raises_alert(tmp_path):
    code, _, err = run("simulate", "--gas", "ethanol=4000", "--out", tmp_path)
    assert code == 0, err
    log = can.parse_log((tmp_path / "bus.log").read_text())
    alerts = [can.decode(e.frame) for e in log if e.frame.id == can.ALERT_ID]
    assert alerts == [can.Alert(int(GasSpecies.ETHANOL), 3)]
    assert log[-1].frame.id == can.CLASSIFICATION_ID


def test_simulate_rejects_bad_config(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text(default_text().replace("tau_rise = 3.5", "tau_rise = 0.0"))
    code, _, err = run("simulate", "--config", conf, "--out", tmp_path / "o")
    assert code == 2
    assert "tau_rise" in err and "line" in err


def test_simulate_model_error_exit_code(tmp_path):
    conf = tmp_path / "slow.conf"
    # a 1 s stabilisation cannot settle a 3.5 s sensor
    text = default_text().replace("stabilize = 60.0", "stabilize = 1.0").replace("measure = 10.0", "measure = 0.5")
    conf.write_text(text)
    code, _, err = run("simulate", "--gas", "methane=500", "--config", conf, "--out", tmp_path / "o")
    assert code == 3
    assert "drifting" in err


def test_sweep_methane(tmp_path):
    code, _, err = run("sweep", "--gas", "methane", "--c-min", 100, "--c-max", 10000, "--points", 50,
                       "--plot", "--out", tmp_path)
    assert code == 0, err
    lines = (tmp_path / "sweep_methane.csv").read_text().splitlines()
    assert len(lines) == 51
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    assert np.all(np.diff(data[:, 1:6], axis=0) < 0)
    assert np.all(np.diff(data[:, 6:11], axis=0) > 0)
    check_golden(tmp_path, "sweep_methane")


def test_sweep_two_points_hits_endpoints():
    code, out, _ = run("sweep", "--gas", "hydrogen", "--c-min", 37.5, "--c-max", 4200, "--points", 2)
    assert code == 0
    rows = out.splitlines()[1:]
    assert [float(r.split(",")[0]) for r in rows] == [37.5, 4200.0]


def test_sweep_bad_range():
    code, _, err = run("sweep", "--gas", "methane", "--c-min", 100, "--c-max", 100)
    assert code == 2 and "c_min < c_max" in err


def _write_ratios(path, ratios, header=True):
    lines = ["r0,r1,r2,r3,r4"] if header else []
    lines.append(",".join(repr(float(r)) for r in ratios))
    path.write_text("\n".join(lines) + "\n")


def test_classify_ethanol(tmp_path):
    lib = FingerprintLibrary(default_pack())
    _write_ratios(tmp_path / "f.csv", predict_ratios(lib, GasSpecies.ETHANOL, 800.0))
    code, out, err = run("classify", tmp_path / "f.csv")
    assert code == 0, err
    species, conc, residual, _ = out.splitlines()[1].split(",")
    assert species == "Ethanol"
    assert float(conc) == pytest.approx(800.0, rel=1e-3)
    assert float(residual) < 1e-6


def test_classify_all_ones(tmp_path):
    _write_ratios(tmp_path / "f.csv", [1.0] * 5, header=False)
    code, out, _ = run("classify", tmp_path / "f.csv")
    assert code == 0
    assert out.splitlines()[1].startswith("Unknown,0,")


def test_classify_three_columns(tmp_path):
    (tmp_path / "f.csv").write_text("0.5,0.5,0.5\n")
    code, _, err = run("classify", tmp_path / "f.csv")
    assert code == 2 and "row 1" in err and "5 columns" in err


def test_classify_simulate_features(methane_run):
    out, _ = methane_run
    code, stdout, _ = run("classify", out / "features.csv")
    assert code == 0
    assert stdout.splitlines()[1] == (out / "classification.csv").read_text().splitlines()[1]


def test_read_ratios_reports_location():
    with pytest.raises(ParseError, match="row 2, column 3"):
        read_ratios("a,b,c,d,e\n0.5,0.5,x,0.5,0.5\n")


def test_canlog_decodes_simulate_log(methane_run):
    out, _ = methane_run
    code, stdout, _ = run("canlog", out / "bus.log")
    assert code == 0
    lines = stdout.splitlines()
    assert len(lines) == len((out / "bus.log").read_text().splitlines())
    assert lines[-1].split()[2] == "Classification"


def test_canlog_filter(methane_run):
    out, _ = methane_run
    code, stdout, _ = run("canlog", out / "bus.log", "--filter", "alert")
    assert code == 0 and stdout == ""
    code, stdout, _ = run("canlog", out / "bus.log", "--filter", "reading")
    assert len(stdout.splitlines()) == 5


def test_canlog_corrupt_hex(tmp_path):
    log = tmp_path / "bus.log"
    log.write_text("0 100 8 00 00 01 99 00 00 3A BB n0\n1 101 8 01 00 02 ZZ 00 00 21 9B n1\n")
    code, _, err = run("canlog", log)
    assert code == 2 and "line 2" in err


def test_canlog_undecodable_frame(tmp_path):
    log = tmp_path / "bus.log"
    log.write_text("0 100 8 00 00 01 99 00 00 3A BB n0\n\n5 3FF 1 00 n1\n")
    code, _, err = run("canlog", log)
    assert code == 2 and "line 3" in err


def test_unknown_subcommand():
    code, _, _ = run("frobnicate")
    assert code == 2

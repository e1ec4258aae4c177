"""Command-line interface: outputs, config resolution, exit codes."""

import csv
import json

import pytest

from iongates.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main


def run(tmp_path, *argv):
    return main(list(argv))


def read_csv(path):
    """(header_lines, columns, data_rows) of a '#'-headed CSV file."""
    header, body = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            (header if line.startswith("#") else body).append(line)
    rows = list(csv.reader(body))
    return header, rows[0], rows[1:]


# ------------------------------------------------------------------- modes

def test_modes_csv(tmp_path):
    out = tmp_path / "modes.csv"
    assert main(["modes", "--out", str(out)]) == EXIT_OK
    header, columns, rows = read_csv(out)
    assert header[0].startswith("# iongates modes")
    assert any("units:" in h and "nu_1" in h for h in header)
    assert any("budget = 0.01" in h for h in header)
    assert columns == ["q", "freq_ratio", "min_rel_spacing", "eta_max",
                       "max_rate"]
    assert len(rows) == 6
    assert rows[0][0] == "1" and rows[0][1] == "1"
    assert rows[1][1] == "1.73205080757"
    assert rows[5][2] == "" and rows[5][3] == "" and rows[5][4] == ""


def test_modes_json(tmp_path):
    out = tmp_path / "modes.json"
    assert main(["modes", "--format", "json", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["command"] == "iongates modes"
    assert "nu_1" in doc["units"]
    assert doc["config"]["budget"] == 0.01
    assert len(doc["rows"]) == 6
    assert doc["rows"][5]["eta_max"] is None


def test_modes_budget_must_be_positive(tmp_path, capsys):
    assert main(["modes", "--budget", "0"]) == EXIT_USAGE
    assert "budget" in capsys.readouterr().err


# ------------------------------------------------------------ config files

def test_config_file_with_flag_override(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("eta = 0.05   # chain parameter\nt_final = 10\n"
                       "samples = 5\n")
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--config", str(cfgfile), "--eta", "0.07",
                 "--out", str(out)]) == EXIT_OK
    header, _, _ = read_csv(out)
    assert any(h.strip() == "# eta = 0.07" for h in header)
    assert any(h.strip() == "# t_final = 10" for h in header)


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("bogus = 3\n")
    assert main(["modes", "--config", str(cfgfile)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "unknown config key" in err and "bad.cfg:1" in err


def test_malformed_config_line(tmp_path, capsys):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("eta 0.05\n")
    assert main(["modes", "--config", str(cfgfile)]) == EXIT_USAGE
    assert "key = value" in capsys.readouterr().err


def test_missing_config_file(capsys):
    assert main(["modes", "--config", "/nonexistent.cfg"]) == EXIT_USAGE
    assert "cannot read" in capsys.readouterr().err


def test_bad_config_value(tmp_path):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("samples = many\n")
    assert main(["modes", "--config", str(cfgfile)]) == EXIT_USAGE


# ---------------------------------------------------------------- simulate

def test_simulate_population_columns(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--t-final", "5", "--samples", "6",
                 "--out", str(out)]) == EXIT_OK
    header, columns, rows = read_csv(out)
    assert header[0].startswith("# iongates simulate")
    assert columns[0] == "t"
    for name in ("pop_e_0", "pop_g_0", "pop_plus_0", "pop_minus_0",
                 "pop_minus_2"):
        assert name in columns
    assert len(rows) == 6
    first = dict(zip(columns, rows[0]))
    assert float(first["t"]) == 0.0
    assert float(first["pop_plus_0"]) == pytest.approx(1.0)   # initial '+:0'
    assert float(first["pop_e_0"]) == pytest.approx(0.5)


def test_simulate_two_ion_chain(tmp_path):
    out = tmp_path / "sim2.csv"
    assert main(["simulate", "--n-ions", "2", "--initial", "+:0,0",
                 "--t-final", "2", "--samples", "3",
                 "--out", str(out)]) == EXIT_OK
    header, columns, _ = read_csv(out)
    assert any("1.73205080757" in h for h in header)          # stretch mode
    assert "pop_plus_0_0" in columns


def test_simulate_bad_initial_labels(capsys):
    assert main(["simulate", "--initial", "q:0"]) == EXIT_USAGE
    assert main(["simulate", "--initial", "g"]) == EXIT_USAGE
    assert main(["simulate", "--initial", "g:9"]) == EXIT_USAGE
    capsys.readouterr()


def test_simulate_parameter_validation():
    assert main(["simulate", "--t-final", "-1"]) == EXIT_USAGE
    assert main(["simulate", "--samples", "1"]) == EXIT_USAGE
    assert main(["simulate", "--fock", "3,3"]) == EXIT_USAGE  # 1 mode only
    assert main(["simulate", "--fock", "x"]) == EXIT_USAGE


def test_simulate_truncation_abort(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    rc = main(["simulate", "--fock", "1", "--t-final", "5", "--samples", "5",
               "--out", str(out)])
    assert rc == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err


def test_simulate_plot(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--t-final", "5", "--samples", "6", "--plot",
                 "--out", str(out)]) == EXIT_OK
    assert (tmp_path / "sim.png").exists()
    assert main(["simulate", "--t-final", "5", "--samples", "6",
                 "--plot"]) == EXIT_USAGE                     # needs --out


def test_omega_prime_parsing(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--omega-prime", "0.3", "--t-final", "2",
                 "--samples", "3", "--out", str(out)]) == EXIT_OK
    header, _, _ = read_csv(out)
    assert any(h.strip() == "# omega_prime = 0.3" for h in header)
    assert main(["simulate", "--omega-prime", "fast"]) == EXIT_USAGE
    assert main(["simulate", "--omega-prime", "-0.1"]) == EXIT_USAGE


# ------------------------------------------------------------------- sweep

def test_sweep_csv_and_summary_sidecar(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--grid-start", "0.49", "--grid-stop", "0.51",
                 "--grid-points", "3", "--out", str(out)]) == EXIT_OK
    header, columns, rows = read_csv(out)
    assert columns == ["omega_over_nu", "fidelity", "t_of_max", "error"]
    assert len(rows) == 3
    assert all(0.0 <= float(r[1]) <= 1.0 for r in rows)
    side = json.loads((tmp_path / "sweep.summary.json").read_text())
    assert side["summary"]["scheme"] == "lightshift"
    assert "threshold" in side["summary"]


def test_sweep_json_format(tmp_path):
    out = tmp_path / "sweep.json"
    assert main(["sweep", "--grid-start", "0.49", "--grid-stop", "0.51",
                 "--grid-points", "3", "--format", "json",
                 "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["command"] == "iongates sweep"
    assert len(doc["points"]) == 3


def test_sweep_plot(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--grid-start", "0.49", "--grid-stop", "0.51",
                 "--grid-points", "3", "--plot", "--out", str(out)]) == EXIT_OK
    assert (tmp_path / "sweep.png").exists()


def test_sweep_grid_validation():
    assert main(["sweep", "--grid-points", "1"]) == EXIT_USAGE
    assert main(["sweep", "--grid-start", "0.5", "--grid-stop", "0.4",
                 "--grid-points", "3"]) == EXIT_USAGE
    assert main(["sweep", "--grid-start", "0", "--grid-stop", "0.5",
                 "--grid-points", "3", "--grid-scale", "log"]) == EXIT_USAGE


# ------------------------------------------------------------- truth-table

def test_truth_table_idealized(tmp_path):
    out = tmp_path / "tt.csv"
    assert main(["truth-table", "--min-fidelity", "0.999999",
                 "--out", str(out)]) == EXIT_OK
    header, columns, rows = read_csv(out)
    assert columns == ["input", "output", "fidelity", "bus_ground_population"]
    assert [r[0] for r in rows] == ["gg", "ge", "eg", "ee"]
    assert all(float(r[2]) > 1 - 1e-9 for r in rows)
    assert any(h.strip() == "# idealized = True" for h in header)


def test_truth_table_full_fidelity_gate(tmp_path, capsys):
    out = tmp_path / "tt.csv"
    rc = main(["truth-table", "--full", "--min-fidelity", "0.999",
               "--out", str(out)])
    assert rc == EXIT_NUMERICAL
    assert "below required" in capsys.readouterr().err
    _, _, rows = read_csv(out)                 # the table is still written
    assert all(float(r[2]) > 0.97 for r in rows)


def test_truth_table_cz_scheme(tmp_path):
    out = tmp_path / "tt.json"
    assert main(["truth-table", "--scheme", "cz", "--format", "json",
                 "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["config"]["omega_prime"] == pytest.approx(0.015)  # 'resonant'
    assert doc["config"]["control_ion"] == 0
    assert all(r["fidelity"] > 1 - 1e-9 for r in doc["rows"])


def test_truth_table_rejects_sweep_only_schemes(capsys):
    assert main(["truth-table", "--scheme", "cz_standing"]) == EXIT_USAGE
    capsys.readouterr()


# ------------------------------------------------------------ shared paths

def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--t-final", "3", "--samples", "5"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    a, b = tmp_path / "sa.csv", tmp_path / "sb.csv"
    args = ["sweep", "--grid-start", "0.49", "--grid-stop", "0.51",
            "--grid-points", "3"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors_exit_one(capsys):
    assert main(["simulate", "--bogus"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    assert main(["sweep", "--scheme", "nonsense"]) == EXIT_USAGE
    capsys.readouterr()

import subprocess
import sys

import pytest

from qslwigner import cli
from qslwigner.experiments import EXPERIMENTS, parse_value, resolve
from qslwigner.quantum_core import InvalidArgument
from qslwigner.two_qubit import IntegrationFailure

SMALL = ["-s", "n_t=4", "-s", "t_max=1", "-s", "n_theta=8", "-s", "n_phi=8"]


def run_cli(*argv):
    return cli.main(list(argv))


def read_rows(path):
    lines = path.read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return meta, body


def test_list_shows_every_experiment(capsys):
    assert run_cli("list") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 8
    assert [l.split("\t")[0] for l in lines] == list(EXPERIMENTS)


def test_unknown_experiment_is_a_config_error(tmp_path, capsys):
    assert run_cli("run", "-e", "nope", "-o", str(tmp_path / "x.csv")) == cli.EXIT_CONFIG
    assert "unknown experiment" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


@pytest.mark.parametrize(
    "extra",
    [["-s", "bogus=1"], ["-s", "kappa=abc"], ["-s", "l=-1"], ["-s", "n_theta=4"],
     ["-s", "p_mode=fast"], ["-s", "kappa"], ["-s", "eta=nan"], ["-c", "/nonexistent/cfg"]],
)
def test_bad_parameters_exit_2(tmp_path, extra):
    assert run_cli("run", "-e", "phasecov-qsl", *extra, "-o", str(tmp_path / "x.csv")) == cli.EXIT_CONFIG


def test_missing_experiment_name(tmp_path):
    assert run_cli("run", "-o", str(tmp_path / "x.csv")) == cli.EXIT_CONFIG


def test_numeric_failure_exit_code(tmp_path, monkeypatch):
    exp = EXPERIMENTS["phasecov-wigner"]

    def boom(params):
        raise IntegrationFailure("step size underflow", 0.5)

    monkeypatch.setitem(EXPERIMENTS, "phasecov-wigner", type(exp)(exp.name, exp.summary_line, exp.schema, boom))
    assert run_cli("run", "-e", "phasecov-wigner", "-o", str(tmp_path / "x.csv")) == cli.EXIT_NUMERIC


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert run_cli("run", "-e", "phasecov-qsl", *SMALL, "-o", str(out)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_set_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# a comment\nexperiment = phasecov-volume\nn_t = 6\nt_max = 2\n\nn_theta = 8\nn_phi = 8\n")
    out = tmp_path / "o.csv"
    assert run_cli("run", "-c", str(cfg), "-s", "n_t=3", "-o", str(out)) == 0
    meta, body = read_rows(out)
    assert "# experiment = phasecov-volume" in meta
    assert "# n_t = 3" in meta
    assert "# t_max = 2.0" in meta
    assert body[0] == "t,delta,delta_err"
    assert len(body) == 1 + 3


def test_metadata_echoes_every_parameter(tmp_path):
    out = tmp_path / "o.csv"
    assert run_cli("run", "-e", "phasecov-wigner", *SMALL, "-o", str(out)) == 0
    meta, body = read_rows(out)
    keys = {l[2:].split(" = ")[0] for l in meta[2:]}
    assert keys == set(EXPERIMENTS["phasecov-wigner"].schema)
    assert body[0] == "t,W,delta"


def test_qsl_summary_lines(tmp_path):
    out = tmp_path / "o.csv"
    args = ["-s", "n_t=80", "-s", "t_max=2", "-s", "n_theta=8", "-s", "n_phi=8", "-s", "l=3", "-s", "eta=3"]
    assert run_cli("run", "-e", "phasecov-qsl", *args, "-o", str(out)) == 0
    meta, _ = read_rows(out)
    summary = dict(l[len("# summary "):].split(" = ") for l in meta if l.startswith("# summary"))
    assert set(summary) == {"tau", "D", "tau_qsl"}
    assert float(summary["tau_qsl"]) <= float(summary["tau"])


def test_sweep_rows_ordered_with_workers(tmp_path):
    args = ["run", "-e", "twoqubit-qsl-temperature", "-s", "T=0.5,1,2", "-s", "x12=0.1",
            "-s", "n_theta=8", "-s", "n_phi=8"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(*args, "-o", str(a)) == 0
    assert run_cli(*args, "-s", "workers=2", "-o", str(b)) == 0
    rows_a = read_rows(a)[1]
    rows_b = read_rows(b)[1]
    assert rows_a == rows_b
    assert [float(r.split(",")[0]) for r in rows_a[1:]] == [0.5, 1.0, 2.0]


def test_stdout_output(capsys):
    assert run_cli("run", "-e", "discord-sweep", "-s", "P=0,1", "-s", "n_theta=8", "-s", "n_phi=8", "-o", "-") == 0
    out = capsys.readouterr().out
    assert out.startswith("# qslwigner ")
    assert "P,v_qsl,discord,theta_m,phi_m" in out


def test_value_parsing():
    assert parse_value("pi/3", "float") == pytest.approx(1.0471975511965976)
    assert parse_value("sqrt(3)/2", "float") == pytest.approx(0.8660254037844386)
    assert parse_value("0:1:5", "floats") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_value("0.1, 1.1", "floats") == [0.1, 1.1]
    for raw in ("__import__('os')", "2**8", "inf", "1/0"):
        with pytest.raises(ValueError):
            parse_value(raw, "float")


def test_resolve_applies_defaults():
    params = resolve("twoqubit-qsl-distance", {})
    assert params["t"] == 0.5 and params["r"] == -0.2 and params["T"] == [0.1, 1.0]
    with pytest.raises(InvalidArgument):
        resolve("twoqubit-qsl-distance", {"x12": ""})


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qslwigner.cli", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(proc.stdout.strip().splitlines()) == 8

import re

import numpy as np
import pytest

from ddchain.cli import main, sidecar_path
from ddchain.config import parse_config

FLOAT_RE = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$")


def run_cli(*args):
    return main(list(args))


def read_rows(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_kernel_run_writes_csv_and_sidecar(tmp_path):
    out = tmp_path / "k.csv"
    assert run_cli("kernel", "--n", "130", "--out", str(out)) == 0
    header, rows = read_rows(out)
    assert header == ["t", "re_g", "im_g"]
    assert len(rows) == 501  # t_max=5.0 at dt=0.01
    for cell in rows[3]:
        assert FLOAT_RE.match(cell), cell
    meta = (tmp_path / "k.csv.meta").read_text(encoding="utf-8")
    lifetime = float(re.search(r"result\.lifetime=(\S+)", meta).group(1))
    assert lifetime == pytest.approx(1.87, abs=0.05)


def test_sidecar_reruns_to_identical_csv(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert run_cli("size", "--n-values", "10,14,19", "--m", "8", "--out", str(out1)) == 0
    cfg = parse_config(sidecar_path(str(out1)))
    assert cfg.kind == "size" and cfg.n_values == (10, 14, 19)
    assert run_cli("size", "--config", sidecar_path(str(out1)), "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_worker_count_does_not_change_csv(tmp_path):
    args = ["delta-tau", "--n", "16", "--m", "8",
            "--delta-min", "0.2", "--delta-max", "1.4", "--delta-steps", "4",
            "--tau-min", "0.3", "--tau-max", "1.2", "--tau-steps", "4"]
    out1 = tmp_path / "w1.csv"
    out2 = tmp_path / "w2.csv"
    assert run_cli(*args, "--workers", "1", "--out", str(out1)) == 0
    assert run_cli(*args, "--workers", "3", "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_delta_tau_emits_nan_sentinels(tmp_path):
    out = tmp_path / "dt.csv"
    assert run_cli(
        "delta-tau", "--n", "10", "--m", "4",
        "--delta-min", "0.5", "--delta-max", "1.5", "--delta-steps", "2",
        "--tau-min", "0.4", "--tau-max", "1.0", "--tau-steps", "2",
        "--out", str(out),
    ) == 0
    header, rows = read_rows(out)
    assert header == ["delta", "tau", "fidelity"]
    fids = [row[2] for row in rows]
    # delta=0.5 > tau=0.4, delta=1.5 > both taus.
    assert fids.count("nan") == 3


def test_size_csv_has_integer_sizes(tmp_path):
    out = tmp_path / "s.csv"
    assert run_cli("size", "--n-values", "8,12", "--m", "4", "--out", str(out)) == 0
    header, rows = read_rows(out)
    assert header == ["n", "fidelity_free", "fidelity_controlled"]
    assert [row[0] for row in rows] == ["8", "12"]


def test_trace_csv_columns(tmp_path):
    out = tmp_path / "t.csv"
    assert run_cli("trace", "--n", "12", "--m", "5", "--out", str(out)) == 0
    header, rows = read_rows(out)
    assert header == ["t", "f_free", "f_const", "f_broadening", "f_static_random", "f_period_noise"]
    assert len(rows) == 6
    assert all(float(cell) == 1.0 for cell in rows[0][1:])


def test_pq_check_reports_max_error(tmp_path, capsys):
    out = tmp_path / "pq.csv"
    assert run_cli("pq-check", "--n", "5", "--m", "3", "--out", str(out)) == 0
    header, rows = read_rows(out)
    assert header == ["t", "abs_p", "fidelity_direct", "abs_error"]
    meta = (tmp_path / "pq.csv.meta").read_text(encoding="utf-8")
    max_err = float(re.search(r"result\.max_abs_error=(\S+)", meta).group(1))
    assert max_err <= 1e-4
    errors = np.array([float(row[3]) for row in rows])
    assert errors.max() == pytest.approx(max_err, rel=1e-12)
    assert "max_abs_error" in capsys.readouterr().out


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("kind=size\npsii=8\n", encoding="utf-8")
    assert run_cli("size", "--config", str(cfg)) == 2
    assert "psii" in capsys.readouterr().err


def test_out_of_range_flag_exits_2(tmp_path, capsys):
    assert run_cli("trace", "--delta", "1.5", "--tau", "1.0", "--out", str(tmp_path / "x.csv")) == 2
    err = capsys.readouterr().err
    assert "delta" in err


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert run_cli("size", "--config", str(tmp_path / "nope.cfg")) == 2
    assert capsys.readouterr().err


def test_no_subcommand_exits_2(capsys):
    assert run_cli() == 2
    capsys.readouterr()

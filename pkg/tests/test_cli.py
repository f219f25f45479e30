import csv
import json
import logging

import pytest
from click.testing import CliRunner

from wgm.cli import SWEEP_COLUMNS, cli, convergence_table, load_config, main
from wgm.errors import ConfigError, InsufficientOracleData

FIG4 = {(5, 0): 4.64, (5, 1): 7.08, (5, 2): 9.36, (10, 0): 8.46, (10, 1): 11.1, (10, 2): 13.5,
        (20, 0): 15.9, (20, 1): 18.7, (20, 2): 21.4, (40, 0): 30.1, (40, 1): 33.6, (40, 2): 36.6}


def write(tmp_path, cfg, name="run.json"):
    path = tmp_path / name
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return str(path)


def run(*args):
    result = CliRunner().invoke(cli, list(args))
    return result.exit_code, result


def test_classify_reports(tmp_path):
    cfg = write(tmp_path, {"profile": [{"family": "ilchenko", "n0": 1.5, "delta": d} for d in (0.0, 2.0, 4.0)]})
    code, res = run("classify", "--config", cfg, "--out", str(tmp_path / "o"))
    assert code == 0
    assert "case A, kappa=1," in res.output and "case B, kappa=0, mu=3," in res.output.replace("kappa=0,", "kappa=0,")
    assert "case C, R0=0.833333" in res.output
    rep = json.loads((tmp_path / "o" / "classify.json").read_text())
    assert [r["case"] for r in rep] == ["A", "B", "C"]
    with open(tmp_path / "o" / "potential_0.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["r", "W"] and len(rows) == 801


def test_classify_rejects_unit_index(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "table", "r": [0, 0.5, 1.0], "n": [1.0, 1.0, 1.0]}})
    code, res = run("classify", "--config", cfg)
    assert code == 4 and "InvalidParameters" in res.output


def test_sweep_reproduces_table(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "constant", "n0": 1.5}, "m": [40, 5, 20, 10],
                           "j": [2, 0, 1], "engines": ["modal"]})
    out = tmp_path / "o"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--jobs", "2"]) == 0
    with open(out / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == SWEEP_COLUMNS and len(rows) == 12
    assert [(int(r["j"]), int(r["m"])) for r in rows] == sorted((j, m) for m, j in FIG4)
    for r in rows:
        ref = FIG4[int(r["m"]), int(r["j"])]
        assert abs(float(r["re_k_modal"]) - ref) <= 0.006 * ref
        assert r["k_asym"] == "" and r["abs_err_re"] == ""
    # repr serialisation: CSV and JSON agree bit for bit
    js = json.loads((out / "sweep.json").read_text())
    assert [float(r["re_k_modal"]) for r in rows] == [r["re_k_modal"] for r in js]
    assert [float(r["im_k_modal"]) for r in rows] == [r["im_k_modal"] for r in js]


def test_sweep_is_deterministic(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "constant", "n0": 1.5}, "m": [12, 8], "j": [1, 0],
                           "p": [-1, 1], "engines": ["asym", "modal"]})
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(b), "--jobs", "3"]) == 0
    assert (a / "sweep.csv").read_text() == (b / "sweep.csv").read_text()
    rows = list(csv.DictReader(open(a / "sweep.csv")))
    assert [(int(r["p"]), int(r["j"]), int(r["m"])) for r in rows] == sorted(
        (p, j, m) for p in (-1, 1) for j in (0, 1) for m in (8, 12))
    for r in rows:
        assert float(r["abs_err_re"]) == pytest.approx(abs(float(r["k_asym"]) - float(r["re_k_modal"])), abs=1e-15)


def test_sweep_fd_row(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "ilchenko", "n0": 1.5, "delta": 2.0}, "m": [30],
                           "engines": ["asym", "fd"]})
    code, res = run("sweep", "--config", cfg)
    assert code == 0
    (row,) = json.loads(res.stdout)
    assert abs(row["re_k_fd"] - 21.20) <= 0.005 * 21.20
    assert 6.4e-6 / 3 <= abs(row["im_k_fd"]) <= 3 * 6.4e-6
    assert row["q_factor"] == pytest.approx(row["re_k_fd"] / abs(row["im_k_fd"]))
    assert row["abs_err_re"] == pytest.approx(abs(row["k_asym"] - row["re_k_fd"]))


def test_empty_m_range(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "constant", "n0": 1.5}, "m": [], "engines": ["modal"]})
    code, res = run("sweep", "--config", cfg, "--out", str(tmp_path / "o"))
    assert code == 0
    assert (tmp_path / "o" / "sweep.csv").read_text().strip() == ",".join(SWEEP_COLUMNS)


def test_row_failure_and_keep_going(tmp_path):
    # an order beyond what case B supports fails every row with a precondition error
    cfg = write(tmp_path, {"profile": {"family": "ilchenko", "n0": 1.5, "delta": 2.0}, "m": [20], "order": 9})
    assert main(["sweep", "--config", cfg]) == 4
    code, res = run("sweep", "--config", cfg, "--keep-going")
    assert code == 0 and json.loads(res.stdout)[0]["error"].startswith("OrderTooHigh")


@pytest.mark.parametrize("cfg,fragment", [
    ("{\n  \"profile\": {\"family\": \"constant\",}\n}", "line 2"),
    ({"m": [5]}, "'profile'"),
    ({"profile": {"family": "constant", "n0": 1.5}, "m": [0]}, "'m'"),
    ({"profile": {"family": "constant", "n0": 1.5}, "m": [201]}, "'m'"),
    ({"profile": {"family": "constant", "n0": 1.5}, "p": [2]}, "'p'"),
    ({"profile": {"family": "ilchenko", "n0": 1.5, "delta": 1.0}, "engines": ["modal"]}, "constant-index"),
    ({"profile": {"family": "constant", "n0": 1.5}, "engines": ["magic"]}, "'engines'"),
])
def test_config_errors(tmp_path, cfg, fragment):
    code, res = run("sweep", "--config", write(tmp_path, cfg))
    assert code == 2 and fragment in res.output


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")
    assert main(["classify", "--config", str(tmp_path / "nope.json")]) == 2


def test_range_object():
    assert load_config.__doc__
    from wgm.cli import _int_list

    assert _int_list({"start": 20, "stop": 60, "step": 10}, "m") == [20, 30, 40, 50, 60]


def test_modes_outputs(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "constant", "n0": 1.5}, "m": [40], "j": [0, 1],
                           "modes": {"engine": "modal"}})
    out = tmp_path / "o"
    assert main(["modes", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "modes.json").read_text())
    assert [s["radial_index"] for s in summary] == [0, 1]
    rows = list(csv.DictReader(open(out / "mode_modal_p+1_m40_j0.csv")))
    assert list(rows[0]) == ["r", "re_w", "im_w"]


def _peak(tmp_path, prof, engine, m=30):
    grid = {"r_min": 0.01, "r_max": 1.5, "points": 4001}
    cfg = write(tmp_path, {"profile": prof, "m": [m], "grid": grid, "modes": {"engine": engine}}, f"{engine}.json")
    code, res = run("modes", "--config", cfg)
    assert code == 0
    (s,) = json.loads(res.stdout)
    assert s["radial_index"] == 0
    return s["peak_r"]


def test_modes_case_c_peak(tmp_path):
    assert abs(_peak(tmp_path, {"family": "ilchenko", "n0": 1.5, "delta": 4.0}, "asym") - 5 / 6) < 0.05


@pytest.mark.xfail(strict=True, reason="first-order quasimode peak is off by O(R/m); 2.5 to 7.4 FD cells at m = 30")
@pytest.mark.parametrize("delta", [0.0, 2.0, 4.0])
def test_modes_peak_within_two_fd_cells(tmp_path, delta):
    prof = {"family": "ilchenko", "n0": 1.5, "delta": delta}
    h = 3.0 / 4000
    assert abs(_peak(tmp_path, prof, "asym") - _peak(tmp_path, prof, "fd")) <= 2 * h


def test_modes_peak_gap_closes_with_m(tmp_path):
    prof = {"family": "ilchenko", "n0": 1.5, "delta": 4.0}
    gaps = [abs(_peak(tmp_path, prof, "asym", m) - _peak(tmp_path, prof, "fd", m)) for m in (30, 60)]
    assert gaps[1] < 0.5 * gaps[0]


def test_convergence_command(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "constant", "n0": 1.5}, "m": [20, 30, 40, 50, 60],
                           "convergence": {"oracle": "modal", "terms": [1, 3, 6]}})
    code, res = run("convergence", "--config", cfg, "--out", str(tmp_path / "o"))
    assert code == 0
    (rep,) = json.loads((tmp_path / "o" / "convergence.json").read_text())
    fits = {int(k): v for k, v in rep["exponents"].items()}
    # one term: slope 2/3 only in the limit (0.50 on [20, 60], 0.59 on [100, 200])
    assert abs(fits[1] - 2 / 3) < 0.2 and fits[3] - fits[1] > 0.3
    assert fits[3] >= 0.95 * 1.0
    assert fits[6] >= 1.8


def test_convergence_needs_four_points(tmp_path):
    cfg = write(tmp_path, {"profile": {"family": "constant", "n0": 1.5}, "m": [20, 30, 40]})
    assert main(["convergence", "--config", cfg]) == 4
    with pytest.raises(InsufficientOracleData):
        convergence_table([1, 2, 3], None, [1, 2, 3], [1])


def test_log_level_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("WGM_LOG", "debug")
    root = logging.getLogger()
    saved = root.handlers[:], root.level
    root.handlers[:] = []
    try:
        cfg = write(tmp_path, {"profile": {"family": "constant", "n0": 1.5}})
        assert main(["classify", "--config", cfg]) == 0
        assert root.level == logging.DEBUG
    finally:
        root.handlers[:], level = saved
        root.setLevel(level)


def test_help_lists_commands():
    code, res = run("--help")
    assert code == 0
    for name in ("classify", "sweep", "modes", "convergence"):
        assert name in res.output

import csv
import io
import json
import math

import pytest

from guesswork import guesswork_exact, guesswork_uniform
from guesswork.cli import COLUMNS, format_ratio, main, parse_log10


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def dist_file(data_dir):
    return str(data_dir / "skewed10.txt")


def strip_wall(text):
    return [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows(text)]


def test_exact_matches_library(capsys, dist_file, skewed10):
    code, out = run(capsys, "exact", "--dist", dist_file, "--m", "3")
    assert code == 0
    (r,) = rows(out)
    assert list(r) == COLUMNS
    assert float(r["log10_G"]) == pytest.approx(guesswork_exact(skewed10, 3).log10_value, rel=1e-12)


def test_bounds_uniform_ansatz(capsys):
    code, out = run(capsys, "bounds", "--dist", "uniform:10", "--m", "4")
    assert code == 0
    by = {r["method"]: r for r in rows(out)}
    assert list(by) == ["massey", "arikan", "entropy-ansatz"]
    assert 10 ** float(by["entropy-ansatz"]["log10_G"]) == pytest.approx((10 ** 4 + 1) / 2,
                                                                         rel=1e-12)


def test_stationary(capsys, data_dir):
    code, out = run(capsys, "stationary", "--digram", str(data_dir / "english_digrams.txt"))
    assert code == 0
    lines = out.splitlines()
    body = rows("\n".join(line for line in lines if not line.startswith("#")))
    assert len(body) == 26
    assert sum(float(r["probability"]) for r in body) == pytest.approx(1, abs=1e-12)
    residual = float(lines[-1].split("residual=")[1])
    assert residual < 1e-10


def test_stationary_json(capsys):
    code, out = run(capsys, "stationary", "--digram", "english", "--format", "json")
    doc = json.loads(out)
    assert len(doc["probabilities"]) == 26 and doc["residual"] < 1e-10


def test_sweep_order_and_determinism(capsys, dist_file):
    args = ("sweep", "--dist", dist_file, "--m-min", "1", "--m-max", "4", "--method",
            "arikan,exact,sample,quantify,normal-binned,massey,entropy-ansatz",
            "--samples", "200", "--replicates", "3")
    code, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert code == 0
    got = [(int(r["m"]), r["method"]) for r in rows(first)]
    order = ["exact", "quantify", "sample", "normal-binned", "massey", "arikan",
             "entropy-ansatz"]
    assert got == [(m, meth) for m in range(1, 5) for meth in order]
    assert strip_wall(first) == strip_wall(second)


def test_sweep_rows_independent_of_range(capsys, dist_file):
    base = ("sweep", "--dist", dist_file, "--method", "sample", "--samples", "300",
            "--replicates", "3")
    _, wide = run(capsys, *base, "--m-min", "2", "--m-max", "5")
    _, single = run(capsys, *base, "--m", "4")
    wide_row = [r for r in strip_wall(wide) if r["m"] == "4"]
    assert wide_row == strip_wall(single)


def test_english_orders(capsys):
    code, out = run(capsys, "sweep", "--digram", "english", "--m-min", "2", "--m-max", "5",
                    "--method", "quantify", "--order", "0,1,2")
    assert code == 0
    g = {(int(r["m"]), int(r["order"])): float(r["log10_G"]) for r in rows(out)}
    for m in range(2, 6):
        assert g[m, 2] < g[m, 1] < g[m, 0]


def test_error_rows_and_exit_code(capsys, dist_file):
    code, out = run(capsys, "sweep", "--dist", dist_file, "--m-min", "8", "--m-max", "9",
                    "--method", "exact,quantify", "--enum-cap", "1e8")
    assert code == 1
    by = {(r["m"], r["method"]): r for r in rows(out)}
    assert by["9", "exact"]["error"] == "enum-cap"
    assert by["9", "quantify"]["error"] == ""
    assert by["8", "exact"]["log10_G"] != ""


def test_env_cap(capsys, dist_file, monkeypatch):
    monkeypatch.setenv("GUESSWORK_ENUM_CAP", "50")
    code, out = run(capsys, "exact", "--dist", dist_file, "--m", "2")
    assert code == 1 and rows(out)[0]["error"] == "enum-cap"


def test_model_mismatch(capsys):
    code, out = run(capsys, "bounds", "--digram", "english", "--m", "3", "--method", "arikan")
    assert code == 1 and rows(out)[0]["error"] == "model-mismatch"


def test_empty_method_set_rejected(capsys, dist_file):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--dist", dist_file, "--m", "2", "--method", ","])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["exact", "--m", "2"],
    ["exact", "--dist", "uniform:4", "--m", "2", "--m-min", "1"],
    ["exact", "--dist", "uniform:4", "--m-min", "3", "--m-max", "2"],
    ["exact", "--dist", "uniform:4", "--m", "2", "--method", "massey"],
    ["sweep", "--dist", "uniform:4", "--m", "2", "--method", "bogus"],
    ["exact", "--dist", "/no/such/file", "--m", "2"],
    ["exact", "--dist", "uniform:4", "--m", "2", "--frobnicate"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_ratio_flag(capsys):
    _, plain = run(capsys, "exact", "--dist", "uniform:26", "--m", "3")
    _, ratio = run(capsys, "exact", "--dist", "uniform:26", "--m", "3", "--ratio")
    p, r = rows(plain)[0], rows(ratio)[0]
    assert float(p["log10_G"]) - float(r["log10_G"]) == pytest.approx(3 * math.log10(26))
    assert p["ratio"] == r["ratio"]


def test_json_matches_csv(capsys):
    _, c = run(capsys, "sweep", "--dist", "uniform:5", "--m-min", "1", "--m-max", "3",
               "--method", "exact,massey")
    _, j = run(capsys, "sweep", "--dist", "uniform:5", "--m-min", "1", "--m-max", "3",
               "--method", "exact,massey", "--format", "json")
    doc = json.loads(j)
    assert [set(d) for d in doc] == [set(COLUMNS)] * 6
    for d, r in zip(doc, rows(c)):
        assert d["log10_G"] == pytest.approx(float(r["log10_G"]), rel=1e-15)


def test_fit_round_trip(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    run(capsys, "sweep", "--dist", "uniform:3", "--m-min", "1", "--m-max", "12",
        "--method", "exact", "--out", str(out))
    code, text = run(capsys, "fit", "--input", str(out), "--m-min", "1", "--m-max", "12")
    (r,) = rows(text)
    assert code == 0
    # G/n^m = (1 + 3^-m)/2 is close to 0.5 * 1^m * m^0
    assert float(r["B"]) == pytest.approx(1.0, abs=0.1)
    assert r["m_min"] == "1" and r["m_max"] == "12"


def test_fit_recovers_synthetic(capsys, tmp_path):
    recs = [{"m": m, "method": "sample", "order": 1, "error": "",
             "ratio": format_ratio(math.log10(0.481) + m * math.log10(0.801)
                                   - 0.5 * math.log10(m))} for m in range(9, 31)]
    path = tmp_path / "s.json"
    path.write_text(json.dumps(recs))
    code, text = run(capsys, "fit", "--input", str(path), "--format", "json")
    (r,) = json.loads(text)
    assert r["A"] == pytest.approx(0.481, rel=1e-9) and r["B"] == pytest.approx(0.801, rel=1e-9)
    assert r["expression"] == "0.481*0.801^m*m^(-1/2)"


def test_fit_needs_points(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text(",".join(COLUMNS) + "\n1,exact,1,0,5e-1,,,,,,,0,\n")
    with pytest.raises(SystemExit) as exc:
        main(["fit", "--input", str(path)])
    assert exc.value.code == 2


@pytest.mark.parametrize("log10", [-1234.56, 0.0, -0.30102999566398, 2.5])
def test_ratio_text_round_trip(log10):
    assert parse_log10(format_ratio(log10)) == pytest.approx(log10, abs=1e-11)


def test_entropy_command(capsys):
    code, out = run(capsys, "entropy", "--dist", "uniform:26", "--m", "30", "--order", "0",
                    "--base", "2")
    assert float(rows(out)[0]["entropy"]) == pytest.approx(30 * math.log2(26))


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "guesswork", "exact", "--dist", "uniform:2",
                          "--m", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert float(rows(res.stdout)[0]["log10_G"]) == pytest.approx(
        guesswork_uniform(2, 1).log10_value)

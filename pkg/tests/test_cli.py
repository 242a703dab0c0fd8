import csv
import io
import json
import time

import pytest

from homrates.cli import main
from homrates.closed_forms import eval_closed


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


@pytest.fixture(scope="module")
def full_visibility_grid():
    import contextlib

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["visibility", "--gamma", "0.1:2.0:0.1", "--method", "both", "--workers", "4"])
    return code, buf.getvalue()


def test_visibility_row_count(full_visibility_grid):
    code, out = full_visibility_grid
    rows = table(out)
    assert code == 0
    assert len(rows) == 40
    assert {r["method"] for r in rows} == {"fock", "closed"}


def test_visibility_fock_matches_closed(full_visibility_grid):
    rows = table(full_visibility_grid[1])
    fock = {r["gamma"]: r for r in rows if r["method"] == "fock"}
    closed = {r["gamma"]: r for r in rows if r["method"] == "closed"}
    for g, r in fock.items():
        for col in ("V_G", "V_C"):
            assert float(r[col]) == pytest.approx(float(closed[g][col]), abs=1e-7)


def test_header_and_metadata(full_visibility_grid):
    lines = full_visibility_grid[1].splitlines()
    assert lines[0].startswith("# homrates ")
    config = json.loads(lines[1].removeprefix("# config: "))
    assert config["gamma"] == "0.1:2.0:0.1" and config["command"] == "visibility"
    assert lines[2].startswith("# n_max: 0.1=5 ")
    assert lines[3] == "gamma,G_alpha0,G_alphapi2,C_alpha0,C_alphapi2,V_G,V_C,method"


def test_closed_row_at_gain_one(capsys):
    code, out, _ = run(capsys, "visibility", "--gamma", "1.0", "--method", "closed")
    (row,) = table(out)
    assert code == 0
    assert float(row["V_G"]) == pytest.approx(0.576635, abs=1e-5)
    assert float(row["V_C"]) == pytest.approx(0.728948, abs=1e-5)


def test_zero_gain_undefined(capsys):
    code, out, _ = run(capsys, "visibility", "--gamma", "0,0.5", "--method", "fock")
    rows = table(out)
    assert code == 0
    assert rows[0]["V_G"] == "undefined" and rows[0]["V_C"] == "undefined"
    assert float(rows[1]["V_G"]) > 0.5


def test_visibility_rejects_lossy_eta(capsys):
    code, _, err = run(capsys, "visibility", "--gamma", "0.5", "--eta", "0.5")
    assert code == 2
    assert "lossy" in err


def test_deterministic_across_workers(capsys):
    args = ["visibility", "--gamma", "0.1:0.6:0.1", "--method", "fock"]
    _, serial, _ = run(capsys, *args)
    _, again, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--workers", "3")
    assert serial == again
    # the config echo omits worker count, so the files are byte-identical
    assert serial == parallel


def test_lossy_rows(capsys):
    code, out, _ = run(capsys, "lossy", "--gamma", "0.25,0.5", "--eta", "1,0.5,0.1")
    rows = table(out)
    assert code == 0
    assert len(rows) == 6
    v_c = [float(r["V_C_eta"]) for r in rows if r["gamma"] == "0.5"]
    assert v_c[0] > v_c[1] > v_c[2]
    v_g = {float(r["V_G_eta"]) for r in rows if r["gamma"] == "0.5"}
    assert max(v_g) - min(v_g) < 1e-12


def test_lossy_unit_efficiency_matches_visibility(capsys):
    _, lossy, _ = run(capsys, "lossy", "--gamma", "0.5", "--eta", "1", "--nmax", "8")
    _, ideal, _ = run(capsys, "visibility", "--gamma", "0.5", "--method", "fock", "--nmax", "8")
    (l,), (i,) = table(lossy), table(ideal)
    assert float(l["V_G_eta"]) == pytest.approx(float(i["V_G"]), abs=1e-10)
    assert float(l["V_C_eta"]) == pytest.approx(float(i["V_C"]), abs=1e-10)


def test_dip_endpoints_and_shape(capsys):
    code, out, _ = run(capsys, "dip", "--gamma", "0.5", "--alpha", "0:90:15")
    rows = table(out)
    ref = eval_closed(0.5)
    assert code == 0
    assert len(rows) == 7
    assert float(rows[0]["G_Q"]) == pytest.approx(ref.g0, rel=1e-8)
    assert float(rows[-1]["C_Q"]) == pytest.approx(ref.cpi2, rel=1e-8)
    g = [float(r["G_Q"]) for r in rows]
    assert all(a < b for a, b in zip(g, g[1:]))


def test_dip_zero_gain(capsys):
    code, out, _ = run(capsys, "dip", "--gamma", "0", "--alpha", "0,90")
    assert code == 0
    assert all(float(r["G_Q"]) == 0 and float(r["C_Q"]) == 0 for r in table(out))


def test_classical_command(capsys):
    code, out, _ = run(capsys, "classical", "--runs", "100000", "--seed", "3")
    rows = table(out)
    assert code == 0
    assert [r["law"] for r in rows] == ["fixed-equal", "exponential"]
    assert all(r["bound"] == "pass" for r in rows)
    _, again, _ = run(capsys, "classical", "--runs", "100000", "--seed", "3", "--workers", "2")
    assert again == out


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"gamma": "0.5,1.0", "method": "closed"}))
    _, out, _ = run(capsys, "visibility", "--config", str(cfg))
    assert [r["gamma"] for r in table(out)] == ["0.5", "1"]
    _, out, _ = run(capsys, "visibility", "--config", str(cfg), "--gamma", "0.25")
    assert [r["gamma"] for r in table(out)] == ["0.25"]


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"gain": 1}))
    with pytest.raises(SystemExit) as err:
        main(["visibility", "--config", str(cfg)])
    assert err.value.code == 2


def test_out_file(tmp_path, capsys):
    target = tmp_path / "v.csv"
    code, out, _ = run(capsys, "visibility", "--gamma", "0.5", "--method", "closed", "--out", str(target))
    assert code == 0 and out == ""
    assert len(table(target.read_text())) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["visibility", "--gamma", "1:0.5:0.1"],
        ["visibility", "--gamma", "abc"],
        ["lossy", "--gamma", "0.5", "--eta", "0"],
        ["visibility", "--gamma", "3.0", "--method", "fock"],
        ["classical", "--overlap", "2"],
        ["dip", "--alpha", "0:120:10"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("homrates: error:")


def test_argparse_errors():
    with pytest.raises(SystemExit) as err:
        main(["visibility", "--method", "magic"])
    assert err.value.code == 2


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(capsys, "visibility", "--gamma", "0.5", "--method", "closed", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 3
    assert "I/O error" in err


def test_svg_output(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    target = tmp_path / "v.svg"
    code, _, _ = run(capsys, "visibility", "--gamma", "0.1:1.0:0.1", "--method", "closed", "--format", "svg", "--out", str(target))
    assert code == 0
    first = target.read_bytes()
    assert first.lstrip().startswith(b"<?xml") and b"<svg" in first
    run(capsys, "visibility", "--gamma", "0.1:1.0:0.1", "--method", "closed", "--format", "svg", "--out", str(target))
    assert target.read_bytes() == first


def test_validate_passes_quickly(capsys):
    start = time.perf_counter()
    code, out, _ = run(capsys, "validate", "--gamma", "0.1:1.5:0.1")
    assert time.perf_counter() - start < 60
    assert code == 0
    assert out.strip().endswith("overall: PASS")


def test_validate_catches_wrong_convention(capsys):
    code, out, _ = run(capsys, "validate", "--perturb-convention", "--runs", "100000")
    assert code == 1
    assert "FAIL" in out

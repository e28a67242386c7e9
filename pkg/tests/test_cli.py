import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from relaysec.cli import format_checks, main, verify_examples
from relaysec.config import load
from relaysec.dmc import OrthogonalDmc, example_channel

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rates(text):
    out = {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 3 and parts[0].startswith("case"):
            out[(parts[0], parts[1])] = float(parts[2])
    return out


# ---------------------------------------------------------------- verify-examples


def test_verify_examples_passes_and_repeats(capsys):
    code, first, _ = run(capsys, "verify-examples")
    assert code == 0
    assert first.strip().endswith("3/3 examples verified")
    assert run(capsys, "verify-examples")[1] == first


def test_tampered_channel_is_named():
    ch, scheme, expected = example_channel(2)
    k2 = np.array(ch.kernel2)
    # move all mass of one conditional slice to another output cell
    k2[1, 0] = 0.0
    k2[1, 0, 3, 3] = 1.0
    tampered = OrthogonalDmc(ch.kernel1, k2, ch.case)
    checks = verify_examples([(1, *example_channel(1)), (2, tampered, scheme, expected)])
    text = format_checks(checks)
    assert checks[0].passed and not checks[1].passed
    assert "example 2: FAILED" in text
    assert text.endswith("1/2 examples verified")


def test_console_script_exit_status():
    out = subprocess.run([sys.executable, "-m", "relaysec.cli", "verify-examples"], capture_output=True, text=True)
    assert out.returncode == 0 and "3/3" in out.stdout


# ---------------------------------------------------------------- evaluate


def test_evaluate_deaf_relay(capsys):
    code, out, _ = run(capsys, "evaluate", "--config", str(CONFIGS / "deaf_relay.toml"))
    assert code == 0
    r = rates(out)
    assert r[("case2", "nf_inner")] >= 0.20752
    assert r[("case2", "genie_outer")] >= r[("case2", "nf_inner")]
    assert r[("case2", "deaf_relay")] == pytest.approx(r[("case2", "nf_inner")], abs=1e-6)


def test_evaluate_no_eavesdropper(capsys):
    code, out, _ = run(capsys, "evaluate", "--config", str(CONFIGS / "no_eavesdropper.toml"))
    assert code == 0
    assert "no active eavesdropper" in out
    assert not rates(out)
    assert "no_secrecy capacity" in out


@pytest.mark.slow
def test_evaluate_clustered(capsys):
    code, out, _ = run(capsys, "evaluate", "--config", str(CONFIGS / "clustered.toml"))
    r = rates(out)
    assert code == 0
    assert abs(r[("case2", "pdf_inner")] - r[("case2", "genie_outer")]) <= 1e-3


def test_evaluate_case_override_and_six_decimals(capsys):
    code, out, _ = run(capsys, "evaluate", "--config", str(CONFIGS / "deaf_relay.toml"), "--case", "case3", "--grid", "3", "--restarts", "2")
    assert code == 0
    assert set(c for c, _ in rates(out)) == {"case3"}
    for line in out.splitlines():
        if line.startswith("case3"):
            assert len(line.split()[-1].split(".")[1]) == 6


def test_report_round_trip(tmp_path, capsys):
    a, b = tmp_path / "a.toml", tmp_path / "b.toml"
    assert run(capsys, "evaluate", "--config", str(CONFIGS / "deaf_relay.toml"), "--seed", "9", "--out", str(a))[0] == 0
    assert run(capsys, "evaluate", "--config", str(a), "--out", str(b))[0] == 0
    assert a.read_text() == b.read_text()
    assert load(a).optimizer.seed == 9


# ---------------------------------------------------------------- exit codes


def write(tmp_path, text, name="c.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "evaluate", "--config", write(tmp_path, "[channel]\nh_sr = 1\nbogus = 2\n"))[0] == 2
    code, _, err = run(capsys, "evaluate", "--config", write(tmp_path, "[channel\n"))
    assert code == 2 and "line 1" in err
    assert run(capsys, "evaluate", "--config", str(tmp_path / "missing.toml"))[0] == 5
    assert run(capsys, "evaluate", "--config", write(tmp_path, "[powers]\nP_D = 1.0\n"))[0] == 2
    # relay placed on the destination: degenerate geometry
    geo = "[geometry]\nrelay = [1.0, 0.0]\n"
    assert run(capsys, "evaluate", "--config", write(tmp_path, geo))[0] == 3
    assert run(capsys, "mimome", "--config", write(tmp_path, "[mimome]\nH = 1\nH_e = 1\nS = [[1, 2], [2, 1]]\n"))[0] == 2
    assert run(capsys, "sweep")[0] == 2
    with pytest.raises(SystemExit):
        main(["evaluate", "--config", "x", "--seed", "-1"])
    capsys.readouterr()


# ---------------------------------------------------------------- mimome


@pytest.mark.parametrize(
    "body, expected",
    [
        ("H = [[1.0]]\nH_e = [[0.5]]\nS = [[1.0]]", 0.339036),
        ("H = [[1.0, 0.2], [0.3, 0.9]]\nH_e = [[1.0, 0.2], [0.3, 0.9]]\nS = [[1.0, 0.0], [0.0, 1.0]]", 0.0),
        ("H = [[1.0, 0.0], [0.0, 1.0]]\nH_e = [[0.0, 0.0]]\nS = [[1.0, 0.0], [0.0, 1.0]]", 1.0),
    ],
)
def test_mimome(tmp_path, capsys, body, expected):
    code, out, _ = run(capsys, "mimome", "--config", write(tmp_path, "[mimome]\n" + body + "\n"))
    assert code == 0
    assert float(out.split()[3]) == pytest.approx(expected, abs=1e-6)


# ---------------------------------------------------------------- sweep


SMALL_SWEEP = "[sweep]\nstart = [0.0, 0.0]\nend = [3.0, 0.0]\nsamples = 4\n[optimizer]\ngrid = 3\nrestarts = 3\n"


def test_sweep_csv_and_metadata(tmp_path, capsys):
    out = tmp_path / "rates.csv"
    code, text, _ = run(capsys, "sweep", "--config", write(tmp_path, SMALL_SWEEP), "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 4 * 3
    assert lines[0] == "relay_x,relay_y,case,pdf_inner,nf_inner,genie_outer,wiretap_baseline"
    meta = load_meta(out)
    assert meta["metadata"]["path"]["samples"] == 4
    assert any("off the source" in n for n in meta["metadata"]["notes"])


def load_meta(out):
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    return tomllib.loads(Path(f"{out}.meta.toml").read_text())


def test_sweep_seed_change_grid_only(tmp_path, capsys):
    # with grid-only starts the seed has nothing to act on, so rates are identical
    cfg = write(tmp_path, SMALL_SWEEP + "random_restarts = 0\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "sweep", "--config", cfg, "--out", str(a), "--seed", "1")[0] == 0
    assert run(capsys, "sweep", "--config", cfg, "--out", str(b), "--seed", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    ma, mb = load_meta(a)["metadata"], load_meta(b)["metadata"]
    assert ma["optimizer"].pop("seed") == 1 and mb["optimizer"].pop("seed") == 2
    assert ma == mb


def test_sweep_same_seed_is_byte_identical(tmp_path, capsys):
    cfg = write(tmp_path, SMALL_SWEEP)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "sweep", "--config", cfg, "--out", str(a), "--seed", "5")[0] == 0
    assert run(capsys, "sweep", "--config", cfg, "--out", str(b), "--seed", "5")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))[1:]
    assert all(r[3] == "nan" or float(r[3]) <= float(r[5]) + 1e-6 for r in rows)


def test_sweep_unwritable_output(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--config", write(tmp_path, SMALL_SWEEP), "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 5 and "i/o error" in err

import csv
import json

import numpy as np
import pytest

from hardysobolev.cli import ConfigError, RunConfig, load_config_file, main, read_signal_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_signal(path, x, v):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for a, b in zip(x, v):
            w.writerow([repr(float(a)), repr(float(b.real)), repr(float(b.imag))])


@pytest.mark.parametrize("suite", ["pw", "boundary", "kernel", "algebra", "spectrum", "composition"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    doc = json.loads(out)
    assert code == 0, [r for r in doc["records"] if not r["pass"]]
    assert doc["schema_version"] == 1 and doc["all_pass"]
    for r in doc["records"]:
        assert set(r) >= {"theorem_tag", "inputs", "measured", "bound_or_target", "pass", "suite"}


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "kernel", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["suite", "theorem_tag", "measured", "bound_or_target", "pass"]
    assert len(rows) > 1


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "pw", "--grid-N", "16"],
        ["verify", "pw", "--grid-N", "4097"],
        ["verify", "bogus"],
        ["verify", "pw", "--galerkin-M", "64"],
        [],
        ["nonsense"],
        ["kernel", "--z", "1j"],
        ["kernel", "--z", "1j", "--w", "-1j"],
        ["kernel", "--z", "abc", "--w", "1j"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_config_file(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"grid_N": 4096, "grid_L": 50.0}))
    assert load_config_file(str(good)) == {"grid_N": 4096, "grid_L": 50.0}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"grid_N": 4096, "colour": "red"}))
    with pytest.raises(ConfigError, match="colour"):
        load_config_file(str(bad))
    code, _, err = run(capsys, "verify", "pw", "--config", str(bad))
    assert code == 2 and "colour" in err


def test_runconfig_validation():
    assert RunConfig(command="verify").validate().grid_N == 2**16
    with pytest.raises(ConfigError):
        RunConfig(command="verify", grid_N=1000).validate()
    with pytest.raises(ConfigError):
        RunConfig(command="verify", p=0.5).validate()


# --- decompose ----------------------------------------------------------------------


def test_decompose_lorentzian(tmp_path, capsys):
    x = np.linspace(-200, 200, 2**14, endpoint=False)
    write_signal(tmp_path / "sig.csv", x, 1 / (1 + x * x) + 0j)
    code, out, _ = run(capsys, "decompose", str(tmp_path / "sig.csv"), "--out", str(tmp_path / "res"))
    assert code == 0
    summary = json.loads(out)
    assert summary["reconstruction_error"] <= 1e-10
    assert max(summary["residuals"].values()) <= 1e-3
    rows = np.loadtxt(tmp_path / "res" / "f_plus.csv", delimiter=",", skiprows=1)
    inner = np.abs(rows[:, 0]) <= 100
    fp = rows[:, 1] + 1j * rows[:, 2]
    assert np.max(np.abs(fp - 0.5 / (1 - 1j * rows[:, 0]))[inner]) <= 1e-4
    assert json.loads((tmp_path / "res" / "summary.json").read_text()) == summary


def test_decompose_zero_signal(tmp_path, capsys):
    x = np.linspace(-10, 10, 2048, endpoint=False)
    write_signal(tmp_path / "z.csv", x, np.zeros(x.size, dtype=complex))
    code, out, _ = run(capsys, "decompose", str(tmp_path / "z.csv"), "--out", str(tmp_path / "o"))
    assert code == 0
    assert json.loads(out)["reconstruction_error"] == 0.0


@pytest.mark.parametrize("p", ["1", "inf"])
def test_decompose_endpoints_refused(tmp_path, capsys, p):
    x = np.linspace(-10, 10, 2048, endpoint=False)
    write_signal(tmp_path / "s.csv", x, 1 / (1 + x * x) + 0j)
    code, _, err = run(capsys, "decompose", str(tmp_path / "s.csv"), "--p", p)
    assert code == 2 and "endpoint" in err


def test_decompose_bad_inputs(tmp_path, capsys):
    x = np.linspace(-10, 10, 2047, endpoint=False)
    write_signal(tmp_path / "odd.csv", x, 1 / (1 + x * x) + 0j)
    assert run(capsys, "decompose", str(tmp_path / "odd.csv"))[0] == 2
    xs = np.sort(np.random.default_rng(0).uniform(-10, 10, 2048))
    write_signal(tmp_path / "ragged.csv", xs, 1 / (1 + xs * xs) + 0j)
    assert run(capsys, "decompose", str(tmp_path / "ragged.csv"))[0] == 2
    (tmp_path / "junk.csv").write_text("1,2\n3,4\n5,6\n7,8\n")
    with pytest.raises(ConfigError):
        read_signal_csv(str(tmp_path / "junk.csv"))
    assert run(capsys, "decompose")[0] == 2


# --- spectrum, kernel, gallery ---------------------------------------------------------


def test_spectrum_moebius(tmp_path, capsys):
    out = tmp_path / "cloud.csv"
    code, text, _ = run(capsys, "spectrum", '{"kind": "moebius-to-disk"}', "--out", str(out))
    assert code == 0
    summary = json.loads(text)
    assert summary["inclusion_pass"] and summary["M"] == 16
    # complex numbers are written as [re, im] pairs
    eig = np.array([complex(*v) for v in summary["eigenvalues"]])
    assert eig.size == 16 and np.max(np.abs(eig)) <= 1.05
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["re", "im", "tag"]
    assert sum(r[2] == "eig" for r in rows[1:]) == 16


def test_spectrum_constant_stdout(capsys):
    code, text, _ = run(capsys, "spectrum", '{"kind": "constant", "c": [2, 0]}')
    assert code == 0
    eig = [r for r in csv.reader(text.splitlines()) if r[2] == "eig"]
    assert all(abs(float(a) - 2) <= 1e-8 and abs(float(b)) <= 1e-8 for a, b, _ in eig)


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", '{"kind": "moebius-to-disk"}', "--galerkin-M", "64"],
        ["spectrum", '{"kind": "bogus"}'],
        ["spectrum", "{not json"],
        ["spectrum", '{"kind": "affine", "k": 1, "b": [0, 1]}'],
        ["spectrum"],
    ],
)
def test_spectrum_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_kernel_command(capsys):
    code, out, _ = run(capsys, "kernel", "--z", "i", "--w", "i", "--order", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["z"] == [0.0, 1.0] and doc["w"] == [0.0, 1.0]
    assert abs(complex(*doc["value"]) - 0.063506162732179148) <= 1e-12


def test_gallery_single_case(capsys):
    code, out, _ = run(capsys, "gallery", "inverse-tail")
    assert code == 0
    assert json.loads(out)["reports"][0]["pass"]


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "composition", "--out", str(a)]) == 0
    assert main(["verify", "composition", "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()

import json
import subprocess
import sys
from importlib.resources import files

import numpy as np
import pytest

from eigencert.cli import main
from eigencert.serialize import dumps, matrix_to_json, read_matrix, write_matrix_json

DATA = files("eigencert") / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_ones(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "ones4.mtx")
    assert code == 0
    rep = json.loads(out)
    assert rep["base"]["tau0"] == pytest.approx(1.0)
    assert rep["base"]["gamma0"] == pytest.approx(1.5)
    assert rep["certificate"]["radius_asie"] == pytest.approx(1 / 9)
    assert len(rep["r_bounds"]) == 4
    assert rep["schema_version"] == 1
    assert "provenance" in rep


def test_analyze_override_and_K(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "ones4.mtx", "--gamma-override", "2", "--K", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["certificate"]["radius_asie"] == 1 / 12
    assert rep["k_bounds"]["D3lambda"] == pytest.approx(192.0)
    assert rep["projection_enclosure_constants"]["discrepancy"] is True


def test_analyze_target(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "diag210.mtx", "--target", "0.9", "--norm", "two")
    assert code == 0
    assert json.loads(out)["base"]["lambda0"] == pytest.approx([1.0, 0.0])


def test_out_file(capsys, tmp_path):
    dest = tmp_path / "rep.json"
    code, out, _ = run(capsys, "analyze", DATA / "ones3.mtx", "--out", dest)
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["command"] == "analyze"


def test_taylor_command(capsys):
    code, out, _ = run(capsys, "taylor", DATA / "ones4.mtx", DATA / "ones4_perturbed.mtx")
    assert code == 0
    rep = json.loads(out)
    assert [e["inside"] for e in rep["enclosures"]] == [True, True, True]


def test_gap_command(capsys):
    code, out, _ = run(capsys, "gap", DATA / "ones5.mtx", "--delta0", "0.9", "--delta", "0.45")
    assert code == 0
    rep = json.loads(out)
    assert rep["base_gap_check"]["status"] == "certified"
    assert rep["short_form"]["applicable"] is True
    assert rep["theoremC"]["radius"] > 0
    code, out, _ = run(capsys, "gap", DATA / "diag210.mtx", "--delta0", "0.4", "--delta", "0.2")
    assert code == 0
    assert json.loads(out)["short_form"]["applicable"] is False


def test_perron_command(capsys, tmp_path):
    code, out, _ = run(capsys, "perron", DATA / "ones4.mtx")
    assert code == 0
    assert json.loads(out)["perron"]["pass"] is True
    bad = tmp_path / "bad.json"
    L = np.ones((3, 3))
    L[0, 0] = 5
    write_matrix_json(bad, L)
    code, out, _ = run(capsys, "perron", bad, "--c", "1")
    assert code == 2
    assert json.loads(out)["perron"]["failing_rows"] == [0]


def test_verify_command_small(capsys):
    code, out, _ = run(capsys, "verify", DATA / "ones5.mtx", "--samples", "5",
                       "--delta0", "0.9", "--delta", "0.45")
    assert code == 0
    rep = json.loads(out)
    assert rep["total_violations"] == 0
    assert rep["gap"]["outcomes"]["certified"] == 5


@pytest.mark.parametrize("argv, code", [
    (["analyze", "missing.mtx"], 3),
    ([], 3),
    (["analyze"], 3),
    (["analyze", DATA / "ones4.mtx", "--norm", "frobenius"], 3),
    (["gap", DATA / "ones4.mtx"], 3),
    (["verify", DATA / "ones4.mtx", "--samples", "0"], 3),
    (["analyze", DATA / "ones4.mtx", "--gamma-override", "1"], 2),
    (["analyze", DATA / "ones4.mtx", "--K", "1"], 2),
    (["gap", DATA / "diag210.mtx", "--delta0", "0.6", "--delta", "0.3"], 2),
    (["gap", DATA / "ones4.mtx", "--delta0", "0.5", "--delta", "0.7"], 2),
    (["perron", DATA / "ones4.mtx", "--c", "0"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_exit_codes_from_files(capsys, tmp_path):
    (tmp_path / "rect.mtx").write_text("%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n")
    (tmp_path / "eye.json").write_text(json.dumps(matrix_to_json(np.eye(3))))
    (tmp_path / "junk.mtx").write_text("not a matrix\n")
    (tmp_path / "big.json").write_text(json.dumps(matrix_to_json(np.eye(65))))
    (tmp_path / "nan.json").write_text('{"n": 2, "entries": [[1, 0], [0, "x"]]}')
    assert run(capsys, "analyze", tmp_path / "rect.mtx")[0] == 3
    assert run(capsys, "analyze", tmp_path / "junk.mtx")[0] == 3
    assert run(capsys, "analyze", tmp_path / "big.json")[0] == 3
    assert run(capsys, "analyze", tmp_path / "nan.json")[0] == 3
    # repeated eigenvalue: not simple
    assert run(capsys, "analyze", tmp_path / "eye.json")[0] == 2
    far = tmp_path / "far.json"
    write_matrix_json(far, np.full((4, 4), 0.25) + np.eye(4))
    assert run(capsys, "taylor", DATA / "ones4.mtx", far)[0] == 2


def test_report_on_stdout_diagnostics_on_stderr():
    ok = subprocess.run([sys.executable, "-m", "eigencert", "analyze", str(DATA / "ones3.mtx"), "-v"],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    json.loads(ok.stdout)
    bad = subprocess.run([sys.executable, "-m", "eigencert", "analyze", "missing.mtx"],
                         capture_output=True, text=True)
    assert bad.returncode == 3
    assert bad.stdout == "" and "missing.mtx" in bad.stderr


# --- serialization ---------------------------------------------------------------

def test_json_roundtrip_lossless(tmp_path):
    r = np.random.default_rng(0)
    a = r.standard_normal((6, 6)) + 1j * r.standard_normal((6, 6))
    a[0, 0] = 0.1 + 1e-17j
    a[1, 1] = 5e-324
    p = tmp_path / "m.json"
    write_matrix_json(p, a)
    b = read_matrix(p)
    assert np.array_equal(a, b)


def test_report_roundtrip_floats():
    vals = [0.1, 1 / 3, 2.0 ** -1074, 1e308, complex(1 / 7, -2 / 3)]
    back = json.loads(dumps({"v": vals}))["v"]
    assert back[:4] == vals[:4]
    assert complex(*back[4]) == vals[4]
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


MM = {
    "array_real": ("%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n",
                   [[1, 2], [3, 4]]),
    "coord_real": ("%%MatrixMarket matrix coordinate real general\n% comment\n3 3 2\n1 1 2.5\n3 2 -1\n",
                   [[2.5, 0, 0], [0, 0, 0], [0, -1, 0]]),
    "coord_int": ("%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 2 7\n2 1 -3\n",
                  [[0, 7], [-3, 0]]),
    "coord_complex": ("%%MatrixMarket matrix coordinate complex general\n2 2 2\n1 1 1 2\n2 2 0 -1\n",
                      [[1 + 2j, 0], [0, -1j]]),
    "symmetric": ("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 5\n",
                  [[1, 5], [5, 0]]),
    "hermitian": ("%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1 0\n2 1 2 3\n",
                  [[1, 2 - 3j], [2 + 3j, 0]]),
    "skew": ("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 4\n",
             [[0, -4], [4, 0]]),
    "pattern": ("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n",
                [[0, 1], [1, 0]]),
    "array_symmetric": ("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n",
                        [[1, 2], [2, 3]]),
}


@pytest.mark.parametrize("name", sorted(MM))
def test_matrix_market_variants(tmp_path, name):
    text, expected = MM[name]
    p = tmp_path / f"{name}.mtx"
    p.write_text(text)
    np.testing.assert_array_equal(read_matrix(p), np.array(expected, dtype=complex))


def test_bundled_data_loads():
    for name in ("ones3", "ones4", "ones5", "ones8", "diag210", "ones4_perturbed", "tridiag_coo"):
        a = read_matrix(DATA / f"{name}.mtx")
        assert a.shape[0] == a.shape[1] >= 3
    n = 5
    assert np.array_equal(read_matrix(DATA / "ones5.mtx"), np.full((n, n), 1 / n))

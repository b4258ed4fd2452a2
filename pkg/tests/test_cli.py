import json
import math

import pytest

from transvec.circuit import Circuit
from transvec.cli import main, parse_angle, parse_p_list
from transvec.code import builtin_833, load_code, save_check_matrix
from transvec.errors import InvalidArgumentError
from transvec.f2 import BitMatrix
from transvec.noise import read_csv

LOGICAL = ["--logical", "X1 Z2 X3"]


def test_parse_angle():
    assert parse_angle("pi/2") == math.pi / 2
    assert parse_angle("-pi/4") == -math.pi / 4
    assert parse_angle("3pi/4") == pytest.approx(3 * math.pi / 4)
    assert parse_angle("2*pi") == pytest.approx(2 * math.pi)
    assert parse_angle("0.7") == 0.7
    for bad in ("pie", "inf", "pi/0", ""):
        with pytest.raises(InvalidArgumentError):
            parse_angle(bad)


def test_parse_p_list():
    assert parse_p_list("1e-3,2e-3") == [1e-3, 2e-3]
    ps = parse_p_list("1e-3:1e-2:log8")
    assert len(ps) == 8 and ps[0] == pytest.approx(1e-3) and ps[-1] == pytest.approx(1e-2)
    assert parse_p_list("0:0.1:3") == pytest.approx([0, 0.05, 0.1])
    assert parse_p_list("") == []
    for bad in ("abc", "0:1e-2:log3", "2"):
        with pytest.raises(InvalidArgumentError):
            parse_p_list(bad)


def test_code_info_prints_table(capsys):
    assert main(["code", "info", "--builtin", "833"]) == 0
    out = capsys.readouterr().out
    assert "[[8,3,3]]" in out
    assert "S3  IIZYXZYX" in out and "Z1  IZXIZIIX" in out


def test_code_validate_round_trip(tmp_path, capsys):
    path = tmp_path / "833.code"
    assert main(["code", "info", "--builtin", "833", "--out", str(path)]) == 0
    assert load_code(path) == builtin_833()
    assert main(["code", "validate", "--code", str(path)]) == 0


def test_code_validate_failures(tmp_path, capsys):
    bad = tmp_path / "bad.code"
    bad.write_text("nonsense\n")
    assert main(["code", "validate", "--code", str(bad)]) == 2
    invalid = tmp_path / "invalid.code"
    invalid.write_text("code n=2 k=1\nS ZI\nX XX\nZ ZZ\n")
    assert main(["code", "validate", "--code", str(invalid)]) == 3
    assert main(["code", "validate", "--code", str(tmp_path / "missing")]) == 2
    assert main(["code", "info", "--builtin", "nope"]) == 2


def test_css_code_from_check_files(tmp_path, capsys):
    h = BitMatrix.from_rows([[0, 0, 0, 1, 1, 1, 1], [0, 1, 1, 0, 0, 1, 1], [1, 0, 1, 0, 1, 0, 1]])
    save_check_matrix(h, tmp_path / "h.txt")
    args = ["--hx", str(tmp_path / "h.txt"), "--hz", str(tmp_path / "h.txt")]
    assert main(["code", "info", *args]) == 0
    assert "[[7,1,?]]" in capsys.readouterr().out


def test_synth_reduced_support(capsys):
    assert main(["synth", "--builtin", "833", *LOGICAL, "--theta", "pi/2", "--reduce", "exhaustive"]) == 0
    text = capsys.readouterr().out
    c = Circuit.from_text(text)
    assert {q for g in c.gates for q in g.qubits} == {2, 3, 4, 7}
    assert c.is_clifford()


def test_synth_json_round_trips(tmp_path):
    out = tmp_path / "c.json"
    assert main(["synth", *LOGICAL, "--theta", "0.3", "--json", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    c = Circuit.from_dict(payload["circuit"])
    assert payload["physical"] == "-Z2 X4 Y5 Y6 Z7 X8"
    assert c.count("CNOT") == 10


def test_reduce(capsys):
    assert main(["reduce", "--pauli", "Z2 X4 Y5 Y6 Z7 X8"]) == 0
    assert "reduced X3 X4 Z5 Z8" in capsys.readouterr().out
    assert main(["reduce", *LOGICAL, "--strategy", "greedy"]) == 0


def test_verify_passes(capsys):
    assert main(["verify", "--builtin", "833", *LOGICAL, "--theta", "0.7"]) == 0
    assert main(["verify", *LOGICAL, "--theta", "pi/2", "--reduce", "exhaustive"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_verify_json_is_machine_readable(capsys):
    assert main(["verify", *LOGICAL, "--theta", "pi/4", "--json"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert [r["kind"] for r in reports] == ["logical-action", "stabilizer-centralization"]
    assert all(r["passed"] for r in reports)


def test_oracle_command(capsys):
    assert main(["oracle", *LOGICAL, "--theta", "0.7", "--samples", "10"]) == 0
    assert capsys.readouterr().out.count("ok") == 3


def test_bad_inputs_map_to_exit_codes(capsys):
    assert main(["synth", "--logical", "X4", "--theta", "pi/2"]) == 2
    assert main(["synth", *LOGICAL, "--theta", "bogus"]) == 2
    assert main(["simulate", *LOGICAL, "--theta", "0.3", "--p", "1e-3", "--shots", "10"]) == 2
    assert main(["simulate", *LOGICAL, "--p", "1e-3", "--shots", "0"]) == 2
    assert main(["simulate", *LOGICAL, "--p", "1e-3", "--shots", "10", "--target", "4"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_simulate_is_deterministic(tmp_path, capsys):
    args = ["simulate", "--builtin", "833", *LOGICAL, "--reduce", "exhaustive", "--p", "1e-3:1e-2:log3"]
    args += ["--shots", "2000", "--decoder", "lookup", "--seed", "7"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = read_csv(a.read_text())
    assert len(rows) == 3 and all(r["seed"] == 7 for r in rows)


def test_simulate_targeted_to_stdout(capsys):
    args = ["simulate", *LOGICAL, "--p", "5e-3", "--shots", "500", "--target", "2", "--decoder", "bp_osd"]
    assert main(args) == 0
    assert capsys.readouterr().out.startswith("p,shots,failures,rate,ci_lo,ci_hi,seed\n")

import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from lameqes.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, dumps, eigenfunction_descriptor, main, table_rows
from lameqes.reference_cases import INTEGER_CASE, HALF_CASE

T4 = ["--a", "2", "--b", "1", "--m", "0.5", "--shift", "paper"]
T5 = ["--a", "7/2", "--b", "1/2", "--m", "0.5", "--shift", "paper"]


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_json_integer_case(capsys):
    code, out, _ = run(capsys, ["solve", *T4])
    assert code == EXIT_OK
    doc = json.loads(out)
    energies = [s["energy"] for s in doc["solutions"]]
    assert energies == pytest.approx(INTEGER_CASE.expected(0.5), abs=1e-12)
    assert energies == sorted(energies)
    assert [r["admissible"] for r in doc["records"]] == [False, True, True, True]
    assert doc["params"] == {"a": "2", "b": "1", "m": 0.5, "shift": -2.0}
    first = doc["solutions"][0]
    assert set(first) == {
        "energy", "energy_unshifted", "set_id", "alpha", "beta", "n",
        "poly_coeffs", "period_class", "eigenfunction",
    }
    assert all("degeneracy_group" not in s for s in doc["solutions"])


def test_solve_json_half_case_groups(capsys):
    code, out, _ = run(capsys, ["solve", *T5])
    doc = json.loads(out)
    assert code == EXIT_OK
    assert len(doc["solutions"]) == 5
    grouped = [s for s in doc["solutions"] if "degeneracy_group" in s]
    assert len(grouped) == 2
    assert grouped[0]["degeneracy_group"] == grouped[1]["degeneracy_group"]
    assert grouped[0]["energy"] == pytest.approx(13.372281323269014, abs=1e-12)
    set4 = [s for s in grouped if s["set_id"] == 4][0]
    assert set4["poly_coeffs"] == pytest.approx([0.125, 0.0, -1.0, 0.0, 1.0], abs=1e-13)


def test_json_byte_stable(capsys):
    _, one, _ = run(capsys, ["solve", *T5])
    _, two, _ = run(capsys, ["solve", *T5])
    assert one == two
    proc = subprocess.run(
        [sys.executable, "-m", "lameqes", "solve", *T5], capture_output=True, check=True
    )
    assert proc.stdout.decode() == one


def test_text_and_json_agree(capsys):
    _, js, _ = run(capsys, ["solve", *T4])
    _, txt, _ = run(capsys, ["solve", *T4, "--format", "text"])
    doc = json.loads(js)
    lines = txt.splitlines()
    start = next(i for i, line in enumerate(lines) if line.split()[:2] == ["#", "set"])
    energies = [float(line.split()[4]) for line in lines[start + 1 :]]
    assert energies == [s["energy"] for s in doc["solutions"]]


def test_mixed_case_rejected(capsys):
    code, _, err = run(capsys, ["solve", "--a", "2", "--b", "1/2", "--m", "0.5"])
    assert code == EXIT_INPUT
    assert "mixed integer/half-integer case unsupported" in err
    assert len(err.strip().splitlines()) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--a", "2", "--b", "1", "--m", "1.0"],
        ["solve", "--a", "2.5", "--b", "1", "--m", "0.5"],
        ["solve", "--a", "3", "--b", "1", "--m", "0.5", "--shift", "paper"],
        ["solve", "--a", "2", "--b", "1", "--m", "0.5", "--shift", "lots"],
        ["solve", "--a", "2"],
        ["verify", "--a", "2", "--b", "1", "--m", "1.0"],
        ["tables", "--which", "3", "--m", "0.5"],
        ["tables", "--which", "4", "--m", "2"],
    ],
)
def test_input_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == EXIT_INPUT


def test_explicit_shift(capsys):
    _, out, _ = run(capsys, ["solve", "--a", "2", "--b", "1", "--m", "0.5", "--shift", "-2"])
    doc = json.loads(out)
    assert doc["solutions"][0]["energy"] == pytest.approx(0.0, abs=1e-12)
    _, out, _ = run(capsys, ["solve", "--a", "2", "--b", "1", "--m", "0.5"])
    assert json.loads(out)["solutions"][0]["energy"] == pytest.approx(2.0)


def test_verify_passes(capsys):
    code, out, _ = run(capsys, ["verify", *T4])
    assert code == EXIT_OK
    assert out.startswith("verification PASSED")


def test_verify_json(capsys):
    code, out, _ = run(capsys, ["verify", *T5, "--format", "json"])
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["verification"]["passed"] is True
    assert len(doc["verification"]["entries"]) == 5


def test_verify_low_steps_reports_resolution(capsys):
    code, out, _ = run(capsys, ["verify", *T4, "--steps", "500"])
    assert code in (EXIT_OK, EXIT_FAILED)
    notes = [line for line in out.splitlines() if "below 1000" in line]
    assert len(notes) == 1


def test_bands_csv(capsys, tmp_path):
    path = tmp_path / "bands.csv"
    code, _, _ = run(capsys, ["bands", "--a", "2", "--b", "1", "--m", "0.5", "--shift", "paper",
                              "--emin", "-1", "--emax", "12", "--out", str(path)])
    assert code == EXIT_OK
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "energy,delta"
    assert len(lines) == 1001
    rows = [tuple(map(float, line.split(","))) for line in lines[1:]]
    near_zero = min(rows, key=lambda r: abs(r[0]))
    assert abs(near_zero[1] - 2) < 0.05
    # 12 significant digits: every field survives a round trip through .12g
    for line in lines[1:50]:
        assert all(format(float(v), ".12g") == v for v in line.split(","))


def test_bands_two_samples_stdout(capsys):
    code, out, _ = run(capsys, ["bands", *T4, "--emin", "-1", "--emax", "12", "--samples", "2"])
    assert code == EXIT_OK
    assert out.splitlines() == ["energy,delta", out.splitlines()[1], out.splitlines()[2]]
    assert out.splitlines()[1].startswith("-1,")
    assert out.splitlines()[2].startswith("12,")


def test_bands_forbidden_span(capsys):
    lo, hi = INTEGER_CASE.expected(0.5)[1:3]
    _, out, _ = run(capsys, ["bands", *T4, "--emin", str(lo + 0.01), "--emax", str(hi - 0.01), "--samples", "20"])
    deltas = [float(line.split(",")[1]) for line in out.splitlines()[1:]]
    assert all(abs(d) > 2 for d in deltas)


def test_bands_unwritable(capsys, tmp_path):
    code, _, err = run(capsys, ["bands", *T4, "--emin", "0", "--emax", "1", "--samples", "2",
                                "--out", str(tmp_path / "missing" / "x.csv")])
    assert code == EXIT_INPUT
    assert "cannot write" in err


def test_tables_4_text(capsys):
    code, out, _ = run(capsys, ["tables", "--which", "4", "--m", "0.5"])
    assert code == EXIT_OK
    set1 = [line for line in out.splitlines() if line.strip().startswith("1 ")]
    assert len(set1) == 1
    fields = set1[0].split()
    assert fields[3] == "-1"
    assert fields[4:] == ["-"] * 5


def test_tables_5_rows():
    rows = table_rows(5, 0.5)
    set4 = [r for r in rows if r["set_id"] == 4]
    assert len(set4) == 3
    assert [r["energy_label"] for r in set4] == ["0", "2*delta9", "14-7m+delta9"]
    assert {r["eigenfunction"] for r in set4} == {"dn(x)^{-1/2} P4(sn x)"}
    assert all(r["energy_label"] != "?" for r in rows)


def test_tables_json(capsys):
    code, out, _ = run(capsys, ["tables", "--which", "5", "--m", "0.3", "--format", "json"])
    doc = json.loads(out)
    assert code == EXIT_OK
    energies = [r["energy"] for r in doc["rows"]]
    expected = HALF_CASE.expected(0.3)
    # repeats across sets are table rows, not distinct states
    assert all(min(abs(e - x) for x in expected) < 1e-9 for e in energies)
    assert all(min(abs(e - x) for e in energies) < 1e-9 for x in expected)


def test_descriptor_strings():
    assert eigenfunction_descriptor(F(1), F(-1), 2) == "cn(x) dn(x)^{-1} P2(sn x)"
    assert eigenfunction_descriptor(F(0), F(2), 0) == "dn(x)^{2}"
    assert eigenfunction_descriptor(F(0), F(0), 0) == "1"


def test_dumps_format():
    text = dumps({"x": 0.1, "y": [1, 2.5], "z": None, "s": "a"})
    assert json.loads(text) == {"x": 0.1, "y": [1, 2.5], "z": None, "s": "a"}
    assert "0.10000000000000001" in text

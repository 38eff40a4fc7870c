import io

import numpy as np
import pytest

from cvpolar import cli
from cvpolar.frozen_io import FrozenFileError, format_frozen, parse_frozen, read_frozen, write_frozen
from cvpolar.transform import CodeSpec, encode


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def frozen16(tmp_path):
    spec = CodeSpec(16, (0, 1, 2, 3, 4, 5, 6, 8, 9, 10))
    path = tmp_path / "f16.txt"
    write_frozen(path, spec)
    return spec, path


# -- frozen files -------------------------------------------------------------------------


def test_frozen_roundtrip(tmp_path):
    spec = CodeSpec(32, (0, 1, 5, 7, 30))
    path = tmp_path / "f.txt"
    write_frozen(path, spec)
    assert path.read_text() == "32 27\n0 1 5 7 30\n"
    assert read_frozen(path) == spec
    assert parse_frozen("8 8\n") == CodeSpec(8, ())
    assert parse_frozen(format_frozen(spec) + "\n\n") == spec


@pytest.mark.parametrize("text,line,col", [
    ("", 1, 1),
    ("16\n", 1, 1),
    ("16 x\n1\n", 1, 4),
    ("12 4\n", 1, 1),
    ("16 17\n", 1, 4),
    ("16 14\n0 1.5\n", 2, 3),
    ("16 14\n0 16\n", 2, 3),
    ("16 13\n0 4 2\n", 2, 5),
    ("16 14\n3 3\n", 2, 3),
    ("16 13\n0 1\n", 2, 3),
    ("16 14\n0 1\nextra\n", 3, 1),
])
def test_frozen_diagnostics(text, line, col):
    with pytest.raises(FrozenFileError) as err:
        parse_frozen(text, "f.txt")
    assert (err.value.line, err.value.col) == (line, col)
    assert str(err.value).startswith(f"f.txt:{line}:{col}: ")


# -- hex strings ----------------------------------------------------------------------------


def test_hex_roundtrip():
    rng = np.random.default_rng(0)
    for length in (1, 4, 6, 16, 17):
        bits = rng.integers(0, 2, length).astype(np.uint8)
        np.testing.assert_array_equal(cli.hex_to_bits(cli.bits_to_hex(bits), length), bits)
    assert cli.bits_to_hex([1, 0, 0, 0, 1, 1]) == "8c"
    with pytest.raises(ValueError):
        cli.hex_to_bits("8d", 6)  # nonzero padding
    with pytest.raises(ValueError):
        cli.hex_to_bits("8", 6)


# -- subcommands ----------------------------------------------------------------------------


def test_encode(frozen16):
    spec, path = frozen16
    code, out = run(["encode", "--frozen", str(path), "--hex", "a4", "00"])
    assert code == 0
    lines = out.split()
    msg = cli.hex_to_bits("a4", 6)
    assert lines[0] == cli.bits_to_hex(encode(spec.embed(msg)))
    assert lines[1] == "0000"


def test_decode_roundtrip(frozen16, tmp_path):
    spec, path = frozen16
    rng = np.random.default_rng(1)
    msgs = rng.integers(0, 2, (5, spec.k)).astype(np.uint8)
    llr = tmp_path / "y.txt"
    llr.write_text("\n".join(" ".join(f"{v:.6f}" for v in -2.0 * (1 - 2.0 * encode(spec.embed(m))))
                             for m in msgs) + "\n")
    expect = [cli.bits_to_hex(m) for m in msgs]
    for argv in (["decode-sc", "--mode", "sf"], ["decode-sc", "--mode", "eff"],
                 ["decode-list", "-l", "4"], ["decode-list", "-l", "8", "--skip-head", "--sc-tail"]):
        code, out = run(argv + ["--frozen", str(path), "--llr", str(llr)])
        assert code == 0 and out.split() == expect


def test_decode_bad_frame(frozen16, tmp_path):
    _, path = frozen16
    llr = tmp_path / "y.txt"
    llr.write_text("1 2 3\n")
    assert run(["decode-sc", "--frozen", str(path), "--llr", str(llr)])[0] == 2


def test_simulate_csv_is_deterministic(frozen16):
    _, path = frozen16
    argv = ["simulate", "--frozen", str(path), "--snr", "1", "3", "--trials", "50", "--seed", "4",
            "-l", "1", "4", "--no-timing"]
    code, a = run(argv)
    assert code == 0 and a == run(argv)[1]
    rows = a.splitlines()
    assert rows[0] == "n,k,l,mode,snr_db,trials,errors,fer,avg_ops,wall_ms"
    assert len(rows) == 5
    assert rows[1].startswith("16,6,1,eff,1,50,")


def test_opcount():
    code, out = run(["opcount", "--min-n", "16", "--max-n", "128", "--mode", "eff"])
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()]
    assert rows[0][:3] == ["n", "mode", "measured"]
    assert [int(r[2]) for r in rows[1:]] == [272, 968, 3000, 8344]


def test_construct(tmp_path):
    argv = ["construct", "--n", "32", "--k", "16", "--design-snr", "2", "--trials", "50", "--seed", "3"]
    code, out = run(argv)
    assert code == 0 and out == run(argv)[1]
    spec = parse_frozen(out)
    assert spec.n == 32 and spec.k == 16


def test_missing_frozen_file(tmp_path):
    assert run(["decode-sc", "--frozen", str(tmp_path / "none.txt")])[0] == 2

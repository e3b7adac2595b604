import json

import pytest

from hlbrion.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out


def test_finite_both(capsys):
    code, out = run(capsys, "finite", "--n", "2", "--a", "2", "--method", "both")
    assert code == 0
    assert "verdict: EQUAL" in out
    assert out.count("x1^2") == 2


def test_finite_json(capsys):
    code, out = run(capsys, "finite", "--n", "3", "--a", "1,0",
                    "--method", "gt", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["poly"]["terms"]) == 3


def test_finite_zero_weight_rejected(capsys):
    code, _ = run(capsys, "finite", "--n", "2", "--a", "0")
    assert code == 2


def test_finite_guard(capsys):
    code, _ = run(capsys, "finite", "--n", "5", "--a", "1,0,0,0",
                  "--method", "def")
    assert code == 2


def test_affine_basic(capsys):
    code, out = run(capsys, "affine", "--n", "2", "--a", "1,0", "--qmax", "1",
                    "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["qmax"] == 1
    assert {"q": 0, "z": [0], "t_poly": [1]} in data["coeffs"]
    assert len(data["coeffs"]) == 4


def test_affine_level_zero_truncation(capsys):
    # the q^0 layer is the classical top piece: two basis elements here
    code, out = run(capsys, "affine", "--n", "2", "--a", "1,1", "--qmax", "0")
    assert code == 0
    assert out.splitlines() == ["q^0 z=[0] t_poly=[1]", "q^0 z=[1] t_poly=[1]"]


def test_affine_json_with_repeated_weights(capsys):
    # several basis elements can share (q, z); sorting must not compare
    # their weight polynomials
    code, out = run(capsys, "affine", "--n", "2", "--a", "1,0", "--qmax", "3",
                    "--format", "json")
    assert code == 0
    data = json.loads(out)
    pairs = [(row["q"], tuple(row["z"])) for row in data["coeffs"]]
    assert len(pairs) > len(set(pairs))


def test_affine_negative_qmax(capsys):
    code, _ = run(capsys, "affine", "--n", "2", "--a", "1,0", "--qmax", "-1")
    assert code == 2


def test_affine_evaluated_mode(capsys):
    code, out = run(capsys, "affine", "--n", "2", "--a", "1,0", "--qmax", "1",
                    "--z", "rand:5")
    assert code == 0
    assert "seed 5" in out and "value_num" not in out  # text format
    code2, out2 = run(capsys, "affine", "--n", "2", "--a", "1,0", "--qmax", "1",
                      "--z", "rand:5")
    assert out2 == out  # deterministic under a fixed seed


def test_verify_tmultinomial(capsys):
    code, out = run(capsys, "verify", "tmultinomial", "--n", "3", "--a", "1,0")
    assert code == 0
    assert "PASS" in out and "1 + t + t^2" in out.replace("*", " ")


def test_verify_zero_fixture(capsys):
    code, out = run(capsys, "verify", "zero", "--graph", "fixtures/fig2.json",
                    "--b", "3", "--trials", "3")
    assert code == 0
    assert out.strip().endswith("PASS")


def test_verify_zero_rejects_monotone_graph(capsys):
    import tempfile, os
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump([[0, 1], [0, 2], [1, 1]], fh)
        path = fh.name
    try:
        code, _ = run(capsys, "verify", "zero", "--graph", path, "--b", "1,0")
        assert code == 2
    finally:
        os.unlink(path)


def test_verify_main_small(capsys):
    code, out = run(capsys, "verify", "main", "--n", "2", "--a", "1,0",
                    "--qmax", "2", "--z", "symbolic")
    assert code == 0
    assert "PASS" in out


def test_verify_graphsum_small(capsys):
    code, out = run(capsys, "verify", "graphsum", "--max-vertices", "5")
    assert code == 0
    assert "degenerations checked" in out

import csv
import io
import json

import pytest

from varlp.cli import main

FILES = {
    "one": "tail: constant 1\ndeclared_inf: 1\n",
    "two": "tail: constant 2\ndeclared_inf: 2\n",
    "half": "tail: constant 0.5\ndeclared_inf: 0.5\n",
    "lin": "tail: power 1 1\ndeclared_inf: 1\n",
    "inf": "tail: infinite\ndeclared_inf: inf\n",
    "hundred": "tail: constant 100\ndeclared_inf: 100\n",
    "slowlog": "tail: affinelog 1 1\ndeclared_inf: 1\n",
    # p < q only on a finite set: no witness exists
    "twofirst": "prefix: 2, 2\ntail: constant 1\ndeclared_inf: 1\n",
    "broken": "tail: constant\ndeclared_inf: 1\n",
}


@pytest.fixture
def files(tmp_path):
    out = {}
    for k, v in FILES.items():
        (tmp_path / k).write_text(v)
        out[k] = str(tmp_path / k)
    (tmp_path / "seq").write_text("3\n4\n")
    (tmp_path / "zero").write_text("0\n0\n0\n")
    out["seq"], out["zero"] = str(tmp_path / "seq"), str(tmp_path / "zero")
    out["dir"] = tmp_path
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def structured(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out)


def test_norm(files, capsys):
    code, doc = structured(capsys, "norm", "--seq", files["seq"], "--p", files["two"])
    assert code == 0
    assert doc["summary"]["luxemburg_norm"] == pytest.approx(5.0)
    assert doc["summary"]["sup_norm"] == 4.0
    assert doc["config"]["p_resolved"].startswith("kind: exponent")
    code, doc = structured(capsys, "norm", "--seq", files["zero"], "--p", files["half"])
    assert code == 0 and doc["summary"]["luxemburg_norm"] == 0.0
    code, out, _ = run(capsys, "norm", "--seq", files["seq"], "--p", files["two"])
    assert "luxemburg_norm: 5.0" in out


def test_parse_errors(files, capsys):
    assert run(capsys, "norm", "--seq", files["seq"], "--p", files["broken"])[0] == 2
    assert run(capsys, "norm", "--seq", files["seq"])[0] == 2
    assert run(capsys, "norm", "--bogus")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "norm", "--seq", files["seq"], "--p", files["dir"] / "nope")[0] == 2


def test_classify(files, capsys):
    code, doc = structured(capsys, "classify", "--p", files["one"], "--q", files["two"])
    assert code == 0 and doc["summary"]["classification"] == "strict_forward"
    assert doc["summary"]["backward_witness"] == "block"
    code, doc = structured(capsys, "classify", "--p", files["two"], "--q", files["two"])
    assert code == 0 and doc["summary"]["classification"] == "equivalent"
    assert doc["summary"]["forward_constant"] == 1.0
    code, doc = structured(capsys, "classify", "--p", files["lin"], "--q", files["inf"])
    assert doc["summary"]["p_equals_linfty"] is True
    # tails that only separate past n ~ 1e43
    assert run(capsys, "classify", "--p", files["hundred"], "--q", files["slowlog"])[0] == 4


def test_witness(files, capsys):
    code, doc = structured(capsys, "witness", "--p", files["one"], "--q", files["two"],
                           "--K", 2, "--blocks", 12)
    assert code == 0 and doc["summary"]["passes"] is True
    assert doc["summary"]["scaled_p_modular"] == pytest.approx(12.0, rel=1e-8)
    assert doc["rows"][0][:2] == ["1", "16"]
    code, doc = structured(capsys, "witness", "--p", files["one"], "--q", files["two"],
                           "--epsilon", 0.25, "--blocks", 6)
    assert code == 0 and doc["summary"]["kind"] == "scaled"
    code, doc = structured(capsys, "witness", "--p", files["one"], "--q", files["two"],
                           "--groups", 3, "--blocks", 2)
    assert code == 0 and doc["summary"]["kind"] == "universal"
    assert run(capsys, "witness", "--p", files["one"], "--q", files["twofirst"])[0] == 3
    # an unreachable threshold is reported as a violation
    assert run(capsys, "witness", "--p", files["one"], "--q", files["two"],
               "--blocks", 4, "--threshold", 100)[0] == 5


def test_bernstein(files, capsys):
    code, out, _ = run(capsys, "bernstein", "--p", files["one"], "--q", files["two"],
                       "--n", 4, "--D", 8, "--format", "rows")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# config: ")
    rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    assert rows[0][:4] == ["n", "theorem_bound", "proof_bound", "estimate"]
    est = [float(r[3]) for r in rows[1:]]
    assert est == pytest.approx([n ** -0.5 for n in range(1, 5)], rel=0.05)
    code, doc = structured(capsys, "bernstein", "--p", files["lin"], "--q", files["inf"],
                           "--n", 2, "--D", 6)
    assert code == 0 and doc["summary"]["singularity"] == "not_strictly_singular"
    assert run(capsys, "bernstein", "--p", files["one"], "--q", files["two"],
               "--n", 9, "--D", 8)[0] == 3


def test_topology(files, capsys):
    args = ("topology", "--p", files["half"], "--D", 6, "--samples", 2000, "--riesz-starts", 8)
    code, doc = structured(capsys, *args)
    assert code == 0 and doc["summary"]["violations"] == 0
    code, doc = structured(capsys, *args, "--inflate", 10)
    assert code == 5 and doc["summary"]["violations"] > 0
    assert run(capsys, *args, "--epsilon", 1.0)[0] == 3
    code, doc = structured(capsys, "topology", "--p", files["two"], "--D", 4, "--samples", 500)
    assert code == 0 and doc["summary"]["inclusion"].startswith("no formula")


def test_structured_output_is_reproducible(files, capsys, tmp_path):
    argv = ["bernstein", "--p", files["one"], "--q", files["two"], "--n", 3, "--D", 6,
            "--seed", 5, "--format", "structured"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main([str(x) for x in argv + ["--out", a]]) == 0
    assert main([str(x) for x in argv + ["--out", a.with_name("b.json")]]) == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da["config"].pop("out"), db["config"].pop("out")
    assert da == db
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first
    assert json.loads(first)["config"]["seed"] == 5

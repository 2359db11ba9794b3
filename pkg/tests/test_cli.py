import csv
import io
import json

import numpy as np
import pytest

from sympos import constructions as C
from sympos.cli import main
from sympos.core import rotation
from sympos.paths import SampledPath, path_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_json(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_classify_nmm(tmp_path, capsys):
    f = write_json(tmp_path, "m.json", C.n_minus_minus(0.0).tolist())
    code, out, _ = run(capsys, "classify", "-i", f)
    res = json.loads(out)
    assert code == 0
    assert res["sigma1"] == pytest.approx(4) and res["sigma2"] == pytest.approx(6)
    assert res["boundary_defect"] == pytest.approx(0, abs=1e-12)


def test_classify_sp2(tmp_path, capsys):
    f = write_json(tmp_path, "j.json", {"matrix": [[0, -1], [1, 0]]})
    code, out, _ = run(capsys, "classify", "-i", f)
    res = json.loads(out)
    assert code == 0 and res["tag"] == "O_U+"
    assert sorted(e["splitting_number"] for e in res["eigenvalues"]) == [-1, 1]


def test_classify_errors(tmp_path, capsys):
    f = write_json(tmp_path, "bad.json", [[1, 2], [3, 4]])
    assert run(capsys, "classify", "-i", f)[0] == 3
    g = tmp_path / "x.json"
    g.write_text("{not json")
    assert run(capsys, "classify", "-i", str(g))[0] == 2
    f3 = write_json(tmp_path, "odd.json", np.eye(3).tolist())
    assert run(capsys, "classify", "-i", f3)[0] == 2


def test_certify(tmp_path, capsys):
    code, out, _ = run(capsys, "certify", "-c", "rotation", "--param", "k=1", "--summary")
    assert code == 0 and json.loads(out)["verdict"] == "positive"
    t = np.linspace(0, 1, 50)
    neg = path_to_json(SampledPath(t, rotation(-t)))
    assert run(capsys, "certify", "-i", write_json(tmp_path, "neg.json", neg))[0] == 1
    short = path_to_json(SampledPath(t[:4], rotation(t[:4])))
    assert run(capsys, "certify", "-i", write_json(tmp_path, "short.json", short))[0] == 4
    assert run(capsys, "certify", "-c", "rotation", "--samples", "4")[0] == 2
    assert run(capsys, "certify", "-c", "nope")[0] == 2
    assert run(capsys, "certify", "-c", "rotation", "--param", "bogus=1")[0] == 2


def test_maslov(capsys):
    code, out, _ = run(capsys, "maslov", "-c", "rotation", "--param", "k=3")
    assert code == 0 and json.loads(out)["maslov"] == 3
    code, out, _ = run(capsys, "maslov", "-c", "H", "--param", "theta=0.4")
    assert code == 0 and json.loads(out)["maslov"] == 5


def test_trace_csv(capsys):
    code, out, _ = run(capsys, "trace", "gamma_k", "--samples", "100")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t"] + [f"re{i}" for i in range(1, 5)] + [f"im{i}" for i in range(1, 5)] + ["tag", "defect"]
    cross = [r for r in rows[1:] if r[-2].startswith("crossing:")]
    assert len(cross) == 1
    assert float(cross[0][0]) == pytest.approx(C.gamma_k_exit(2.0), abs=1e-8)
    ts = [float(r[0]) for r in rows[1:]]
    assert ts == sorted(ts)


def test_trace_unit_circle(capsys):
    code, out, _ = run(capsys, "trace", "H", "--param", "theta=0.7", "--samples", "50")
    rows = list(csv.reader(io.StringIO(out)))[1:]
    lam = np.array([[float(x) for x in r[1:9]] for r in rows])
    mod = np.hypot(lam[:, :4], lam[:, 4:])
    assert np.abs(mod - 1).max() < 1e-9


def test_trace_json_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "trace", "simple_real", "--format", "json", "--samples", "60",
                       "--param", "beta=2.0")
    obj = json.loads(out)
    assert code == 0 and obj["construction"] == "simple_real"
    f = write_json(tmp_path, "p.json", obj)
    code, out2, _ = run(capsys, "certify", "-i", f, "--summary")
    assert code == 0
    code, out3, _ = run(capsys, "trace", "simple_real", "--format", "json", "--samples", "60",
                        "--param", "beta=2.0")
    assert [s["tag"] for s in json.loads(out3)["samples"]] == [s["tag"] for s in obj["samples"]]


def test_verify(capsys):
    code, out, err = run(capsys, "verify", "simple-trace")
    assert code == 0 and json.loads(out)["overall"] is True
    code, out, err = run(capsys, "verify", "sigma-derivatives")
    assert code == 1 and "FAIL" in err
    code, _, err = run(capsys, "verify", "nope")
    assert code == 2 and "sigma-derivatives" in err

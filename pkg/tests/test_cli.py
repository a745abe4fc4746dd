import json
import subprocess
import sys

import pytest

from hsikit.cli import run

TREFOIL = {
    "det": 3,
    "name": "trefoil",
    "children": [
        {"det": 2, "children": [{"det": 1, "leaf": "unknot"}, {"det": 1, "leaf": "unknot"}]},
        {"det": 1, "leaf": "unknot"},
    ],
}


def ok(argv):
    code, text = run(argv)
    assert code == 0, text
    return json.loads(text)


def test_lens():
    out = ok(["lens", "5", "1", "--class", "0"])
    assert out["total_rank"] == 5 and out["intersection"]["perturbed_count"] == 5


def test_lens_domain_error():
    code, text = run(["lens", "4", "2"])
    assert code == 1 and json.loads(text)["error"] == "InvalidParams"


def test_s2s1():
    assert ok(["s2s1"])["total_rank"] == 2
    assert ok(["s2s1", "--class", "1"])["total_rank"] == 0


def test_plumbing_file(tmp_path):
    path = tmp_path / "tree.json"
    path.write_text(json.dumps({"weights": [2, 2], "edges": [[0, 1]]}))
    out = ok(["plumbing", str(path)])
    assert out == {"minimal": True, "h1": 3, "reason": out["reason"]}


def test_qa():
    assert ok(["qa", json.dumps(TREFOIL)])["verified"] is True
    bad = dict(TREFOIL, det=4)
    out = ok(["qa", json.dumps(bad)])
    assert out["verified"] is False and out["reasons"]


def test_euler_and_parse_errors(tmp_path):
    assert ok(["euler", "[[2,0],[0,3]]"])["euler"] == 6
    assert ok(["euler", "[[0]]"])["h1"] == "infinite"
    code, text = run(["euler", "[[1,2]]"])
    assert code == 2 and "square" in json.loads(text)["message"]
    code, text = run(["euler", "{\"matrix\": [[1, \"x\"]]}"])
    assert code == 2 and "matrix" in json.loads(text)["message"]
    code, text = run(["euler", str(tmp_path / "missing.json")])
    assert code == 2


def test_missing_field_named():
    code, text = run(["plumbing", "{\"edges\": []}"])
    assert code == 2 and "weights" in json.loads(text)["message"]


def test_connsum():
    out = ok(["connsum", json.dumps([{"family": "lens", "p": 2, "q": 1}, {"family": "lens", "p": 3, "q": 1}])])
    assert out["total_rank"] == 6 and out["euler"] == 6


def test_cerf_normalize():
    word = {
        "genus": 0,
        "pieces": [
            {"kind": "handle1", "genus": 0, "params": {"pair": 1, "cocurve": "b"}},
            {"kind": "cylinder", "genus": 1},
            {"kind": "handle2", "genus": 1, "params": {"curve": "a1"}},
        ],
    }
    out = ok(["cerf-normalize", json.dumps(word)])
    assert out["length"] == 0 and out["input_length"] == 3


def test_intersect():
    out = ok(["intersect", json.dumps({"family": "lens", "p": 3, "q": 1})])
    assert out["report"]["perturbed_count"] == 3
    out = ok(["intersect", json.dumps({"family": "s2s1"})])
    assert out["report"]["perturbed_count"] == 2


def test_twist_check_seed_reproducible():
    a = run(["twist-check", "--pairs", "5", "--seed", "7"])
    b = run(["twist-check", "--pairs", "5", "--seed", "7"])
    assert a == b and a[0] == 0
    assert json.loads(a[1])["max_fiber_error"] < 1e-8


def test_seed_env(monkeypatch):
    monkeypatch.setenv("HSIKIT_SEED", "11")
    out = ok(["twist-check", "--pairs", "2"])
    assert out["seed"] == 11


def test_compose_reproducible():
    req = json.dumps(
        {
            "first": {"shape": "handle1", "genus": 1, "params": {"pair": 1, "cocurve": "b"}},
            "second": {"shape": "handle2", "genus": 2, "params": {"curve": "a1"}},
        }
    )
    a = run(["compose", req, "--samples", "3", "--seed", "3"])
    assert a == run(["compose", req, "--samples", "3", "--seed", "3"])
    out = json.loads(a[1])
    assert out["embeddedness"]["passed"] and out["composite"]["kind"] == "graph"


def test_compose_not_composable():
    req = json.dumps(
        {
            "first": {"shape": "handle1", "genus": 1, "params": {"pair": 1, "cocurve": "b"}},
            "second": {"shape": "handle2", "genus": 2, "params": {"curve": "b1"}},
        }
    )
    out = ok(["compose", req, "--samples", "2"])
    assert out["composite"] is None and "not_composable" in out


def test_table_format():
    code, text = run(["euler", "[[5]]", "--format", "table"])
    assert code == 0 and "euler" in text and "5" in text


def test_tolerance_flags_accepted():
    req = {"first": {"shape": "cylinder", "genus": 1}, "second": {"shape": "cylinder", "genus": 1}}
    assert run(["compose", json.dumps(req), "--samples", "1", "--tol-relation", "1e-3", "--tol-solver", "1e-6"])[0] == 0


def test_tolerance_override_changes_handle_domain():
    from hsikit.config import use_tolerances
    from hsikit.correspondences import apply, handle2
    from hsikit.moduli import ModuliPoint
    from hsikit.su2 import SU2
    from hsikit.words import HolonomyPoint

    near = SU2.from_tuple((1, 1e-6, 0, 0))
    pt = ModuliPoint.from_holonomy(HolonomyPoint(1, (SU2.from_tuple((0.6, 0.8, 0, 0)), near)))
    assert apply(handle2(1, "b1"), pt) == []
    with use_tolerances(relation=1e-4):
        assert len(apply(handle2(1, "b1"), pt)) == 1


@pytest.mark.parametrize("argv", [["lens", "5", "1"], ["euler", "[[3]]"], ["s2s1"]])
def test_outputs_reparse(argv):
    json.loads(run(argv)[1])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hsikit", "lens", "3", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["total_rank"] == 3
    res = subprocess.run([sys.executable, "-m", "hsikit", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2


def test_plumbing_without_edges_is_a_chain():
    code, text = run(["plumbing", '{"weights": [2, 2, 2]}'])
    assert code == 0 and json.loads(text)["h1"] == 4  # continuant of (2,2,2)
    code, text = run(["plumbing", '{"weights": [2, 2, 2], "edges": []}'])
    assert json.loads(text)["h1"] == 8

from __future__ import annotations

import json

import numpy as np
import pytest

from apathkit import groupoids as gp
from apathkit import io
from apathkit.quadratic import QuadNumber


def _pointer(fn, *args, **kw):
    with pytest.raises(io.InputError) as info:
        fn(*args, **kw)
    return info.value.pointer


def test_load_json_sources(tmp_path):
    f = tmp_path / "doc.json"
    f.write_text('{"a": 1}')
    assert io.load_json(str(f)) == {"a": 1}
    assert io.load_json('{"a": 2}') == {"a": 2}
    assert io.load_json({"a": 3}) == {"a": 3}
    with pytest.raises(io.InputError, match="line 1"):
        io.load_json("{broken")
    with pytest.raises(io.InputError, match="cannot read"):
        io.load_json(str(tmp_path / "missing.json"))


def test_parse_call():
    assert io.parse_call("random(3, 0.1)") == ("random", [3, 0.1])
    assert io.parse_call("zero") == ("zero", [])
    assert io.parse_call("meridian(1, false)") == ("meridian", [1, False])
    with pytest.raises(io.InputError):
        io.parse_call("3 + 4")


def test_pointer_escaping():
    assert io._ptr("/a", "b/c~d") == "/a/b~1c~0d"


@pytest.mark.parametrize("doc,family,mn", [
    ({"family": "lie_algebra", "structure": "heisenberg"}, "lie_algebra", (0, 3)),
    ({"family": "tangent", "m": 3}, "tangent", (3, 3)),
    ({"family": "twisted_surface", "omega": "s2xs2-sqrt2"}, "twisted_surface", (4, 5)),
    ({"family": "twisted_surface", "lambdas": ["1", "sqrt(2)", 2]}, "twisted_surface", (6, 7)),
    ({"family": "twisted_surface", "lambdas": {"lambdas": [1, [0, 1]]}}, "twisted_surface", (4, 5)),
    ({"family": "custom", "anchor": [[1.0, 0.0]], "structure": np.zeros((2, 2, 2)).tolist()}, "custom", (1, 2)),
])
def test_load_algebroid(doc, family, mn):
    spec, conn = io.load_algebroid(doc)
    assert spec.family == family and (spec.m, spec.n) == mn
    assert conn.name == "zero"


def test_twisted_lambdas_are_exact_values():
    spec, _ = io.load_algebroid({"family": "twisted_surface", "lambdas": ["1/2", "sqrt(2)"]})
    assert spec.params["lambdas"].tolist() == [0.5, float(QuadNumber.sqrt(2))]


@pytest.mark.parametrize("doc,pointer", [
    ({}, "/family"),
    ({"family": "nope"}, "/family"),
    ({"family": "tangent"}, "/m"),
    ({"family": "tangent", "m": "two"}, "/m"),
    ({"family": "tangent", "m": 0}, "/m"),
    ({"family": "tangent", "m": 2, "n": 3}, "/n"),
    ({"family": "twisted_surface", "lambdas": ["x"]}, "/lambdas/0"),
    ({"family": "twisted_surface", "omega": "nope"}, "/omega"),
    ({"family": "custom", "anchor": [[1, 2], [3]], "structure": []}, "/anchor"),
    ({"family": "tangent", "m": 2, "connection": "random(x)"}, "/connection"),
    ({"family": "tangent", "m": 2, "connection": [[1]]}, "/connection"),
    ({"family": "tangent", "m": 1, "connection": [[[float("nan")]]]}, "/connection"),
])
def test_algebroid_errors_carry_pointers(doc, pointer):
    assert _pointer(io.load_algebroid, doc) == pointer


def test_load_connection():
    spec, conn = io.load_algebroid({"family": "tangent", "m": 2, "connection": "random(4, 0.5)"})
    assert conn.name == "random(4)" and np.max(np.abs(conn.G(np.zeros(2)))) <= 0.5
    _, conn = io.load_algebroid({"family": "tangent", "m": 1, "connection": [[[0.25]]]})
    assert conn.G(np.zeros(1)).tolist() == [[[0.25]]]


def test_path_presets(r2, so3):
    assert io.load_path(r2, "circle", N=64).N == 64
    assert io.load_path(so3, "random(2, 3, 0.5)", N=32).N == 32
    p = io.load_path(r2, {"preset": "constant", "x": [1, 2], "N": 8})
    assert p.gamma[3].tolist() == [1, 2]
    assert _pointer(io.load_path, r2, {"preset": "spiral"}) == "/preset"


def test_explicit_path_roundtrip(r2):
    p = io.load_path(r2, "random(1)", N=16)
    q = io.load_path(r2, json.dumps(p.to_dict()))
    assert np.array_equal(q.a, p.a) and np.array_equal(q.gamma, p.gamma) and q.a0 == p.a0


@pytest.mark.parametrize("doc,pointer", [
    ({"a": [[0, 0]]}, "/N"),
    ({"N": 2, "a": [[0, 0], [0, 0]]}, "/a"),
    ({"N": 1, "a": [[0, 0], [0, 0]]}, "/N"),
    ({"N": 2, "a": [[0, 0]] * 3, "gamma": [1, 2, 3]}, "/gamma"),
    ({"N": 2, "a": [[0, 0]] * 3, "a0": "yes"}, "/a0"),
])
def test_path_errors(r2, doc, pointer):
    assert _pointer(io.load_path, r2, doc) == pointer


def test_nested_pointer(r2):
    assert _pointer(io.load_path, r2, {"a": 1}, "/p0") == "/p0/N"


def test_sheet_presets(so3, r2):
    spec, sh = io.load_sheet(so3, "meridian(2)", N=20)
    assert spec.family == "twisted_surface" and sh.N_t == 20
    spec, sh = io.load_sheet(so3, "associator(2)", N=40)
    assert sh.breaks == (10, 20)
    spec, sh = io.load_sheet(so3, "gauge(1)", N=20)
    assert sh.name.startswith("gauge")
    _, sh = io.load_sheet(r2, "interpolation", N=10)
    assert sh.spec.family == "tangent"
    _, sh = io.load_sheet(r2, "constant", N=10)
    assert not sh.a.any()
    assert _pointer(io.load_sheet, so3, "mobius") == "/preset"
    assert _pointer(io.load_sheet, so3, "associator(1)", N=10) == "/preset"


def test_explicit_sheet(r2):
    _, sh = io.load_sheet(r2, "interpolation", N=8)
    _, back = io.load_sheet(r2, sh.to_dict())
    assert np.array_equal(back.a, sh.a) and np.array_equal(back.gamma, sh.gamma)
    assert _pointer(io.load_sheet, r2, {"N_eps": 2, "N_t": 2, "a": [[0]]}) == "/a"


def test_load_twisted():
    spec = io.load_twisted({"lambdas": ["1", "sqrt(2)"]})
    assert spec.lambdas == (QuadNumber(1), QuadNumber(0, 1))
    assert io.load_twisted("s2xs2-rational").lambdas[1] == 2
    assert _pointer(io.load_twisted, {"lambdas": [1, 1.4142]}) == "/lambdas/1"
    assert _pointer(io.load_twisted, {"lambdas": [1, "sqrt(3)"]}) == "/"
    assert _pointer(io.load_twisted, {"lambdas": [1, "1/0"]}) == "/lambdas/1"
    assert _pointer(io.load_twisted, {}) == "/lambdas"


@pytest.mark.parametrize("name", sorted(io.GROUPOID_PRESETS))
def test_groupoid_presets_roundtrip(name):
    G = io.load_groupoid(name)
    back = io.load_groupoid(json.loads(json.dumps(G.to_json())))
    assert back.same_as(G)


def test_groupoid_errors():
    doc = gp.z2().to_json()
    doc["mult"][0][2] = 7
    assert _pointer(io.load_groupoid, doc) == "/mult/0/2"
    doc = gp.z2().to_json()
    doc["arrows"][0]["src"] = "nowhere"
    assert _pointer(io.load_groupoid, doc) == "/arrows/0/src"
    doc = gp.z2().to_json()
    doc["mult"] = [r for r in doc["mult"] if r[:2] != [-1, -1]]
    with pytest.raises(io.InputError, match="missing product"):
        io.load_groupoid(doc)
    assert _pointer(io.load_groupoid, {"preset": "z7"}) == "/preset"
    assert _pointer(io.load_groupoid, {"objects": ["*"], "arrows": [], "mult": [[1, 1]], "unit": {}, "inv": {}}) \
        == "/mult/0"


def test_bibundle_presets():
    E = io.load_bibundle({"preset": "terminal", "G": "swap", "H": "pt"})
    assert gp.is_morita(E)
    E = io.load_bibundle({"preset": "inversion", "G": "z3"})
    assert gp.is_morita(E)
    assert _pointer(io.load_bibundle, {"preset": "diagonal", "G": "z2"}) == "/preset"
    assert _pointer(io.load_bibundle, {"preset": "identity"}) == "/G"


def test_explicit_bibundle_roundtrip():
    E = gp.identity_bibundle(gp.z2())
    doc = {"G": "z2", "H": "z2", **json.loads(json.dumps(E.to_json()))}
    back = io.load_bibundle(doc)
    assert gp.find_two_morphism(back, E) is not None


def test_bibundle_errors():
    E = gp.identity_bibundle(gp.z2())
    doc = {"G": "z2", "H": "z2", **json.loads(json.dumps(E.to_json()))}
    doc["JG"] = {"nowhere": "*"}
    assert _pointer(io.load_bibundle, doc) == "/JG/nowhere"
    doc = {"G": "z2", "H": "z2", **json.loads(json.dumps(E.to_json()))}
    doc["left"] = doc["left"][1:]
    with pytest.raises(io.InputError):
        io.load_bibundle(doc)
    doc = {"G": "z2", "H": "z2", **json.loads(json.dumps(E.to_json()))}
    doc["right"][0] = [1]
    assert _pointer(io.load_bibundle, doc) == "/right/0"

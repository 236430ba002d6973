"""JSON readers for algebroids, paths, sheets, period specs, groupoids and bibundles.

Every schema violation raises :class:`InputError` carrying a JSON pointer to
the offending location.
"""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

import numpy as np

from . import groupoids as gp
from . import homotopy as H
from . import paths as P
from .algebroid import (
    FAMILIES,
    AlgebroidSpec,
    ConnectionSpec,
    constant_connection,
    custom,
    lie_algebra,
    random_connection,
    tangent,
    twisted_surface,
    zero_connection,
)
from .periods import PRESETS as PERIOD_PRESETS
from .periods import TwistedSpec
from .quadratic import QuadNumber


class InputError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.message = message


def _ptr(base: str, key) -> str:
    k = str(key).replace("~", "~0").replace("/", "~1")
    return f"{base}/{k}"


def _require(doc: dict, key: str, ptr: str, kind=None):
    if not isinstance(doc, dict):
        raise InputError(ptr, "expected an object")
    if key not in doc:
        raise InputError(_ptr(ptr, key), "missing required field")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise InputError(_ptr(ptr, key), f"expected {names}")
    return val


def _int(doc: dict, key: str, ptr: str, minimum: int | None = None, default=None) -> int:
    if key not in doc and default is not None:
        return default
    v = _require(doc, key, ptr)
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(_ptr(ptr, key), "expected an integer")
    if minimum is not None and v < minimum:
        raise InputError(_ptr(ptr, key), f"must be >= {minimum}")
    return v


def _array(value, ptr: str, shape: tuple | None = None, ndim: int | None = None) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(ptr, "expected a rectangular numeric array") from None
    if ndim is not None and arr.ndim != ndim:
        raise InputError(ptr, f"expected a {ndim}-dimensional array, got {arr.ndim}")
    if shape is not None and arr.shape != shape:
        raise InputError(ptr, f"expected shape {list(shape)}, got {list(arr.shape)}")
    if not np.all(np.isfinite(arr)):
        raise InputError(ptr, "non-finite entries")
    return arr


def load_json(source: str | Path | dict | list, ptr: str = "") -> Any:
    """Accept a parsed document, a path to a JSON file or an inline JSON string."""
    if isinstance(source, (dict, list)):
        return source
    text = str(source)
    if not text.lstrip().startswith(("{", "[")):
        p = Path(text)
        try:
            if p.suffix == ".json" or (p.exists() and p.is_file()):
                text = p.read_text()
        except OSError as exc:
            raise InputError(ptr, f"cannot read {text!r}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(ptr, f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


_CALL = re.compile(r"^\s*([A-Za-z_][\w-]*)\s*(?:\((.*)\))?\s*$")


def parse_call(text: str, ptr: str = "") -> tuple[str, list]:
    """``"random(3, 0.1)"`` -> ``("random", [3, 0.1])``."""
    m = _CALL.match(text)
    if not m:
        raise InputError(ptr, f"cannot parse {text!r}")
    args = []
    if m.group(2) and m.group(2).strip():
        for tok in m.group(2).split(","):
            tok = tok.strip()
            try:
                args.append(json.loads(tok))
            except json.JSONDecodeError:
                args.append(tok)
    return m.group(1), args


# ---------------------------------------------------------------------------
# algebroids

def _lambdas(value, ptr: str) -> list[float]:
    if isinstance(value, dict):
        return [float(x) for x in load_twisted(value, ptr).lambdas]
    if isinstance(value, str):
        if value in PERIOD_PRESETS:
            return [float(x) for x in PERIOD_PRESETS[value]().lambdas]
        raise InputError(ptr, f"unknown period preset {value!r}")
    if not isinstance(value, list) or not value:
        raise InputError(ptr, "expected a non-empty list of coefficients")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(float(v))
        else:
            try:
                out.append(float(QuadNumber.coerce(v)))
            except (TypeError, ValueError) as exc:
                raise InputError(_ptr(ptr, i), str(exc)) from None
    return out


def load_algebroid(doc, ptr: str = "") -> tuple[AlgebroidSpec, ConnectionSpec]:
    doc = load_json(doc, ptr)
    family = _require(doc, "family", ptr, str)
    if family not in FAMILIES:
        raise InputError(_ptr(ptr, "family"), f"must be one of {list(FAMILIES)}")
    try:
        if family == "lie_algebra":
            st = doc.get("structure", "so3")
            spec = lie_algebra(st if isinstance(st, str) else _array(st, _ptr(ptr, "structure"), ndim=3))
        elif family == "tangent":
            spec = tangent(_int(doc, "m", ptr, minimum=1))
        elif family == "twisted_surface":
            key = "omega" if "omega" in doc else "lambdas"
            spec = twisted_surface(_lambdas(_require(doc, key, ptr), _ptr(ptr, key)))
        else:
            anchor = _array(_require(doc, "anchor", ptr), _ptr(ptr, "anchor"), ndim=2)
            struct = _array(_require(doc, "structure", ptr), _ptr(ptr, "structure"), ndim=3)
            spec = custom(anchor, struct)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(ptr, str(exc)) from None
    for key, val in (("m", spec.m), ("n", spec.n)):
        if key in doc and doc[key] != val:
            raise InputError(_ptr(ptr, key), f"declared {doc[key]} but the family gives {val}")
    return spec, load_connection(spec, doc.get("connection", "zero"), _ptr(ptr, "connection"))


def load_connection(spec: AlgebroidSpec, value, ptr: str = "/connection") -> ConnectionSpec:
    if isinstance(value, str):
        name, args = parse_call(value, ptr)
        if name == "zero" and not args:
            return zero_connection(spec)
        if name == "random" and 1 <= len(args) <= 2 and isinstance(args[0], int):
            scale = float(args[1]) if len(args) == 2 else 0.1
            return random_connection(spec, args[0], scale)
        raise InputError(ptr, f"expected 'zero', 'random(seed)' or 'random(seed, scale)', got {value!r}")
    arr = _array(value, ptr, shape=(spec.m, spec.n, spec.n))
    return constant_connection(spec, arr)


# ---------------------------------------------------------------------------
# paths and sheets

def load_path(spec: AlgebroidSpec, doc, ptr: str = "", N: int | None = None, seed: int | None = None) -> P.APath:
    """Explicit arrays, or a generator preset ``circle``, ``constant`` or ``random(seed, smoothness)``."""
    if isinstance(doc, str) and _CALL.match(doc):
        doc = {"preset": doc}
    doc = load_json(doc, ptr)
    if "preset" in doc:
        name, args = parse_call(_require(doc, "preset", ptr, str), _ptr(ptr, "preset"))
        n = int(doc.get("N", N or 200))
        if name == "circle":
            return P.circle_path(n)
        if name == "constant":
            x = doc.get("x", [0.0] * spec.m)
            return P.constant_path(spec, _array(x, _ptr(ptr, "x"), shape=(spec.m,)), n)
        if name == "random":
            s = int(args[0]) if args else (seed or 0)
            smooth = int(args[1]) if len(args) > 1 else 3
            amp = float(args[2]) if len(args) > 2 else 1.0
            try:
                return P.random_path(spec, s, n, smoothness=smooth, amplitude=amp)
            except P.ChartExitError as exc:
                raise InputError(_ptr(ptr, "preset"), str(exc)) from None
        raise InputError(_ptr(ptr, "preset"), f"unknown path preset {name!r}")
    n = _int(doc, "N", ptr, minimum=2)
    a = _array(_require(doc, "a", ptr), _ptr(ptr, "a"), shape=(n + 1, spec.n))
    g = _array(doc.get("gamma", np.zeros((n + 1, spec.m)).tolist()), _ptr(ptr, "gamma"))
    if g.size != (n + 1) * spec.m:
        raise InputError(_ptr(ptr, "gamma"), f"expected shape {[n + 1, spec.m]}")
    a0 = doc.get("a0", False)
    if not isinstance(a0, bool):
        raise InputError(_ptr(ptr, "a0"), "expected a boolean")
    breaks = doc.get("breaks", [])
    return P.APath(spec, a, g.reshape(n + 1, spec.m), a0, tuple(int(b) for b in breaks))


def load_sheet(spec: AlgebroidSpec, doc, ptr: str = "", N: int | None = None,
               seed: int | None = None) -> tuple[AlgebroidSpec, H.HomotopySheet]:
    """Explicit arrays or a constructor preset.

    Presets: ``meridian(wraps, homotopic)``, ``associator(seed)``,
    ``gauge(seed)``, ``shear(seed)``, ``interpolation`` and ``constant``.
    Presets may replace the algebroid, so the algebroid is returned alongside.
    """
    from . import oracle, suite

    if isinstance(doc, str) and _CALL.match(doc):
        doc = {"preset": doc}
    doc = load_json(doc, ptr)
    if "preset" in doc:
        name, args = parse_call(_require(doc, "preset", ptr, str), _ptr(ptr, "preset"))
        n = int(doc.get("N", N or 100))
        s = int(args[0]) if args and isinstance(args[0], int) else (seed or 1)
        try:
            if name == "meridian":
                if spec.family != "twisted_surface":
                    spec = suite.sqrt2_twisted()
                wraps = int(args[0]) if args else 1
                hom = bool(args[1]) if len(args) > 1 else True
                return spec, H.meridian_sheet(spec, n, wraps=wraps, homotopic=hom)
            if name == "associator":
                sh = suite.associator_su2(s, n, n) if "N" in doc or N else suite.associator_su2(s)
                return sh.spec, sh
            if name in ("gauge", "shear"):
                mdl, _, sh = oracle.random_su2_family(s, n, name == "gauge")
                return sh.spec, sh
            if name == "interpolation":
                sh = suite.tangent_sheet(n)
                return sh.spec, sh
            if name == "constant":
                return spec, H.constant_sheet(P.constant_path(spec, np.zeros(spec.m), n), n)
        except ValueError as exc:
            raise InputError(_ptr(ptr, "preset"), str(exc)) from None
        raise InputError(_ptr(ptr, "preset"), f"unknown sheet preset {name!r}")
    ne = _int(doc, "N_eps", ptr, minimum=2)
    nt = _int(doc, "N_t", ptr, minimum=2)
    a = _array(_require(doc, "a", ptr), _ptr(ptr, "a"), shape=(ne + 1, nt + 1, spec.n))
    g = _array(doc.get("gamma", np.zeros((ne + 1, nt + 1, spec.m)).tolist()), _ptr(ptr, "gamma"))
    if g.size != (ne + 1) * (nt + 1) * spec.m:
        raise InputError(_ptr(ptr, "gamma"), f"expected shape {[ne + 1, nt + 1, spec.m]}")
    breaks = tuple(int(b) for b in doc.get("breaks", []))
    return spec, H.HomotopySheet(spec, a, g.reshape(ne + 1, nt + 1, spec.m), breaks, name="input")


# ---------------------------------------------------------------------------
# periods

def load_twisted(doc, ptr: str = "") -> TwistedSpec:
    if isinstance(doc, str) and doc in PERIOD_PRESETS:
        return PERIOD_PRESETS[doc]()
    doc = load_json(doc, ptr)
    lams = _require(doc, "lambdas", ptr, list)
    d = _int(doc, "d", ptr, minimum=2, default=2)
    for i, v in enumerate(lams):
        if isinstance(v, float):
            raise InputError(_ptr(_ptr(ptr, "lambdas"), i), "floats are not exact; use \"p/q\" strings")
        try:
            QuadNumber.coerce(v, d)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(_ptr(_ptr(ptr, "lambdas"), i), str(exc)) from None
    try:
        return TwistedSpec.from_json(doc)
    except ValueError as exc:
        raise InputError(ptr, str(exc)) from None


# ---------------------------------------------------------------------------
# groupoids

def _hashable(x):
    return tuple(_hashable(v) for v in x) if isinstance(x, list) else x


GROUPOID_PRESETS = {
    "pt": gp.trivial,
    "trivial": gp.trivial,
    "z2": gp.z2,
    "z3": lambda: gp.cyclic(3),
    "pair3": lambda: gp.pair(["a", "b", "c"]),
    "swap": gp.swap_action,
    "z2-star-bz2": gp.z2_star_bz2,
}


def load_groupoid(doc, ptr: str = "") -> gp.FiniteGroupoid:
    if isinstance(doc, str) and doc in GROUPOID_PRESETS:
        return GROUPOID_PRESETS[doc]()
    doc = load_json(doc, ptr)
    if isinstance(doc, dict) and "preset" in doc:
        name = doc["preset"]
        if name not in GROUPOID_PRESETS:
            raise InputError(_ptr(ptr, "preset"), f"unknown groupoid preset {name!r}")
        return GROUPOID_PRESETS[name]()
    objects = [_hashable(o) for o in _require(doc, "objects", ptr, list)]
    by_str = {str(o): o for o in objects}
    arrows, src, tgt = [], {}, {}
    for i, a in enumerate(_require(doc, "arrows", ptr, list)):
        p = _ptr(_ptr(ptr, "arrows"), i)
        aid = _hashable(_require(a, "id", p))
        for key, store in (("src", src), ("tgt", tgt)):
            o = _hashable(_require(a, key, p))
            if o not in objects:
                raise InputError(_ptr(p, key), f"{o!r} is not an object")
            store[aid] = o
        arrows.append(aid)
    arrow_by_str = {str(a): a for a in arrows}
    table = {}
    for i, row in enumerate(_require(doc, "mult", ptr, list)):
        p = _ptr(_ptr(ptr, "mult"), i)
        if not isinstance(row, list) or len(row) != 3:
            raise InputError(p, "expected [g, h, gh]")
        g, h, gh = (_hashable(x) for x in row)
        for j, x in enumerate((g, h, gh)):
            if x not in src:
                raise InputError(_ptr(p, j), f"{x!r} is not an arrow")
        table[(g, h)] = gh
    unit = {}
    for k, v in _require(doc, "unit", ptr, dict).items():
        if k not in by_str:
            raise InputError(_ptr(_ptr(ptr, "unit"), k), "not an object")
        unit[by_str[k]] = _hashable(v)
    inv = {}
    for k, v in _require(doc, "inv", ptr, dict).items():
        if k not in arrow_by_str:
            raise InputError(_ptr(_ptr(ptr, "inv"), k), "not an arrow")
        inv[arrow_by_str[k]] = _hashable(v)
    try:
        return gp.from_tables(objects, arrows, src, tgt, table, unit, inv, doc.get("name", ""))
    except gp.GroupoidError as exc:
        raise InputError(ptr, str(exc)) from None


def _hom_bibundle(G: gp.FiniteGroupoid, H_: gp.FiniteGroupoid, kind: str) -> gp.Bibundle:
    if kind == "identity":
        return gp.identity_bibundle(G)
    if kind == "terminal":
        return gp.from_homomorphism(gp.to_terminal(G, H_))
    if kind == "inversion":
        return gp.from_homomorphism(gp.homomorphism(G, G, lambda x: x, lambda a: G.inv[a], "inv"))
    raise ValueError(kind)


def load_bibundle(doc, ptr: str = "") -> gp.Bibundle:
    """Explicit tables ``{"G", "H", "space", "JG", "JH", "left", "right"}`` or
    ``{"preset": "identity"|"terminal"|"inversion", "G": ..., "H": ...}``."""
    doc = load_json(doc, ptr)
    G = load_groupoid(_require(doc, "G", ptr), _ptr(ptr, "G"))
    if "preset" in doc:
        kind = doc["preset"]
        H_ = load_groupoid(doc.get("H", "pt"), _ptr(ptr, "H"))
        try:
            return _hom_bibundle(G, H_, kind)
        except ValueError:
            raise InputError(_ptr(ptr, "preset"), f"unknown bibundle preset {kind!r}") from None
        except gp.GroupoidError as exc:
            raise InputError(ptr, str(exc)) from None
    H_ = load_groupoid(_require(doc, "H", ptr), _ptr(ptr, "H"))
    space = [_hashable(e) for e in _require(doc, "space", ptr, list)]
    by_str = {str(e): e for e in space}

    def moments(key):
        out = {}
        for k, v in _require(doc, key, ptr, dict).items():
            if k not in by_str:
                raise InputError(_ptr(_ptr(ptr, key), k), "not an element of the space")
            out[by_str[k]] = _hashable(v)
        return out

    JG, JH = moments("JG"), moments("JH")
    def triples(key):
        rows = _require(doc, key, ptr, list)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 3:
                raise InputError(_ptr(_ptr(ptr, key), i), "expected a triple")
        return [tuple(_hashable(x) for x in row) for row in rows]

    left = {(g, e): e2 for g, e, e2 in triples("left")}
    right = {(e, h): e2 for e, h, e2 in triples("right")}
    try:
        return gp.Bibundle(G, H_, gp.GroupoidAction(G, "left", tuple(space), JG, left),
                           gp.GroupoidAction(H_, "right", tuple(space), JH, right), doc.get("name", ""))
    except gp.GroupoidError as exc:
        raise InputError(ptr, str(exc)) from None

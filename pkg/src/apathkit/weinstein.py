"""Weinstein-group axioms on finite presentations and the four-fold associator obstruction.

Only groups over a point base are handled: the fibre products ``G x_M G`` are
then plain products, which is what the BZ2-type examples need.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .groupoids import (
    FiniteGroupoid,
    GroupoidError,
    Homomorphism,
    check_hom_two_morphism,
    count_two_morphisms,
    hom_two_morphisms,
    homomorphism,
    identity_bibundle,
    identity_hom,
    power,
    to_terminal,
    trivial,
    z2,
    z2_star_bz2,
)
from .report import Report

MODES = ("rescaling", "pasting")


@dataclass(frozen=True, eq=False)
class WeinsteinData:
    G: FiniteGroupoid
    m: Homomorphism  # G x G -> G
    e: Homomorphism  # pt -> G
    i: Homomorphism  # G -> G
    alpha: Mapping | None = None  # objects of G^3 -> arrows of G
    name: str = ""

    def __post_init__(self):
        G = self.G
        if len(self.e.source.objects) != 1:
            raise GroupoidError("only a point base is supported")
        if not (self.m.target.same_as(G) and self.i.source.same_as(G) and self.i.target.same_as(G)
                and self.e.target.same_as(G)):
            raise GroupoidError("structure maps do not match the groupoid")
        if self.m.source.objects != power(G, 2).objects:
            raise GroupoidError("m must be defined on G x G")

    @property
    def point(self):
        return self.e.source.objects[0]

    def mo(self, x, y):
        """``m`` on objects."""
        return self.m.obj((x, y))

    def ma(self, g, h):
        """``m`` on arrows."""
        return self.m((g, h))

    def alpha_at(self, triple):
        if self.alpha is None:
            raise GroupoidError("no associator given")
        return self.alpha[tuple(triple)]


# ---------------------------------------------------------------------------
# presets

def _z2_mult(G: FiniteGroupoid, G2: FiniteGroupoid, obj, arr) -> Homomorphism:
    return homomorphism(G2, G, lambda o: obj(*o), lambda a: arr(*a), "m")


def bz2() -> WeinsteinData:
    """``Z2 => pt`` with group multiplication and trivial associator."""
    G = z2("BZ2")
    G2 = power(G, 2)
    m = _z2_mult(G, G2, lambda x, y: "*", lambda a, b: a * b)
    pt = trivial()
    e = homomorphism(pt, G, lambda x: "*", lambda a: 1, "e")
    i = homomorphism(G, G, lambda x: x, lambda a: a, "i")  # a^-1 = a in Z2
    alpha = {o: 1 for o in power(G, 3).objects}
    return WeinsteinData(G, m, e, i, alpha, "BZ2")


def z2_star_bz2_data() -> WeinsteinData:
    """``Z2 x Z2 => Z2`` (trivial action) with ``alpha(g1, g2, g3) = (g1 g2 g3, g1 g2 g3)``."""
    G = z2_star_bz2()
    G2 = power(G, 2)
    m = _z2_mult(G, G2, lambda x, y: x * y, lambda a, b: (a[0] * b[0], a[1] * b[1]))
    pt = trivial()
    e = homomorphism(pt, G, lambda x: 1, lambda a: (1, 1), "e")
    i = homomorphism(G, G, lambda x: x, lambda a: a, "i")
    alpha = {o: (o[0] * o[1] * o[2],) * 2 for o in power(G, 3).objects}
    return WeinsteinData(G, m, e, i, alpha, "Z2*BZ2")


def trivial_data() -> WeinsteinData:
    G = trivial("pt")
    m = _z2_mult(G, power(G, 2), lambda x, y: "*", lambda a, b: 1)
    e = homomorphism(trivial(), G, lambda x: "*", lambda a: 1, "e")
    alpha = {o: 1 for o in power(G, 3).objects}
    return WeinsteinData(G, m, e, identity_hom(G), alpha, "pt")


PRESETS: dict[str, Callable[[], WeinsteinData]] = {
    "bz2": bz2,
    "z2*bz2": z2_star_bz2_data,
    "trivial": trivial_data,
}


def preset(name: str) -> WeinsteinData:
    key = name.lower().replace("-star-", "*").replace("_star_", "*").replace("star", "*")
    try:
        return PRESETS[key]()
    except KeyError:
        raise ValueError(f"unknown Weinstein preset {name!r}; choose from {sorted(PRESETS)}") from None


# ---------------------------------------------------------------------------
# axioms

def _compose_maps(W: WeinsteinData):
    G = W.G
    G3 = power(G, 3)
    e_obj = W.e.obj(W.point)
    e_arr = W.e(W.e.source.unit[W.point])
    mm_id = homomorphism(G3, G, lambda o: W.mo(W.mo(o[0], o[1]), o[2]),
                         lambda a: W.ma(W.ma(a[0], a[1]), a[2]), "m(m x id)")
    id_mm = homomorphism(G3, G, lambda o: W.mo(o[0], W.mo(o[1], o[2])),
                         lambda a: W.ma(a[0], W.ma(a[1], a[2])), "m(id x m)")
    left_unit = homomorphism(G, G, lambda x: W.mo(e_obj, x), lambda a: W.ma(e_arr, a), "m((e t) x id)")
    right_unit = homomorphism(G, G, lambda x: W.mo(x, e_obj), lambda a: W.ma(a, e_arr), "m(id x (e s))")
    left_inv = homomorphism(G, G, lambda x: W.mo(W.i.obj(x), x), lambda a: W.ma(W.i(a), a), "m(i x id)D")
    right_inv = homomorphism(G, G, lambda x: W.mo(x, W.i.obj(x)), lambda a: W.ma(a, W.i(a)), "m(id x i)D")
    const_e = homomorphism(G, G, lambda x: e_obj, lambda a: e_arr, "e s")
    return mm_id, id_mm, left_unit, right_unit, left_inv, right_inv, const_e


def _unit_on_section(G: FiniteGroupoid, section) -> Callable:
    return lambda x, h: x not in section or h == G.unit[G.src[h]]


def weinstein_axiom_check(W: WeinsteinData) -> Report:
    """Check each axiom up to a 2-morphism that is the identity on the unit section.

    The associator is taken from ``W.alpha`` when given, otherwise searched.
    Counts of all 2-morphisms (with and without the boundary condition) are
    reported alongside, since they need not be unique.
    """
    G = W.G
    mm_id, id_mm, left_unit, right_unit, left_inv, right_inv, const_e = _compose_maps(W)
    e_obj = W.e.obj(W.point)
    idG = identity_hom(G)
    checks = {
        "associativity": (mm_id, id_mm, {(e_obj,) * 3}),
        "left_identity": (left_unit, idG, {e_obj}),
        "right_identity": (right_unit, idG, {e_obj}),
        "left_inverse": (left_inv, const_e, {e_obj}),
        "right_inverse": (right_inv, const_e, {e_obj}),
    }
    metrics: dict = {"etale": G.etale}
    certificates: dict = {}
    passed = True
    for name, (f, g, section) in checks.items():
        all_alphas = list(hom_two_morphisms(f, g))
        bounded = list(hom_two_morphisms(f, g, _unit_on_section(G, section)))
        if name == "associativity" and W.alpha is not None:
            valid = check_hom_two_morphism(f, g, W.alpha)
            boundary = all(W.alpha[o] == G.unit[G.src[W.alpha[o]]] for o in section)
            used = dict(W.alpha) if valid else None
            ok = valid and boundary
            metrics["associativity_boundary"] = boundary
        else:
            used = bounded[0] if bounded else None
            ok = used is not None
        metrics[name] = ok
        metrics[f"{name}_count"] = len(all_alphas)
        metrics[f"{name}_count_boundary"] = len(bounded)
        metrics[f"{name}_strict"] = all(f.obj(x) == g.obj(x) for x in f.source.objects) and all(
            f(a) == g(a) for a in f.source.arrows)
        if used is not None:
            certificates[name] = [[list(k) if isinstance(k, tuple) else k, v] for k, v in used.items()]
            metrics[f"{name}_is_identity"] = all(v == G.unit[G.src[v]] for v in used.values())
        passed = passed and ok
    metrics["id_id_bibundle_2morphisms"] = count_two_morphisms(identity_bibundle(G), identity_bibundle(G))
    return Report(passed=passed, metrics=metrics, certificates=certificates,
                  provenance={"op": "groupoid_calculus.weinstein_axiom_check", "preset": W.name,
                              "base": "point", "s": to_terminal(G).name})


# ---------------------------------------------------------------------------
# four-fold associator

def _faces(W: WeinsteinData) -> list[Callable]:
    mo = W.mo
    return [
        lambda q: mo(mo(mo(q[0], q[1]), q[2]), q[3]),  # ((12)3)4
        lambda q: mo(mo(q[0], q[1]), mo(q[2], q[3])),  # (12)(34), via m x id x id first
        lambda q: mo(mo(q[0], q[1]), mo(q[2], q[3])),  # (12)(34), via id x id x m first
        lambda q: mo(q[0], mo(q[1], mo(q[2], q[3]))),  # 1(2(34))
        lambda q: mo(q[0], mo(mo(q[1], q[2]), q[3])),  # 1((23)4)
        lambda q: mo(mo(q[0], mo(q[1], q[2])), q[3]),  # (1(23))4
    ]


def _steps(W: WeinsteinData, mode: str) -> list[Callable]:
    """Arrow ``F_i(q) -> F_{i+1}(q)`` for each of the six faces (indices mod 6)."""
    G, mo, ma = W.G, W.mo, W.ma
    a = W.alpha_at
    inv = G.inv
    unit = G.unit
    common = [
        lambda q: a((mo(q[0], q[1]), q[2], q[3])),
        lambda q: unit[mo(mo(q[0], q[1]), mo(q[2], q[3]))],
        lambda q: a((q[0], q[1], mo(q[2], q[3]))),
    ]
    five = lambda q: inv[a((q[0], mo(q[1], q[2]), q[3]))]  # noqa: E731
    if mode == "pasting":
        # whiskered by units through m
        four = lambda q: ma(unit[q[0]], inv[a((q[1], q[2], q[3]))])  # noqa: E731
        six = lambda q: ma(inv[a((q[0], q[1], q[2]))], unit[q[3]])  # noqa: E731
    elif mode == "rescaling":
        # alpha evaluated on the face triple with the untouched factor absorbed,
        # so each step reparametrizes the whole four-fold product
        four = lambda q: inv[a((mo(q[0], q[1]), q[2], q[3]))]  # noqa: E731
        six = lambda q: inv[a((q[0], q[1], mo(q[2], q[3])))]  # noqa: E731
    else:
        raise ValueError(f"mode must be one of {MODES}")
    return common + [four, five, six]


def face_homomorphisms(W: WeinsteinData) -> list[Homomorphism]:
    G4 = power(W.G, 4)
    ma = W.ma
    arr = [
        lambda a: ma(ma(ma(a[0], a[1]), a[2]), a[3]),
        lambda a: ma(ma(a[0], a[1]), ma(a[2], a[3])),
        lambda a: ma(ma(a[0], a[1]), ma(a[2], a[3])),
        lambda a: ma(a[0], ma(a[1], ma(a[2], a[3]))),
        lambda a: ma(a[0], ma(ma(a[1], a[2]), a[3])),
        lambda a: ma(ma(a[0], ma(a[1], a[2])), a[3]),
    ]
    return [homomorphism(G4, W.G, fo, fa, f"F{k + 1}") for k, (fo, fa) in enumerate(zip(_faces(W), arr))]


@dataclass(frozen=True)
class ObstructionResult:
    composite: object
    is_identity: bool
    identity: object
    steps: tuple
    report: Report


def _fmt(element) -> str:
    parts = element if isinstance(element, tuple) else (element,)
    return "(" + ",".join(str(x) for x in parts) + ")"


def associator_obstruction(W: WeinsteinData, quadruple: Sequence, mode: str = "rescaling") -> ObstructionResult:
    """Compose the six face 2-morphisms around the cube at ``quadruple``.

    ``mode="rescaling"`` evaluates the associator on the whole four-fold
    product at every face; ``mode="pasting"`` whiskers it with units through ``m``.
    Each step is first validated as a 2-morphism between adjacent faces.
    """
    G = W.G
    q = tuple(quadruple)
    if len(q) != 4 or any(x not in G.objects for x in q):
        raise ValueError(f"quadruple must be four objects of {G.name}: {quadruple!r}")
    faces = face_homomorphisms(W)
    steps = _steps(W, mode)
    G4 = faces[0].source
    for k in range(6):
        step = steps[k]
        if not check_hom_two_morphism(faces[k], faces[(k + 1) % 6], lambda x, s=step: s(x)):
            raise GroupoidError(f"step {k + 1} is not a 2-morphism F{k + 1} => F{(k + 1) % 6 + 1}")
    assert q in G4.objects
    vals = [s(q) for s in steps]
    comp = vals[0]
    for v in vals[1:]:
        comp = G.mult(v, comp)
    ident = G.unit[faces[0].obj(q)]
    rep = Report(
        passed=True,
        metrics={"is_identity": comp == ident, "mode": mode},
        certificates={"value": _fmt(comp), "identity": _fmt(ident)},
        witnesses={"composite": comp, "identity": ident, "steps": vals},
        provenance={"op": "groupoid_calculus.associator_obstruction", "preset": W.name, "quadruple": list(q)},
    )
    return ObstructionResult(comp, comp == ident, ident, tuple(vals), rep)


_QUAD_RE = re.compile(r"^\s*\(?\s*([^,()]+(?:\s*,\s*[^,()]+){3})\s*\)?\s*$")


def parse_quadruple(text: str) -> tuple:
    """``"1,1,1,-1"`` (optionally parenthesized) to a tuple; integers where possible."""
    m = _QUAD_RE.match(text)
    if not m:
        raise ValueError(f"expected four comma-separated entries, got {text!r}")
    out = []
    for tok in m.group(1).split(","):
        tok = tok.strip()
        try:
            out.append(int(tok))
        except ValueError:
            out.append(tok)
    return tuple(out)


__all__ = [
    "MODES", "WeinsteinData", "bz2", "z2_star_bz2_data", "trivial_data", "PRESETS", "preset",
    "weinstein_axiom_check", "face_homomorphisms", "associator_obstruction", "ObstructionResult",
    "parse_quadruple",
]

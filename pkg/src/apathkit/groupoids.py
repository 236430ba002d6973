"""Finite groupoids, actions, Hilsum-Skandalis bibundles and their 2-morphisms.

Composition ``mult(g, h)`` ("g after h") is defined when ``src(g) == tgt(h)``.
Orbit sets and searches order elements by :func:`sort_key`, so every result
is deterministic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .report import Report


class GroupoidError(ValueError):
    pass


def sort_key(x: Any):
    if isinstance(x, tuple):
        return (2, tuple(sort_key(v) for v in x))
    if isinstance(x, (int, float)):
        return (0, x, "")
    return (1, 0, str(x))


def _sorted(xs: Iterable) -> list:
    return sorted(xs, key=sort_key)


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    objects: tuple
    arrows: tuple
    src: Mapping
    tgt: Mapping
    table: Mapping  # (g, h) -> g h for src(g) == tgt(h)
    unit: Mapping
    inv: Mapping
    name: str = ""
    etale: bool = True  # vacuous for finite discrete sets; kept to mirror the hypotheses

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(_sorted(self.objects)))
        object.__setattr__(self, "arrows", tuple(_sorted(self.arrows)))
        problems = self.problems()
        if problems:
            raise GroupoidError(f"{self.name or 'groupoid'}: " + "; ".join(problems[:5]))

    def mult(self, g, h):
        try:
            return self.table[(g, h)]
        except KeyError:
            raise GroupoidError(f"arrows {g!r} and {h!r} are not composable") from None

    def composable(self, g, h) -> bool:
        return self.src[g] == self.tgt[h]

    def hom(self, x, y) -> list:
        return [g for g in self.arrows if self.src[g] == x and self.tgt[g] == y]

    def problems(self) -> list[str]:
        out = []
        objs, arrs = set(self.objects), set(self.arrows)
        for g in arrs:
            if self.src.get(g) not in objs or self.tgt.get(g) not in objs:
                out.append(f"arrow {g!r} has endpoints outside the objects")
        for x in objs:
            u = self.unit.get(x)
            if u not in arrs or self.src[u] != x or self.tgt[u] != x:
                out.append(f"bad unit at {x!r}")
        if out:
            return out
        for g, h in self.table:
            if g not in arrs or h not in arrs or self.src[g] != self.tgt[h]:
                out.append(f"product of non-composable {g!r}, {h!r}")
        for g in arrs:
            for h in arrs:
                if self.src[g] != self.tgt[h]:
                    continue
                gh = self.table.get((g, h))
                if gh not in arrs:
                    out.append(f"missing product {g!r} {h!r}")
                elif self.src[gh] != self.src[h] or self.tgt[gh] != self.tgt[g]:
                    out.append(f"product {g!r} {h!r} has wrong endpoints")
        if out:
            return out
        for g in arrs:
            if self.mult(g, self.unit[self.src[g]]) != g or self.mult(self.unit[self.tgt[g]], g) != g:
                out.append(f"unit law fails at {g!r}")
            gi = self.inv.get(g)
            if gi not in arrs or self.src[gi] != self.tgt[g] or self.tgt[gi] != self.src[g]:
                out.append(f"bad inverse of {g!r}")
                continue
            if self.mult(gi, g) != self.unit[self.src[g]] or self.mult(g, gi) != self.unit[self.tgt[g]]:
                out.append(f"inverse law fails at {g!r}")
        into: dict = {}
        for h in arrs:
            into.setdefault(self.tgt[h], []).append(h)
        for g in arrs:
            for h in into.get(self.src[g], ()):
                gh = self.mult(g, h)
                for k in into.get(self.src[h], ()):
                    if self.mult(gh, k) != self.mult(g, self.mult(h, k)):
                        out.append(f"associativity fails at {g!r}, {h!r}, {k!r}")
        return out

    def same_as(self, other: "FiniteGroupoid") -> bool:
        return self is other or (
            self.objects == other.objects and self.arrows == other.arrows
            and all(self.src[g] == other.src[g] and self.tgt[g] == other.tgt[g] for g in self.arrows)
            and dict(self.table) == dict(other.table)
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "objects": list(self.objects),
            "arrows": [{"id": g, "src": self.src[g], "tgt": self.tgt[g]} for g in self.arrows],
            "mult": [[g, h, gh] for (g, h), gh in sorted(self.table.items(), key=lambda kv: sort_key(kv[0]))],
            "unit": {str(x): self.unit[x] for x in self.objects},
            "inv": {str(g): self.inv[g] for g in self.arrows},
        }


# ---------------------------------------------------------------------------
# constructors

def from_tables(objects, arrows, src, tgt, table, unit, inv, name: str = "") -> FiniteGroupoid:
    return FiniteGroupoid(tuple(objects), tuple(arrows), dict(src), dict(tgt), dict(table), dict(unit),
                          dict(inv), name)


def group(elements: Sequence, op: Callable, name: str = "", point: Hashable = "*") -> FiniteGroupoid:
    """A finite group as a groupoid over one object."""
    els = list(elements)
    table = {(g, h): op(g, h) for g in els for h in els}
    e = next(g for g in els if all(op(g, h) == h for h in els))
    inv = {g: next(h for h in els if op(g, h) == e) for g in els}
    return from_tables([point], els, {g: point for g in els}, {g: point for g in els}, table, {point: e}, inv, name)


def cyclic(n: int, name: str | None = None) -> FiniteGroupoid:
    return group(range(n), lambda a, b: (a + b) % n, name or f"Z{n}")


def z2(name: str = "Z2") -> FiniteGroupoid:
    """``Z2 = {1, -1}`` under multiplication over a point."""
    return group([1, -1], lambda a, b: a * b, name)


def trivial(name: str = "pt") -> FiniteGroupoid:
    return group([1], lambda a, b: 1, name)


def pair(points: Sequence, name: str | None = None) -> FiniteGroupoid:
    """Pair groupoid: one arrow ``(y, x)`` from ``x`` to ``y`` for every ordered pair."""
    pts = list(points)
    arrows = [(y, x) for y in pts for x in pts]
    table = {((z, y), (y2, x)): (z, x) for (z, y) in arrows for (y2, x) in arrows if y == y2}
    return from_tables(pts, arrows, {a: a[1] for a in arrows}, {a: a[0] for a in arrows}, table,
                       {x: (x, x) for x in pts}, {(y, x): (x, y) for (y, x) in arrows}, name or f"Pair({len(pts)})")


def units_only(objects: Sequence, name: str | None = None) -> FiniteGroupoid:
    objs = list(objects)
    arrows = [(x, "id") for x in objs]
    return from_tables(objs, arrows, {a: a[0] for a in arrows}, {a: a[0] for a in arrows},
                       {(a, a): a for a in arrows}, {x: (x, "id") for x in objs}, {a: a for a in arrows},
                       name or f"Units({len(objs)})")


def action(elements: Sequence, op: Callable, points: Sequence, act: Callable, name: str = "") -> FiniteGroupoid:
    """Action groupoid of a left action: arrow ``(x, g)`` goes from ``x`` to ``act(g, x)``."""
    els, pts = list(elements), list(points)
    e = next(g for g in els if all(op(g, h) == h for h in els))
    ginv = {g: next(h for h in els if op(g, h) == e) for g in els}
    arrows = [(x, g) for x in pts for g in els]
    src = {a: a[0] for a in arrows}
    tgt = {a: act(a[1], a[0]) for a in arrows}
    table = {}
    for (y, h) in arrows:
        for (x, g) in arrows:
            if act(g, x) == y:
                table[((y, h), (x, g))] = (x, op(h, g))
    inv = {(x, g): (act(g, x), ginv[g]) for (x, g) in arrows}
    return from_tables(pts, arrows, src, tgt, table, {x: (x, e) for x in pts}, inv, name)


def product(*gs: FiniteGroupoid, name: str | None = None) -> FiniteGroupoid:
    """Cartesian product; objects and arrows are tuples."""
    objs = list(itertools.product(*(g.objects for g in gs)))
    arrows = list(itertools.product(*(g.arrows for g in gs)))
    src = {a: tuple(g.src[x] for g, x in zip(gs, a)) for a in arrows}
    tgt = {a: tuple(g.tgt[x] for g, x in zip(gs, a)) for a in arrows}
    into: dict = {}
    for b in arrows:
        into.setdefault(tgt[b], []).append(b)
    table = {(a, b): tuple(g.mult(x, y) for g, x, y in zip(gs, a, b)) for a in arrows for b in into.get(src[a], ())}
    unit = {o: tuple(g.unit[x] for g, x in zip(gs, o)) for o in objs}
    inv = {a: tuple(g.inv[x] for g, x in zip(gs, a)) for a in arrows}
    return from_tables(objs, arrows, src, tgt, table, unit, inv, name or " x ".join(g.name for g in gs))


def power(g: FiniteGroupoid, k: int) -> FiniteGroupoid:
    return product(*([g] * k), name=f"{g.name}^{k}")


def z2_star_bz2() -> FiniteGroupoid:
    """``Z2 x Z2 => Z2``: trivial action of Z2 on the two-point set ``{1, -1}``."""
    return action([1, -1], lambda a, b: a * b, [1, -1], lambda g, x: x, "Z2*BZ2")


def swap_action() -> FiniteGroupoid:
    """Z2 acting on two points by exchanging them (Morita equivalent to a point)."""
    return action([1, -1], lambda a, b: a * b, ["p", "q"],
                  lambda g, x: x if g == 1 else ("q" if x == "p" else "p"), "Z2 x {p,q}")


# ---------------------------------------------------------------------------
# homomorphisms

@dataclass(frozen=True, eq=False)
class Homomorphism:
    source: FiniteGroupoid
    target: FiniteGroupoid
    on_objects: Mapping
    on_arrows: Mapping
    name: str = ""

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise GroupoidError(f"{self.name or 'map'} is not a homomorphism: " + "; ".join(problems[:5]))

    def problems(self) -> list[str]:
        G, H = self.source, self.target
        fo, fa = self.on_objects, self.on_arrows
        out = []
        for x in G.objects:
            if fo.get(x) not in H.objects:
                out.append(f"object {x!r} maps outside the target")
        for g in G.arrows:
            h = fa.get(g)
            if h not in H.src:
                out.append(f"arrow {g!r} maps outside the target")
                continue
            if H.src[h] != fo.get(G.src[g]) or H.tgt[h] != fo.get(G.tgt[g]):
                out.append(f"arrow {g!r} does not respect source/target")
        if out:
            return out
        for x in G.objects:
            if fa[G.unit[x]] != H.unit[fo[x]]:
                out.append(f"unit at {x!r} not preserved")
        for (g, h), gh in G.table.items():
            if fa[gh] != H.mult(fa[g], fa[h]):
                out.append(f"product {g!r} {h!r} not preserved")
        return out

    def obj(self, x):
        return self.on_objects[x]

    def __call__(self, g):
        return self.on_arrows[g]

    def then(self, other: "Homomorphism") -> "Homomorphism":
        """``other`` after ``self``."""
        if not self.target.same_as(other.source):
            raise GroupoidError("homomorphisms are not composable")
        return Homomorphism(self.source, other.target,
                            {x: other.obj(self.obj(x)) for x in self.source.objects},
                            {g: other(self(g)) for g in self.source.arrows},
                            f"{other.name} o {self.name}")


def homomorphism(G: FiniteGroupoid, H: FiniteGroupoid, obj_fn: Callable, arr_fn: Callable,
                 name: str = "") -> Homomorphism:
    return Homomorphism(G, H, {x: obj_fn(x) for x in G.objects}, {g: arr_fn(g) for g in G.arrows}, name)


def identity_hom(G: FiniteGroupoid) -> Homomorphism:
    return Homomorphism(G, G, {x: x for x in G.objects}, {g: g for g in G.arrows}, "id")


def to_terminal(G: FiniteGroupoid, T: FiniteGroupoid | None = None) -> Homomorphism:
    T = trivial() if T is None else T
    (pt,) = T.objects
    return homomorphism(G, T, lambda x: pt, lambda g: T.unit[pt], "!")


# ---------------------------------------------------------------------------
# actions and bibundles

@dataclass(frozen=True, eq=False)
class GroupoidAction:
    """Left (``g . e``, needs ``src(g) = J(e)``) or right (``e . g``, needs ``J(e) = tgt(g)``) action."""

    groupoid: FiniteGroupoid
    side: str
    space: tuple
    moment: Mapping
    table: Mapping  # left: (g, e) -> e'; right: (e, g) -> e'

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise GroupoidError("side must be 'left' or 'right'")
        object.__setattr__(self, "space", tuple(_sorted(self.space)))
        problems = self.problems()
        if problems:
            raise GroupoidError(f"{self.side} action: " + "; ".join(problems[:5]))

    def acts(self, g, e) -> bool:
        G = self.groupoid
        return G.src[g] == self.moment[e] if self.side == "left" else self.moment[e] == G.tgt[g]

    def act(self, g, e):
        key = (g, e) if self.side == "left" else (e, g)
        try:
            return self.table[key]
        except KeyError:
            raise GroupoidError(f"{g!r} cannot act on {e!r}") from None

    def problems(self) -> list[str]:
        G = self.groupoid
        out = []
        for e in self.space:
            if self.moment.get(e) not in G.objects:
                out.append(f"moment of {e!r} is not an object")
        if out:
            return out
        for e in self.space:
            for g in G.arrows:
                if not self.acts(g, e):
                    continue
                key = (g, e) if self.side == "left" else (e, g)
                e2 = self.table.get(key)
                if e2 not in self.moment:
                    out.append(f"{g!r} on {e!r} is undefined")
                    continue
                expect = G.tgt[g] if self.side == "left" else G.src[g]
                if self.moment[e2] != expect:
                    out.append(f"moment law fails for {g!r} on {e!r}")
            if self.act(G.unit[self.moment[e]], e) != e:
                out.append(f"unit acts non-trivially on {e!r}")
        if out:
            return out
        for e in self.space:
            for g in G.arrows:
                if not self.acts(g, e):
                    continue
                e2 = self.act(g, e)
                for h in G.arrows:
                    if not self.acts(h, e2):
                        continue
                    if self.side == "left":
                        ok = self.act(h, e2) == self.act(G.mult(h, g), e)
                    else:
                        ok = self.act(h, e2) == self.act(G.mult(g, h), e)
                    if not ok:
                        out.append(f"action is not associative at {e!r}, {g!r}, {h!r}")
        return out

    def orbit_of(self, e) -> list:
        return _sorted({self.act(g, e) for g in self.groupoid.arrows if self.acts(g, e)})

    def is_free(self) -> bool:
        G = self.groupoid
        for e in self.space:
            for g in G.arrows:
                if self.acts(g, e) and self.act(g, e) == e and g != G.unit[self.moment[e]]:
                    return False
        return True


@dataclass(frozen=True, eq=False)
class Bibundle:
    """``G <- E -> H`` with a left G-action and a right H-action that commute."""

    G: FiniteGroupoid
    H: FiniteGroupoid
    left: GroupoidAction
    right: GroupoidAction
    name: str = ""

    def __post_init__(self):
        if self.left.side != "left" or self.right.side != "right":
            raise GroupoidError("bibundle needs a left and a right action")
        if set(self.left.space) != set(self.right.space):
            raise GroupoidError("actions live on different spaces")
        if not (self.left.groupoid.same_as(self.G) and self.right.groupoid.same_as(self.H)):
            raise GroupoidError("actions belong to other groupoids")
        problems = self.problems()
        if problems:
            raise GroupoidError("bibundle: " + "; ".join(problems[:5]))

    @property
    def space(self) -> tuple:
        return self.left.space

    @property
    def JG(self) -> Mapping:
        return self.left.moment

    @property
    def JH(self) -> Mapping:
        return self.right.moment

    def problems(self) -> list[str]:
        out = []
        for e in self.space:
            for g in self.G.arrows:
                if not self.left.acts(g, e):
                    continue
                ge = self.left.act(g, e)
                if self.JH[ge] != self.JH[e]:
                    out.append(f"left action moves the right moment at {e!r}")
                for h in self.H.arrows:
                    if not self.right.acts(h, e):
                        continue
                    eh = self.right.act(h, e)
                    if self.JG[eh] != self.JG[e]:
                        out.append(f"right action moves the left moment at {e!r}")
                    elif self.left.act(g, eh) != self.right.act(h, ge):
                        out.append(f"actions do not commute at {e!r}, {g!r}, {h!r}")
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "space": list(self.space),
            "JG": {str(e): self.JG[e] for e in self.space},
            "JH": {str(e): self.JH[e] for e in self.space},
            "left": [[g, e, e2] for (g, e), e2 in sorted(self.left.table.items(), key=lambda kv: sort_key(kv[0]))],
            "right": [[e, h, e2] for (e, h), e2 in sorted(self.right.table.items(), key=lambda kv: sort_key(kv[0]))],
        }


def _principal(action: GroupoidAction, base_map: Mapping, base: Sequence) -> bool:
    """Free, transitive on the fibres of ``base_map`` and surjective onto ``base``."""
    if set(base_map[e] for e in action.space) != set(base):
        return False
    if not action.is_free():
        return False
    fibres: dict = {}
    for e in action.space:
        fibres.setdefault(base_map[e], []).append(e)
    for fib in fibres.values():
        if set(action.orbit_of(fib[0])) != set(fib):
            return False
    return True


def is_principal(E: Bibundle) -> bool:
    """Right H-principal over ``G_0`` via ``J_G``: the condition for an HS morphism ``G -> H``."""
    return _principal(E.right, E.JG, E.G.objects)


def is_left_principal(E: Bibundle) -> bool:
    return _principal(E.left, E.JH, E.H.objects)


def is_morita(E: Bibundle) -> bool:
    return is_principal(E) and is_left_principal(E)


def from_homomorphism(f: Homomorphism) -> Bibundle:
    """``E = G_0 x_{f, t} H_1`` with ``(x, h) . h' = (x, h h')`` and ``g . (x, h) = (t(g), f(g) h)``."""
    G, H = f.source, f.target
    space = [(x, h) for x in G.objects for h in H.arrows if H.tgt[h] == f.obj(x)]
    JG = {e: e[0] for e in space}
    JH = {e: H.src[e[1]] for e in space}
    right = {((x, h), k): (x, H.mult(h, k)) for (x, h) in space for k in H.arrows if H.src[h] == H.tgt[k]}
    left = {(g, (x, h)): (G.tgt[g], H.mult(f(g), h)) for (x, h) in space for g in G.arrows if G.src[g] == x}
    return Bibundle(G, H, GroupoidAction(G, "left", tuple(space), JG, left),
                    GroupoidAction(H, "right", tuple(space), JH, right), f"<{f.name}>")


def identity_bibundle(G: FiniteGroupoid) -> Bibundle:
    return from_homomorphism(identity_hom(G))


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # keep the lexicographically smallest element as the representative
        if sort_key(rb) < sort_key(ra):
            ra, rb = rb, ra
        self.parent[rb] = ra


def compose(E: Bibundle, F: Bibundle) -> Bibundle:
    """``E: G -> H`` then ``F: H -> K``: orbits of ``E x_{H_0} F`` under ``(x, y) h = (x h, h^-1 y)``."""
    if not E.H.same_as(F.G):
        raise GroupoidError("bibundles are not composable")
    H = E.H
    pairs = [(x, y) for x in E.space for y in F.space if E.JH[x] == F.JG[y]]
    uf = _UnionFind(pairs)
    for x, y in pairs:
        for h in H.arrows:
            if H.tgt[h] == E.JH[x]:
                uf.union((x, y), (E.right.act(h, x), F.left.act(H.inv[h], y)))
    rep = {p: uf.find(p) for p in pairs}
    space = _sorted(set(rep.values()))
    JG = {p: E.JG[p[0]] for p in space}
    JK = {p: F.JH[p[1]] for p in space}
    left = {}
    for p in space:
        for g in E.G.arrows:
            if E.left.acts(g, p[0]):
                left[(g, p)] = rep[(E.left.act(g, p[0]), p[1])]
    right = {}
    for p in space:
        for k in F.H.arrows:
            if F.right.acts(k, p[1]):
                right[(p, k)] = rep[(p[0], F.right.act(k, p[1]))]
    return Bibundle(E.G, F.H, GroupoidAction(E.G, "left", tuple(space), JG, left),
                    GroupoidAction(F.H, "right", tuple(space), JK, right), f"{F.name} o {E.name}")


def flip(E: Bibundle) -> Bibundle:
    """The reverse bibundle ``H -> G``: ``h . e = e h^-1`` and ``e . g = g^-1 e``."""
    G, H = E.G, E.H
    left = {(h, e): E.right.act(H.inv[h], e) for e in E.space for h in H.arrows if H.src[h] == E.JH[e]}
    right = {(e, g): E.left.act(G.inv[g], e) for e in E.space for g in G.arrows if G.tgt[g] == E.JG[e]}
    return Bibundle(H, G, GroupoidAction(H, "left", E.space, dict(E.JH), left),
                    GroupoidAction(G, "right", E.space, dict(E.JG), right), f"{E.name}^-1")


inverse = flip


# ---------------------------------------------------------------------------
# 2-morphisms

@dataclass(frozen=True)
class TwoMorphismData:
    mapping: dict = field(default_factory=dict)

    def to_json(self) -> list:
        return [[k, v] for k, v in sorted(self.mapping.items(), key=lambda kv: sort_key(kv[0]))]


def _two_morphisms(E1: Bibundle, E2: Bibundle):
    if not (E1.G.same_as(E2.G) and E1.H.same_as(E2.H)):
        raise GroupoidError("2-morphisms need bibundles between the same groupoids")
    if len(E1.space) != len(E2.space):
        return
    G, H = E1.G, E1.H
    order = list(E1.space)
    cands = {e: [f for f in E2.space if E2.JG[f] == E1.JG[e] and E2.JH[f] == E1.JH[e]] for e in order}

    def propagate(assign: dict, used: set, e, f) -> bool:
        stack = [(e, f)]
        while stack:
            x, y = stack.pop()
            if x in assign:
                if assign[x] != y:
                    return False
                continue
            if y in used or E2.JG[y] != E1.JG[x] or E2.JH[y] != E1.JH[x]:
                return False
            assign[x] = y
            used.add(y)
            for g in G.arrows:
                if E1.left.acts(g, x):
                    stack.append((E1.left.act(g, x), E2.left.act(g, y)))
            for h in H.arrows:
                if E1.right.acts(h, x):
                    stack.append((E1.right.act(h, x), E2.right.act(h, y)))
        return True

    def search(assign: dict, used: set):
        free = next((e for e in order if e not in assign), None)
        if free is None:
            yield dict(assign)
            return
        for f in cands[free]:
            a2, u2 = dict(assign), set(used)
            if propagate(a2, u2, free, f):
                yield from search(a2, u2)

    yield from search({}, set())


def find_two_morphism(E1: Bibundle, E2: Bibundle) -> TwoMorphismData | None:
    """First bi-equivariant bijection in lexicographic search order, or ``None``."""
    for m in _two_morphisms(E1, E2):
        return TwoMorphismData(m)
    return None


def count_two_morphisms(E1: Bibundle, E2: Bibundle) -> int:
    return sum(1 for _ in _two_morphisms(E1, E2))


def check_hom_two_morphism(f: Homomorphism, g: Homomorphism, alpha: Mapping | Callable) -> bool:
    """``alpha(x): f(x) -> g(x)`` with ``alpha(t(c)) f(c) = g(c) alpha(s(c))`` for every arrow ``c``."""
    G, H = f.source, f.target
    if not (G.same_as(g.source) and H.same_as(g.target)):
        return False
    a = alpha if callable(alpha) else alpha.__getitem__
    try:
        vals = {x: a(x) for x in G.objects}
    except (KeyError, TypeError):
        return False
    for x, h in vals.items():
        if h not in H.src or H.src[h] != f.obj(x) or H.tgt[h] != g.obj(x):
            return False
    for c in G.arrows:
        if H.mult(vals[G.tgt[c]], f(c)) != H.mult(g(c), vals[G.src[c]]):
            return False
    return True


def hom_two_morphisms(f: Homomorphism, g: Homomorphism, restrict: Callable | None = None):
    """All natural transformations ``f => g`` (optionally filtered per object), lexicographic order."""
    G, H = f.source, f.target
    objs = list(G.objects)
    cands = {x: [h for h in H.hom(f.obj(x), g.obj(x)) if restrict is None or restrict(x, h)] for x in objs}

    def consistent(vals):
        for c in G.arrows:
            s, t = G.src[c], G.tgt[c]
            if s in vals and t in vals and H.mult(vals[t], f(c)) != H.mult(g(c), vals[s]):
                return False
        return True

    def search(i, vals):
        if i == len(objs):
            yield dict(vals)
            return
        x = objs[i]
        for h in cands[x]:
            vals[x] = h
            if consistent(vals):
                yield from search(i + 1, vals)
            del vals[x]

    yield from search(0, {})


def morita_report(E: Bibundle) -> Report:
    return Report(
        passed=is_morita(E),
        metrics={"size": len(E.space), "principal": is_principal(E), "left_principal": is_left_principal(E)},
        provenance={"op": "groupoid_calculus.is_morita", "G": E.G.name, "H": E.H.name, "bibundle": E.name},
    )


def pool() -> list[FiniteGroupoid]:
    """Five small groupoids used for the equivalence-relation checks."""
    return [trivial(), z2(), pair(["a", "b", "c"]), swap_action(), z2_star_bz2()]

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apathkit import groupoids as gp


def s3():
    perms = list(itertools.permutations(range(3)))
    return gp.group(perms, lambda a, b: tuple(a[b[i]] for i in range(3)), "S3")


def test_constructors_validate():
    for G in gp.pool() + [gp.cyclic(4), s3(), gp.units_only("xy"), gp.power(gp.z2(), 2)]:
        assert G.problems() == []
    assert len(gp.pair("abc").arrows) == 9
    assert len(gp.power(gp.z2(), 3).arrows) == 8


def test_pool_is_small():
    pool = gp.pool()
    assert len(pool) == 5 and all(len(G.arrows) <= 12 for G in pool)
    assert [G.name for G in pool] == ["pt", "Z2", "Pair(3)", "Z2 x {p,q}", "Z2*BZ2"]


def test_broken_tables_rejected():
    G = gp.z2()
    table = dict(G.table)
    table[(-1, -1)] = -1
    with pytest.raises(gp.GroupoidError, match="inverse|unit|associativity"):
        gp.from_tables(G.objects, G.arrows, G.src, G.tgt, table, G.unit, G.inv)
    with pytest.raises(gp.GroupoidError):
        gp.from_tables(["*"], [1], {1: "*"}, {1: "x"}, {(1, 1): 1}, {"*": 1}, {1: 1})


def test_mult_and_hom():
    P = gp.pair("ab")
    assert P.mult(("b", "a"), ("a", "b")) == ("b", "b")
    assert not P.composable(("b", "a"), ("b", "a"))
    with pytest.raises(gp.GroupoidError):
        P.mult(("b", "a"), ("b", "a"))
    assert P.hom("a", "b") == [("b", "a")]


def test_action_groupoid_arrow_direction():
    G = gp.swap_action()
    assert G.src[("p", -1)] == "p" and G.tgt[("p", -1)] == "q"
    assert G.mult(("q", -1), ("p", -1)) == ("p", 1)


def test_json_is_deterministic():
    assert gp.z2_star_bz2().to_json() == gp.z2_star_bz2().to_json()
    assert gp.pair("ba").to_json()["objects"] == ["a", "b"]


def test_homomorphism_validation():
    z2 = gp.z2()
    with pytest.raises(gp.GroupoidError):
        gp.homomorphism(gp.cyclic(3), z2, lambda x: "*", lambda a: -1 if a else 1)
    f = gp.homomorphism(gp.cyclic(4), z2, lambda x: "*", lambda a: -1 if a % 2 else 1, "parity")
    assert f(3) == -1 and f.then(gp.to_terminal(z2))(3) == 1


@pytest.mark.parametrize("G,aut", [(gp.trivial(), 1), (gp.z2(), 2), (gp.cyclic(3), 3), (s3(), 1),
                                   (gp.pair("abc"), 1), (gp.swap_action(), 1), (gp.z2_star_bz2(), 4)])
def test_automorphisms_of_identity_bibundle(G, aut):
    # equivariant self-maps of the identity bibundle form the centre of the groupoid
    assert gp.count_two_morphisms(gp.identity_bibundle(G), gp.identity_bibundle(G)) == aut


def test_natural_transformations_of_a_group_are_its_centre():
    G = s3()
    assert len(list(gp.hom_two_morphisms(gp.identity_hom(G), gp.identity_hom(G)))) == 1
    c = (1, 0, 2)  # a transposition, its own inverse
    conj = gp.homomorphism(G, G, lambda x: x, lambda a: G.mult(G.mult(c, a), c), "conj")
    alphas = list(gp.hom_two_morphisms(gp.identity_hom(G), conj))
    assert alphas == [{"*": c}]
    assert gp.check_hom_two_morphism(gp.identity_hom(G), conj, {"*": c})
    assert not gp.check_hom_two_morphism(gp.identity_hom(G), conj, {"*": (0, 1, 2)})
    assert not gp.check_hom_two_morphism(gp.identity_hom(G), conj, {})


@pytest.mark.parametrize("name", ["pt", "Pair(3)", "Z2 x {p,q}"])
def test_point_equivalent_groupoids(name):
    G = {H.name: H for H in gp.pool()}[name]
    E = gp.from_homomorphism(gp.to_terminal(G))
    assert gp.is_morita(E) and gp.morita_report(E).passed


@pytest.mark.parametrize("name", ["Z2", "Z2*BZ2"])
def test_groupoids_not_equivalent_to_a_point(name):
    G = {H.name: H for H in gp.pool()}[name]
    E = gp.from_homomorphism(gp.to_terminal(G))
    assert gp.is_principal(E) and not gp.is_morita(E)


def test_principality_of_homomorphism_bibundles():
    z2 = gp.z2()
    inc = gp.homomorphism(gp.trivial(), z2, lambda x: "*", lambda a: 1, "inc")
    E = gp.from_homomorphism(inc)
    assert gp.is_principal(E) and not gp.is_left_principal(E)
    assert len(E.space) == 2


def test_compose_with_identity():
    for G in gp.pool():
        E = gp.from_homomorphism(gp.to_terminal(G))
        left = gp.compose(gp.identity_bibundle(G), E)
        right = gp.compose(E, gp.identity_bibundle(E.H))
        assert gp.find_two_morphism(left, E) is not None
        assert gp.find_two_morphism(right, E) is not None


def test_compose_checks_middle_groupoid():
    E = gp.identity_bibundle(gp.z2())
    F = gp.identity_bibundle(gp.trivial())
    with pytest.raises(gp.GroupoidError):
        gp.compose(E, F)


def test_flip_is_an_inverse_for_morita_bibundles():
    G = gp.swap_action()
    E = gp.from_homomorphism(gp.to_terminal(G))
    back = gp.compose(E, gp.flip(E))
    assert gp.find_two_morphism(back, gp.identity_bibundle(G)) is not None
    fwd = gp.compose(gp.flip(E), E)
    assert gp.find_two_morphism(fwd, gp.identity_bibundle(E.H)) is not None
    assert gp.inverse is gp.flip


def test_two_morphisms_need_matching_groupoids():
    with pytest.raises(gp.GroupoidError):
        gp.find_two_morphism(gp.identity_bibundle(gp.z2()), gp.identity_bibundle(gp.trivial()))


def test_two_morphism_absent_between_different_homomorphisms():
    z2 = gp.z2()
    triv = gp.homomorphism(z2, z2, lambda x: "*", lambda a: 1, "const")
    assert gp.find_two_morphism(gp.from_homomorphism(triv), gp.identity_bibundle(z2)) is None


def test_action_freeness_and_missing_entries():
    E = gp.identity_bibundle(gp.z2())
    bad_right = dict(E.right.table)
    for key in list(bad_right):
        if key[1] == -1:
            bad_right[key] = key[0]  # trivial action: still an action, no longer free
    right = gp.GroupoidAction(E.H, "right", E.space, dict(E.JH), bad_right)
    assert not right.is_free()
    with pytest.raises(gp.GroupoidError):
        gp.GroupoidAction(E.H, "right", E.space, dict(E.JH), {})


def test_bibundle_json():
    E = gp.identity_bibundle(gp.z2())
    doc = E.to_json()
    assert [tuple(e) for e in doc["space"]] == [("*", -1), ("*", 1)]
    assert len(doc["left"]) == len(doc["right"]) == 4


@settings(max_examples=12, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6))
def test_cyclic_homomorphism_bibundles(n, k):
    # Z_n -> Z_k by x -> x (mod k) is a homomorphism iff k divides n (or Z_n is trivial)
    G, H = gp.cyclic(n), gp.cyclic(k)
    if n % k and n > 1:
        with pytest.raises(gp.GroupoidError):
            gp.homomorphism(G, H, lambda x: "*", lambda a: a % k)
        return
    f = gp.homomorphism(G, H, lambda x: "*", lambda a: a % k)
    E = gp.from_homomorphism(f)
    assert gp.is_principal(E)
    assert gp.is_morita(E) == (n == k)
    # Aut of a homomorphism bibundle into an abelian group is the target group
    assert gp.count_two_morphisms(E, E) == k


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([0, 1, 2, 3, 4]), st.sampled_from([0, 1, 2, 3, 4]))
def test_composition_of_point_maps_is_functorial(i, j):
    pool = gp.pool()
    G, H = pool[i], pool[j]
    pt = pool[0]
    f = gp.to_terminal(G, pt)
    g = gp.homomorphism(pt, H, lambda x: H.objects[0], lambda a: H.unit[H.objects[0]], "base")
    lhs = gp.compose(gp.from_homomorphism(f), gp.from_homomorphism(g))
    assert gp.find_two_morphism(lhs, gp.from_homomorphism(f.then(g))) is not None

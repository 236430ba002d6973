from __future__ import annotations

import itertools
import math

import pytest

from apathkit import groupoids as gp
from apathkit import weinstein as W


def test_bz2_axioms():
    rep = W.weinstein_axiom_check(W.bz2())
    assert rep.passed
    for ax in ("associativity", "left_identity", "right_identity", "left_inverse", "right_inverse"):
        assert rep.metrics[ax] and rep.metrics[f"{ax}_is_identity"] and rep.metrics[f"{ax}_strict"]
        # alpha = 1 or -1 is natural; only 1 is the identity on the unit section
        assert rep.metrics[f"{ax}_count"] == 2 and rep.metrics[f"{ax}_count_boundary"] == 1
    assert rep.metrics["id_id_bibundle_2morphisms"] == 2


def test_z2_star_bz2_axioms():
    rep = W.weinstein_axiom_check(W.z2_star_bz2_data())
    assert rep.passed
    assert not rep.metrics["associativity_is_identity"]
    assert rep.metrics["associativity_count"] == 256 and rep.metrics["associativity_count_boundary"] == 128
    assert rep.metrics["id_id_bibundle_2morphisms"] == 4


def test_trivial_preset():
    assert W.weinstein_axiom_check(W.trivial_data()).passed


def test_non_natural_associator_is_rejected():
    base = W.z2_star_bz2_data()
    # alpha depending only on the first factor is not natural in the arrows
    alpha = {o: (o[0], 1) for o in gp.power(base.G, 3).objects}
    bad = W.WeinsteinData(base.G, base.m, base.e, base.i, alpha, "bad")
    rep = W.weinstein_axiom_check(bad)
    assert not rep.passed and not rep.metrics["associativity"]


def _hand_composite(quad, mode):
    """Second components of the six step arrows multiplied by hand."""
    g1, g2, g3, g4 = quad
    a = lambda x, y, z: x * y * z  # noqa: E731
    steps = [a(g1 * g2, g3, g4), 1, a(g1, g2, g3 * g4)]
    if mode == "rescaling":
        steps += [a(g1 * g2, g3, g4), a(g1, g2 * g3, g4), a(g1, g2, g3 * g4)]
    else:
        steps += [a(g2, g3, g4), a(g1, g2 * g3, g4), a(g1, g2, g3)]
    return (math.prod(quad), math.prod(steps))


@pytest.mark.parametrize("mode", W.MODES)
@pytest.mark.parametrize("quad", list(itertools.product((1, -1), repeat=4)))
def test_obstruction_matches_hand_computation(quad, mode):
    res = W.associator_obstruction(W.z2_star_bz2_data(), quad, mode)
    assert res.composite == _hand_composite(quad, mode)
    assert res.identity == (quad[0] * quad[1] * quad[2] * quad[3], 1)
    assert res.is_identity == (res.composite == res.identity)
    assert len(res.steps) == 6


def test_headline_quadruple():
    data = W.z2_star_bz2_data()
    res = W.associator_obstruction(data, (1, 1, 1, -1))
    assert res.composite == (-1, -1) and not res.is_identity and res.identity == (-1, 1)
    # whiskering through m instead closes up
    assert W.associator_obstruction(data, (1, 1, 1, -1), "pasting").is_identity


def test_bz2_obstruction_is_trivial():
    for quad in itertools.product(["*"], repeat=4):
        assert W.associator_obstruction(W.bz2(), quad).is_identity


def test_obstruction_argument_checks():
    data = W.z2_star_bz2_data()
    with pytest.raises(ValueError):
        W.associator_obstruction(data, (1, 1, 1))
    with pytest.raises(ValueError):
        W.associator_obstruction(data, (1, 1, 1, 2))
    with pytest.raises(ValueError):
        W.associator_obstruction(data, (1, 1, 1, 1), mode="other")


def test_unnormalised_associator_changes_composite():
    base = W.bz2()
    bad = W.WeinsteinData(base.G, base.m, base.e, base.i, {o: -1 for o in gp.power(base.G, 3).objects})
    # -1 is central so every step is natural; five alpha factors give (-1)^5
    assert W.associator_obstruction(bad, ("*",) * 4).composite == -1


def test_face_homomorphisms_agree_on_objects():
    faces = W.face_homomorphisms(W.z2_star_bz2_data())
    q = (1, -1, -1, 1)
    assert len({f.obj(q) for f in faces}) == 1


@pytest.mark.parametrize("name", ["bz2", "BZ2", "z2*bz2", "z2-star-bz2", "z2_star_bz2", "trivial"])
def test_preset_names(name):
    assert isinstance(W.preset(name), W.WeinsteinData)


def test_unknown_preset():
    with pytest.raises(ValueError):
        W.preset("bz3")


@pytest.mark.parametrize("text,expected", [("1,1,1,-1", (1, 1, 1, -1)), ("(1, -1, 1, 1)", (1, -1, 1, 1)),
                                           ("*,*,*,*", ("*",) * 4)])
def test_parse_quadruple(text, expected):
    assert W.parse_quadruple(text) == expected


def test_parse_quadruple_rejects_wrong_length():
    with pytest.raises(ValueError):
        W.parse_quadruple("1,1,1")


def test_point_base_required():
    base = W.bz2()
    two = gp.units_only(["a", "b"])
    e = gp.homomorphism(two, base.G, lambda x: "*", lambda a: 1)
    with pytest.raises(gp.GroupoidError):
        W.WeinsteinData(base.G, base.m, e, base.i, base.alpha)

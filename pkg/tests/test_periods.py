from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from apathkit import homotopy as H
from apathkit import paths as P
from apathkit import periods
from apathkit.algebroid import twisted_surface
from apathkit.periods import TwistedSpec
from apathkit.quadratic import QuadNumber

R2 = QuadNumber.sqrt(2)
# convergents of sqrt 2 from the recurrence p' = p + 2q, q' = p + q
SQRT2_CONVERGENTS = [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70), (239, 169), (577, 408)]


def test_q_rank():
    assert periods.q_rank([QuadNumber(1), R2])[0] == 2
    assert periods.q_rank([QuadNumber(1), QuadNumber(2), QuadNumber(Fraction(1, 3))])[0] == 1
    assert periods.q_rank([R2, 3 * R2])[0] == 1
    assert periods.q_rank([QuadNumber(0)]) == (0, None)


@pytest.mark.parametrize("gens,generator", [
    ((1, 2), "1"),
    ((Fraction(1, 2), Fraction(1, 3)), "1/6"),
    ((4, 6, 10), "2"),
    ((QuadNumber(0, 2), QuadNumber(0, 3)), "sqrt(2)"),
    ((QuadNumber(0, -4),), "4*sqrt(2)"),
])
def test_discrete_generator(gens, generator):
    v = periods.is_discrete(periods.PeriodGroup(tuple(QuadNumber.coerce(g) for g in gens)))
    assert v.discrete and v.rank == 1
    assert str(v.generator) == generator


def test_dense_group():
    v = periods.is_discrete(periods.period_group(periods.PRESETS["s2xs2-sqrt2"]()))
    assert not v.discrete and v.rank == 2 and v.label == "Dense"
    assert v.report.certificates["determinant"] == "1"


def test_continued_fraction_matches_recurrence():
    assert periods.continued_fraction(R2, max_q=408) == SQRT2_CONVERGENTS
    assert periods.continued_fraction(R2, max_q=407) == SQRT2_CONVERGENTS[:-1]
    with pytest.raises(ValueError):
        periods.continued_fraction(QuadNumber(Fraction(3, 7)))


def test_integrability_verdicts():
    dense = periods.integrability_verdict(periods.PRESETS["s2xs2-sqrt2"]())
    assert not dense.integrable and dense.label == "NonIntegrable"
    assert [(w["p"], w["q"]) for w in dense.witnesses] == SQRT2_CONVERGENTS
    for w in dense.witnesses:
        assert w["p"] ** 2 - 2 * w["q"] ** 2 == w["pell"] in (1, -1)
        assert w["element"] == w["p"] - w["q"] * R2
    assert dense.report.passed

    disc = periods.integrability_verdict(periods.PRESETS["s2xs2-rational"]())
    assert disc.integrable and disc.witnesses == []
    assert disc.report.certificates["period_generator"] == "1"


def test_interface_preset_alias():
    assert periods.PRESETS["paper-s2xs2"]() == periods.PRESETS["s2xs2-sqrt2"]()


def test_twisted_spec_json_roundtrip():
    spec = TwistedSpec((QuadNumber(Fraction(1, 2), 3, 3), QuadNumber(2)), 3)
    assert TwistedSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ValueError):
        TwistedSpec.from_json({"lambdas": [1, 2], "factors": 3})
    with pytest.raises(ValueError):
        TwistedSpec((QuadNumber(0, 1, 3),), 2)


def test_lattice_coordinates():
    pg = periods.period_group(TwistedSpec((QuadNumber(1), R2)))
    coords, basis = periods.lattice_coordinates(pg, QuadNumber(3, -5))
    b = [QuadNumber.parse(s) for s in basis]
    assert coords[0] * b[0] + coords[1] * b[1] == QuadNumber(3, -5)
    assert periods.lattice_coordinates(pg, QuadNumber(Fraction(1, 2))) is None
    pg1 = periods.PeriodGroup((QuadNumber(4), QuadNumber(6)))
    assert periods.lattice_coordinates(pg1, 10) == ([5], ["2"])
    assert periods.lattice_coordinates(pg1, 3) is None


def test_lattice_basis_spans_redundant_generators():
    pg = periods.PeriodGroup((QuadNumber(2), QuadNumber(0, 2), QuadNumber(1, 1)))
    for v in pg.generators:
        assert periods.lattice_coordinates(pg, v) is not None
    # 1 + sqrt2 and 2 generate 1 - sqrt2 = 2 - (1 + sqrt2)
    assert periods.lattice_coordinates(pg, QuadNumber(1, -1)) is not None


def test_equivalence_twisted_is_exact():
    spec = periods.PRESETS["s2xs2-sqrt2"]()
    assert periods.equivalence_twisted(spec, "1+sqrt(2)", 0, [1, 1])
    assert not periods.equivalence_twisted(spec, "1+sqrt(2)", 0, [1, 0])
    assert periods.equivalence_twisted(spec, QuadNumber(0, -2), 0, [0, -2])
    assert not periods.equivalence_twisted(spec, 1, 0, [1, 0], same_endpoints=False)
    with pytest.raises(TypeError):
        periods.equivalence_twisted(spec, 1.0, 0, [1, 0])
    with pytest.raises(ValueError):
        periods.equivalence_twisted(spec, 1, 0, [1])


@pytest.mark.parametrize("lam", [1.0, np.sqrt(2.0)])
def test_meridian_integral(lam):
    spec = twisted_surface([lam])
    rep = periods.twisted_homotopy_integral(spec, H.meridian_sheet(spec, 200), [1], tol=1e-5)
    assert rep.passed, rep.metrics
    assert rep.metrics["omega_integral"] == pytest.approx(4 * np.pi * lam, abs=1e-5)


def test_integral_rejects_other_families(so3):
    sheet = H.constant_sheet(P.constant_path(so3, [], 10), 4)
    with pytest.raises(ValueError):
        periods.twisted_homotopy_integral(so3, sheet, [1])

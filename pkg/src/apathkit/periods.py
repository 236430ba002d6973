"""Period groups of twisted sphere-product algebroids and the integrability decision.

``A = T M x R`` over ``M = S^2 x ... x S^2`` with bracket twisted by
``Omega = sum_f lambda_f omega_f``.  With every factor area normalised to one
symbolic unit, the period group is generated by the ``lambda_f`` and lives in
``Q(sqrt d)``, where all decisions are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .algebroid import AlgebroidSpec, ConnectionSpec, twisted_surface
from .homotopy import HomotopySheet, solve_b
from .quadratic import QuadNumber
from .report import Report


@dataclass(frozen=True)
class TwistedSpec:
    lambdas: tuple[QuadNumber, ...]
    d: int = 2

    def __post_init__(self):
        if not self.lambdas:
            raise ValueError("need at least one sphere factor")
        lams = tuple(QuadNumber.coerce(x, self.d) for x in self.lambdas)
        for x in lams:
            if x.q and x.d != self.d:
                raise ValueError(f"coefficient {x} lies outside Q(sqrt {self.d})")
        object.__setattr__(self, "lambdas", tuple(QuadNumber(x.p, x.q, self.d) for x in lams))

    @property
    def factors(self) -> int:
        return len(self.lambdas)

    def algebroid(self) -> AlgebroidSpec:
        return twisted_surface([float(x) for x in self.lambdas])

    @classmethod
    def from_json(cls, doc: dict) -> "TwistedSpec":
        d = int(doc.get("d", 2))
        lams = tuple(QuadNumber.coerce(x, d) for x in doc["lambdas"])
        if "factors" in doc and int(doc["factors"]) != len(lams):
            raise ValueError("'factors' disagrees with the number of lambdas")
        return cls(lams, d)

    def to_json(self) -> dict:
        return {"factors": self.factors, "d": self.d, "lambdas": [x.to_pair() for x in self.lambdas]}


PRESETS = {
    "paper-s2xs2": lambda: TwistedSpec((QuadNumber(1), QuadNumber(0, 1)), 2),
    "s2xs2-sqrt2": lambda: TwistedSpec((QuadNumber(1), QuadNumber(0, 1)), 2),
    "s2xs2-rational": lambda: TwistedSpec((QuadNumber(1), QuadNumber(2)), 2),
    "s2": lambda: TwistedSpec((QuadNumber(1),), 2),
}


@dataclass(frozen=True)
class PeriodGroup:
    generators: tuple[QuadNumber, ...]
    d: int = 2

    def __str__(self):
        return "<" + ", ".join(map(str, self.generators)) + ">"


def period_group(spec: TwistedSpec) -> PeriodGroup:
    """Generators are the coefficients of the factors (unit areas); zeros are dropped."""
    return PeriodGroup(tuple(x for x in spec.lambdas if x), spec.d)


def _det(x: QuadNumber, y: QuadNumber) -> Fraction:
    return x.p * y.q - x.q * y.p


def q_rank(gens: Sequence[QuadNumber]) -> tuple[int, tuple[int, int] | None]:
    """Rank over Q of the generators viewed in ``Q^2 = Q + Q sqrt d``, plus an independent pair."""
    nz = [i for i, g in enumerate(gens) if g]
    if not nz:
        return 0, None
    first = nz[0]
    for j in nz[1:]:
        if _det(gens[first], gens[j]) != 0:
            return 2, (first, j)
    return 1, None


def _ratio(x: QuadNumber, base: QuadNumber) -> Fraction:
    return x.p / base.p if base.p else x.q / base.q


def _gcd_fractions(values: Sequence[Fraction]) -> Fraction:
    num = 0
    den = 1
    for v in values:
        num = math.gcd(num, v.numerator)
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Fraction(num, den)


@dataclass(frozen=True)
class DiscretenessVerdict:
    discrete: bool
    rank: int
    generator: QuadNumber | None
    independent: tuple[QuadNumber, QuadNumber] | None
    report: Report

    @property
    def label(self) -> str:
        return "Discrete" if self.discrete else "Dense"


def is_discrete(pg: PeriodGroup) -> DiscretenessVerdict:
    """A finitely generated subgroup of R is discrete iff its Q-rank is at most one."""
    gens = pg.generators
    rank, pair = q_rank(gens)
    if rank == 0:
        gen = QuadNumber(0, 0, pg.d)
        rep = Report(True, {"q_rank": 0}, {"verdict": "Discrete", "generator": "0"},
                     provenance={"op": "period_lattice.is_discrete", "generators": [str(g) for g in gens]})
        return DiscretenessVerdict(True, 0, gen, None, rep)
    if rank == 1:
        base = next(g for g in gens if g)
        g = _gcd_fractions([_ratio(x, base) for x in gens if x])
        gen = abs(base * g)
        rep = Report(True, {"q_rank": 1}, {"verdict": "Discrete", "generator": str(gen)},
                     provenance={"op": "period_lattice.is_discrete", "generators": [str(x) for x in gens]})
        return DiscretenessVerdict(True, 1, gen, None, rep)
    x, y = gens[pair[0]], gens[pair[1]]
    rep = Report(
        True, {"q_rank": 2},
        {"verdict": "Dense", "independent": [str(x), str(y)], "determinant": str(_det(x, y))},
        provenance={"op": "period_lattice.is_discrete", "generators": [str(v) for v in gens]},
    )
    return DiscretenessVerdict(False, 2, None, (x, y), rep)


def continued_fraction(x: QuadNumber, max_q: int = 408, max_terms: int = 64):
    """Convergents ``(p_k, q_k)`` of an irrational ``x`` with ``q_k <= max_q``, computed exactly."""
    if x.is_rational():
        raise ValueError("continued fraction witnesses need an irrational ratio")
    out = []
    h0, h1 = 1, 0
    k0, k1 = 0, 1
    y = x
    for _ in range(max_terms):
        a = y.floor()
        h0, h1 = a * h0 + h1, h0
        k0, k1 = a * k0 + k1, k0
        if k0 > max_q:
            break
        out.append((h0, k0))
        y = (y - a).inverse()
    return out


@dataclass(frozen=True)
class IntegrabilityVerdict:
    integrable: bool
    discreteness: DiscretenessVerdict
    witnesses: list
    report: Report

    @property
    def label(self) -> str:
        return "Integrable" if self.integrable else "NonIntegrable"


def integrability_verdict(spec: TwistedSpec, max_q: int = 408) -> IntegrabilityVerdict:
    """Integrable iff the period group is discrete.

    For a dense group with independent generators ``g1, g2`` the witness lists
    elements ``p g1 - q g2`` built from convergents ``p/q`` of ``g2/g1``; their
    absolute values decrease strictly to 0 without vanishing.
    """
    pg = period_group(spec)
    disc = is_discrete(pg)
    prov = {"op": "period_lattice.integrability_verdict", "spec": spec.to_json()}
    if disc.discrete:
        rep = Report(True, {"q_rank": disc.rank},
                     {"verdict": "Integrable", "period_generator": str(disc.generator)}, provenance=prov)
        return IntegrabilityVerdict(True, disc, [], rep)
    g1, g2 = disc.independent
    ratio = g2 / g1
    witnesses = []
    for p, q in continued_fraction(ratio, max_q):
        el = g1 * p - g2 * q
        pell = p * p - spec.d * q * q if ratio == QuadNumber(0, 1, spec.d) else None
        witnesses.append({"p": p, "q": q, "element": el, "pell": pell})
    sizes = [abs(w["element"]) for w in witnesses]
    decreasing = all(b < a for a, b in zip(sizes, sizes[1:])) and all(s.sign() > 0 for s in sizes)
    rep = Report(
        passed=decreasing,
        metrics={"q_rank": 2, "witness_count": len(witnesses), "last_abs": float(sizes[-1]) if sizes else None},
        certificates={"verdict": "NonIntegrable", "independent": [str(g1), str(g2)], "ratio": str(ratio)},
        witnesses={"convergents": [f"{w['p']}/{w['q']}" for w in witnesses],
                   "elements": [str(w["element"]) for w in witnesses],
                   "pell": [w["pell"] for w in witnesses]},
        provenance=prov,
    )
    return IntegrabilityVerdict(False, disc, witnesses, rep)


def lattice_coordinates(pg: PeriodGroup, value: QuadNumber):
    """Integer coordinates of ``value`` in a Z-basis of the group, as ``(coords, basis)``, or ``None``.

    Exact for Q-rank at most two, which covers every group in ``Q(sqrt d)``.
    """
    value = QuadNumber.coerce(value, pg.d)
    gens = pg.generators
    rank, pair = q_rank(gens)
    if rank == 0:
        return ([], []) if not value else None
    if rank == 1:
        disc = is_discrete(pg)
        g = disc.generator
        if _det(value, g) != 0:
            return None
        r = _ratio(value, g) if value else Fraction(0)
        if r.denominator != 1:
            return None
        return [int(r)], [str(g)]
    # rank 2: reduce to a basis of the lattice spanned by all generators
    basis = _lattice_basis(gens)
    x, y = basis
    det = _det(x, y)
    a = _det(value, y) / det
    b = _det(x, value) / det
    if a.denominator != 1 or b.denominator != 1:
        return None
    return [int(a), int(b)], [str(x), str(y)]


def _lattice_basis(gens: Sequence[QuadNumber]):
    """Z-basis of the rank-2 lattice generated by ``gens`` (Hermite reduction over Q^2)."""
    vecs = [[g.p, g.q] for g in gens if g]
    den = 1
    for v in vecs:
        for c in v:
            den = den * c.denominator // math.gcd(den, c.denominator)
    rows = [[int(c * den) for c in v] for v in vecs]
    # integer row reduction to echelon form
    basis = []
    col = 0
    while rows and col < 2:
        rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col] != 0]) > 1:
            nz = sorted((r for r in rows if r[col] != 0), key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                f = r[col] // piv[col]
                for i in range(2):
                    r[i] -= f * piv[i]
        piv = next(r for r in rows if r[col] != 0)
        basis.append(piv)
        rows = [r for r in rows if r is not piv]
        col += 1
    d = gens[0].d
    return tuple(QuadNumber(Fraction(v[0], den), Fraction(v[1], den), d) for v in basis)


def _exact(x, d: int) -> QuadNumber:
    if isinstance(x, (float, np.floating)):
        raise TypeError("u-integrals must be exact (QuadNumber, Fraction, int or string); floats are rejected")
    return QuadNumber.coerce(x, d)


def equivalence_twisted(spec: TwistedSpec, u0_integral, u1_integral, wrap_vector: Sequence[int],
                        same_endpoints: bool = True) -> bool:
    """Exact test ``int u0 - int u1 = sum_f wrap_f lambda_f`` (in units of the factor area)."""
    w = [int(k) for k in wrap_vector]
    if len(w) != spec.factors:
        raise ValueError(f"wrap vector needs {spec.factors} entries")
    if any(isinstance(k, float) and not float(k).is_integer() for k in wrap_vector):
        raise TypeError("wrap numbers must be integers")
    diff = _exact(u0_integral, spec.d) - _exact(u1_integral, spec.d)
    total = QuadNumber(0, 0, spec.d)
    for k, lam in zip(w, spec.lambdas):
        total = total + lam * k
    return bool(same_endpoints and diff == total)


def twisted_homotopy_integral(spec: AlgebroidSpec, sheet: HomotopySheet, wraps: Sequence[int],
                              conn: ConnectionSpec | None = None, tol: float = 1e-6) -> Report:
    """Check ``int u(0,t) dt - int u(1,t) dt = iint Omega - int v(eps,1) d eps`` and ``iint Omega = 4 pi sum k lambda``.

    ``Omega`` is pulled back with ``d_t gamma = rho(gamma) a`` (the A-path identity)
    and ``d_eps gamma`` by central differences; every integral is composite Simpson.
    ``v`` is the last component of ``b`` from :func:`solve_b`.
    """
    if spec.family != "twisted_surface":
        raise ValueError("needs a twisted_surface algebroid")
    lam = spec.params["lambdas"]
    w = np.asarray(wraps, dtype=float)
    if w.shape != lam.shape:
        raise ValueError(f"wraps needs {lam.size} entries")
    he, ht = 1.0 / sheet.N_eps, 1.0 / sheet.N_t
    g = sheet.gamma
    vt = np.einsum("...ij,...j->...i", spec.rho(g), sheet.a)
    ve = kernels.central_diff(g, he, axis=0)
    om = np.zeros(g.shape[:2])
    for f in range(lam.size):
        th = g[..., 2 * f]
        om += lam[f] * np.sin(th) * (vt[..., 2 * f] * ve[..., 2 * f + 1] - vt[..., 2 * f + 1] * ve[..., 2 * f])
    omega_int = kernels.simpson2d(om, he, ht)
    w_t = kernels.simpson_weights(sheet.N_t, ht)
    u = sheet.a[..., -1]
    u_diff = float(w_t @ u[0] - w_t @ u[-1])
    sol = solve_b(spec, conn, sheet)
    v_end = sol.b[:, -1, -1]
    v_int = float(kernels.simpson_weights(sheet.N_eps, he) @ v_end)
    expected = float(4.0 * np.pi * np.dot(w, lam))
    area_err = abs(omega_int - expected)
    balance = abs(u_diff - (omega_int - v_int))
    return Report(
        passed=bool(area_err <= tol and balance <= tol),
        metrics={"omega_integral": omega_int, "expected": expected, "area_error": area_err,
                 "u_difference": u_diff, "v_terminal_integral": v_int, "balance_error": balance,
                 "max_terminal": sol.max_terminal, "tol": tol, "N_eps": sheet.N_eps, "N_t": sheet.N_t},
        provenance={"op": "period_lattice.twisted_homotopy_integral", "sheet": sheet.name,
                    "wraps": [int(k) for k in w]},
    )

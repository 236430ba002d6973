"""Named acceptance presets, sheet builders and the convergence study."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import groupoids as gp
from . import homotopy as H
from . import oracle
from . import paths as P
from . import periods, weinstein
from .algebroid import random_connection, tangent, twisted_surface, zero_connection
from .quadratic import QuadNumber
from .report import Report

# su(2) triples for the associator check: a C^0 random curve pushed through tau
ASSOC_GRID = (800, 200)
CONNECTION_SCALE = 0.1
# second-order eps differences leave ~1e-5 on gauge sheets at N = 200
ORACLE_EPS_ORDER = 4


# ---------------------------------------------------------------------------
# builders shared with the CLI

def sqrt2_twisted():
    return periods.PRESETS["paper-s2xs2"]().algebroid()


def tangent_pair(N: int):
    """Two tangent paths in R^2 with shared endpoints ``(0,0) -> (1,0)``."""
    spec = tangent(2)

    def lift(bump: float):
        return P.tangent_lift(
            spec,
            lambda t: np.stack([P.tau(t), bump * np.sin(np.pi * P.tau(t))], axis=-1),
            lambda t: np.stack([P.dtau(t), bump * np.pi * np.cos(np.pi * P.tau(t)) * P.dtau(t)], axis=-1),
            N,
        )

    return spec, lift(0.0), lift(0.5)


def tangent_sheet(N: int) -> H.HomotopySheet:
    _, p0, p1 = tangent_pair(N)
    return H.interpolation_sheet(p0, p1)


def twisted_sheet(N: int, wraps: int = 1, homotopic: bool = True):
    spec = sqrt2_twisted()
    return spec, H.meridian_sheet(spec, N, wraps=wraps, homotopic=homotopic)


def su2_triple(seed: int, N: int):
    spec = oracle.su2_model().spec()
    return [P.reparam_tau(P.random_path(spec, 100 * seed + i, N, smoothness=0, amplitude=0.5)) for i in range(3)]


def associator_su2(seed: int, N_t: int = ASSOC_GRID[0], N_eps: int = ASSOC_GRID[1], sigma: str = "linear"):
    return H.associator_sheet(*su2_triple(seed, N_t), N_eps=N_eps, sigma=sigma)


def zero_triple(N: int = 200):
    spec = oracle.su2_model().spec()
    return [P.constant_path(spec, [], N) for _ in range(3)]


# ---------------------------------------------------------------------------
# acceptance presets

def z2_star_bz2_associator() -> Report:
    """Associator composite at (1,1,1,-1) differs from the identity 2-morphism."""
    res = weinstein.associator_obstruction(weinstein.z2_star_bz2_data(), (1, 1, 1, -1))
    ok = res.composite == (-1, -1) and not res.is_identity and res.identity == (-1, 1)
    rep = res.report
    rep.passed = ok
    return rep


def bz2_weinstein() -> Report:
    """BZ2 satisfies the axioms with trivial associator; two 2-morphisms id => id."""
    W = weinstein.bz2()
    rep = weinstein.weinstein_axiom_check(W)
    ok = (rep.passed and all(rep.metrics[f"{k}_is_identity"] for k in
                             ("associativity", "left_identity", "right_identity", "left_inverse", "right_inverse"))
          and rep.metrics["id_id_bibundle_2morphisms"] == 2)
    rep.passed = bool(ok)
    return rep


def period_verdicts() -> Report:
    """(1, sqrt2) is dense and non-integrable, (1, 2) discrete; Pell witnesses up to q = 408."""
    dense = periods.integrability_verdict(periods.PRESETS["paper-s2xs2"]())
    disc = periods.integrability_verdict(periods.PRESETS["s2xs2-rational"]())
    root2 = QuadNumber.sqrt(2)
    pell_ok = True
    for w in dense.witnesses:
        pell_ok &= abs(w["p"] ** 2 - 2 * w["q"] ** 2) == 1 and w["pell"] in (1, -1) and w["q"] <= 408
    pell_ok &= dense.witnesses[-1]["q"] == 408
    last = dense.witnesses[-1]
    gap = abs(QuadNumber(last["p"]) - last["q"] * root2)
    gap_ok = gap < QuadNumber(Fraction(9, 10_000))
    ok = (not dense.integrable and dense.discreteness.rank == 2 and disc.integrable
          and disc.discreteness.rank == 1 and str(disc.discreteness.generator) == "1" and pell_ok and gap_ok)
    return Report(
        passed=bool(ok),
        metrics={"dense_rank": dense.discreteness.rank, "discrete_rank": disc.discreteness.rank,
                 "pell_exact": bool(pell_ok), "gap_float": float(gap)},
        certificates={"dense": dense.label, "discrete": disc.label,
                      "generator": str(disc.discreteness.generator), "gap_577_408": str(gap)},
        witnesses={"pell": [[w["p"], w["q"], w["pell"]] for w in dense.witnesses]},
        provenance={"op": "period_lattice.integrability_verdict", "presets": ["paper-s2xs2", "s2xs2-rational"]},
    )


def oracle_agreement(seeds: Sequence[int] = range(1, 11), N: int = 200) -> Report:
    """Homotopy test agrees with the su(2) development oracle on gauge and shear families."""
    rows = []
    for preserving, seed in itertools.product((True, False), seeds):
        mdl, p, sheet = oracle.random_su2_family(seed, N, preserving)
        ok, rep = H.is_homotopy(mdl.spec(), None, sheet, tol=1e-5, eps_order=ORACLE_EPS_ORDER)
        eq = oracle.equivalent_oracle(mdl, sheet.row(0), sheet.row(sheet.N_eps), tol=1e-6)
        rows.append({"seed": seed, "preserving": preserving, "homotopy": ok, "oracle": eq,
                     "max_terminal": rep.metrics["max_terminal"]})
    agree = all(r["homotopy"] == r["oracle"] == r["preserving"] for r in rows)
    return Report(passed=agree, metrics={"families": len(rows), "agreements": sum(r["homotopy"] == r["oracle"] for r in rows)},
                  witnesses={"families": rows},
                  provenance={"op": "oracle_dev.equivalent_oracle", "N": N, "eps_order": ORACLE_EPS_ORDER})


def concat_homomorphism(seeds: Sequence[int] = range(1, 11), N: int = 2000) -> Report:
    """dev(concat(a0, a1)) = dev(a0) dev(a1) and dev(p) dev(p^-1) = I."""
    mdl = oracle.su2_model()
    spec = mdl.spec()
    worst_cat = worst_inv = 0.0
    for s in seeds:
        a0 = P.random_path(spec, 2 * s, N)
        a1 = P.random_path(spec, 2 * s + 1, N)
        d0, d1 = oracle.develop(mdl, a0), oracle.develop(mdl, a1)
        worst_cat = max(worst_cat, float(np.linalg.norm(oracle.develop(mdl, P.concat(a0, a1)) - d0 @ d1)))
        worst_inv = max(worst_inv, float(np.linalg.norm(d0 @ oracle.develop(mdl, P.invert(a0)) - np.eye(2))))
    return Report(passed=worst_cat <= 1e-8 and worst_inv <= 1e-8,
                  metrics={"concat_error": worst_cat, "inverse_error": worst_inv, "N": N},
                  provenance={"op": "oracle_dev.develop", "pairs": len(list(seeds))})


def connection_independence(N: int = 100) -> Report:
    """b barely depends on the connection; the difference shrinks at second order."""
    out = {}
    for n in (N, 2 * N):
        spec, sheet = twisted_sheet(n)
        rep = H.check_connection_independence(spec, sheet, zero_connection(spec),
                                              random_connection(spec, 1, CONNECTION_SCALE))
        out[n] = rep.metrics["max_diff"]
    ratio = out[N] / out[2 * N]
    return Report(passed=out[N] <= 1e-3 and 3.0 <= ratio <= 5.0,
                  metrics={"max_diff": out[N], "max_diff_fine": out[2 * N], "ratio": ratio},
                  provenance={"op": "homotopy_engine.check_connection_independence",
                              "sheet": "meridian on S2xS2 (1, sqrt2)", "connection_scale": CONNECTION_SCALE})


def fit_order(grids: Sequence[int], residuals: Sequence[float]):
    """Least-squares slope of ``log r`` against ``-log N``; ``"exact"`` if all residuals vanish."""
    r = np.asarray(residuals, dtype=float)
    if np.all(r == 0.0):
        return "exact"
    if np.any(r <= 0.0):
        return None
    slope = np.polyfit(np.log(np.asarray(grids, dtype=float)), np.log(r), 1)[0]
    return float(-slope)


def _dual_twisted(N: int) -> float:
    spec, sheet = twisted_sheet(N)
    return H.dual_residual(spec, sheet, H.solve_b(spec, random_connection(spec, 1, CONNECTION_SCALE), sheet))


def _dual_tangent(N: int) -> float:
    sheet = tangent_sheet(N)
    spec = sheet.spec
    return H.dual_residual(spec, sheet, H.solve_b(spec, random_connection(spec, 1, CONNECTION_SCALE), sheet))


def _circle_error(N: int) -> float:
    """Distance of the integrated base curve from ``(sin 2 pi t, -cos 2 pi t)``."""
    p = P.circle_path(N)
    w = 2.0 * np.pi * p.t
    exact = np.stack([np.sin(w), -np.cos(w)], axis=-1)
    return float(np.max(np.abs(p.gamma - exact)))


def _constant_b(N: int) -> float:
    p = P.constant_path(tangent(2), [0.3, -0.2], N)
    return float(np.max(np.abs(H.solve_b(p.spec, None, H.constant_sheet(p, N)).b)))


CONVERGENCE_OPS: dict[str, Callable[[int], float]] = {
    "dual_tangent": _dual_tangent,
    "dual_twisted": _dual_twisted,
    "integrate_base_circle": _circle_error,
    "constant": _constant_b,
}


def convergence_study(op_name: str, grids: Sequence[int]) -> Report:
    if len(grids) < 3:
        raise ValueError("a convergence study needs at least three grids")
    try:
        op = CONVERGENCE_OPS[op_name]
    except KeyError:
        raise ValueError(f"unknown convergence op {op_name!r}; choose from {sorted(CONVERGENCE_OPS)}") from None
    grids = sorted(int(n) for n in grids)
    res = [op(n) for n in grids]
    order = fit_order(grids, res)
    return Report(passed=order is not None, metrics={"grids": grids, "residuals": res, "order": order},
                  provenance={"op": "cli_runner.convergence_study", "target": op_name})


def dual_apath(grids: Sequence[int] = (50, 100, 200)) -> Report:
    """``rho(gamma) b - d_eps gamma`` decays at second order on tangent and twisted sheets."""
    parts = {name: convergence_study(name, grids) for name in ("dual_tangent", "dual_twisted")}
    ok = all(isinstance(r.metrics["order"], float) and 1.8 <= r.metrics["order"] <= 2.2 for r in parts.values())
    rep = Report.merge("homotopy_engine.check_dual_apath", parts)
    rep.passed = ok
    return rep


def associator_homotopy(seeds: Sequence[int] = range(1, 6)) -> Report:
    """The rescaling sheet between the two bracketings is a homotopy."""
    terms = {}
    for s in seeds:
        _, rep = H.is_homotopy(oracle.su2_model().spec(), None, associator_su2(s), tol=1e-5)
        terms[str(s)] = rep.metrics["max_terminal"]
    zero_sheet = H.associator_sheet(*zero_triple(), N_eps=8)
    zero_term = H.solve_b(zero_sheet.spec, None, zero_sheet).max_terminal
    ok = all(v <= 1e-5 for v in terms.values()) and zero_term == 0.0
    return Report(passed=ok, metrics={"max_terminal": terms, "zero_triple": zero_term,
                                      "N_t": ASSOC_GRID[0], "N_eps": ASSOC_GRID[1]},
                  provenance={"op": "homotopy_engine.associator_sheet", "sigma": "linear"})


def twisted_integral(N: int = 400) -> Report:
    """A full meridian sweep of a unit sphere integrates Omega to 4 pi lambda."""
    parts = {}
    for lam in (1.0, float(np.sqrt(2.0))):
        spec = twisted_surface([lam])
        sheet = H.meridian_sheet(spec, N)
        rep = periods.twisted_homotopy_integral(spec, sheet, [1], tol=1e-6)
        parts[f"lambda={lam:.6f}"] = rep
    return Report.merge("period_lattice.twisted_homotopy_integral", parts)


def finite_calculus() -> Report:
    """Morita is an equivalence relation on the pool; from_homomorphism is functorial."""
    pool = gp.pool()
    by_name = {g.name: g for g in pool}
    refl = all(gp.is_morita(gp.identity_bibundle(g)) for g in pool)
    # Morita bibundles to a point for the groupoids equivalent to one
    to_pt = {name: gp.from_homomorphism(gp.to_terminal(by_name[name], by_name["pt"]))
             for name in ("pt", "Pair(3)", "Z2 x {p,q}")}
    sym = all(gp.is_morita(gp.flip(E)) for E in to_pt.values())
    trans = all(gp.is_morita(gp.compose(E, gp.flip(F))) for E in to_pt.values() for F in to_pt.values())
    z2 = by_name["Z2"]
    inv = gp.from_homomorphism(gp.homomorphism(z2, z2, lambda x: x, lambda a: a, "inv"))
    sym &= gp.is_morita(gp.flip(inv))
    trans &= gp.is_morita(gp.compose(inv, gp.flip(inv)))
    # functoriality up to 2-isomorphism
    funct = True
    homs = [
        (gp.to_terminal(by_name["Pair(3)"], by_name["pt"]), gp.identity_hom(by_name["pt"])),
        (gp.identity_hom(z2), gp.to_terminal(z2, by_name["pt"])),
        (gp.homomorphism(by_name["Z2 x {p,q}"], z2, lambda x: "*", lambda a: a[1], "forget"),
         gp.homomorphism(z2, z2, lambda x: x, lambda a: a, "inv")),
    ]
    for f, g in homs:
        lhs = gp.compose(gp.from_homomorphism(f), gp.from_homomorphism(g))
        funct &= gp.find_two_morphism(lhs, gp.from_homomorphism(f.then(g))) is not None
    ok = refl and sym and trans and funct and len(pool) <= 5 and all(len(g.arrows) <= 12 for g in pool)
    return Report(passed=bool(ok), metrics={"reflexive": refl, "symmetric": bool(sym), "transitive": bool(trans),
                                            "functorial": bool(funct), "pool": [g.name for g in pool]},
                  provenance={"op": "groupoid_calculus.is_morita"})


def quad_field_axioms(count: int = 10_000, seed: int = 0) -> Report:
    """Randomized exact checks of the field axioms in Q(sqrt 2)."""
    rng = random.Random(seed)

    def rnd() -> QuadNumber:
        f = lambda: Fraction(rng.randint(-50, 50), rng.randint(1, 20))  # noqa: E731
        return QuadNumber(f(), f(), 2)

    failures = 0
    zero, one = QuadNumber(0, 0, 2), QuadNumber(1, 0, 2)
    for _ in range(count):
        x, y, z = rnd(), rnd(), rnd()
        ok = (x + y == y + x and x * y == y * x and (x + y) + z == x + (y + z)
              and (x * y) * z == x * (y * z) and x * (y + z) == x * y + x * z
              and x + zero == x and x * one == x and x + (-x) == zero)
        if x:
            ok = ok and x * x.inverse() == one
        failures += not ok
    return Report(passed=failures == 0, metrics={"checks": count, "failures": failures},
                  provenance={"op": "period_lattice.QuadNumber", "seed": seed})


ACCEPTANCE: dict[str, Callable[[], Report]] = {
    "z2bz2-associator": z2_star_bz2_associator,
    "bz2-weinstein": bz2_weinstein,
    "period-verdict": period_verdicts,
    "oracle-agreement": oracle_agreement,
    "concat-homomorphism": concat_homomorphism,
    "connection-independence": connection_independence,
    "dual-apath": dual_apath,
    "associator-homotopy": associator_homotopy,
    "twisted-integral": twisted_integral,
    "finite-calculus": finite_calculus,
    "quad-arithmetic": quad_field_axioms,
}


def run_preset(name: str) -> Report:
    try:
        fn = ACCEPTANCE[name]
    except KeyError:
        raise ValueError(f"unknown acceptance preset {name!r}; choose from {list(ACCEPTANCE)}") from None
    return fn()


def acceptance_suite(names: Sequence[str] | None = None) -> Report:
    names = list(ACCEPTANCE) if names is None else list(names)
    return Report.merge("cli_runner.acceptance_suite", {n: run_preset(n) for n in sorted(names)})

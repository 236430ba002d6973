"""Command-line front end.  Exit codes: 0 pass, 1 fail, 2 input error."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import groupoids as gp
from . import homotopy as H
from . import io, oracle, periods, suite, weinstein
from . import paths as P
from .algebroid import lie_algebra, validate
from .report import Report

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(ValueError):
    pass


def _grids(text: str | None, default: list[int]) -> list[int]:
    if not text:
        return default
    try:
        out = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"--grid expects comma-separated integers, got {text!r}") from None
    if any(n < 2 for n in out):
        raise UsageError("grid sizes must be >= 2")
    return out


def _grid(args, default: int) -> int:
    return _grids(args.grid, [default])[0]


def _echo(args) -> dict:
    keys = ("command", "action", "input", "preset", "tol", "grid", "seed", "algebroid", "model", "mode")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


# ---------------------------------------------------------------------------
# algebroid / path

def _load_spec(args):
    src = getattr(args, "algebroid", None)
    if src is None:
        return lie_algebra("so3"), None
    return io.load_algebroid(src, "")


def cmd_algebroid(args) -> Report:
    if args.input:
        spec, conn = io.load_algebroid(args.input)
    else:
        preset = args.preset or "so3"
        fam = {"tangent": {"family": "tangent", "m": 2}, "twisted": {"family": "twisted_surface", "omega": "paper-s2xs2"}}
        spec, conn = io.load_algebroid(fam.get(preset, {"family": "lie_algebra", "structure": preset}))
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    pts = rng.uniform(0.3, 2.8, size=(8, spec.m))
    kw = {} if args.tol is None else {"tol": args.tol}
    rep = validate(spec, conn, pts, **kw)
    rep.provenance.update({"family": spec.family, "name": spec.name, "m": spec.m, "n": spec.n,
                           "connection": conn.name})
    return rep


def cmd_path(args) -> Report:
    spec, _ = _load_spec(args)
    src = args.input or args.preset or "random(1, 3)"
    p = io.load_path(spec, src, N=_grid(args, 200), seed=args.seed)
    tol = 1e-3 if args.tol is None else args.tol
    res = P.residual(p)
    bd = P.boundary_defect(p)
    ok = P.check(p, tol)
    return Report(passed=ok, metrics={"residual": res, "N": p.N, "path_tol": tol, **bd},
                  certificates={"endpoints": [p.gamma[0].tolist(), p.gamma[-1].tolist()]},
                  provenance={"op": "path_engine.check"})


# ---------------------------------------------------------------------------
# homotopy

def _sheet(args, default_preset: str):
    spec, conn = _load_spec(args)
    src = args.input or args.preset or default_preset
    N = _grid(args, 0) if args.grid else None
    spec, sheet = io.load_sheet(spec, src, N=N, seed=args.seed)
    if conn is not None and (conn.m, conn.n) != (spec.m, spec.n):
        conn = None
    return spec, conn, sheet


def cmd_homotopy(args) -> Report:
    tol = 1e-5 if args.tol is None else args.tol
    eps_order = args.eps_order
    if args.action == "associator":
        seed = 1 if args.seed is None else args.seed
        n = _grid(args, suite.ASSOC_GRID[0])
        sheet = suite.associator_su2(seed, n, suite.ASSOC_GRID[1] if not args.grid else n)
        ok, rep = H.is_homotopy(sheet.spec, None, sheet, tol, eps_order)
        rep.metrics.pop("terminal_profile", None)
        return rep
    spec, conn, sheet = _sheet(args, "meridian")
    if args.action == "check":
        ok, rep = H.is_homotopy(spec, conn, sheet, tol, eps_order)
        rep.metrics.pop("terminal_profile", None)
        return rep
    sol = H.solve_b(spec, conn, sheet, eps_order=eps_order)
    dual = H.dual_residual(spec, sheet, sol)
    metrics = {"max_terminal": sol.max_terminal, "residuals": {"dual": dual}, "N_eps": sheet.N_eps,
               "N_t": sheet.N_t}
    try:
        coarse = H.solve_b(spec, conn, sheet.coarsen(), eps_order=eps_order)
        metrics["residuals"]["dual_coarse"] = H.dual_residual(spec, sheet.coarsen(), coarse)
        metrics["convergence_order"] = H._order(metrics["residuals"]["dual_coarse"], dual)
    except ValueError:
        metrics["convergence_order"] = None
    return Report(passed=bool(sol.max_terminal <= tol), metrics=metrics,
                  certificates={"terminal_profile": sol.terminal},
                  provenance={"op": "homotopy_engine.solve_b", "sheet": sheet.name})


# ---------------------------------------------------------------------------
# oracle

def cmd_oracle(args) -> Report:
    mdl = oracle.model(args.model)
    spec = mdl.spec()
    N = _grid(args, 200)
    if args.action == "develop":
        p = io.load_path(spec, args.input or args.preset or "random(1, 3)", N=N, seed=args.seed)
        return oracle.develop_report(mdl, p)
    if args.input:
        doc = io.load_json(args.input)
        p0 = io.load_path(spec, io._require(doc, "p0", ""), "/p0", N=N)
        p1 = io.load_path(spec, io._require(doc, "p1", ""), "/p1", N=N)
    else:
        seed = 1 if args.seed is None else args.seed
        kind = args.preset or "gauge"
        if kind not in ("gauge", "shear"):
            raise UsageError("oracle equiv presets are 'gauge' and 'shear'")
        _, _, sheet = oracle.random_su2_family(seed, N, kind == "gauge")
        p0, p1 = sheet.row(0), sheet.row(sheet.N_eps)
    tol = 1e-6 if args.tol is None else args.tol
    eq = oracle.equivalent_oracle(mdl, p0, p1, tol)
    diff = float(np.linalg.norm(oracle.develop(mdl, p0) - oracle.develop(mdl, p1)))
    return Report(passed=eq, metrics={"dev_difference": diff, "tol": tol},
                  provenance={"op": "oracle_dev.equivalent_oracle", "model": mdl.name})


# ---------------------------------------------------------------------------
# periods

def _twisted(args) -> periods.TwistedSpec:
    if args.input:
        return io.load_twisted(args.input)
    name = args.preset or "paper-s2xs2"
    if name not in periods.PRESETS:
        raise UsageError(f"unknown period preset {name!r}; choose from {sorted(periods.PRESETS)}")
    return periods.PRESETS[name]()


def cmd_period(args) -> Report:
    if args.action == "equiv":
        doc = io.load_json(args.input) if args.input else None
        if doc is None:
            raise UsageError("period equiv needs --input with spec, u0, u1 and wraps")
        spec = io.load_twisted(io._require(doc, "spec", ""), "/spec")
        wraps = io._require(doc, "wraps", "", list)
        try:
            ok = periods.equivalence_twisted(spec, io._require(doc, "u0", ""), io._require(doc, "u1", ""), wraps,
                                             bool(doc.get("same_endpoints", True)))
        except (TypeError, ValueError) as exc:
            raise io.InputError("", str(exc)) from None
        return Report(passed=ok, certificates={"u0": str(doc["u0"]), "u1": str(doc["u1"])},
                      provenance={"op": "period_lattice.equivalence_twisted", "spec": spec.to_json()})
    spec = _twisted(args)
    if args.action == "group":
        pg = periods.period_group(spec)
        return Report(passed=True, certificates={"generators": [str(g) for g in pg.generators]},
                      provenance={"op": "period_lattice.period_group", "spec": spec.to_json()})
    if args.action == "discrete":
        return periods.is_discrete(periods.period_group(spec)).report
    if args.action == "verdict":
        return periods.integrability_verdict(spec).report
    N = _grid(args, 400)
    alg = spec.algebroid()
    factor = args.factor
    if not 0 <= factor < spec.factors:
        raise UsageError(f"--factor must lie in [0, {spec.factors})")
    sheet = H.meridian_sheet(alg, N, factor=factor)
    wraps = [1 if f == factor else 0 for f in range(spec.factors)]
    return periods.twisted_homotopy_integral(alg, sheet, wraps, tol=1e-6 if args.tol is None else args.tol)


# ---------------------------------------------------------------------------
# groupoids

def _bibundle_arg(src):
    try:
        return io.load_bibundle(src)
    except io.InputError:
        raise
    except (TypeError, KeyError) as exc:
        raise io.InputError("", f"malformed bibundle: {exc}") from None


def cmd_groupoid(args) -> Report:
    a = args.action
    if a == "check":
        src = args.input or args.preset or "z2"
        G = io.load_groupoid(src)
        return Report(passed=True, metrics={"objects": len(G.objects), "arrows": len(G.arrows)},
                      certificates={"groupoid": G.to_json()}, provenance={"op": "groupoid_calculus.FiniteGroupoid"})
    if a == "morita":
        if args.input:
            E = _bibundle_arg(args.input)
        else:
            G = io.load_groupoid(args.preset or "pair3")
            E = gp.from_homomorphism(gp.to_terminal(G))
        return gp.morita_report(E)
    if a == "compose":
        if not args.input:
            raise UsageError("groupoid compose needs --input {\"E\": ..., \"F\": ...}")
        doc = io.load_json(args.input)
        E = io.load_bibundle(io._require(doc, "E", ""), "/E")
        F = io.load_bibundle(io._require(doc, "F", ""), "/F")
        try:
            C = gp.compose(E, F)
        except gp.GroupoidError as exc:
            raise io.InputError("", str(exc)) from None
        return Report(passed=True, metrics={"size": len(C.space), "principal": gp.is_principal(C)},
                      certificates={"bibundle": C.to_json()}, provenance={"op": "groupoid_calculus.compose"})
    W = weinstein.preset(args.preset or ("z2*bz2" if a == "associator" else "bz2"))
    if a == "weinstein":
        return weinstein.weinstein_axiom_check(W)
    quad = weinstein.parse_quadruple(args.input or "1,1,1,-1")
    if W.name == "BZ2":
        quad = tuple("*" for _ in quad)
    res = weinstein.associator_obstruction(W, quad, args.mode)
    rep = res.report
    rep.passed = res.is_identity
    return rep


# ---------------------------------------------------------------------------
# suites

def cmd_convergence(args) -> Report:
    op = args.preset or "dual_tangent"
    return suite.convergence_study(op, _grids(args.grid, [50, 100, 200]))


def cmd_suite(args) -> Report:
    names = None if not args.preset else [n.strip() for n in args.preset.split(",")]
    return suite.acceptance_suite(names)


COMMANDS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "algebroid": (cmd_algebroid, ()),
    "path": (cmd_path, ()),
    "homotopy": (cmd_homotopy, ("solve", "check", "associator")),
    "oracle": (cmd_oracle, ("develop", "equiv")),
    "period": (cmd_period, ("group", "discrete", "verdict", "integral", "equiv")),
    "groupoid": (cmd_groupoid, ("check", "compose", "morita", "weinstein", "associator")),
    "convergence": (cmd_convergence, ()),
    "paper-suite": (cmd_suite, ()),
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="JSON file, inline JSON, or a command-specific literal")
    p.add_argument("--preset", help="named input or acceptance preset")
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", help="grid size, or comma-separated sizes for convergence")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the JSON report here")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    p.add_argument("--algebroid", help="algebroid JSON for path and homotopy commands")
    p.add_argument("--model", default="su2", choices=sorted(oracle.MODELS))
    p.add_argument("--mode", default="rescaling", choices=weinstein.MODES)
    p.add_argument("--factor", type=int, default=0)
    p.add_argument("--eps-order", dest="eps_order", type=int, default=2, choices=(2, 4))
    p.set_defaults(pretty=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apathkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, actions) in COMMANDS.items():
        p = sub.add_parser(name)
        if actions:
            p.add_argument("action", choices=actions)
        _common(p)
    return parser


def _summary(args, rep: Report) -> str:
    head = f"{args.command}{' ' + args.action if getattr(args, 'action', None) else ''}"
    return f"{head}: {'PASS' if rep.passed else 'FAIL'}"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    fn, _ = COMMANDS[args.command]
    try:
        _grids(args.grid, [])  # reject malformed sizes even where the command ignores them
        rep = fn(args)
    except io.InputError as exc:
        print(json.dumps({"error": exc.message, "pointer": exc.pointer}), file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, ValueError, TypeError, KeyError, FileNotFoundError, gp.GroupoidError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_INPUT
    rep.provenance.setdefault("config", _echo(args))
    text = rep.to_json(pretty=args.pretty)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    print(_summary(args, rep), file=sys.stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

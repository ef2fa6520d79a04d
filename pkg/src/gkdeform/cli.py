"""Command-line driver: gk <identities|deform|typemap|cbh|majorant> --scene FILE."""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .clifford import CliffordElement, FormField
from .errors import GKError, NotExact
from .scene import Scene, SceneError, ValidationError, load_scene, read_scene

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NOT_EXACT, EXIT_PROPERTY = 0, 2, 3, 4, 5

# How each check is established, recorded next to every check in the report.
EXACT = "exact"
FLOAT = "float-tolerance"
ORACLE = "independent-oracle"
CERT = "exact-certificate"


def _check(name: str, ok: bool, provenance: str, **detail) -> dict:
    return {"name": name, "ok": bool(ok), "provenance": provenance, **detail}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GK_THREADS", "1")))
    except ValueError:
        return 1


def _fan_out(jobs: list) -> list:
    """Run (name, fn) jobs on up to GK_THREADS workers; results in submission order."""
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = [(name, pool.submit(fn)) for name, fn in jobs]
        return [(name, f.result()) for name, f in futures]


def _series_json(s) -> list:
    return [c.to_json() for c in s.coeffs]


# -- subcommands -------------------------------------------------------------------

def cmd_identities(sc: Scene, args) -> tuple:
    from .suites import algebra_suite, cbh_reexponentiation
    cases = args.cases
    jobs = [("algebra", lambda: algebra_suite(sc.seed, cases)),
            ("cbh_reexponentiation[m=4]", lambda: cbh_reexponentiation(random.Random(f"{sc.seed}:cbh"), 4,
                                                                        max(1, cases // 10), sc.order))]
    if sc.model == "torus" and sc.psi is not None:
        jobs.append(("laplacians", lambda: _laplacian_suite(sc)))
    checks, result = [], {}
    for name, res in _fan_out(jobs):
        if name == "algebra":
            for sub, r in res.items():
                checks.append(_check(sub, not r["failures"], EXACT, cases=r["cases"],
                                     counterexamples=r["failures"][:3]))
        elif name == "laplacians":
            for mode, ok in res:
                checks.append(_check(f"laplacian_identities[{','.join(map(str, mode))}]", ok, EXACT))
        else:
            checks.append(_check(name, not res["failures"], EXACT, cases=res["cases"],
                                 counterexamples=res["failures"][:3]))
    result["suites"] = len(checks)
    return checks, result


def _laplacian_suite(sc: Scene) -> list:
    from itertools import product
    from .stability import GKOneSpinor, laplacian_identities
    gk = GKOneSpinor(sc.J, sc.psi)
    out = []
    for mode in product(range(-1, 2), repeat=sc.m):
        out.append((mode, all(laplacian_identities(gk, mode).values())))
    return out


def _h1_shift(sc: Scene, gk, hodge) -> FormField | None:
    from .stability import harmonic_H1
    if not sc.s:
        return None
    basis = harmonic_H1(hodge, [tuple([0] * sc.m)])[tuple([0] * sc.m)]
    if len(sc.s) != len(basis):
        raise ValidationError("s", f"expected {len(basis)} coefficients for the mode-0 harmonic basis")
    out = FormField.zero(sc.m, sc.ring)
    for c, h in zip(sc.s, basis):
        out = out + h.scale(c)
    return out


def cmd_deform(sc: Scene, args) -> tuple:
    from .majorant import majorant_certificate
    from .stability import (GKOneSpinor, ModeHodge, de_rham_class, naive_closedness, solve_stability,
                            verify_family)
    if sc.model != "torus":
        raise ValidationError("model", "deform needs a torus model")
    if sc.psi is None:
        raise ValidationError("spinor", "deform needs a spinor psi")
    if sc.a is None:
        raise ValidationError("deformation", "deform needs a torus deformation")
    try:
        gk = GKOneSpinor(sc.J, sc.psi)
    except (GKError, ValueError) as exc:
        raise ValidationError("spinor", str(exc)) from exc
    gk_rep = gk.validate()
    checks = [_check("generalized_kahler", gk_rep["ok"], FLOAT, detail=gk_rep["checks"],
                     min_eigenvalue=gk_rep["min_eigenvalue"])]
    hodge = ModeHodge(gk, sc.mode_cap)
    s = _h1_shift(sc, gk, hodge)
    rep = solve_stability(gk, sc.a, s, sc.order, sc.mode_cap, hodge=hodge)
    checks.append(_check("closed_mod_t^(N+1)", rep.closed, EXACT))
    checks.append(_check("b_kills_phi", rep.b_kills_phi, EXACT))
    checks.append(_check("obstructions_in_K2", all(gk.in_K2(o) for o in rep.obstructions), EXACT))
    checks.append(_check("no_log_oracle", naive_closedness(sc.a, rep.b, sc.psi).is_zero(), ORACLE))
    fam = verify_family(rep, gk, tol=sc.tolerances["float"])
    checks.append(_check("family", fam["ok"], FLOAT, detail=fam["checks"],
                         max_commutator=fam["max_commutator"], min_metric_eigenvalue=fam["min_metric_eigenvalue"]))
    mj = sc.majorant
    cert = majorant_certificate(mj.get("c", "1"), mj.get("lambda", "1"), mj.get("K1", "1/2"), mj.get("K2", "1/2"),
                                sc.order, rep, square_order=mj.get("order", 50))
    checks.append(_check("majorant", cert["ok"], CERT, detail=cert.get("tracking", {})))
    result = {
        "a": _series_json(rep.a), "b": _series_json(rep.b), "z": _series_json(rep.z),
        "betas": [x.to_json() for x in rep.betas],
        "residual_zero": rep.closed,
        "de_rham_class": [c.to_json() for c in de_rham_class(rep.psi_t)],
    }
    return checks, result


def cmd_typemap(sc: Scene, args) -> tuple:
    from .poisson import is_poisson, mc_residual, type_stratify
    if sc.model != "chart" or sc.beta is None:
        raise ValidationError("deformation", "typemap needs a chart model with a bivector deformation")
    grid = sc.grid or [tuple(Fraction(x) for x in p) for p in _default_grid(sc.m)]
    checks = [_check("poisson", is_poisson(sc.beta), EXACT),
              _check("maurer_cartan", not mc_residual(sc.beta), EXACT)]
    types = type_stratify(sc.beta, grid, tol=sc.tolerances["rank"])
    counts = {}
    for ty in types.values():
        counts[str(ty)] = counts.get(str(ty), 0) + 1
    result = {"types": sorted({int(k) for k in counts}), "counts": counts, "rank_tolerance": sc.tolerances["rank"],
              "points": [{"point": [str(x) for x in p], "type": ty} for p, ty in sorted(types.items())]}
    return checks, result


def _default_grid(m: int):
    from itertools import product
    axis = [Fraction(i, 2) for i in range(-2, 3)]
    return list(product(axis, repeat=m))


def cmd_cbh(sc: Scene, args) -> tuple:
    from .randgen import rand_clifford
    from .series import TruncSeries, cbh_closed_form, cbh_log, exp_series
    m, ring = sc.m, sc.ring
    from .scene import parse_clifford
    if "a" in sc.cbh and "b" in sc.cbh:
        a1 = parse_clifford(sc.cbh["a"], m, ring, "cbh.a")
        b1 = parse_clifford(sc.cbh["b"], m, ring, "cbh.b")
    else:
        rng = random.Random(f"{sc.seed}:cbh")
        a1 = rand_clifford(rng, m, ring, max_len=2, max_mode=0)
        b1 = rand_clifford(rng, m, ring, max_len=2, max_mode=0)
    N = sc.order
    zero = CliffordElement.zero(m, ring)
    a = TruncSeries([zero, a1], N)
    b = TruncSeries([zero, b1], N)
    z = cbh_log(a, b)
    closed = cbh_closed_form(a1, b1, min(N, 3))
    formulas = ["a1 + b1", "1/2 [a1, b1]", "1/12 [a1, [a1, b1]] + 1/12 [b1, [b1, a1]]"]
    table = []
    for k in range(1, N + 1):
        row = {"order": k, "coeff": z[k].to_json()}
        if k <= len(closed):
            row["formula"] = formulas[k - 1]
        table.append(row)
    checks = [_check("reexponentiation", exp_series(z) == exp_series(a).mul(exp_series(b)), EXACT)]
    for k, c in enumerate(closed, start=1):
        checks.append(_check(f"closed_form[order={k}]", z[k] == c, EXACT, formula=formulas[k - 1]))
    return checks, {"a1": a1.to_json(), "b1": b1.to_json(), "table": table}


def cmd_majorant(sc: Scene, args) -> tuple:
    from .majorant import majorant_certificate
    mj = sc.majorant
    order = mj.get("order", 200)
    if not isinstance(order, int) or order < 1:
        raise ValidationError("majorant.order", "expected a positive integer")
    try:
        cs = [Fraction(str(c)) for c in mj.get("c", ["1/4", "1", "4"])] if isinstance(mj.get("c", []), list) \
            else [Fraction(str(mj["c"]))]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError("majorant.c", str(exc)) from exc
    checks, result = [], {}
    for c in cs:
        lam = Fraction(str(mj["lambda"])) if "lambda" in mj else 1 / c
        cert = majorant_certificate(c, lam, mj.get("K1", "1/2"), mj.get("K2", "1/2"), order)
        checks.append(_check(f"square_bound[c={c}]", cert["square_bound"]["ok"], CERT, order=order))
        checks.append(_check(f"exp_bound[c={c}]", cert["exp_bound"]["ok"], CERT, order=order,
                             exp_upper_bound=cert["exp_bound"]["exp_upper_bound"]))
        result[str(c)] = {"lambda": str(lam)}
    return checks, result


COMMANDS = {"identities": cmd_identities, "deform": cmd_deform, "typemap": cmd_typemap, "cbh": cmd_cbh,
            "majorant": cmd_majorant}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gk", description="Generalized Kahler deformation toolkit.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--order", type=int, help="truncation order N (overrides the scene)")
    p.add_argument("--mode-cap", type=int, help="Fourier mode cap (overrides the scene)")
    p.add_argument("--seed", type=int, help="random seed (overrides the scene)")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--tolerance", type=float, help="float tolerance for floating-point checks")
    p.add_argument("--cases", type=int, default=200, help="cases per identity suite")
    return p


def _read_scene(args):
    raw, sha = read_scene(args.scene)
    if isinstance(raw, dict):
        if args.order is not None:
            raw["order"] = args.order
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.mode_cap is not None and isinstance(raw.get("model"), dict):
            raw["model"]["mode_cap"] = args.mode_cap
        if args.tolerance is not None:
            raw.setdefault("tolerances", {})["float"] = args.tolerance
    return load_scene(raw, sha)


def run(args) -> tuple:
    """(exit code, report dict) for parsed arguments."""
    report = {"tool": "gkdeform", "version": __version__, "command": args.command}
    try:
        sc = _read_scene(args)
        report.update({"scene_sha256": sc.sha256, "seed": sc.seed, "order": sc.order,
                       "tolerances": dict(sorted(sc.tolerances.items()))})
        checks, result = COMMANDS[args.command](sc, args)
    except SceneError as exc:
        report.update({"ok": False, "error": {"type": type(exc).__name__, "field": exc.where, "message": str(exc)}})
        return exc.exit_code, report
    except NotExact as exc:
        report.update({"ok": False, "error": {"type": "NotExact", "message": str(exc)}})
        return EXIT_NOT_EXACT, report
    except GKError as exc:
        report.update({"ok": False, "error": {"type": type(exc).__name__, "message": str(exc)}})
        return EXIT_PROPERTY, report
    ok = all(c["ok"] for c in checks)
    report.update({"ok": ok, "checks": checks, "result": result})
    return (EXIT_OK if ok else EXIT_PROPERTY), report


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, report = run(args)
    text = dump_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code:
        err = report.get("error", {}).get("message") or "one or more checks failed"
        print(f"gk: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

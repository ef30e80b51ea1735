"""Command-line entry point.

Every subcommand writes plain files (CSV with a header row, JSON with sorted
keys, DOT) plus ``manifest.json`` into the output directory, which defaults
to ``$BASILICA_OUT`` or ``./out``.  Exit status: 0 success, 1 invalid input,
2 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__
from .automata import AutomatonGroup, DefinitionError, PRESETS, UnknownGenerator, load_definition, preset
from .elements import BallTooLarge, ball, table_for
from .exact import ExactCapExceeded, exact_distribution, heat_kernel_report
from .nu import EXACT, MODES, NormCapExceeded, UPPER, nu, nu_ball
from .presentation import verify_relations
from .schreier import (BoundaryError, CycleConditionError, alpha, basilica_weights,
                       build_schreier, fixed_point, irreducible_cycles, k_example, mu_to_json, refine)
from .walk import escape_tail, estimate_speed, estimate_u
from ._parallel import default_workers

OUT_ENV = "BASILICA_OUT"


class ValidationError(ValueError):
    pass


class CapError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def sig12(x: float) -> float:
    return float(f"{x:.12g}")


def _fmt(x):
    return f"{x:.12g}" if isinstance(x, float) else x


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def _group(args) -> AutomatonGroup:
    if getattr(args, "k_example", None):
        return k_example(args.k_example)
    if getattr(args, "definition", None):
        try:
            return load_definition(args.definition)
        except OSError as e:
            raise ValidationError(f"cannot read definition file: {e}") from None
    return preset(args.preset)


def _require_basilica(args) -> None:
    if args.definition or args.k_example or args.preset != "basilica":
        raise ValidationError(f"{args.command} is only implemented for the Basilica group")


def _positive_r(r: float) -> float:
    if not (r > 0 and math.isfinite(r)):
        raise ValidationError("--r must be a positive finite number")
    return r


# -- subcommands -----------------------------------------------------------------------------


def cmd_simulate(args, out: Path) -> dict:
    _require_basilica(args)
    r = _positive_r(args.r)
    ladder = _int_list(args.n)
    if not ladder or min(ladder) < 1:
        raise ValidationError("--n needs positive step counts")
    summary = {}
    if args.what in ("speed", "both"):
        sp = estimate_speed(r, ladder, args.trials, args.seed, args.workers)
        write_csv(out / "speed.csv", ["n", "mean_nu_rate", "sem_nu_rate", "mean_free_rate"],
                  zip(sp.n, sp.mean_nu_rate, sp.sem_nu_rate, sp.mean_free_rate))
        summary["speed_decreasing"] = sp.decreasing
    if args.what in ("u", "both"):
        ut = estimate_u(r, ladder, args.trials, args.seed, args.mode, args.workers)
        write_csv(out / "u.csv", ["n", "u", "sem"], zip(ut.n, ut.u, ut.sem))
        summary["u_exponent"] = sig12(ut.exponent) if len(ladder) > 1 else None
    return summary


def cmd_nu(args, out: Path) -> dict:
    g = _group(args)
    try:
        v = nu(args.word, g, args.mode, args.radius_cap)
    except NormCapExceeded as e:
        raise CapError(str(e)) from None
    res = {"word": args.word, "value": v.value, "mode": v.mode}
    write_json(out / "nu.json", res)
    return res


def cmd_ball(args, out: Path) -> dict:
    g = _group(args)
    if args.n < 0:
        raise ValidationError("--n must be >= 0")
    if args.n > args.max_radius:
        raise CapError(f"radius {args.n} is above --max-radius {args.max_radius}")
    if args.kind == "word":
        t = table_for(g)
        words = ball(g, args.n)
        rows = [(w, t.distance(t.intern(w))) for w in words]
    else:
        rows = list(nu_ball(g, args.n).items())
    write_csv(out / "ball.csv", ["word", "norm"], rows)
    return {"size": len(rows), "kind": args.kind, "radius": args.n}


def cmd_exact_dist(args, out: Path) -> dict:
    _require_basilica(args)
    dist = exact_distribution(args.n, _positive_r(args.r), cap=args.cap)
    write_json(out / "exact_dist.json", {w or "1": sig12(p) for w, p in dist.items()})
    return {"support": len(dist), "total": sig12(sum(dist.values()))}


def cmd_heat_kernel(args, out: Path) -> dict:
    _require_basilica(args)
    if args.n_cap > args.cap:
        raise CapError(f"--n-cap {args.n_cap} is above the cap {args.cap}")
    rep = heat_kernel_report(_positive_r(args.r), args.n_cap)
    write_csv(out / "heat_kernel.csv", ["n", "p_group", "p_free"],
              zip([2 * n for n in rep.n], rep.p_group, rep.p_free))
    res = {"slope_vs_n_2_3": sig12(rep.slope), "intercept": sig12(rep.intercept),
           "nonincreasing": rep.nonincreasing}
    write_json(out / "heat_kernel_fit.json", res)
    return res


def cmd_escape_tail(args, out: Path) -> dict:
    _require_basilica(args)
    tab = escape_tail(_positive_r(args.r), args.n, _float_list(args.a), args.trials,
                      args.seed, args.workers)
    write_csv(out / "escape_tail.csv", ["a", "tail"], zip(tab.a, tab.tail))
    res = {"c_fit": sig12(tab.c_fit), "nonincreasing": tab.nonincreasing, "n": tab.n}
    write_json(out / "escape_tail.json", res)
    return res


def cmd_schreier(args, out: Path) -> dict:
    g = _group(args)
    if args.n > args.max_level:
        raise CapError(f"level {args.n} is above --max-level {args.max_level}")
    sg = build_schreier(g, args.n)
    (out / "schreier.dot").write_text(sg.to_dot())
    (out / "schreier.csv").write_text(sg.to_csv())
    return {"vertices": len(sg.vertices), "connected": sg.is_connected()}


def cmd_cycles(args, out: Path) -> dict:
    g = _group(args)
    gens = args.subset.split(",") if args.subset else None
    try:
        rep = irreducible_cycles(g, args.base, args.length_cap, gens)
    except DefinitionError as e:
        raise ValidationError(str(e)) from None
    (out / "cycles.csv").write_text(rep.to_csv())
    res = {"base": rep.base, "length_cap": rep.length_cap, "generators": list(rep.generators),
           "verdict": rep.verdict, "cycle_condition_up_to_cap": rep.cycle_condition}
    write_json(out / "cycles.json", res)
    return res


def _mu(args, g: AutomatonGroup):
    if getattr(args, "mu", None):
        vals = _float_list(args.mu)
        if len(vals) != len(g.generators):
            raise ValidationError(f"--mu needs {len(g.generators)} weights")
        return dict(zip(g.generators, vals))
    if getattr(args, "r", None) is not None and len(g.generators) == 2:
        return basilica_weights(_positive_r(args.r))
    return None


def cmd_refine(args, out: Path) -> dict:
    g = _group(args)
    res = refine(g, _mu(args, g), args.backend, args.base, args.samples, args.seed,
                 args.state_cap, args.workers)
    doc = {"mu_prime": mu_to_json(res.mu_prime), "E_tau": sig12(res.E_tau), "backend": res.backend}
    if res.backend == "monte_carlo":
        doc.update(samples=res.samples, se_mu=mu_to_json(res.se_mu), se_tau=sig12(res.se_tau))
    else:
        doc["states"] = res.n_states
    write_json(out / "refine.json", doc)
    return doc


def cmd_fixed_point(args, out: Path) -> dict:
    g = _group(args)
    mu0 = dict(zip(g.generators, _float_list(args.mu0))) if args.mu0 else None
    fp = fixed_point(g, mu0, args.tol, args.max_iter)
    a = alpha(g, fp.mu)
    doc = {"mu": mu_to_json(fp.mu), "E_tau": sig12(fp.E_tau), "alpha": sig12(a.alpha),
           "iterations": fp.iterations, "alpha_boundary": a.boundary}
    write_json(out / "fixed_point.json", doc)
    return doc


def cmd_alpha(args, out: Path) -> dict:
    g = _group(args)
    mu = _mu(args, g)
    a = alpha(g, mu)
    doc = {"alpha": sig12(a.alpha), "E_tau": sig12(a.E_tau), "claim": a.claim,
           "boundary": a.boundary}
    write_json(out / "alpha.json", doc)
    return doc


def cmd_relations(args, out: Path) -> dict:
    _require_basilica(args)
    rep = verify_relations(args.max_n)
    doc = rep.to_json()
    write_json(out / "relations.json", doc)
    if not rep.all_pass:
        raise AssertionError("a relator failed to be trivial")
    return {"all_pass": rep.all_pass}


def cmd_report(args, out: Path) -> dict:
    from .acceptance import run_all

    results = run_all(args.only and _int_list(args.only), workers=args.workers)
    lines = [r.line() for r in results]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    doc = {str(r.number): {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results}
    write_json(out / "report.json", doc)
    return {"passed": sum(r.passed for r in results), "total": len(results)}


COMMANDS = {
    "simulate": cmd_simulate, "nu": cmd_nu, "ball": cmd_ball, "exact-dist": cmd_exact_dist,
    "heat-kernel": cmd_heat_kernel, "escape-tail": cmd_escape_tail, "schreier": cmd_schreier,
    "cycles": cmd_cycles, "refine": cmd_refine, "fixed-point": cmd_fixed_point,
    "alpha": cmd_alpha, "relations": cmd_relations, "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--preset", default="basilica", choices=sorted(PRESETS))
    common.add_argument("--definition", help="automaton definition file")
    common.add_argument("--k-example", type=int, help="use the k-generator example group")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: available CPUs)")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")

    p = _Parser(prog="basilica", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo speed and u_r(n)")
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--n", default="1024,4096,16384", help="step count or comma-separated ladder")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--mode", choices=MODES, default=UPPER)
    s.add_argument("--what", choices=("speed", "u", "both"), default="speed")

    s = sub.add_parser("nu", parents=[common], help="fractal norm of a word")
    s.add_argument("--word", required=True)
    s.add_argument("--mode", choices=MODES, default=EXACT)
    s.add_argument("--radius-cap", type=int, default=12)

    s = sub.add_parser("ball", parents=[common], help="word ball or nu ball")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kind", choices=("word", "nu"), default="word")
    s.add_argument("--max-radius", type=int, default=12)

    s = sub.add_parser("exact-dist", parents=[common], help="exact law of Z_n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--cap", type=int, default=12)

    s = sub.add_parser("heat-kernel", parents=[common], help="exact return probabilities")
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--n-cap", type=int, default=5)
    s.add_argument("--cap", type=int, default=7)

    s = sub.add_parser("escape-tail", parents=[common], help="tail of max |X_i| over n^(5/6)")
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--n", type=int, default=4096)
    s.add_argument("--a", default="1,2,3,4,5,6,7,8")
    s.add_argument("--trials", type=int, default=200)

    s = sub.add_parser("schreier", parents=[common], help="level-n Schreier graph")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--max-level", type=int, default=14)

    s = sub.add_parser("cycles", parents=[common], help="irreducible cycle labels")
    s.add_argument("--base", type=int, default=None)
    s.add_argument("--length-cap", type=int, default=8)
    s.add_argument("--subset", help="comma-separated generator subset")

    for name, helptext in (("refine", "one step of mu -> mu'"), ("alpha", "exponent alpha")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--mu", help="comma-separated generator weights")
        s.add_argument("--r", type=float, default=None, help="Basilica step weights (1,1,r,r)")
        if name == "refine":
            s.add_argument("--backend", choices=("exact", "monte_carlo"), default="exact")
            s.add_argument("--base", type=int, default=None)
            s.add_argument("--samples", type=int, default=100_000)
            s.add_argument("--state-cap", type=int, default=10_000)

    s = sub.add_parser("fixed-point", parents=[common], help="fixed point of the refinement")
    s.add_argument("--mu0", help="comma-separated starting weights")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--max-iter", type=int, default=10_000)

    s = sub.add_parser("relations", parents=[common], help="check presentation relators")
    s.add_argument("--max-n", type=int, default=6)

    s = sub.add_parser("report", parents=[common], help="run the acceptance checks")
    s.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}


def main(argv=None) -> int:
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if args.workers is None:
            args.workers = default_workers()
        if args.workers < 1:
            raise ValidationError("--workers must be >= 1")
        if args.seed < 0:
            raise ValidationError("--seed must be >= 0")
        out = Path(args.out or os.environ.get(OUT_ENV) or "out")
        out.mkdir(parents=True, exist_ok=True)
        summary = COMMANDS[args.command](args, out)
        config = _config(args)
        config.pop("workers")  # artifacts do not depend on it
        write_json(out / "manifest.json", {
            "seed": args.seed, "config": config, "version": __version__,
            "wall_time": round(time.perf_counter() - t0, 6)})
        if args.command != "report":
            print(json.dumps(summary, sort_keys=True))
        return 0
    except (ValidationError, DefinitionError, UnknownGenerator, BoundaryError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (CapError, BallTooLarge, NormCapExceeded, ExactCapExceeded, CycleConditionError) as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Numbered end-to-end checks shared by the test suite and ``basilica report``.

Each check returns a :class:`Criterion`; none of them raise on a failed
expectation, so one run always yields the full table.
"""

from __future__ import annotations

import filecmp
import json
import math
import random
import tempfile
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .automata import basilica
from .elements import table_for
from .exact import heat_kernel_report, iter_distributions, varopoulos_carne_check
from .nu import EXACT, UPPER, binary_subtrees, exact_nu_on_ball, nu, nu_ball, nu_subtree
from .presentation import verify_relations
from .schreier import (alpha, basilica_weights, build_schreier, closed_form_fixed_point,
                       fixed_point, irreducible_cycles, k_example, normalise,
                       product_invariance_check, refine)
from .walk import (escape_tail, estimate_speed, estimate_u, f, induced_law_test, project, run,
                   stopping_rates, t_circ)
from .words import free_reduce, inverse, random_word

ROOT2 = math.sqrt(2)


@dataclass
class Criterion:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.name} | {self.detail}"


def _timed(number: int, name: str, fn, budget: float | None = None) -> Criterion:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        ok = False
        detail += f"; over the {budget:.0f} s budget"
    return Criterion(number, name, bool(ok), detail, dt)


# -- 1 ---------------------------------------------------------------------------------------


def closed_forms():
    errs = [abs(f(1) - 0.375), abs(t_circ(1) - 8 / 3)]
    errs += [abs(f(r) * f(2 / r) - 0.125) for r in (0.5, 1.0, ROOT2, 3.0)]
    worst = max(errs)
    return worst <= 1e-12, f"max error {worst:.1e}"


# -- 2 ---------------------------------------------------------------------------------------


def induced_law(N: int = 100_000, seed: int = 1):
    parts, ok = [], True
    for r in (1.0, 2.0, ROOT2):
        for which in ("X", "Y"):
            res = induced_law_test(r, N, seed, which)
            ok &= res.passed
            parts.append(f"r={r:.3g}/{which} max|z|={max(abs(z) for z in res.z_scores.values()):.2f}")
    return ok, ", ".join(parts)


# -- 3 ---------------------------------------------------------------------------------------


def stopping_time_rates(m: int = 100_000, seed: int = 1):
    parts, ok = [], True
    for r in (1.0, ROOT2):
        s, t = stopping_rates(r, m, seed)
        rel = max(abs(s - f(r)), abs(t - f(r))) / f(r)
        ok &= rel <= 0.01
        parts.append(f"r={r:.3g}: sigma {s:.5f}, tau {t:.5f}, f {f(r):.5f}")
    return ok, "; ".join(parts)


# -- 4 ---------------------------------------------------------------------------------------


def relators():
    rep = verify_relations(6)
    lengths = [row.free_length for row in rep.rows]
    return rep.all_pass, f"lengths {lengths}, spot checks {rep.extra}"


# -- 5 ---------------------------------------------------------------------------------------


def nu_properties(random_words: int = 10_000, seed: int = 5):
    g = basilica()
    t = table_for(g)
    t.extend_ball(10)
    nv = exact_nu_on_ball(g, 10)
    ids5 = t.ball_ids(5)
    fails = []
    for i in ids5:
        v = nv[i]
        c0, c1 = t.children(i)
        if nv[t.inverse_id(i)] != v:
            fails.append("symmetry")
        if not nv[c0] + nv[c1] <= v <= nv[c0] + nv[c1] + 1:
            fails.append("sandwich")
        if v > t.distance(i) or (v == 0) != (i == t.identity):
            fails.append("norm bound / zero")
        for j in ids5:
            k = i
            for x in t.rep(j):
                k = t.mul_letter(k, x)
            if nv[k] > v + nv[j]:
                fails.append("triangle")
    trees = binary_subtrees(6)
    for i in ids5:
        w = t.rep(i)
        if min(nu_subtree(w, s, g) for s in trees) != nv[i]:
            fails.append("subtree oracle")

    rng = random.Random(seed)
    gens = g.generators
    words = [random_word(gens, 30, rng) for _ in range(random_words)]
    vals = [nu(w, g, UPPER).value for w in words]
    for k, w in enumerate(words):
        v = vals[k]
        h = words[(k + 1) % len(words)]
        s0, s1 = (nu(s, g, UPPER).value for s in g.sections(w))
        if v > len(free_reduce(w)):
            fails.append("upper: norm bound")
        if nu(inverse(w), g, UPPER).value != v:
            fails.append("upper: symmetry")
        if not s0 + s1 <= v <= s0 + s1 + 1:
            fails.append("upper: sandwich")
        if nu(w + h, g, UPPER).value > v + vals[(k + 1) % len(words)]:
            fails.append("upper: triangle")
        if (v == 0) != (free_reduce(w) == "") or (v == 0 and not g.is_trivial(w)):
            fails.append("upper: zero")
        if g.is_trivial(w) and nu(w, g, EXACT).value != 0:
            fails.append("exact: trivial word with positive nu")
    sizes = [len(nu_ball(g, n)) for n in range(5)]
    if any(s > 40 ** n for n, s in enumerate(sizes)):
        fails.append("ball growth")
    detail = f"{len(ids5)} ball elements, {random_words} random words, nu-ball sizes {sizes}"
    if fails:
        detail += f"; failures: {sorted(set(fails))}"
    return not fails, detail


# -- 6 ---------------------------------------------------------------------------------------


def exact_returns():
    g = basilica()
    t = table_for(g)
    fails = []
    totals = []
    p2 = None
    for n, dist in enumerate(iter_distributions(1.0, g)):
        totals.append(abs(sum(dist.values()) - 1))
        if n == 2:
            p2 = dist.get(t.identity, 0.0)
        if n == 10:
            break
    if abs(p2 - 0.25) > 1e-12:
        fails.append("P(Z_2=1)")
    if max(totals) > 1e-12:
        fails.append("normalisation")
    hk = heat_kernel_report(1.0, 5)
    if not all(pg >= pf for pg, pf in zip(hk.p_group, hk.p_free)):
        fails.append("group vs free")
    vc = varopoulos_carne_check(1.0, 8)
    if not all(row.passed for row in vc):
        fails.append("Varopoulos-Carne")
    detail = (f"P(Z_2=1)={p2}, max |sum-1|={max(totals):.1e}, "
              f"P_G={[round(p, 6) for p in hk.p_group]} vs P_F={[round(p, 6) for p in hk.p_free]}, "
              f"VC worst ratio {max(r.worst_ratio for r in vc):.3g}")
    if fails:
        detail += f"; failures: {fails}"
    return not fails, detail


# -- 7 ---------------------------------------------------------------------------------------


def scaling_fits(seed: int = 7, u_trials: int = 200, speed_trials: int = 50,
                 tail_trials: int = 200, workers: int | None = 1):
    u = estimate_u(1.0, [2 ** k for k in range(8, 15)], u_trials, seed, UPPER, workers)
    sp = estimate_speed(1.0, [2 ** 10, 2 ** 12, 2 ** 14, 2 ** 16], speed_trials, seed, workers)
    tail = escape_tail(1.0, 2 ** 12, list(range(1, 9)), tail_trials, seed, workers)
    a_tail = [a * p for a, p in zip(tail.a, tail.tail)]
    ok_u = 0.55 <= u.exponent <= 0.85
    ok_tail = tail.nonincreasing and max(a_tail) <= 1.0
    detail = (f"u exponent {u.exponent:.3f}; nu/n {[round(x, 4) for x in sp.mean_nu_rate]}; "
              f"tail {tail.tail}, max a*tail {max(a_tail):.3g}")
    return ok_u and sp.decreasing and ok_tail, detail


# -- 8 ---------------------------------------------------------------------------------------


def generalization(samples: int = 100_000, seed: int = 8):
    fails, parts = [], []
    rng = np.random.default_rng(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for k in (1, 2, 3, 4):
            g = k_example(k)
            fp = fixed_point(g)
            target = closed_form_fixed_point(k)
            if max(abs(fp.mu[x] - target[x]) for x in g.generators) > 1e-6:
                fails.append(f"k={k} fixed point")
            a = alpha(g, fp.mu)
            if abs(a.E_tau - 2 ** (1 + 1 / k)) > 1e-6 or abs(a.alpha - k / (k + 1)) > 1e-6:
                fails.append(f"k={k} E_tau/alpha")
            mu0 = normalise(list(rng.dirichlet(np.ones(k))), g)
            pc = product_invariance_check(k, mu0)
            if abs(pc.product - pc.expected) > 1e-6:
                fails.append(f"k={k} product")
            parts.append(f"k={k}: E_tau {a.E_tau:.6f}, alpha {a.alpha:.6f}, product {pc.product:.6f}")
    b = basilica()
    fb = fixed_point(b)
    ratio = fb.mu["b"] / fb.mu["a"]
    ab = alpha(b, fb.mu)
    if abs(ratio - ROOT2) > 1e-6 or abs(ab.alpha - 2 / 3) > 1e-6:
        fails.append("Basilica fixed point")
    if abs(refine(b, basilica_weights(1.0)).E_tau - 8 / 3) > 1e-12:
        fails.append("Basilica E_tau(r=1)")
    parts.append(f"Basilica ratio {ratio:.6f}, alpha {ab.alpha:.6f}")
    cases = [(b, basilica_weights(1.0)), (b, basilica_weights(ROOT2))]
    cases += [(k_example(k), None) for k in (1, 2, 3, 4)]
    worst = 0.0
    for g, mu in cases:
        ex = refine(g, mu, "exact")
        mc = refine(g, mu, "monte_carlo", samples=samples, seed=seed)
        zs = [abs(mc.E_tau - ex.E_tau) / mc.se_tau]
        zs += [abs(mc.mu_prime[x] - ex.mu_prime[x]) / mc.se_mu[x]
               for x in g.generators if mc.se_mu[x] > 0]
        worst = max(worst, *zs)
    if worst > 3:
        fails.append("Monte Carlo vs exact")
    parts.append(f"max |z| exact vs Monte Carlo {worst:.2f}")
    detail = "; ".join(parts) + (f"; failures: {fails}" if fails else "")
    return not fails, detail


# -- 9 ---------------------------------------------------------------------------------------


def structural(cases: int = 1000, seed: int = 9):
    g = basilica()
    t = table_for(g)
    rng = random.Random(seed)
    gens = g.generators
    fails = []
    for _ in range(cases):
        u, v = random_word(gens, 20, rng), random_word(gens, 20, rng)
        x = "".join(rng.choice("01") for _ in range(rng.randint(1, 8)))
        if g.act(u + v, x) != g.act(v, g.act(u, x)):
            fails.append("action homomorphism")
        uv = g.sections(u + v)
        su, sv = g.sections(u), g.sections(v)
        pu = g.root_perm(u)
        if any(not t.equal(uv[i], su[i] + sv[pu[i]]) for i in range(2)):
            fails.append("section law")
        if g.act(inverse(u), g.act(u, x)) != x or not g.is_trivial(u + inverse(u)):
            fails.append("inverse law")
    traj = run(1 << 12, 1.0, seed)
    word = traj.word
    for k, snap in traj.snapshots.items():
        if project(word[:k]) != snap and project(free_reduce(word[:k])) != snap:
            fails.append(f"step vs recompute at {k}")
    for n in range(11):
        if not build_schreier(g, n).is_connected():
            fails.append(f"Schreier level {n}")
    cyc = irreducible_cycles(g, None, 8)
    if not cyc.cycle_condition:
        fails.append("cycle labels")
    detail = (f"{cases} random cases, {len(traj.snapshots)} checkpoints, levels 0..10, "
              f"cycle labels {sorted(set(cyc.classified.values()))} at base {cyc.base}")
    if fails:
        detail += f"; failures: {sorted(set(fails))}"
    return not fails, detail


# -- 10 --------------------------------------------------------------------------------------

QUICK_RUNS = [
    ["simulate", "--n", "512,1024", "--trials", "8", "--what", "both", "--seed", "3"],
    ["nu", "--word", "abAB"],
    ["ball", "--n", "3", "--kind", "nu"],
    ["exact-dist", "--n", "4"],
    ["heat-kernel", "--n-cap", "3"],
    ["escape-tail", "--n", "512", "--trials", "8", "--seed", "3"],
    ["schreier", "--n", "4"],
    ["cycles", "--length-cap", "6"],
    ["refine", "--backend", "monte_carlo", "--samples", "30000", "--seed", "3"],
    ["fixed-point", "--k-example", "3"],
    ["alpha", "--k-example", "2"],
    ["relations", "--max-n", "4"],
    ["report", "--only", "1"],
]


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k not in ("wall_time", "millis")}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def same_artifacts(d1: Path, d2: Path) -> bool:
    n1 = sorted(p.name for p in d1.iterdir())
    if n1 != sorted(p.name for p in d2.iterdir()):
        return False
    for name in n1:
        a, b = d1 / name, d2 / name
        if name.endswith(".json"):
            if _strip_timing(json.loads(a.read_text())) != _strip_timing(json.loads(b.read_text())):
                return False
        elif not filecmp.cmp(a, b, shallow=False):
            return False
    return True


def reproducibility(runs=None):
    import contextlib
    import io

    from .cli import main

    runs = runs or QUICK_RUNS
    bad = []
    with tempfile.TemporaryDirectory() as tmp:
        for argv in runs:
            dirs = []
            for tag, workers in (("a", 1), ("b", 1), ("c", 4)):
                d = Path(tmp) / f"{argv[0]}_{tag}"
                with contextlib.redirect_stdout(io.StringIO()), warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    code = main(argv + ["--out", str(d), "--workers", str(workers)])
                if code != 0:
                    bad.append(f"{argv[0]} exit {code}")
                dirs.append(d)
            if not (same_artifacts(dirs[0], dirs[1]) and same_artifacts(dirs[0], dirs[2])):
                bad.append(argv[0])
    detail = f"{len(runs)} subcommands x (2 runs, workers 1 and 4)"
    if bad:
        detail += f"; differing: {bad}"
    return not bad, detail


# -- driver ----------------------------------------------------------------------------------

CRITERIA = {
    1: ("closed forms", closed_forms, None),
    2: ("induced walk law", induced_law, 30),
    3: ("stopping-time rates", stopping_time_rates, 60),
    4: ("presentation relators", relators, 60),
    5: ("nu properties", nu_properties, None),
    6: ("exact return probabilities", exact_returns, None),
    7: ("scaling fits", scaling_fits, 600),
    8: ("generalization machinery", generalization, None),
    9: ("structural laws", structural, None),
    10: ("reproducibility", reproducibility, None),
}


def check(number: int, **kwargs) -> Criterion:
    name, fn, budget = CRITERIA[number]
    return _timed(number, name, lambda: fn(**kwargs), budget)


def run_all(only=None, workers: int | None = 1) -> list[Criterion]:
    out = []
    for n in sorted(only or CRITERIA):
        kwargs = {"workers": workers} if n == 7 else {}
        out.append(check(n, **kwargs))
    return out

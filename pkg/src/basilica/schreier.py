"""Schreier graphs, irreducible cycles and the step-law refinement map.

The refinement ``mu -> mu'`` runs the random walk on the group (generator
``g`` chosen with probability ``mu[g]``, then a fair sign) and watches its
image on level 1 starting from a base vertex.  Writing ``L_n`` for the
section of ``Z_n`` at the base, the walk stops at the first ``n > 0`` where
``Z_n`` fixes the base and ``L_n`` is a nontrivial group element; ``mu'`` is
the law of that label folded onto unsigned generators, and ``E tau`` its
mean stopping time.  Returns to the base with trivial label restart the
excursion, so the exact backend is an absorbing Markov chain on
``(vertex, label)`` pairs, which is finite exactly when the labels stay in a
finite set.

The cycle-label condition asks that the labels of irreducible cycles at the
base (closed walks in the level-1 Schreier graph that meet the base only at
their ends) are exactly the generators and the identity, up to inversion.
Enumeration can only confirm it up to a length cap.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .automata import AutomatonGroup, DefinitionError, basilica
from .elements import table_for
from ._parallel import pmap
from .rng import stream


class CycleConditionError(RuntimeError):
    """Cycle labels left ``{1} u S u S^-1`` or the label chain overflowed its cap."""


class BoundaryError(RuntimeError):
    """Fixed-point iteration left the interior of the simplex or did not settle."""


# -- examples ---------------------------------------------------------------------------


def k_example(k: int) -> AutomatonGroup:
    """``a_i = (1, a_{i+1})`` for ``i < k`` and ``a_k = (1, a_1) eps``.

    Generators are named ``a, b, c, ...`` so ``k_example(2)`` has literally the
    Basilica table and ``k_example(1)`` is the binary odometer.
    """
    if not 1 <= k <= 26:
        raise ValueError("k must be between 1 and 26")
    names = [chr(ord("a") + i) for i in range(k)]
    perms = tuple((0, 1) for _ in range(k - 1)) + ((1, 0),)
    secs = tuple(("", names[(i + 1) % k]) for i in range(k))
    return AutomatonGroup(2, tuple(names), perms, secs, name=f"k_example_{k}")


# -- Schreier graphs ----------------------------------------------------------------------


@dataclass
class SchreierGraph:
    """Action graph on level ``n``; edge ``(v, g)`` goes to ``v^g`` and is
    labelled by the section ``g[v]`` (``""`` for the identity)."""

    level: int
    arity: int
    generators: tuple[str, ...]
    vertices: list[str]
    target: dict[tuple[str, str], str]
    label: dict[tuple[str, str], str]

    def neighbours(self, v: str) -> list[str]:
        out = [self.target[(v, g)] for g in self.generators]
        out += [u for u in self.vertices for g in self.generators if self.target[(u, g)] == v]
        return out

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        undirected: dict[str, set[str]] = {v: set() for v in self.vertices}
        for (v, _), u in self.target.items():
            undirected[v].add(u)
            undirected[u].add(v)
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for u in undirected[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == len(self.vertices)

    def to_dot(self) -> str:
        lines = [f'digraph "schreier_level_{self.level}" {{']
        for v in self.vertices:
            lines.append(f'  "{v or "root"}";')
        for v in self.vertices:
            for g in self.generators:
                u = self.target[(v, g)]
                lab = self.label[(v, g)] or "1"
                lines.append(f'  "{v or "root"}" -> "{u or "root"}" [label="{g}/{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "generator", "target", "section"])
        for v in self.vertices:
            for g in self.generators:
                w.writerow([v, g, self.target[(v, g)], self.label[(v, g)] or "1"])
        return buf.getvalue()


def level_vertices(arity: int, n: int) -> list[str]:
    out = [""]
    for _ in range(n):
        out = [v + str(c) for v in out for c in range(arity)]
    return out


def build_schreier(group: AutomatonGroup | None = None, n: int = 1) -> SchreierGraph:
    group = group or basilica()
    if n < 0:
        raise ValueError("level must be >= 0")
    verts = level_vertices(group.arity, n)
    target, label = {}, {}
    for v in verts:
        for g in group.generators:
            target[(v, g)] = group.act(g, v)
            label[(v, g)] = group.section_at(g, v)
    return SchreierGraph(n, group.arity, group.generators, verts, target, label)


# -- irreducible cycles -------------------------------------------------------------------


@dataclass
class CycleReport:
    base: int
    length_cap: int
    generators: tuple[str, ...]
    labels: list[str]            # one reduced word per distinct label element
    classified: dict[str, str]   # label word -> matching symbol in {1} u S u S^-1, or "other"
    cycle_condition: bool          # holds up to the length cap, never more

    @property
    def verdict(self) -> str:
        state = "holds" if self.cycle_condition else "fails"
        return f"cycle-label condition {state} up to cap L={self.length_cap}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "matches"])
        for lab in self.labels:
            w.writerow([lab or "1", self.classified[lab]])
        return buf.getvalue()


def _moves(group: AutomatonGroup, gens) -> list[str]:
    return [x for g in gens for x in (g, g.upper())]


def irreducible_cycles(group: AutomatonGroup | None = None, base: int | None = None,
                       length_cap: int = 8, generators=None) -> CycleReport:
    """Labels of irreducible level-1 cycles at ``base`` up to ``length_cap``.

    A cycle may use edges backwards (a backward step along ``(u, g)`` has
    label ``g[u]^-1``, which is the section of ``g^-1``).  Labels are
    compared as group elements.  ``generators`` restricts the graph to a
    subset ``S'`` of the generators, for the proper-subset check.
    """
    group = group or basilica()
    if length_cap < 1:
        raise ValueError("length_cap must be >= 1")
    gens = tuple(generators) if generators else group.generators
    for g in gens:
        if g not in group.generators:
            raise DefinitionError(f"unknown generator {g!r}")
    if base is None:
        base = default_base(group)
    t = table_for(group)
    moves = _moves(group, gens)
    found: set[int] = set()
    frontier = {(base, t.identity)}
    for _ in range(length_cap):
        nxt = set()
        for v, lab in frontier:
            for x in moves:
                u = group.letter_perm(x)[v]
                s = group.letter_sections(x)[v]
                nl = t.mul_letter(lab, s) if s else lab
                if u == base:
                    found.add(nl)
                else:
                    nxt.add((u, nl))
        frontier = nxt
    symbols = {t.identity: "1"}
    for g in gens:
        symbols.setdefault(t.intern(g), g)
        symbols.setdefault(t.intern(g.upper()), g.upper())
    labels = sorted((t.rep(i) for i in found), key=lambda w: (len(w), w))
    classified = {t.rep(i): symbols.get(i, "other") for i in found}
    folded = {classified[w].lower() for w in labels}
    condition = "other" not in folded and folded == set(gens) | {"1"}
    return CycleReport(base, length_cap, gens, labels, classified, condition)


def default_base(group: AutomatonGroup, cap: int = 4) -> int:
    """Smallest level-1 vertex whose short cycles satisfy the cycle-label condition."""
    for v in range(group.arity):
        if irreducible_cycles(group, v, cap).cycle_condition:
            return v
    return 0


# -- generator distributions ------------------------------------------------------------


def normalise(mu: Mapping[str, float] | None, group: AutomatonGroup) -> dict[str, float]:
    if mu is None:
        return {g: 1 / len(group.generators) for g in group.generators}
    if not isinstance(mu, Mapping):
        mu = dict(zip(group.generators, mu))
    if set(mu) != set(group.generators):
        raise ValueError(f"distribution must cover exactly {group.generators}")
    vals = np.array([float(mu[g]) for g in group.generators])
    if (vals < 0).any() or not np.isfinite(vals).all() or vals.sum() <= 0:
        raise ValueError("weights must be non-negative with positive total")
    vals = vals / vals.sum()
    return dict(zip(group.generators, vals.tolist()))


def is_interior(mu: Mapping[str, float]) -> bool:
    return all(p > 0 for p in mu.values())


def basilica_weights(r: float) -> dict[str, float]:
    """Generator law for step weights ``(1, 1, r, r)``."""
    return {"a": 1 / (1 + r), "b": r / (1 + r)}


@dataclass
class RefinementResult:
    mu_prime: dict[str, float]
    E_tau: float
    backend: str
    n_states: int = 0
    samples: int = 0
    se_mu: dict[str, float] = field(default_factory=dict)
    se_tau: float = 0.0


def refine(group: AutomatonGroup | None = None, mu=None, backend: str = "exact",
           base: int | None = None, samples: int = 100_000, seed: int = 0,
           state_cap: int = 10_000, workers: int = 1) -> RefinementResult:
    """One application of ``mu -> mu'`` and the mean stopping time ``E tau``."""
    group = group or basilica()
    mu = normalise(mu, group)
    if not is_interior(mu):
        raise ValueError("mu must give positive weight to every generator")
    if base is None:
        base = default_base(group)
    if backend == "exact":
        return _refine_exact(group, mu, base, state_cap)
    if backend == "monte_carlo":
        return _refine_mc(group, mu, base, samples, seed, workers)
    raise ValueError(f"unknown backend {backend!r}")


def _step_table(group, mu):
    return [(x, mu[x.lower()] / 2) for x in group.letters]


def _label_symbol(t, group, lab_id) -> str:
    for g in group.generators:
        if t.intern(g) == lab_id or t.intern(g.upper()) == lab_id:
            return g
    raise CycleConditionError(
        f"cycle label {t.rep(lab_id)!r} is not a generator; cycle-label condition unverified")


def _refine_exact(group, mu, base, state_cap) -> RefinementResult:
    t = table_for(group)
    steps = _step_table(group, mu)
    start = (base, t.identity)
    index = {start: 0}
    order = [start]
    rows, cols, vals = [], [], []
    absorb: dict[str, list] = {g: [] for g in group.generators}
    k = 0
    while k < len(order):
        v, lab = order[k]
        for x, q in steps:
            u = group.letter_perm(x)[v]
            s = group.letter_sections(x)[v]
            nl = t.mul_letter(lab, s) if s else lab
            if u == base and nl != t.identity:
                absorb[_label_symbol(t, group, nl)].append((k, q))
                continue
            nxt = start if u == base else (u, nl)
            j = index.get(nxt)
            if j is None:
                if len(order) >= state_cap:
                    raise CycleConditionError(
                        f"label chain exceeded {state_cap} states; cycle-label condition unverified")
                j = index[nxt] = len(order)
                order.append(nxt)
            rows.append(k)
            cols.append(j)
            vals.append(q)
        k += 1
    n = len(order)
    Q = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    A = (sparse.identity(n, format="csr") - Q).tocsc()
    times = np.atleast_1d(spsolve(A, np.ones(n)))
    mu_prime = {}
    for g, hits in absorb.items():
        rhs = np.zeros(n)
        for i, q in hits:
            rhs[i] += q
        mu_prime[g] = float(np.atleast_1d(spsolve(A, rhs))[0]) if hits else 0.0
    return RefinementResult(mu_prime, float(times[0]), "exact", n_states=n)


_MC_CHUNK = 10_000


def _mc_chunk(args):
    group, mu, base, seed, chunk, size = args
    t = table_for(group)
    steps = _step_table(group, mu)
    letters = [x for x, _ in steps]
    cum = np.cumsum([q for _, q in steps])
    cum[-1] = 1.0
    rng = stream(seed, chunk, purpose=5)
    perm = {x: group.letter_perm(x) for x in letters}
    secs = {x: group.letter_sections(x) for x in letters}
    symbol_cache: dict[int, str] = {}
    counts = {g: 0 for g in group.generators}
    lengths = np.empty(size)
    buf: list[int] = []
    for s_i in range(size):
        v, lab, n = base, t.identity, 0
        while True:
            if not buf:
                buf = np.searchsorted(cum, rng.random(4096), side="right").tolist()[::-1]
            x = letters[buf.pop()]
            n += 1
            sec = secs[x][v]
            v = perm[x][v]
            if sec:
                lab = t.mul_letter(lab, sec)
            if v == base and lab != t.identity:
                break
        sym = symbol_cache.get(lab)
        if sym is None:
            sym = symbol_cache[lab] = _label_symbol(t, group, lab)
        counts[sym] += 1
        lengths[s_i] = n
    return counts, lengths


def _refine_mc(group, mu, base, samples, seed, workers=1) -> RefinementResult:
    if samples <= 0:
        raise ValueError("samples must be positive")
    sizes = [min(_MC_CHUNK, samples - i) for i in range(0, samples, _MC_CHUNK)]
    parts = pmap(_mc_chunk, [(group, mu, base, seed, c, n) for c, n in enumerate(sizes)], workers)
    counts = {g: sum(p[0][g] for p in parts) for g in group.generators}
    lengths = np.concatenate([p[1] for p in parts])
    mu_prime = {g: c / samples for g, c in counts.items()}
    se = {g: math.sqrt(p * (1 - p) / samples) for g, p in mu_prime.items()}
    return RefinementResult(mu_prime, float(lengths.mean()), "monte_carlo", samples=samples,
                            se_mu=se, se_tau=float(lengths.std(ddof=1) / math.sqrt(samples)))


# -- fixed points and exponents ---------------------------------------------------------------


@dataclass
class FixedPointResult:
    mu: dict[str, float]
    E_tau: float
    iterations: int
    residual: float


def fixed_point(group: AutomatonGroup | None = None, mu0=None, tol: float = 1e-12,
                max_iter: int = 10_000, damping: float = 0.5, base: int | None = None
                ) -> FixedPointResult:
    """Fixed point of ``mu -> mu'`` by averaged iteration.

    Plain iteration need not converge: for the Basilica group the map sends
    the weight ratio ``r`` to ``2 / r`` and just oscillates.  The update
    ``mu <- (1 - damping) mu + damping mu'`` has the same fixed points and
    settles.  Stops when ``|mu' - mu|_1 < tol``.
    """
    group = group or basilica()
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    if base is None:
        base = default_base(group)
    gens = group.generators
    mu = normalise(mu0, group)
    for it in range(1, max_iter + 1):
        if not is_interior(mu):
            raise BoundaryError(f"iteration reached the boundary of the simplex at step {it}")
        res = refine(group, mu, "exact", base)
        resid = sum(abs(res.mu_prime[g] - mu[g]) for g in gens)
        if resid < tol:
            return FixedPointResult(res.mu_prime, res.E_tau, it, resid)
        mu = {g: (1 - damping) * mu[g] + damping * res.mu_prime[g] for g in gens}
    raise BoundaryError(f"no convergence within {max_iter} iterations")


def closed_form_fixed_point(k: int) -> dict[str, float]:
    """``(1, 2^(1/k), ..., 2^((k-1)/k))`` normalised."""
    w = np.array([2 ** (i / k) for i in range(k)])
    w /= w.sum()
    return dict(zip((chr(ord("a") + i) for i in range(k)), w.tolist()))


@dataclass
class AlphaResult:
    alpha: float
    E_tau: float
    claim: str
    boundary: bool


def alpha(group: AutomatonGroup | None = None, mu=None, base: int | None = None) -> AlphaResult:
    """``log(arity) / log E tau`` at the given (fixed-point) law.

    The heat-kernel statement attached to it needs ``alpha > 1/2``; at or
    below 1/2 a warning is raised and ``boundary`` is set.
    """
    group = group or basilica()
    if mu is None:
        mu = fixed_point(group, base=base).mu
    res = refine(group, mu, "exact", base)
    a = math.log(group.arity) / math.log(res.E_tau)
    boundary = a <= 0.5 + 1e-12
    if boundary:
        warnings.warn(f"alpha = {a:.6f} <= 1/2: the stopping-time large deviation argument "
                      "does not apply", RuntimeWarning, stacklevel=2)
        claim = "no heat kernel bound (alpha <= 1/2)"
    else:
        claim = f"P(Z_2n = 1) >= exp(-c n^{a:.6f})"
    return AlphaResult(a, res.E_tau, claim, boundary)


@dataclass
class ProductCheck:
    k: int
    E_taus: list[float]
    product: float
    expected: float


def product_invariance_check(k: int, mu0=None) -> ProductCheck:
    """Apply the refinement ``k`` times from ``mu0`` and multiply the mean
    stopping times; for the k-example the product is ``2^(k+1)``."""
    group = k_example(k)
    mu = normalise(mu0, group)
    taus = []
    for _ in range(k):
        res = refine(group, mu, "exact")
        taus.append(res.E_tau)
        mu = res.mu_prime
    return ProductCheck(k, taus, float(np.prod(taus)), 2.0 ** (k + 1))


def mu_to_json(mu: Mapping[str, float]) -> dict[str, float]:
    """Round to 12 significant digits for stable serialisation."""
    return {g: float(f"{p:.12g}") for g, p in sorted(mu.items())}

"""Exact step distributions by convolution, and what they say about the
heat kernel.

States are merged by element equality (canonical ids of the group's
``ElementTable``), so the distribution at time ``n`` lives on the group, not
on the free group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .automata import AutomatonGroup, basilica
from .elements import table_for
from .walk import LETTERS, StepDistribution
from .words import invert_letter


class ExactCapExceeded(RuntimeError):
    """Requested convolution length or state count is beyond the budget."""


def _weights(group: AutomatonGroup, r: float) -> list[tuple[str, float]]:
    if len(group.generators) == 2:
        p = StepDistribution(r).probs
        return [(x, float(q)) for x, q in zip(group.letters, p)]
    k = len(group.letters)
    return [(x, 1.0 / k) for x in group.letters]


def iter_distributions(r: float = 1.0, group: AutomatonGroup | None = None,
                       max_states: int = 2_000_000) -> Iterator[dict[int, float]]:
    """Yield the law of ``Z_0, Z_1, ...`` as ``{element id: probability}``."""
    group = group or basilica()
    t = table_for(group)
    steps = _weights(group, r)
    dist = {t.identity: 1.0}
    while True:
        yield dist
        nxt: dict[int, float] = {}
        mul = t.mul_letter
        for i, p in dist.items():
            for x, q in steps:
                j = mul(i, x)
                nxt[j] = nxt.get(j, 0.0) + p * q
        if len(nxt) > max_states:
            raise ExactCapExceeded(f"{len(nxt)} states exceed the budget of {max_states}")
        dist = nxt


def exact_distribution(n: int, r: float = 1.0, group: AutomatonGroup | None = None,
                       cap: int = 12, max_states: int = 2_000_000) -> dict[str, float]:
    """Law of ``Z_n`` keyed by the canonical word of each element."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise ExactCapExceeded(f"n={n} is above the cap {cap}")
    group = group or basilica()
    t = table_for(group)
    for k, dist in enumerate(iter_distributions(r, group, max_states)):
        if k == n:
            t.extend_ball(n)
            return {t.rep(i): p for i, p in sorted(dist.items(), key=lambda kv: (
                t.distance(kv[0]), t.rep(kv[0])))}
    raise AssertionError("unreachable")


def free_distributions(r: float = 1.0) -> Iterator[dict[str, float]]:
    """Law of the same walk on the free group (no merging)."""
    steps = list(zip(LETTERS, StepDistribution(r).probs.tolist()))
    dist = {"": 1.0}
    while True:
        yield dist
        nxt: dict[str, float] = {}
        for w, p in dist.items():
            for x, q in steps:
                v = w[:-1] if w and w[-1] == invert_letter(x) else w + x
                nxt[v] = nxt.get(v, 0.0) + p * q
        dist = nxt


def free_return_probability(k: int, r: float = 1.0) -> float:
    for i, dist in enumerate(free_distributions(r)):
        if i == k:
            return dist.get("", 0.0)
    raise AssertionError("unreachable")


@dataclass
class HeatKernelReport:
    r: float
    n: list[int]
    p_group: list[float]
    p_free: list[float]
    slope: float
    intercept: float

    @property
    def nonincreasing(self) -> bool:
        p = self.p_group
        return all(p[i + 1] <= p[i] * (1 + 1e-12) for i in range(len(p) - 1))


def heat_kernel_report(r: float = 1.0, n_cap: int = 5, group: AutomatonGroup | None = None
                       ) -> HeatKernelReport:
    """Exact ``P(Z_2n = 1)`` for ``n = 1..n_cap`` and a least-squares line of
    ``log P`` against ``n^(2/3)``.  The fit is descriptive only."""
    group = group or basilica()
    if n_cap < 1:
        raise ValueError("n_cap must be >= 1")
    t = table_for(group)
    pg = []
    gen = iter_distributions(r, group)
    for k, dist in enumerate(gen):
        if k % 2 == 0 and k > 0:
            pg.append(dist.get(t.identity, 0.0))
        if k == 2 * n_cap:
            break
    pf = []
    for k, dist in enumerate(free_distributions(r)):
        if k % 2 == 0 and k > 0:
            pf.append(dist.get("", 0.0))
        if k == 2 * n_cap:
            break
    ns = list(range(1, n_cap + 1))
    if n_cap >= 2:
        slope, icpt = np.polyfit(np.array(ns, float) ** (2 / 3), np.log(pg), 1)
    else:
        slope, icpt = float("nan"), float("nan")
    return HeatKernelReport(r, ns, pg, pf, float(slope), float(icpt))


@dataclass
class VCRow:
    m: int
    states: int
    worst_ratio: float
    passed: bool


def varopoulos_carne_check(r: float = 1.0, m_cap: int = 8, group: AutomatonGroup | None = None
                           ) -> list[VCRow]:
    """Check ``P(Z_m = g) <= 2 exp(-|g|^2 / (2m))`` on the whole support.

    ``|g|`` is the exact word norm (the support of ``Z_m`` lies in the ball
    of radius ``m``).  ``worst_ratio`` is the largest probability-to-bound
    ratio met; the row passes when it is at most 1.
    """
    group = group or basilica()
    t = table_for(group)
    t.extend_ball(m_cap)
    rows = []
    for m, dist in enumerate(iter_distributions(r, group)):
        if m > m_cap:
            break
        if m == 0:
            continue
        worst = 0.0
        for i, p in dist.items():
            d = t.distance(i)
            bound = 2 * math.exp(-d * d / (2 * m))
            worst = max(worst, p / bound)
        rows.append(VCRow(m, len(dist), worst, worst <= 1.0))
    return rows


def inverse_symmetry_defect(dist: dict[int, float], group: AutomatonGroup | None = None) -> float:
    """``max |P(g) - P(g^-1)|`` over the support."""
    t = table_for(group or basilica())
    return max((abs(p - dist.get(t.inverse_id(i), 0.0)) for i, p in dist.items()), default=0.0)

"""Relators ``sigma^n [a, a^b]`` of the Basilica group and their verification.

``sigma`` is the substitution ``a -> bb, b -> a`` (so ``A -> BB, B -> A``),
applied letterwise and then freely reduced.  Commutators are
``[x, y] = x^-1 y^-1 x y`` and conjugates ``x^y = y^-1 x y``.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

from .automata import AutomatonGroup, basilica
from .elements import table_for
from .words import commutator, conjugate, free_reduce, power

SIGMA = {"a": "bb", "A": "BB", "b": "a", "B": "A"}


def sigma_sub(word: str) -> str:
    return free_reduce("".join(SIGMA[x] for x in word))


def base_relator() -> str:
    return commutator("a", conjugate("a", "b"))


def relator(n: int) -> str:
    if n < 0:
        raise ValueError("n must be >= 0")
    w = base_relator()
    for _ in range(n):
        w = sigma_sub(w)
    return w


def odd_relator(m: int) -> str:
    """``[a, a^(b^(2m+1))]``, one of the relators the presentation can drop."""
    return commutator("a", conjugate("a", power("b", 2 * m + 1)))


@dataclass
class RelationRow:
    n: int
    free_length: int
    trivial: bool
    millis: float
    word: str = ""


@dataclass
class RelationsReport:
    rows: list[RelationRow]
    extra: dict[str, bool]   # spot checks keyed by a readable name

    @property
    def all_pass(self) -> bool:
        expected = {"[a,b]": False}
        return all(r.trivial for r in self.rows) and all(
            v == expected.get(k, True) for k, v in self.extra.items())

    def to_json(self) -> dict:
        return {"relators": [{k: v for k, v in asdict(r).items() if k != "word"} for r in self.rows],
                "spot_checks": self.extra, "all_pass": self.all_pass}


def _trivial(group: AutomatonGroup, word: str) -> bool:
    t = table_for(group)
    return t.intern(word) == t.identity


def verify_relations(max_n: int = 6, group: AutomatonGroup | None = None) -> RelationsReport:
    """Triviality of ``relator(n)`` for ``n <= max_n`` plus spot checks.

    Timings go into ``millis`` only; nothing else depends on the clock.
    """
    group = group or basilica()
    rows = []
    for n in range(max_n + 1):
        w = relator(n)
        t0 = time.perf_counter()
        ok = group.is_trivial(w)
        rows.append(RelationRow(n, len(w), ok, round(1000 * (time.perf_counter() - t0), 3), w))
    extra = {f"[a,a^(b^{2 * m + 1})]": group.is_trivial(odd_relator(m)) for m in range(3)}
    extra["[a,b]"] = group.is_trivial(commutator("a", "b"))
    return RelationsReport(rows, extra)

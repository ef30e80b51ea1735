"""The fractal norm nu on binary automaton groups.

For a finite binary subtree ``S`` (every vertex has 0 or 2 children) with
leaves ``dS`` and ``E = #dS - 1`` splits,

    nu_S(g) = E + sum_{v in dS} |g[v]|,        nu(g) = min_S nu_S(g),

and equivalently ``nu(g) = min(|g|, 1 + nu(g[0]) + nu(g[1]))``.  The
recursion is evaluated by value iteration from ``base(h) = |h|`` downwards on
the (finite) set of sections reachable from ``g``; this settles the mutual
recursions such as ``a -> b -> a`` that a naive recursive call would loop on,
and the iteration after ``k`` rounds is exactly the minimum over subtrees of
depth at most ``k``.

Two modes:

``exact``
    ``|h|`` is the true word norm, found by ball enumeration.
``upper_bound``
    ``|h|`` is replaced by the length of the reduced representative word,
    which gives a value ``>= nu``.  Cheap; used for all Monte Carlo work.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .automata import AutomatonGroup, basilica
from .elements import ElementTable, table_for
from .words import free_reduce

EXACT = "exact"
UPPER = "upper_bound"
MODES = (EXACT, UPPER)


class NormCapExceeded(RuntimeError):
    """An exact word norm was needed beyond the radius cap."""


class NuValue(NamedTuple):
    value: int
    mode: str


def _require_binary(group: AutomatonGroup) -> None:
    if group.arity != 2:
        raise ValueError("nu is only defined for binary trees")


def section_closure(group: AutomatonGroup, word: str) -> dict[str, tuple[str, str]]:
    """All reduced words reachable from ``word`` by taking sections."""
    w = group.check_word(word)
    out: dict[str, tuple[str, str]] = {}
    stack = [w]
    while stack:
        u = stack.pop()
        if u in out:
            continue
        secs = group.split(u)[1]
        out[u] = secs
        stack.extend(s for s in secs if s not in out)
    return out


def _fixed_point(closure: dict[str, tuple], base: dict[str, float]) -> dict[str, float]:
    val = dict(base)
    changed = True
    while changed:
        changed = False
        for h, (s0, s1) in closure.items():
            v = 1 + val[s0] + val[s1]
            if v < val[h]:
                val[h] = v
                changed = True
    return val


def nu(word: str, group: AutomatonGroup | None = None, mode: str = EXACT,
       radius_cap: int = 12) -> NuValue:
    """Fractal norm of the element represented by ``word``.

    Raises ``NormCapExceeded`` in exact mode when some reachable section has
    word norm above ``radius_cap``; retry with ``mode="upper_bound"``.
    """
    group = group or basilica()
    _require_binary(group)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    closure = section_closure(group, word)
    if mode == UPPER:
        base = {h: len(h) for h in closure}
    else:
        table = table_for(group)
        base = {}
        for h in closure:
            r = table.word_norm(h, radius_cap)
            if r is None:
                raise NormCapExceeded(f"|{h}| exceeds radius cap {radius_cap}")
            base[h] = r
    val = _fixed_point(closure, base)
    return NuValue(int(val[free_reduce(word)]), mode)


def nu_upper(word: str, group: AutomatonGroup | None = None) -> int:
    return nu(word, group, UPPER).value


def exact_nu_on_ball(group: AutomatonGroup, radius: int) -> dict[int, int]:
    """Exact nu for every element of the word ball of the given radius.

    Keys are element ids of the group's shared ``ElementTable``.  Sections of
    an element never have larger word norm, so the ball is closed under
    sections and one vectorised sweep settles all values at once.
    """
    _require_binary(group)
    t = table_for(group)
    ids = t.ball_ids(radius)
    pos = {i: k for k, i in enumerate(ids)}
    dist = np.array([t.distance(i) for i in ids], dtype=np.int64)
    c0 = np.array([pos[t.children(i)[0]] for i in ids], dtype=np.int64)
    c1 = np.array([pos[t.children(i)[1]] for i in ids], dtype=np.int64)
    val = dist.copy()
    while True:
        new = np.minimum(dist, 1 + val[c0] + val[c1])
        if np.array_equal(new, val):
            break
        val = new
    return dict(zip(ids, val.tolist()))


# -- subtrees -------------------------------------------------------------------


@dataclass(frozen=True)
class BinarySubtree:
    """Finite rooted subtree where every vertex has zero or two children.

    Stored by its set of internal (split) vertices; ``""`` is the root.
    """

    internal: frozenset[str]

    def __post_init__(self):
        for v in self.internal:
            if v and v[:-1] not in self.internal:
                raise ValueError(f"vertex {v!r} is split but its parent is not")
            if any(c not in "01" for c in v):
                raise ValueError(f"{v!r} is not a binary vertex")

    @classmethod
    def from_vertices(cls, vertices: Iterable[str]) -> "BinarySubtree":
        vs = set(vertices)
        if "" not in vs:
            raise ValueError("subtree must contain the root")
        internal = set()
        for v in vs:
            kids = [v + "0" in vs, v + "1" in vs]
            if kids == [True, True]:
                internal.add(v)
            elif any(kids):
                raise ValueError(f"vertex {v!r} has exactly one child")
            if v and v[:-1] not in vs:
                raise ValueError(f"vertex {v!r} is not connected to the root")
        return cls(frozenset(internal))

    @property
    def leaves(self) -> list[str]:
        if not self.internal:
            return [""]
        out = [v + c for v in self.internal for c in "01" if v + c not in self.internal]
        return sorted(out, key=lambda v: (len(v), v))

    @property
    def vertices(self) -> list[str]:
        return sorted(set(self.internal) | set(self.leaves), key=lambda v: (len(v), v))

    @property
    def edges(self) -> int:
        """``#leaves - 1``: the number of splits, as counted by nu_S."""
        return len(self.internal)


def binary_subtrees(max_splits: int) -> list[BinarySubtree]:
    """All subtrees with at most ``max_splits`` splits (Catalan many per size)."""
    seen = {frozenset()}
    frontier = [frozenset()]
    for _ in range(max_splits):
        nxt = []
        for internal in frontier:
            leaves = BinarySubtree(internal).leaves
            for leaf in leaves:
                grown = internal | {leaf}
                if grown not in seen:
                    seen.add(grown)
                    nxt.append(grown)
        frontier = nxt
    return [BinarySubtree(s) for s in sorted(seen, key=lambda s: (len(s), sorted(s)))]


def nu_subtree(word: str, subtree: BinarySubtree, group: AutomatonGroup | None = None,
               radius_cap: int = 12) -> int:
    """``E + sum of |word[v]|`` over the leaves ``v`` of ``subtree``."""
    group = group or basilica()
    _require_binary(group)
    t = table_for(group)
    total = subtree.edges
    for leaf in subtree.leaves:
        r = t.word_norm(group.section_at(word, leaf), radius_cap)
        if r is None:
            raise NormCapExceeded(f"section at {leaf!r} exceeds radius cap {radius_cap}")
        total += r
    return total


# -- nu-balls for the Basilica group -------------------------------------------------


def _is_basilica(group: AutomatonGroup) -> bool:
    b = basilica()
    return (group.generators, group.perms, group.gen_sections) == (
        b.generators, b.perms, b.gen_sections)


def a_exponent(word: str) -> int:
    return word.count("a") - word.count("A")


def basilica_member(perm: tuple[int, int], g0: str, g1: str) -> bool:
    """Is ``(g0, g1) perm`` an element of the Basilica group?

    Exponent sums are well defined on the group (its relators are
    commutators).  The image of the level-1 stabiliser in ``Z^2 x Z^2`` is
    spanned by the images of ``a``, ``b a b^-1`` and ``b^2``, which forces
    equal ``a``-exponents in the two sections; the other coset is read off
    from ``b``.  Sufficiency is constructive, see :func:`basilica_lift`.
    """
    e0, e1 = a_exponent(g0), a_exponent(g1)
    if tuple(perm) == (0, 1):
        return e0 == e1
    return e0 == e1 - 1


_X_LIFT = {"a": "bb", "A": "BB", "b": "baB", "B": "bAB"}
_Z_LIFT = {"a": "bb", "A": "BB", "b": "a", "B": "A"}


def basilica_lift(perm: tuple[int, int], g0: str, g1: str) -> str:
    """A word for ``(g0, g1) perm``, assuming :func:`basilica_member` holds.

    For the stabiliser: ``(x, 1) = X (1, a^-e)`` where ``X`` replaces
    ``a -> b^2`` and ``b -> b a b^-1`` letterwise and ``e`` is the
    ``a``-exponent of ``x``; then ``(1, z)`` with zero ``a``-exponent is
    ``z`` with ``b -> a``, ``a -> b^2``.  The swap coset uses
    ``(g0, g1) eps = (g0, g1 a^-1) b``.
    """
    if not basilica_member(perm, g0, g1):
        raise ValueError("not an element of the Basilica group")
    if tuple(perm) != (0, 1):
        return free_reduce(basilica_lift((0, 1), g0, g1 + "A") + "b")
    e = a_exponent(g0)
    z = free_reduce(("A" * e if e >= 0 else "a" * -e) + g1)
    x_part = "".join(_X_LIFT[c] for c in g0)
    z_part = "".join(_Z_LIFT[c] for c in z)
    return free_reduce(x_part + z_part)


def nu_ball(group: AutomatonGroup | None, n: int) -> dict[str, int]:
    """Elements with ``nu <= n``, as ``{representative word: nu}``.

    Uses ``nu(x) <= n  iff  |x| <= n  or  nu(x0) + nu(x1) <= n - 1``, so the
    ball is the word ball of radius ``n`` plus every group element assembled
    from two sections drawn from smaller nu-balls.  Representatives are the
    canonical ball words where available, otherwise a lifted word.  Only the
    Basilica group is supported (membership test above).
    """
    group = group or basilica()
    if not _is_basilica(group):
        raise NotImplementedError("nu_ball needs a membership test; only Basilica is supported")
    if n < 0:
        raise ValueError("n must be >= 0")
    t = table_for(group)
    ident = (0, 1)
    swap = (1, 0)
    words: dict[int, str] = {}
    nuval: dict[int, int] = {}
    for m in range(n + 1):
        cand: dict[int, str] = {i: t.rep(i) for i in t.ball_ids(m)}
        prev = sorted(nuval.items())
        for i0, v0 in prev:
            for i1, v1 in prev:
                if v0 + v1 > m - 1:
                    continue
                w0, w1 = words[i0], words[i1]
                for p in (ident, swap):
                    if not basilica_member(p, w0, w1):
                        continue
                    j = t.make(p, (i0, i1))
                    if j not in cand:
                        cand[j] = words.get(j) or basilica_lift(p, w0, w1)
        nuval = _nu_on_closed_set(t, cand, m)
        words = cand
    return {words[i]: nuval[i] for i in sorted(words, key=lambda i: (nuval[i], len(words[i]), words[i]))}


def _nu_on_closed_set(t: ElementTable, members: dict[int, str], radius: int) -> dict[int, int]:
    inf = float("inf")
    base = {}
    for i in members:
        r = t.distance(i)
        base[i] = r if r is not None and r <= radius else inf
    val = dict(base)
    changed = True
    while changed:
        changed = False
        for i in members:
            c0, c1 = t.children(i)
            v = 1 + val[c0] + val[c1]
            if v < val[i]:
                val[i] = v
                changed = True
    bad = [i for i in members if val[i] > radius]
    if bad:
        raise AssertionError(f"{len(bad)} candidates have nu above {radius}")
    return {i: int(v) for i, v in val.items()}


def nu_ball_sizes(n_max: int, group: AutomatonGroup | None = None) -> list[int]:
    return [len(nu_ball(group, n)) for n in range(n_max + 1)]

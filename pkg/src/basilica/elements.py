"""Canonical element ids, word balls and the exact word norm.

Every element met so far gets an integer id.  Ids are hash-consed on the
signature ``(root permutation, ids of the first-level sections)``; the node
table is kept minimal (no two ids denote the same tree automorphism), so two
words get the same id exactly when they are equal in the group.  Cycles in the
section graph (for instance ``a -> b -> a`` in the Basilica group) cannot be
hash-consed bottom-up; those strongly connected pieces are merged into the
table by partition refinement instead.
"""

from __future__ import annotations

from .automata import AutomatonGroup
from .words import free_reduce, inverse


class BallTooLarge(RuntimeError):
    """Word-ball enumeration would exceed the element budget."""


class ElementTable:
    """Interning table of group elements for one automaton group.

    Not thread-safe; each worker keeps its own table.
    """

    def __init__(self, group: AutomatonGroup, max_elements: int = 3_000_000):
        self.group = group
        self.max_elements = max_elements
        d = group.arity
        ident = tuple(range(d))
        self._perm: list[tuple[int, ...]] = [ident]
        self._children: list[tuple[int, ...]] = [(0,) * d]
        self._sig: dict[tuple, int] = {(ident, (0,) * d): 0}
        self._rep: list[str | None] = [""]
        self._word_id: dict[str, int] = {"": 0}
        self._mul: dict[tuple[int, str], int] = {}
        self.refinements = 0
        # ball state
        self._dist: dict[int, int] = {0: 0}
        self._canon: dict[int, str] = {0: ""}
        self._layers: list[list[int]] = [[0]]
        for x in group.letters:
            self.intern(x)

    # -- node access -------------------------------------------------------------

    def __len__(self):
        return len(self._perm)

    @property
    def identity(self) -> int:
        return 0

    def perm(self, i: int) -> tuple[int, ...]:
        return self._perm[i]

    def children(self, i: int) -> tuple[int, ...]:
        return self._children[i]

    def rep(self, i: int) -> str | None:
        """Shortest word seen for element ``i`` (``None`` for built nodes)."""
        return self._canon.get(i, self._rep[i])

    def make(self, perm: tuple[int, ...], children: tuple[int, ...]) -> int:
        """Id of the tree automorphism ``(children) perm``.

        The result need not lie in the group; membership is the caller's
        business.
        """
        key = (tuple(perm), tuple(children))
        i = self._sig.get(key)
        if i is None:
            i = self._new_node(*key, None)
        return i

    def _new_node(self, perm, children, word) -> int:
        if len(self._perm) >= self.max_elements:
            raise BallTooLarge(f"element table is full ({self.max_elements} nodes)")
        i = len(self._perm)
        self._perm.append(perm)
        self._children.append(children)
        self._rep.append(word)
        self._sig[(perm, children)] = i
        return i

    # -- interning words -------------------------------------------------------------

    def intern(self, word: str) -> int:
        w = free_reduce(word)
        i = self._word_id.get(w)
        if i is not None:
            return i
        self.group.check_word(w)
        split = self.group.split
        info: dict[str, tuple] = {}
        stack = [w]
        while stack:
            u = stack.pop()
            if u in info or u in self._word_id:
                continue
            perm, secs = split(u)
            info[u] = (perm, secs)
            for s in secs:
                if s not in info and s not in self._word_id:
                    stack.append(s)
        for comp in _sccs(info):
            if len(comp) == 1 and comp[0] not in info[comp[0]][1]:
                u = comp[0]
                perm, secs = info[u]
                key = (perm, tuple(self._word_id[s] for s in secs))
                j = self._sig.get(key)
                if j is None:
                    j = self._new_node(perm, key[1], u)
                else:
                    self._improve_rep(j, u)
                self._word_id[u] = j
            else:
                self._merge_cycle(comp, info)
        return self._word_id[w]

    def _improve_rep(self, j: int, u: str) -> None:
        r = self._rep[j]
        if r is None or len(u) < len(r):
            self._rep[j] = u

    def _merge_cycle(self, comp: list[str], info: dict) -> None:
        """Insert a strongly connected set of new words by partition refinement
        against the whole (minimal) node table."""
        self.refinements += 1
        n_old = len(self._perm)
        local = {u: n_old + k for k, u in enumerate(comp)}
        perms = list(self._perm)
        kids = list(self._children)
        for u in comp:
            perm, secs = info[u]
            perms.append(perm)
            kids.append(tuple(local[s] if s in local else self._word_id[s] for s in secs))
        pid: dict = {}
        cls = [pid.setdefault(p, len(pid)) for p in perms]
        n_cls = len(pid)
        while True:
            table: dict = {}
            new = [table.setdefault((cls[i],) + tuple(cls[c] for c in kids[i]), len(table))
                   for i in range(len(perms))]
            if len(table) == n_cls:
                break
            cls, n_cls = new, len(table)
        owner: dict[int, int] = {}
        for i in range(n_old):
            owner[cls[i]] = i
        fresh = []
        for u in comp:
            c = cls[local[u]]
            if c not in owner:
                owner[c] = len(self._perm) + len(fresh)
                fresh.append(u)
        if len(self._perm) + len(fresh) > self.max_elements:
            raise BallTooLarge(f"element table is full ({self.max_elements} nodes)")
        for u in fresh:
            i = len(self._perm)
            perm = info[u][0]
            ch = tuple(owner[cls[c]] for c in kids[local[u]])
            self._perm.append(perm)
            self._children.append(ch)
            self._rep.append(u)
            self._sig[(perm, ch)] = i
        for u in comp:
            j = owner[cls[local[u]]]
            self._word_id[u] = j
            self._improve_rep(j, u)

    # -- arithmetic on ids -------------------------------------------------------------

    def mul_letter(self, i: int, letter: str) -> int:
        key = (i, letter)
        j = self._mul.get(key)
        if j is None:
            rep = self.rep(i)
            if rep is None:
                raise ValueError(f"element {i} has no word representative")
            j = self.intern(rep + letter)
            self._mul[key] = j
        return j

    def inverse_id(self, i: int) -> int:
        rep = self.rep(i)
        if rep is None:
            raise ValueError(f"element {i} has no word representative")
        return self.intern(inverse(rep))

    def equal(self, g: str, h: str) -> bool:
        return self.intern(g) == self.intern(h)

    # -- word balls ------------------------------------------------------------------

    def extend_ball(self, radius: int) -> None:
        letters = self.group.letters
        while len(self._layers) <= radius:
            layer = []
            for i in self._layers[-1]:
                w = self._canon[i]
                for x in letters:
                    if w and w[-1] == x.swapcase():
                        continue
                    j = self.intern(w + x)
                    if j not in self._dist:
                        self._dist[j] = len(self._layers)
                        self._canon[j] = w + x
                        layer.append(j)
            self._layers.append(layer)

    def ball_ids(self, radius: int) -> list[int]:
        self.extend_ball(radius)
        return [i for layer in self._layers[:radius + 1] for i in layer]

    def sphere_ids(self, radius: int) -> list[int]:
        self.extend_ball(radius)
        return list(self._layers[radius])

    def distance(self, i: int) -> int | None:
        """Word norm of element ``i`` if it lies in the enumerated ball."""
        return self._dist.get(i)

    @property
    def ball_radius(self) -> int:
        return len(self._layers) - 1

    def word_norm(self, word: str, radius_cap: int = 12) -> int | None:
        """Shortest length of a word equal to ``word``; ``None`` if above the cap."""
        if radius_cap < 0:
            raise ValueError("radius_cap must be >= 0")
        w = free_reduce(word)
        i = self.intern(w)
        # |w| is an upper bound, so only the ball of radius |w| - 1 is needed
        limit = min(radius_cap, len(w) - 1)
        r = self._dist.get(i)
        k = self.ball_radius
        while r is None and k < limit:
            k += 1
            self.extend_ball(k)
            r = self._dist.get(i)
        if r is None:
            r = len(w)
        return r if r <= radius_cap else None


def _sccs(graph: dict[str, tuple]) -> list[list[str]]:
    """Tarjan's algorithm (iterative); components come out children-first."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0
    for root in graph:
        if root in index:
            continue
        work = [(root, iter(graph[root][1]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in graph:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w][1])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    x = stack.pop()
                    on_stack.discard(x)
                    comp.append(x)
                    if x == v:
                        break
                out.append(comp)
    return out


_TABLES: dict[AutomatonGroup, ElementTable] = {}


def table_for(group: AutomatonGroup) -> ElementTable:
    """Process-wide element table for ``group`` (created on first use)."""
    t = _TABLES.get(group)
    if t is None:
        t = _TABLES[group] = ElementTable(group)
    return t


def ball(group: AutomatonGroup, n: int) -> list[str]:
    """Canonical words of all elements of word length at most ``n``.

    The representative of an element is the first word reached in
    breadth-first order with letters tried as ``a < a^-1 < b < b^-1 < ...``.
    """
    t = table_for(group)
    return [t.rep(i) for i in t.ball_ids(n)]


def word_norm(group: AutomatonGroup, word: str, radius_cap: int = 12) -> int | None:
    return table_for(group).word_norm(word, radius_cap)

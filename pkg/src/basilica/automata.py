"""Automaton groups acting on the d-ary rooted tree.

Convention (used everywhere in the package): elements act on the right,
``v^(gh) = (v^g)^h``.  A generator is stored as ``g = (g[0], ..., g[d-1]) pi``
where ``g[i]`` is the section at the child ``i`` *before* the root
permutation ``pi`` is applied, so ``g`` sends ``i w`` to ``pi(i) w^(g[i])``.
Sections of products follow ``(gh)[v] = g[v] h[v^g]``.  Under this reading
the Basilica generators ``a = (1, b)``, ``b = (1, a) eps`` give
``b^2 = (a, a)``.

Sections of inverse letters are derived from the generator table, never
written by hand: ``g^-1[v] = (g[v^(g^-1)])^-1``.
"""

from __future__ import annotations

import re
from collections import OrderedDict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .words import free_reduce, invert_letter, inverse, letters_of


class DefinitionError(ValueError):
    """Malformed or inconsistent automaton group definition."""


class UnknownGenerator(ValueError):
    pass


def invert_perm(perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(perm)
    for i, j in enumerate(perm):
        out[j] = i
    return tuple(out)


def compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[p[i]] for i in range(len(p)))


class TrivialityCache:
    """Bounded LRU map from reduced words to their triviality verdict.

    Meant to be shared across many ``is_trivial`` calls on one group.  Not
    thread-safe; give each worker its own.
    """

    def __init__(self, maxsize: int = 100_000):
        self.maxsize = maxsize
        self._data: OrderedDict[str, bool] = OrderedDict()

    def get(self, word: str):
        v = self._data.get(word)
        if v is not None:
            self._data.move_to_end(word)
        return v

    def put(self, word: str, value: bool) -> None:
        self._data[word] = value
        self._data.move_to_end(word)
        while len(self._data) > self.maxsize:
            self._data.popitem(last=False)

    def __len__(self):
        return len(self._data)


@dataclass(frozen=True)
class AutomatonGroup:
    """Self-similar group given by a wreath recursion on its generators.

    Parameters
    ----------
    arity : int
        Number of children per vertex, ``2 <= arity <= 10``.
    generators : tuple of str
        Single lowercase letters.
    perms : tuple of tuple of int
        Root permutation of each generator, ``perms[k][i] = i^g``.
    gen_sections : tuple of tuple of str
        ``gen_sections[k][i]`` is a signed generator letter or ``""`` (identity).
    """

    arity: int
    generators: tuple[str, ...]
    perms: tuple[tuple[int, ...], ...]
    gen_sections: tuple[tuple[str, ...], ...]
    name: str = ""
    depth_cap: int = 64
    _letter_perm: dict = field(default_factory=dict, init=False, repr=False,
                               compare=False, hash=False)
    _letter_sec: dict = field(default_factory=dict, init=False, repr=False,
                              compare=False, hash=False)

    def __post_init__(self):
        d = self.arity
        if not 2 <= d <= 10:
            raise DefinitionError("arity must be between 2 and 10")
        if not self.generators:
            raise DefinitionError("need at least one generator")
        if len(set(self.generators)) != len(self.generators):
            raise DefinitionError("duplicate generator names")
        for g in self.generators:
            if len(g) != 1 or not g.islower() or not g.isalpha():
                raise DefinitionError(f"generator name {g!r} must be one lowercase letter")
        if len(self.perms) != len(self.generators) or len(self.gen_sections) != len(self.generators):
            raise DefinitionError("one permutation and one section list per generator")
        allowed = set(letters_of(self.generators)) | {""}
        for g, p, s in zip(self.generators, self.perms, self.gen_sections):
            if len(p) != d or sorted(p) != list(range(d)):
                raise DefinitionError(f"{g}: root permutation {p} is not a bijection of 0..{d - 1}")
            if len(s) != d:
                raise DefinitionError(f"{g}: expected {d} sections, got {len(s)}")
            for x in s:
                if x not in allowed:
                    raise DefinitionError(f"{g}: section {x!r} is not a declared generator")
        for g, p, s in zip(self.generators, self.perms, self.gen_sections):
            self._letter_perm[g] = tuple(p)
            self._letter_sec[g] = tuple(s)
            pinv = invert_perm(p)
            self._letter_perm[g.upper()] = pinv
            self._letter_sec[g.upper()] = tuple(
                invert_letter(s[pinv[v]]) if s[pinv[v]] else "" for v in range(d))

    # -- basic tables -------------------------------------------------------

    @property
    def letters(self) -> list[str]:
        return letters_of(self.generators)

    def letter_perm(self, letter: str) -> tuple[int, ...]:
        try:
            return self._letter_perm[letter]
        except KeyError:
            raise UnknownGenerator(letter) from None

    def letter_sections(self, letter: str) -> tuple[str, ...]:
        try:
            return self._letter_sec[letter]
        except KeyError:
            raise UnknownGenerator(letter) from None

    def check_word(self, word: str) -> str:
        for x in word:
            if x not in self._letter_perm:
                raise UnknownGenerator(x)
        return free_reduce(word)

    # -- wreath recursion -----------------------------------------------------

    def root_perm(self, word: str) -> tuple[int, ...]:
        p = tuple(range(self.arity))
        for x in word:
            q = self.letter_perm(x)
            p = tuple(q[i] for i in p)
        return p

    def split(self, word: str) -> tuple[tuple[int, ...], tuple[str, ...]]:
        """Root permutation and first-level sections of a word (no checks)."""
        d = self.arity
        perm_of = self._letter_perm
        sec_of = self._letter_sec
        secs = []
        images = []
        for v in range(d):
            pos = v
            out = []
            for x in word:
                s = sec_of[x][pos]
                if s:
                    if out and out[-1] == invert_letter(s):
                        out.pop()
                    else:
                        out.append(s)
                pos = perm_of[x][pos]
            secs.append("".join(out))
            images.append(pos)
        return tuple(images), tuple(secs)

    def sections(self, word: str) -> tuple[str, ...]:
        """First-level sections ``(w[0], ..., w[d-1])``, each freely reduced."""
        return self.split(self.check_word(word))[1]

    def section_at(self, word: str, vertex: str) -> str:
        w = self.check_word(word)
        for c in self._vertex(vertex):
            w = self.split(w)[1][c]
        return w

    def act(self, word: str, vertex: str) -> str:
        """Image ``vertex^word`` of a vertex given as a digit string."""
        path = self._vertex(vertex)
        for x in self.check_word(word):
            path = self._act_letter(x, path)
        return "".join(map(str, path))

    def _act_letter(self, letter: str, path: list[int]) -> list[int]:
        out = []
        for c in path:
            out.append(self._letter_perm[letter][c])
            letter = self._letter_sec[letter][c]
            if not letter:
                out.extend(path[len(out):])
                break
        return out

    def _vertex(self, vertex) -> list[int]:
        path = [int(c) for c in vertex]
        if len(path) > self.depth_cap:
            raise ValueError(f"vertex deeper than depth cap {self.depth_cap}")
        if any(not 0 <= c < self.arity for c in path):
            raise ValueError(f"vertex {vertex!r} has a digit outside 0..{self.arity - 1}")
        return path

    # -- word problem -----------------------------------------------------------

    def is_trivial(self, word: str, cache: TrivialityCache | None = None) -> bool:
        """Decide ``word == 1`` in the group.

        Breadth-first closure of ``{word}`` under taking sections.  The word is
        trivial iff every reachable word has trivial root permutation.  Section
        lengths never exceed the word length, so the closure is finite.
        """
        w = self.check_word(word)
        if cache is not None:
            hit = cache.get(w)
            if hit is not None:
                return hit
        ident = tuple(range(self.arity))
        seen = {w}
        queue = deque([w])
        verdict = True
        while queue:
            u = queue.popleft()
            if not u:
                continue
            perm, secs = self.split(u)
            if perm != ident:
                verdict = False
                break
            for s in secs:
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
        if cache is not None:
            cache.put(w, verdict)
        return verdict

    def equal(self, g: str, h: str, cache: TrivialityCache | None = None) -> bool:
        return self.is_trivial(g + inverse(h), cache)

    # -- export ---------------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for g, p, s in zip(self.generators, self.perms, self.gen_sections):
            secs = ", ".join(x or "1" for x in s)
            lines.append(f"{g}: perm=[{', '.join(map(str, p))}]; sections=[{secs}]")
        return "\n".join(lines) + "\n"

    def section_table(self) -> dict[str, tuple[tuple[int, ...], tuple[str, ...]]]:
        return {g: (p, s) for g, p, s in zip(self.generators, self.perms, self.gen_sections)}


_LINE = re.compile(
    r"^\s*([a-z])\s*:\s*perm\s*=\s*\[([^\]]*)\]\s*;\s*sections\s*=\s*\[([^\]]*)\]\s*;?\s*$")


def parse_definition(text: str, name: str = "") -> AutomatonGroup:
    """Parse the line format ``a: perm=[0, 1]; sections=[1, b]``.

    One line per generator; ``#`` starts a comment; ``1`` is the identity
    section and an uppercase letter is an inverse generator.
    """
    gens, perms, secs = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise DefinitionError(f"line {lineno}: cannot parse {raw!r}")
        g, p, s = m.groups()
        try:
            perm = tuple(int(x) for x in p.split(",") if x.strip())
        except ValueError:
            raise DefinitionError(f"line {lineno}: bad permutation {p!r}") from None
        sec = tuple("" if x.strip() == "1" else x.strip() for x in s.split(","))
        gens.append(g)
        perms.append(perm)
        secs.append(sec)
    if not gens:
        raise DefinitionError("empty definition")
    arity = len(perms[0])
    return AutomatonGroup(arity, tuple(gens), tuple(perms), tuple(secs), name=name)


def load_definition(path: str | Path) -> AutomatonGroup:
    path = Path(path)
    return parse_definition(path.read_text(), name=path.stem)


BASILICA_TEXT = """\
a: perm=[0, 1]; sections=[1, b]
b: perm=[1, 0]; sections=[1, a]
"""


def basilica() -> AutomatonGroup:
    """The Basilica group: ``a = (1, b)``, ``b = (1, a) eps``."""
    return parse_definition(BASILICA_TEXT, name="basilica")


def odometer() -> AutomatonGroup:
    return parse_definition("a: perm=[1, 0]; sections=[1, a]\n", name="odometer")


PRESETS: Mapping[str, callable] = {
    "basilica": basilica,
    "odometer": odometer,
}


def preset(name: str) -> AutomatonGroup:
    try:
        return PRESETS[name]()
    except KeyError:
        raise DefinitionError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None

"""Free-group words over single-letter generators.

A word is a plain ``str``: a lowercase letter is a generator, the matching
uppercase letter is its inverse, and ``""`` is the identity.  So ``"aBab"``
stands for a b^-1 a b.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence


def invert_letter(letter: str) -> str:
    return letter.lower() if letter.isupper() else letter.upper()


def free_reduce(word: Iterable[str]) -> str:
    """Cancel adjacent inverse pairs until none are left."""
    stack: list[str] = []
    for letter in word:
        if stack and stack[-1] == invert_letter(letter):
            stack.pop()
        else:
            stack.append(letter)
    return "".join(stack)


def inverse(word: str) -> str:
    return "".join(invert_letter(x) for x in reversed(word))


def multiply(*words: str) -> str:
    return free_reduce("".join(words))


def is_reduced(word: str) -> bool:
    return all(word[i] != invert_letter(word[i + 1]) for i in range(len(word) - 1))


def from_pairs(pairs: Iterable[tuple[str, int]]) -> str:
    """Build a reduced word from ``(generator, sign)`` pairs, sign in {+1, -1}."""
    out = []
    for gen, sign in pairs:
        if sign not in (1, -1) or len(gen) != 1 or not gen.islower():
            raise ValueError(f"bad letter {(gen, sign)!r}")
        out.append(gen if sign == 1 else gen.upper())
    return free_reduce(out)


def to_pairs(word: str) -> list[tuple[str, int]]:
    return [(x.lower(), 1 if x.islower() else -1) for x in word]


def commutator(x: str, y: str) -> str:
    """[x, y] = x^-1 y^-1 x y."""
    return multiply(inverse(x), inverse(y), x, y)


def conjugate(x: str, y: str) -> str:
    """x^y = y^-1 x y."""
    return multiply(inverse(y), x, y)


def power(x: str, n: int) -> str:
    if n < 0:
        return free_reduce(inverse(x) * -n)
    return free_reduce(x * n)


def letters_of(generators: Sequence[str]) -> list[str]:
    """Signed letters in the fixed order a < a^-1 < b < b^-1 < ..."""
    out = []
    for g in generators:
        out.extend((g, g.upper()))
    return out


def random_word(generators: Sequence[str], max_length: int,
                rng: random.Random) -> str:
    """Uniform-length random letter string, freely reduced afterwards."""
    letters = letters_of(generators)
    n = rng.randint(0, max_length)
    return free_reduce(rng.choice(letters) for _ in range(n))


def pretty(word: str) -> str:
    if not word:
        return "1"
    return " ".join(x if x.islower() else x.lower() + "^-1" for x in word)

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from basilica.automata import (DefinitionError, UnknownGenerator, basilica, load_definition,
                               odometer, parse_definition, preset)
from basilica.schreier import k_example
from basilica.words import inverse

words = st.text(alphabet="aAbB", max_size=24)
vertices = st.text(alphabet="01", min_size=1, max_size=10)


def test_b_squared_anchor(G):
    perm, secs = G.split("bb")
    assert perm == (0, 1)
    assert secs == ("a", "a")


def test_generator_tables(G):
    assert G.split("a") == ((0, 1), ("", "b"))
    assert G.split("b") == ((1, 0), ("", "a"))
    # inverse sections: b^-1 = (a^-1, 1) eps under the right action
    assert G.split("B") == ((1, 0), ("A", ""))
    assert G.act("b", "00") == "10"
    assert G.act("a", "1") == "1"
    assert G.section_at("ab", "1") == "ba"


def test_right_action(G):
    for u, v in [("a", "b"), ("ab", "Ba"), ("bb", "aB")]:
        for x in ["0", "01", "1101"]:
            assert G.act(u + v, x) == G.act(v, G.act(u, x))


@settings(max_examples=300, deadline=None)
@given(words, words, vertices)
def test_homomorphism_law(u, v, x):
    G = basilica()
    assert G.act(u + v, x) == G.act(v, G.act(u, x))
    pu = G.root_perm(u)
    su, sv, suv = G.sections(u), G.sections(v), G.sections(u + v)
    for i in range(2):
        assert G.equal(suv[i], su[i] + sv[pu[i]])


@settings(max_examples=300, deadline=None)
@given(words, vertices)
def test_inverse_law(u, x):
    G = basilica()
    assert G.act(inverse(u), G.act(u, x)) == x
    assert G.is_trivial(u + inverse(u))


def test_word_problem(G):
    assert G.is_trivial("")
    assert not G.is_trivial("a")
    assert not G.is_trivial("ab")
    assert not G.is_trivial("ABab")
    assert G.is_trivial("ABAbaBab")


def test_spherical_transitivity(G):
    for n in range(1, 5):
        orbit = {"0" * n}
        frontier = list(orbit)
        while frontier:
            v = frontier.pop()
            for x in G.letters:
                u = G.act(x, v)
                if u not in orbit:
                    orbit.add(u)
                    frontier.append(u)
        assert len(orbit) == 2 ** n


def test_parse_roundtrip(tmp_path):
    G = basilica()
    text = G.to_text()
    H = parse_definition(text)
    assert H.section_table() == G.section_table()
    p = tmp_path / "bas.txt"
    p.write_text("# Basilica\n" + text)
    assert load_definition(p).section_table() == G.section_table()


@pytest.mark.parametrize("text", [
    "",
    "a: perm=[0, 0]; sections=[1, 1]",
    "a: perm=[1, 0]; sections=[1]",
    "a: perm=[1, 0]; sections=[1, c]",
    "a perm [1 0]",
])
def test_malformed_definitions(text):
    with pytest.raises(DefinitionError):
        parse_definition(text)


def test_unknown_letter(G):
    with pytest.raises(UnknownGenerator):
        G.sections("ac")


def test_presets():
    assert preset("basilica").section_table() == basilica().section_table()
    assert odometer().split("a") == ((1, 0), ("", "a"))
    with pytest.raises(DefinitionError):
        preset("nope")


def test_k_example_two_is_basilica():
    assert k_example(2).section_table() == basilica().section_table()
    assert k_example(1).section_table() == odometer().section_table()
    g3 = k_example(3)
    assert [g3.letter_perm(x) for x in "abc"] == [(0, 1), (0, 1), (1, 0)]


def test_triviality_cache(G):
    from basilica.automata import TrivialityCache

    c = TrivialityCache(maxsize=2)
    rng = random.Random(0)
    for _ in range(50):
        w = "".join(rng.choice("aAbB") for _ in range(6))
        assert G.is_trivial(w, c) == G.is_trivial(w)
    assert len(c) <= 2


def test_odometer_adds_one():
    od = odometer()
    for bits in itertools.product("01", repeat=4):
        v = "".join(bits)
        # little-endian binary counter
        n = int(v[::-1], 2)
        assert od.act("a", v) == format((n + 1) % 16, "04b")[::-1]


def test_operation_examples(G):
    assert G.root_perm("") == (0, 1)
    assert G.root_perm("b") == (1, 0)
    assert G.root_perm("abab") == (0, 1)
    assert G.sections("bB") == ("", "")
    assert G.act("", "0110") == "0110"
    assert G.act("a", "00") == "00"
    assert G.section_at("abAB", "") == "abAB"
    assert G.section_at("bb", "0") == "a"
    assert G.equal("aABAbaBab", "a") and not G.equal("a", "b")
    # b^2 = (a, a) cross-checked through the action at depth 3
    for v in ["000", "011", "101", "110"]:
        assert G.act("bb", v) == v[0] + G.act("a", v[1:])

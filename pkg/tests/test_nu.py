import random

import pytest
from hypothesis import given, settings, strategies as st

from basilica.automata import basilica, odometer
from basilica.nu import (EXACT, UPPER, BinarySubtree, NormCapExceeded, a_exponent,
                         basilica_lift, basilica_member, binary_subtrees, exact_nu_on_ball, nu,
                         nu_ball, nu_subtree)
from basilica.words import free_reduce, inverse

words = st.text(alphabet="aAbB", max_size=30)


def test_small_values(G):
    assert nu("", G).value == 0
    assert nu("a", G).value == 1
    assert nu("b", G).value == 1
    assert nu("bb", G).value == 2
    assert nu("ABAbaBab", G).value == 0
    assert nu("ABAbaBab", G, UPPER).value == 1


def test_subtree_count():
    # full binary trees with at most 6 internal nodes: Catalan numbers summed
    assert len(binary_subtrees(6)) == 1 + 1 + 2 + 5 + 14 + 42 + 132
    s = BinarySubtree.from_vertices(["", "0", "1"])
    assert s.edges == 1 and s.leaves == ["0", "1"]
    assert BinarySubtree.from_vertices([""]).edges == 0


def test_subtree_oracle_on_ball(G, T):
    trees = binary_subtrees(6)
    values = exact_nu_on_ball(G, 4)
    for i in T.ball_ids(4):
        w = T.rep(i)
        assert min(nu_subtree(w, s, G) for s in trees) == values[i] == nu(w, G).value


def test_nu_ball_sizes(G):
    sizes = [len(nu_ball(G, n)) for n in range(4)]
    assert sizes == [1, 5, 19, 65]
    assert all(s <= 40 ** n for n, s in enumerate(sizes))


def test_nu_ball_values_are_exact(G):
    for w, v in nu_ball(G, 3).items():
        assert nu(w, G).value == v <= 3


@settings(max_examples=200, deadline=None)
@given(words)
def test_upper_bound_properties(w):
    G = basilica()
    v = nu(w, G, UPPER).value
    assert v <= len(free_reduce(w))
    assert nu(inverse(w), G, UPPER).value == v
    s0, s1 = (nu(s, G, UPPER).value for s in G.sections(w))
    assert s0 + s1 <= v <= s0 + s1 + 1


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet="aAbB", max_size=10))
def test_exact_below_upper(w):
    G = basilica()
    assert nu(w, G, EXACT).value <= nu(w, G, UPPER).value


def test_membership_and_lift():
    rng = random.Random(11)
    G = basilica()
    for _ in range(200):
        w = "".join(rng.choice("aAbB") for _ in range(rng.randint(0, 12)))
        perm, (g0, g1) = G.split(w)
        assert basilica_member(perm, g0, g1)
        lifted = basilica_lift(perm, g0, g1)
        assert G.equal(lifted, w)
    assert not basilica_member((0, 1), "a", "")
    assert a_exponent("aAab") == 1


def test_exact_cap(G):
    with pytest.raises(NormCapExceeded):
        nu("ab" * 15, G, EXACT, radius_cap=2)


def test_rejects_non_binary():
    from basilica.automata import parse_definition

    g = parse_definition("a: perm=[1, 2, 0]; sections=[1, 1, a]")
    with pytest.raises(ValueError):
        nu("a", g)
    with pytest.raises(NotImplementedError):
        nu_ball(odometer(), 1)

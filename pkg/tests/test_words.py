from hypothesis import given, strategies as st

from basilica.words import (commutator, conjugate, free_reduce, from_pairs, inverse, is_reduced,
                            multiply, power, pretty, to_pairs)

letters = st.text(alphabet="aAbB", max_size=40)


def test_reduce_examples():
    assert free_reduce("aAbB") == ""
    assert free_reduce("abBA") == ""
    assert free_reduce("abAB") == "abAB"
    assert free_reduce("bbBa") == "ba"


def test_commutator_convention():
    # [x, y] = x^-1 y^-1 x y
    assert commutator("a", "b") == "ABab"
    assert conjugate("a", "b") == "Bab"
    assert commutator("a", conjugate("a", "b")) == "ABAbaBab"


def test_power_and_pairs():
    assert power("ab", 2) == "abab"
    assert power("ab", -1) == "BA"
    assert power("a", 0) == ""
    assert to_pairs("aB") == [("a", 1), ("b", -1)]
    assert from_pairs([("a", 1), ("b", -1), ("b", 1)]) == "a"
    assert from_pairs(to_pairs("abAB")) == "abAB"
    assert pretty("") == "1"


@given(letters)
def test_reduce_is_idempotent(w):
    r = free_reduce(w)
    assert is_reduced(r)
    assert free_reduce(r) == r


@given(letters)
def test_inverse_cancels(w):
    assert multiply(w, inverse(w)) == ""
    assert inverse(inverse(free_reduce(w))) == free_reduce(w)


@given(letters, letters, letters)
def test_multiply_associative(u, v, w):
    assert multiply(multiply(u, v), w) == multiply(u, multiply(v, w))

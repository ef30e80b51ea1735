import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from basilica.automata import basilica
from basilica.schreier import (BoundaryError, CycleConditionError, alpha, basilica_weights,
                               build_schreier, closed_form_fixed_point, default_base,
                               fixed_point, irreducible_cycles, k_example, mu_to_json,
                               product_invariance_check, refine)
from basilica.walk import t_circ

ROOT2 = math.sqrt(2)


def test_level_one_graph(G):
    sg = build_schreier(G, 1)
    assert sg.vertices == ["0", "1"]
    assert sg.target[("0", "a")] == "0" and sg.target[("1", "a")] == "1"
    assert sg.target[("0", "b")] == "1" and sg.target[("1", "b")] == "0"
    assert sg.label[("1", "a")] == "b" and sg.label[("1", "b")] == "a"
    assert sg.label[("0", "a")] == "" and sg.label[("0", "b")] == ""


def test_level_zero_and_connectivity(G):
    assert build_schreier(G, 0).vertices == [""]
    for n in range(11):
        sg = build_schreier(G, n)
        assert len(sg.vertices) == 2 ** n
        assert sg.is_connected()


def test_exports_are_deterministic(G):
    a, b = build_schreier(G, 3), build_schreier(G, 3)
    assert a.to_dot() == b.to_dot()
    assert a.to_csv().splitlines()[0] == "source,generator,target,section"
    assert len(a.to_csv().splitlines()) == 1 + 8 * 2


def test_cycles_cycle_condition(G):
    rep = irreducible_cycles(G, 1, 8)
    assert rep.cycle_condition
    assert set(rep.classified.values()) <= {"1", "a", "A", "b", "B"}
    assert "up to cap L=8" in rep.verdict
    loops = irreducible_cycles(G, 1, 1)
    assert set(loops.labels) == {"b", "B"}  # the a-loop at vertex 1
    assert not irreducible_cycles(G, 1, 8, generators=["a"]).cycle_condition
    assert not irreducible_cycles(G, 0, 4).cycle_condition
    assert default_base(G) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from("aAbB"), min_size=1, max_size=12))
def test_backward_traversal_inverts_label(path):
    # walk a path forward, then retrace it backwards: the label cancels
    G = basilica()
    v, label = 1, ""
    steps = []
    for x in path:
        label += G.letter_sections(x)[v]
        steps.append((v, x))
        v = G.letter_perm(x)[v]
    for u, x in reversed(steps):
        inv = x.swapcase()
        label += G.letter_sections(inv)[v]
        v = G.letter_perm(inv)[v]
        assert v == u
    assert G.is_trivial(label)


@pytest.mark.parametrize("r", [0.5, 1.0, ROOT2, 3.0])
def test_basilica_refinement_matches_induced_law(G, r):
    res = refine(G, basilica_weights(r))
    assert res.mu_prime["a"] == pytest.approx(r / (r + 2), abs=1e-12)
    assert res.mu_prime["b"] == pytest.approx(2 / (r + 2), abs=1e-12)
    assert res.E_tau == pytest.approx(t_circ(r), abs=1e-12)
    assert sum(res.mu_prime.values()) == pytest.approx(1, abs=1e-12)


def test_e_tau_at_r1(G):
    assert refine(G, {"a": 0.5, "b": 0.5}).E_tau == pytest.approx(8 / 3, abs=1e-12)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_k_example_refinement_formula(k):
    g = k_example(k)
    rng = np.random.default_rng(k)
    m = rng.dirichlet(np.ones(k))
    res = refine(g, list(m))
    expected = np.concatenate([[m[-1] / 2], m[:-1]]) / (1 - m[-1] / 2)
    assert [res.mu_prime[x] for x in g.generators] == pytest.approx(expected.tolist(), abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_k_example_fixed_point_and_alpha(k):
    g = k_example(k)
    fp = fixed_point(g)
    target = closed_form_fixed_point(k)
    for x in g.generators:
        assert fp.mu[x] == pytest.approx(target[x], abs=1e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        a = alpha(g, fp.mu)
    assert a.E_tau == pytest.approx(2 ** (1 + 1 / k), abs=1e-6)
    assert a.alpha == pytest.approx(k / (k + 1), abs=1e-6)
    assert a.boundary == (k == 1)


def test_k2_fixed_point_values():
    fp = fixed_point(k_example(2))
    assert mu_to_json(fp.mu) == pytest.approx({"a": 0.414214, "b": 0.585786}, abs=1e-6)


def test_alpha_warns_at_boundary():
    with pytest.warns(RuntimeWarning):
        alpha(k_example(1))


def test_basilica_fixed_point(G):
    fp = fixed_point(G)
    assert fp.mu["b"] / fp.mu["a"] == pytest.approx(ROOT2, abs=1e-6)
    assert fp.E_tau == pytest.approx(2 * ROOT2, abs=1e-9)
    assert alpha(G, fp.mu).alpha == pytest.approx(2 / 3, abs=1e-9)


@pytest.mark.parametrize("k,mu0,expected", [
    (1, None, 4.0), (2, (0.5, 0.5), 8.0), (3, (0.2, 0.3, 0.5), 16.0), (4, (0.1, 0.2, 0.3, 0.4), 32.0)])
def test_product_invariance(k, mu0, expected):
    assert product_invariance_check(k, mu0).product == pytest.approx(expected, abs=1e-6)


def test_plain_iteration_oscillates(G):
    # without averaging, r -> 2/r cycles between two points
    with pytest.raises(BoundaryError):
        fixed_point(G, basilica_weights(1.0), damping=1.0, max_iter=50)


def test_refine_errors(G):
    with pytest.raises(ValueError):
        refine(G, {"a": 1.0, "b": 0.0})
    with pytest.raises(CycleConditionError):
        refine(G, None, base=0)
    with pytest.raises(ValueError):
        fixed_point(G, tol=0)


@pytest.mark.parametrize("group,mu", [
    (basilica(), basilica_weights(1.0)), (basilica(), basilica_weights(ROOT2)), (k_example(3), None)])
def test_monte_carlo_agrees_with_exact(group, mu):
    ex = refine(group, mu)
    mc = refine(group, mu, "monte_carlo", samples=100_000, seed=12)
    assert abs(mc.E_tau - ex.E_tau) <= 3 * mc.se_tau
    for x in group.generators:
        assert abs(mc.mu_prime[x] - ex.mu_prime[x]) <= 3 * mc.se_mu[x] + 1e-15


def test_monte_carlo_independent_of_workers(G):
    a = refine(G, None, "monte_carlo", samples=25_000, seed=4, workers=1)
    b = refine(G, None, "monte_carlo", samples=25_000, seed=4, workers=3)
    assert a.mu_prime == b.mu_prime and a.E_tau == b.E_tau

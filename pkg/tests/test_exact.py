import itertools

import pytest

from basilica.exact import (ExactCapExceeded, exact_distribution, free_return_probability,
                            heat_kernel_report, inverse_symmetry_defect, iter_distributions,
                            varopoulos_carne_check)
from basilica.walk import StepDistribution


def _return_by_enumeration(G, n, r):
    """Oracle: sum the weights of all length-n letter strings trivial in G."""
    probs = dict(zip("aAbB", StepDistribution(r).probs))
    total = 0.0
    for w in itertools.product("aAbB", repeat=n):
        if G.is_trivial("".join(w)):
            p = 1.0
            for x in w:
                p *= probs[x]
            total += p
    return total


@pytest.mark.parametrize("n,r", [(2, 1.0), (4, 1.0), (4, 2.5), (6, 1.0)])
def test_return_probability_matches_enumeration(G, n, r):
    dist = exact_distribution(n, r)
    assert dist.get("", 0.0) == pytest.approx(_return_by_enumeration(G, n, r), abs=1e-14)


def test_p2_and_normalisation():
    dist = exact_distribution(2, 1.0)
    assert dist[""] == pytest.approx(0.25, abs=1e-15)
    for n, d in enumerate(iter_distributions(1.7)):
        assert sum(d.values()) == pytest.approx(1.0, abs=1e-12)
        assert inverse_symmetry_defect(d) < 1e-15
        if n == 8:
            break


def test_heat_kernel_regression():
    hk = heat_kernel_report(1.0, 5)
    assert hk.p_group == pytest.approx(
        [0.25, 0.109375, 0.056640625, 0.03216552734375, 0.019439697265625], abs=1e-15)
    assert all(g >= f for g, f in zip(hk.p_group, hk.p_free))
    # relators have length 8, so the group and free returns agree up to time 6
    assert hk.p_group[:3] == pytest.approx(hk.p_free[:3], abs=1e-15)
    assert hk.nonincreasing


def test_free_return_probability():
    assert free_return_probability(2, 1.0) == pytest.approx(0.25)
    assert free_return_probability(3, 1.0) == 0.0


def test_varopoulos_carne():
    rows = varopoulos_carne_check(1.0, 6)
    assert [r.m for r in rows] == list(range(1, 7))
    assert all(r.passed for r in rows)


def test_cap():
    with pytest.raises(ExactCapExceeded):
        exact_distribution(13, 1.0)
    with pytest.raises(ExactCapExceeded):
        next(itertools.islice(iter_distributions(1.0, max_states=10), 3, None))


def test_distribution_edges():
    assert exact_distribution(0, 1.0) == {"": 1.0}
    for r in (0.5, 1.0, 3.0):
        p = StepDistribution(r).probs
        assert exact_distribution(2, r)[""] == pytest.approx(float((p ** 2).sum()), abs=1e-15)
    rows = varopoulos_carne_check(2.0, 1)
    assert rows[0].passed

import hashlib
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from basilica.nu import UPPER, nu
from basilica.walk import (LETTERS, NuTracker, StepDistribution, WreathWalkState, escape_tail,
                           estimate_speed, estimate_u, eps_stationary, extract_stopping_times, f,
                           fit_power, induced_law_test, induced_weights, project, route_table,
                           run, stopping_rates, t_circ)
from basilica.words import free_reduce


def test_closed_forms():
    assert f(1) == pytest.approx(0.375, abs=1e-15)
    assert t_circ(1) == pytest.approx(8 / 3, abs=1e-15)
    for r in (0.5, 1.0, math.sqrt(2), 3.0):
        assert f(r) * f(2 / r) == pytest.approx(0.125, abs=1e-12)
        assert t_circ(r) == pytest.approx(1 / f(r))
    w = induced_weights(1.0)
    assert np.allclose(w, [1 / 6, 1 / 6, 1 / 3, 1 / 3])
    assert eps_stationary(2.0) == 0.5


def test_step_distribution():
    p = StepDistribution(2.0).probs
    assert np.allclose(p, [1 / 6, 1 / 6, 1 / 3, 1 / 3])
    with pytest.raises(ValueError):
        StepDistribution(0.0)


def test_route_table_letters(G):
    route, flip = route_table(G)
    idx = {x: i for i, x in enumerate(G.letters)}
    # a at eps=0 feeds b into X (child 1); B at eps=0 feeds A into Y (child 0)
    assert route[idx["a"]][0] == ((1, idx["b"]),)
    assert route[idx["B"]][0] == ((0, idx["A"]),)
    assert route[idx["b"]][1] == ((0, idx["a"]),)
    assert flip == (0, 0, 1, 1)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="aAbB", max_size=60))
def test_step_matches_recomputation(w):
    s = WreathWalkState()
    for x in w:
        s.step(x)
    s.check()
    assert s.words == project(free_reduce(w))


def test_run_snapshots_are_projections():
    traj = run(2048, 1.3, seed=2, check_every=128)
    for k, snap in traj.snapshots.items():
        assert project(free_reduce(traj.word[:k])) == snap
        assert traj.xlen[k] == len(snap[1]) and traj.eps[k] == snap[2]


def test_run_digest_regression():
    t = run(4096, 1.0, 7)
    assert hashlib.sha256(t.letters.tobytes()).hexdigest()[:16] == "021aa71c205f7de8"
    assert t.snapshots[16] == ("BAbbbb", "", 1)


def test_stopping_times_by_hand():
    s = extract_stopping_times("bbab")
    assert s.sigma == [0, 2, 3]
    assert s.x_increments == ["a", "b"]
    assert s.tau == [1, 4]
    assert s.y_increments == ["a"]
    assert s.y_start == ""


def test_increments_are_single_letters():
    traj = run(20_000, 0.7, seed=4)
    s = extract_stopping_times(traj)
    assert all(x in LETTERS for x in s.x_increments + s.y_increments)
    assert s.sigma == sorted(s.sigma) and s.tau == sorted(s.tau)
    # X only changes at sigma times: X at consecutive sigmas differs by the increment
    xs = [project(free_reduce(traj.word[:k]))[1] for k in s.sigma[:30]]
    for k in range(1, len(xs)):
        assert free_reduce(xs[k - 1] + s.x_increments[k - 1]) == xs[k]


def test_induced_law_small():
    res = induced_law_test(1.0, 20_000, seed=3)
    assert res.passed
    assert sum(res.counts.values()) == 20_000


def test_stopping_rates_close_to_f():
    s, t = stopping_rates(2.0, 20_000, seed=5)
    assert abs(s - f(2.0)) / f(2.0) < 0.03
    assert abs(t - f(2.0)) / f(2.0) < 0.03


def test_tracker_matches_upper_bound_nu(G):
    rng = random.Random(8)
    tr = NuTracker()
    word = []
    for step in range(1, 1501):
        li = rng.randrange(4)
        tr.push(li)
        word.append(LETTERS[li])
        if step % 100 == 0:
            w = free_reduce(word)
            assert tr.word == w
            assert tr.value == nu(w, G, UPPER).value


def test_u_table_and_workers():
    a = estimate_u(1.0, [64, 256], trials=6, seed=1, workers=1)
    b = estimate_u(1.0, [64, 256], trials=6, seed=1, workers=2)
    assert a.u == b.u
    assert a.u[0] <= a.u[1]
    with pytest.raises(ValueError):
        estimate_u(1.0, [64], trials=0)


def test_exact_mode_bounded_by_upper():
    e = estimate_u(1.0, [8, 16], trials=3, seed=2, mode="exact")
    u = estimate_u(1.0, [8, 16], trials=3, seed=2)
    assert all(x <= y for x, y in zip(e.u, u.u))


def test_speed_and_tail_shapes():
    sp = estimate_speed(1.0, [256, 1024], trials=4, seed=1, workers=2)
    assert len(sp.mean_nu_rate) == 2 and sp.samples.shape == (4, 2)
    tail = escape_tail(1.0, 256, [0.1, 0.5, 1, 2], trials=10, seed=1)
    assert tail.nonincreasing
    assert all(0 <= p <= 1 for p in tail.tail)


def test_fit_power_recovers_exponent():
    ns = [2 ** k for k in range(4, 10)]
    slope, _ = fit_power(ns, [3 * n ** (2 / 3) for n in ns])
    assert slope == pytest.approx(2 / 3)


@pytest.mark.parametrize("r", [0.4, 1.0, 3.0])
def test_eps_frequency_matches_two_state_chain(r):
    n = 200_000
    traj = run(n, r, seed=11, snapshots=False)
    p = r / (1 + r)  # flip probability per step
    lam = 1 - 2 * p
    sd = math.sqrt(0.25 * (1 + lam) / (1 - lam) / n)
    assert abs(traj.eps[1:].mean() - eps_stationary(r)) <= 3 * sd


def test_million_step_digest():
    t = run(10 ** 6, 1.0, 7, snapshots=False)
    blob = t.letters.tobytes() + t.eps.tobytes() + t.xlen.tobytes() + t.ylen.tobytes()
    assert hashlib.sha256(blob).hexdigest()[:16] == "4b0f7524455c74b9"
    assert (t.xlen[-1], t.ylen[-1]) == (175648, 174986)


def test_step_examples():
    s = WreathWalkState().step("a")
    assert s.words == ("", "b", 0)
    s = WreathWalkState().step("b")
    assert s.words == ("", "a", 1)
    rng = random.Random(2)
    s = WreathWalkState()
    for _ in range(30):
        s.step(rng.choice("aAbB"))
    before = s.words
    for x in "aAbB":
        assert s.step(x).step(x.swapcase()).words == before


def test_stopping_time_edge_cases():
    assert extract_stopping_times("bb").tau[0] == 1
    assert extract_stopping_times("a").sigma == [0, 1]
    empty = extract_stopping_times("")
    assert empty.sigma == [0] and empty.tau == [] and empty.x_increments == []
    assert run(0, 1.0).snapshots == {0: ("", "", 0)}


def test_small_estimator_edges():
    assert np.allclose(induced_weights(2.0), [0.25] * 4)
    assert induced_law_test(1.0, 0).passed
    s, t = stopping_rates(1.0, 1, seed=0)
    assert 0 < s <= 1 and 0 < t <= 1
    assert estimate_u(1.0, [1], trials=20, seed=0).u[0] <= 1
    sp = estimate_speed(1.0, [1], trials=5, seed=0)
    assert 0 <= sp.mean_nu_rate[0] <= 1
    tail = escape_tail(1.0, 512, [1e6], trials=5, seed=0)
    assert tail.tail == [0.0]

"""Weighted random walks on F2 and their projection to F2 wr C2.

The walk ``Z_n`` on the free group steps by ``a, a^-1, b, b^-1`` with weights
``(1, 1, r, r)``.  Its image under ``a -> (1, b)``, ``b -> (1, a) eps`` is
tracked incrementally as ``(Y_n, X_n) eps_n``; ``Y`` is the section at vertex
0 and ``X`` the section at vertex 1.  With the right-action convention of
:mod:`basilica.automata` each letter appends exactly one letter to one
coordinate:

==========  ==============  ==============
letter      eps = 0         eps = 1
==========  ==============  ==============
a^{+-1}     X += b^{+-1}    Y += b^{+-1}
b           X += a, flip    Y += a, flip
b^-1        Y += a^-1, flip X += a^-1, flip
==========  ==============  ==============

The table is not hard-coded: it is read off the group's section table by
:func:`route_table`, and a test locks it against full recomputation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ._parallel import pmap
from .automata import AutomatonGroup, basilica
from .nu import EXACT, UPPER, nu
from .rng import sample_letters, stream
from .words import invert_letter

LETTERS = "aAbB"


# -- step law -------------------------------------------------------------------


@dataclass(frozen=True)
class StepDistribution:
    """Symmetric step law on ``(a, a^-1, b, b^-1)`` with weights ``(1, 1, r, r)``."""

    r: float = 1.0

    def __post_init__(self):
        if not self.r > 0 or not math.isfinite(self.r):
            raise ValueError("r must be a positive finite number")

    @property
    def probs(self) -> np.ndarray:
        w = np.array([1.0, 1.0, self.r, self.r])
        return w / w.sum()

    def as_dict(self) -> dict[str, float]:
        return dict(zip(LETTERS, self.probs.tolist()))


def f(r: float) -> float:
    """Limit of ``m / sigma(m)``: ``(2 + r) / (4 + 4r)``."""
    return (2 + r) / (4 + 4 * r)


def t_circ(r: float) -> float:
    """Mean time between successive stopping times, ``4 (1 + r) / (2 + r)``."""
    return 4 * (1 + r) / (2 + r)


def induced_weights(r: float) -> np.ndarray:
    """Step law of ``X_sigma(m)``: weights ``(r/2, r/2, 1, 1)`` normalised."""
    w = np.array([r / 2, r / 2, 1.0, 1.0])
    return w / w.sum()


def eps_stationary(r: float) -> float:
    """Long-run fraction of time with ``eps = 1`` (the swap).

    ``eps`` flips on every b-letter, so it is a two-state chain flipping
    with probability ``r / (1 + r)``; being symmetric its stationary law is
    uniform for every ``r``.
    """
    return 0.5


# -- routing ---------------------------------------------------------------------


def route_table(group: AutomatonGroup):
    """Per letter index and parity: where the letter's section lands.

    Returns ``(route, flip)`` where ``route[l][e]`` is a tuple of
    ``(child, letter index)`` pairs and ``flip[l]`` is 1 when the letter
    swaps the two children.  Letter indices follow ``group.letters``.
    """
    if group.arity != 2:
        raise ValueError("walk engine needs a binary tree")
    letters = group.letters
    index = {x: i for i, x in enumerate(letters)}
    route, flip = [], []
    for x in letters:
        perm = group.letter_perm(x)
        secs = group.letter_sections(x)
        flip.append(0 if perm == (0, 1) else 1)
        per_eps = []
        for e in (0, 1):
            hits = []
            for v in (0, 1):
                s = secs[v ^ e]
                if s:
                    hits.append((v, index[s]))
            per_eps.append(tuple(hits))
        route.append(tuple(per_eps))
    return tuple(route), tuple(flip)


# -- projected walk state -------------------------------------------------------------


def _push(stack: list, letter: str) -> None:
    if stack and stack[-1] == invert_letter(letter):
        stack.pop()
    else:
        stack.append(letter)


@dataclass
class WreathWalkState:
    """``(Y, X) eps`` after ``n`` steps, optionally with the free word ``Z``."""

    Y: list = field(default_factory=list)
    X: list = field(default_factory=list)
    eps: int = 0
    n: int = 0
    Z: list | None = field(default_factory=list)
    group: AutomatonGroup = field(default_factory=basilica, repr=False, compare=False)

    def __post_init__(self):
        self._route, self._flip = route_table(self.group)
        self._letters = self.group.letters

    def step(self, letter: str) -> "WreathWalkState":
        """Multiply on the right by one letter; O(1)."""
        li = self._letters.index(letter)
        coords = (self.Y, self.X)
        for child, s in self._route[li][self.eps]:
            _push(coords[child], self._letters[s])
        self.eps ^= self._flip[li]
        self.n += 1
        if self.Z is not None:
            _push(self.Z, letter)
        return self

    def copy(self) -> "WreathWalkState":
        return WreathWalkState(list(self.Y), list(self.X), self.eps, self.n,
                               None if self.Z is None else list(self.Z), self.group)

    @property
    def words(self) -> tuple[str, str, int]:
        return "".join(self.Y), "".join(self.X), self.eps

    def check(self) -> None:
        """Compare with the projection recomputed from ``Z``."""
        if self.Z is None:
            raise ValueError("free word not retained")
        perm, (y, x) = self.group.split("".join(self.Z))
        if (y, x, 0 if perm == (0, 1) else 1) != self.words:
            raise AssertionError(f"projection drift at step {self.n}")


def project(word: str, group: AutomatonGroup | None = None) -> tuple[str, str, int]:
    """``(Y, X, eps)`` of a free word, by full recomputation."""
    group = group or basilica()
    perm, (y, x) = group.split(group.check_word(word))
    return y, x, 0 if perm == (0, 1) else 1


# -- trajectories -------------------------------------------------------------------


@dataclass
class Trajectory:
    """Per-step summary of one run; index ``k`` is the state after ``k`` steps."""

    r: float
    seed: int
    trial: int
    letters: np.ndarray
    eps: np.ndarray
    xlen: np.ndarray
    ylen: np.ndarray
    snapshots: dict[int, tuple[str, str, int]]

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def word(self) -> str:
        return "".join(LETTERS[i] for i in self.letters)


def run(n: int, r: float = 1.0, seed: int = 0, trial: int = 0, *,
        check_every: int = 0, snapshots: bool = True) -> Trajectory:
    """Simulate ``n`` steps of the projected walk.

    ``check_every > 0`` recomputes the projection from the free word every
    that many steps (debug mode; O(n) each).  Snapshots of ``(Y, X, eps)``
    are kept at times ``1, 2, 4, 8, ...``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = stream(seed, trial)
    letters = sample_letters(rng, StepDistribution(r).probs, n)
    state = WreathWalkState(Z=[] if check_every else None)
    eps = np.zeros(n + 1, dtype=np.int8)
    xlen = np.zeros(n + 1, dtype=np.int32)
    ylen = np.zeros(n + 1, dtype=np.int32)
    snaps = {0: state.words} if snapshots else {}
    route, flip = route_table(state.group)
    X, Y = state.X, state.Y
    coords = (Y, X)
    e = 0
    zw = state.Z
    for k, li in enumerate(letters.tolist(), 1):
        for child, s in route[li][e]:
            stack = coords[child]
            if stack and stack[-1] == s ^ 1:
                stack.pop()
            else:
                stack.append(s)
        e ^= flip[li]
        eps[k] = e
        xlen[k] = len(X)
        ylen[k] = len(Y)
        if zw is not None:
            if zw and zw[-1] == LETTERS[li ^ 1]:
                zw.pop()
            else:
                zw.append(LETTERS[li])
            if k % check_every == 0:
                state.eps, state.n = e, k
                _check_int_state(state, Y, X, e)
        if snapshots and k & (k - 1) == 0:
            snaps[k] = ("".join(LETTERS[i] for i in Y), "".join(LETTERS[i] for i in X), e)
    return Trajectory(r, seed, trial, letters, eps, xlen, ylen, snaps)


def _check_int_state(state: WreathWalkState, Y, X, e) -> None:
    y, x, pe = project("".join(state.Z), state.group)
    if (y, x, pe) != ("".join(LETTERS[i] for i in Y), "".join(LETTERS[i] for i in X), e):
        raise AssertionError(f"projection drift at step {state.n}")


# -- stopping times --------------------------------------------------------------------


@dataclass
class StoppingTimeSeries:
    """Stopping times and the induced walks' increments.

    ``sigma[0] = 0``; ``tau[0]`` is the first time with ``eps = 1``.
    ``y_start`` is ``Y`` at ``tau[0]`` -- the induced Y-walk does not start at
    the identity.
    """

    sigma: list[int] = field(default_factory=lambda: [0])
    tau: list[int] = field(default_factory=list)
    x_increments: list[str] = field(default_factory=list)
    y_increments: list[str] = field(default_factory=list)
    y_start: str | None = None


class StoppingTimeScanner:
    """Streaming extraction of sigma/tau from a letter sequence.

    ``X_n != X_sigma(m)`` is decided in the free group: the scanner keeps the
    reduced word ``X_sigma(m)^-1 X_n`` (and likewise for ``Y``), which stays
    at most two letters long, so each step is O(1).
    """

    def __init__(self, group: AutomatonGroup | None = None, keep_increments: bool = True):
        self.group = group or basilica()
        self.route, self.flip = route_table(self.group)
        self.keep = keep_increments
        self.series = StoppingTimeSeries()
        self.n = 0
        self.eps = 0
        self._pend = ([], [])  # Y, X
        self._y_total: list[int] | None = []  # Y until tau(0)
        self.n_sigma = 0
        self.n_tau = 0
        self.last_sigma = 0
        self.last_tau = 0

    def feed(self, letters) -> None:
        route, flip = self.route, self.flip
        pend_y, pend_x = self._pend
        pend = self._pend
        ser = self.series
        keep = self.keep
        e = self.eps
        n = self.n
        ytot = self._y_total
        for li in letters:
            n += 1
            for child, s in route[li][e]:
                stack = pend[child]
                if stack and stack[-1] == s ^ 1:
                    stack.pop()
                else:
                    stack.append(s)
                if child == 0 and ytot is not None:
                    if ytot and ytot[-1] == s ^ 1:
                        ytot.pop()
                    else:
                        ytot.append(s)
            e ^= flip[li]
            if e == 0:
                if pend_x:
                    if len(pend_x) != 1:
                        raise AssertionError(f"induced X-increment {pend_x} at step {n} is not a letter")
                    self.n_sigma += 1
                    self.last_sigma = n
                    if keep:
                        ser.sigma.append(n)
                        ser.x_increments.append(LETTERS[pend_x[0]])
                    pend_x.clear()
            else:
                if ytot is not None:
                    # tau(0): first time eps = 1; restart the Y-increment there
                    ser.y_start = "".join(LETTERS[i] for i in ytot)
                    ytot = None
                    self._y_total = None
                    pend_y.clear()
                    self.last_tau = n
                    if keep:
                        ser.tau.append(n)
                elif pend_y:
                    if len(pend_y) != 1:
                        raise AssertionError(f"induced Y-increment {pend_y} at step {n} is not a letter")
                    self.n_tau += 1
                    self.last_tau = n
                    if keep:
                        ser.tau.append(n)
                        ser.y_increments.append(LETTERS[pend_y[0]])
                    pend_y.clear()
        self.eps = e
        self.n = n


def extract_stopping_times(traj: Trajectory | str | list) -> StoppingTimeSeries:
    """Stopping times of a trajectory (or a plain letter string)."""
    if isinstance(traj, Trajectory):
        letters = traj.letters.tolist()
    else:
        letters = [LETTERS.index(x) for x in traj]
    sc = StoppingTimeScanner()
    sc.feed(letters)
    return sc.series


# -- induced law ---------------------------------------------------------------------


@dataclass
class InducedLawResult:
    r: float
    n: int
    counts: dict[str, int]
    targets: dict[str, float]
    z_scores: dict[str, float]
    chi2: float
    p_value: float
    passed: bool


def _collect(r: float, seed: int, want_sigma: int = 0, want_tau: int = 0,
             chunk: int = 1 << 16, keep: bool = True) -> StoppingTimeScanner:
    rng = stream(seed, 0, purpose=1)
    probs = StepDistribution(r).probs
    sc = StoppingTimeScanner(keep_increments=keep)
    while sc.n_sigma < want_sigma or sc.n_tau < want_tau:
        sc.feed(sample_letters(rng, probs, chunk).tolist())
    return sc


def induced_law_test(r: float, N: int, seed: int = 0, which: str = "X") -> InducedLawResult:
    """Frequencies of the first ``N`` induced increments against
    ``(r/2, r/2, 1, 1)``; passes when every letter is within 3 sigma
    (binomial)."""
    target = dict(zip(LETTERS, induced_weights(r).tolist()))
    if N <= 0:
        return InducedLawResult(r, 0, dict.fromkeys(LETTERS, 0), target,
                                dict.fromkeys(LETTERS, 0.0), 0.0, 1.0, True)
    if which == "X":
        sc = _collect(r, seed, want_sigma=N)
        inc = sc.series.x_increments[:N]
    else:
        sc = _collect(r, seed, want_tau=N)
        inc = sc.series.y_increments[:N]
    counts = {x: inc.count(x) for x in LETTERS}
    z = {}
    for x in LETTERS:
        p = target[x]
        z[x] = (counts[x] - N * p) / math.sqrt(N * p * (1 - p))
    chi = stats.chisquare([counts[x] for x in LETTERS], [N * target[x] for x in LETTERS])
    return InducedLawResult(r, N, counts, target, z, float(chi.statistic), float(chi.pvalue),
                            all(abs(v) <= 3 for v in z.values()))


def stopping_rates(r: float, m: int, seed: int = 0) -> tuple[float, float]:
    """``(m / sigma(m), m / tau(m))`` from one long run."""
    if m < 1:
        raise ValueError("m must be >= 1")
    sc = _collect(r, seed, want_sigma=m, want_tau=m, keep=True)
    return m / sc.series.sigma[m], m / sc.series.tau[m]


def estimate_sigma_rate(r: float, m_max: int, seed: int = 0) -> float:
    return stopping_rates(r, m_max, seed)[0]


# -- incremental nu upper bound ----------------------------------------------------------


class NuTracker:
    """Upper bound on nu(Z_n), maintained under right multiplication.

    Every tree vertex keeps the reduced free word of the section there and
    its parity; a letter appended at the root is routed down the tree one
    letter per level.  Children are materialised only once a word gets longer
    than ``leaf_length`` (shorter words have ``nu_hat = length``), and never
    below ``max_depth``.  The value is

        nu_hat(w) = min(len(w), 1 + nu_hat(w[0]) + nu_hat(w[1])),

    i.e. nu in upper-bound mode with the free word as representative.
    """

    def __init__(self, group: AutomatonGroup | None = None, leaf_length: int = 2,
                 max_depth: int = 64):
        group = group or basilica()
        route, flip = route_table(group)
        self.letters = group.letters
        # node: [word, eps, children, value, depth]
        self.root = [[], 0, None, 0, 0]

        def push(node, li):
            w = node[0]
            if w and w[-1] == li ^ 1:
                w.pop()
            else:
                w.append(li)
            e = node[1]
            kids = node[2]
            if kids is not None:
                for c, s in route[li][e]:
                    push(kids[c], s)
            node[1] = e ^ flip[li]
            n = len(w)
            if kids is None:
                if n > leaf_length and node[4] < max_depth:
                    d = node[4] + 1
                    kids = node[2] = [[[], 0, None, 0, d], [[], 0, None, 0, d]]
                    ee = 0
                    for x in w:
                        for c, s in route[x][ee]:
                            push(kids[c], s)
                        ee ^= flip[x]
                    v = 1 + kids[0][3] + kids[1][3]
                    node[3] = n if n < v else v
                else:
                    node[3] = n
            else:
                v = 1 + kids[0][3] + kids[1][3]
                node[3] = n if n < v else v

        self._push = push

    def push(self, li: int) -> int:
        self._push(self.root, li)
        return self.root[3]

    def feed(self, letters) -> int:
        for li in letters:
            self._push(self.root, li)
        return self.root[3]

    @property
    def value(self) -> int:
        return self.root[3]

    @property
    def word(self) -> str:
        return "".join(self.letters[i] for i in self.root[0])

    @property
    def free_length(self) -> int:
        return len(self.root[0])


# -- Monte Carlo estimators ---------------------------------------------------------------


def _u_trial(args):
    r, seed, trial, n_list, mode = args
    rng = stream(seed, trial, purpose=2)
    n_max = max(n_list)
    letters = sample_letters(rng, StepDistribution(r).probs, n_max).tolist()
    marks = set(n_list)
    out = {}
    best = 0
    if mode == UPPER:
        tr = NuTracker()
        push = tr.push
        for k, li in enumerate(letters, 1):
            v = push(li)
            if v > best:
                best = v
            if k in marks:
                out[k] = best
    else:
        z: list[str] = []
        g = basilica()
        for k, li in enumerate(letters, 1):
            _push(z, LETTERS[li])
            v = nu("".join(z), g, EXACT).value
            best = max(best, v)
            if k in marks:
                out[k] = best
    return [out[n] for n in n_list]


@dataclass
class UTable:
    r: float
    mode: str
    trials: int
    n: list[int]
    u: list[float]
    sem: list[float]
    exponent: float
    intercept: float


def fit_power(ns, values) -> tuple[float, float]:
    """Least-squares slope and intercept of ``log value`` against ``log n``."""
    slope, intercept = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)
    return float(slope), float(intercept)


def estimate_u(r: float, n_list, trials: int, seed: int = 0, mode: str = UPPER,
               workers: int | None = 1) -> UTable:
    """``u_r(n) = E max_{i<=n} nu(Z_i)`` for each ``n`` in ``n_list``.

    ``mode="upper_bound"`` (default) uses the incremental free-word bound, so
    the table bounds ``u_r`` from above.  ``mode="exact"`` is only feasible
    for short runs; it raises ``NormCapExceeded`` when a section outgrows the
    word-norm cap.
    """
    if trials <= 0:
        raise ValueError("trials must be positive (the mean of no samples is undefined)")
    if mode not in (EXACT, UPPER):
        raise ValueError(f"unknown mode {mode!r}")
    n_list = sorted(int(n) for n in n_list)
    if not n_list or n_list[0] < 1:
        raise ValueError("n values must be >= 1")
    rows = np.array(pmap(_u_trial, [(r, seed, t, n_list, mode) for t in range(trials)], workers),
                    dtype=float)
    u = rows.mean(axis=0)
    sem = rows.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros_like(u)
    if len(n_list) >= 2:
        slope, icpt = fit_power(n_list, u)
    else:
        slope, icpt = float("nan"), float("nan")
    return UTable(r, mode, trials, n_list, u.tolist(), sem.tolist(), slope, icpt)


def _speed_trial(args):
    r, seed, trial, ladder = args
    rng = stream(seed, trial, purpose=3)
    letters = sample_letters(rng, StepDistribution(r).probs, max(ladder)).tolist()
    tr = NuTracker()
    push = tr.push
    marks = set(ladder)
    nu_at, len_at = {}, {}
    for k, li in enumerate(letters, 1):
        push(li)
        if k in marks:
            nu_at[k] = tr.value
            len_at[k] = tr.free_length
    return [(nu_at[n] / n, len_at[n] / n) for n in ladder]


@dataclass
class SpeedTable:
    r: float
    trials: int
    n: list[int]
    mean_nu_rate: list[float]
    sem_nu_rate: list[float]
    mean_free_rate: list[float]
    samples: np.ndarray = field(repr=False)

    @property
    def decreasing(self) -> bool:
        m = self.mean_nu_rate
        return all(m[i + 1] < m[i] for i in range(len(m) - 1))


def estimate_speed(r: float, ladder, trials: int, seed: int = 0,
                   workers: int | None = 1) -> SpeedTable:
    """``nu_hat(Z_n) / n`` (upper-bound mode) along a ladder of ``n``.

    Also reports ``|Z_n|_F2 / n``, the free-word length rate, which tends to
    the positive speed of the free walk and is listed for comparison only.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    ladder = sorted(int(n) for n in ladder)
    if ladder[0] < 1:
        raise ValueError("n values must be >= 1")
    res = np.array(pmap(_speed_trial, [(r, seed, t, ladder) for t in range(trials)], workers))
    nu_rate = res[:, :, 0]
    free_rate = res[:, :, 1]
    sem = nu_rate.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(len(ladder))
    return SpeedTable(r, trials, ladder, nu_rate.mean(axis=0).tolist(), sem.tolist(),
                      free_rate.mean(axis=0).tolist(), nu_rate)


def _tail_trial(args):
    r, seed, trial, n = args
    rng = stream(seed, trial, purpose=4)
    letters = sample_letters(rng, StepDistribution(r).probs, n).tolist()
    route, flip = route_table(basilica())
    X: list[int] = []
    Y: list[int] = []
    coords = (Y, X)
    e = 0
    best = 0
    for li in letters:
        for child, s in route[li][e]:
            stack = coords[child]
            if stack and stack[-1] == s ^ 1:
                stack.pop()
            else:
                stack.append(s)
                if child == 1 and len(X) > best:
                    best = len(X)
        e ^= flip[li]
    return best


@dataclass
class TailTable:
    r: float
    n: int
    trials: int
    a: list[float]
    tail: list[float]
    c_fit: float
    maxima: np.ndarray = field(repr=False)

    @property
    def nonincreasing(self) -> bool:
        return all(self.tail[i + 1] <= self.tail[i] for i in range(len(self.tail) - 1))


def escape_tail(r: float, n: int, a_list, trials: int, seed: int = 0,
                workers: int | None = 1) -> TailTable:
    """Empirical ``P(M_n > a n^(5/6))`` with ``M_n = max_{i<=n} |X_i|``.

    ``|X_i|`` is the reduced free-word length, an upper bound on the word
    norm in the group, so the tail is conservative.  ``c_fit`` is the
    smallest ``c`` with ``tail(a) <= c / a`` on the grid.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    maxima = np.array(pmap(_tail_trial, [(r, seed, t, n) for t in range(trials)], workers))
    scale = n ** (5 / 6)
    a_list = [float(a) for a in a_list]
    tail = [float(np.mean(maxima > a * scale)) for a in a_list]
    c_fit = max((a * t for a, t in zip(a_list, tail)), default=0.0)
    return TailTable(r, n, trials, a_list, tail, c_fit, maxima)

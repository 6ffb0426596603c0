"""Honest and adversarial two-party polarization experiments.

A trial measures every (Alice, Bob) setting pair once. Bob may swap in a
different setting depending on Alice's choice (a :class:`CheatPolicy`).
Coincidences per outcome channel are Poisson distributed, or, in exact
mode, replaced by the Born probabilities themselves.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRecord
from .measurement import WavePlateSetting, born_probabilities, observable_from_setting

EXACT = "exact"
DEFAULT_COUNTS_PER_PAIR = 14000
PI = np.pi


@dataclass(frozen=True)
class CheatPolicy:
    """Replacement Bob settings keyed by ``(alice_index, bob_index)``."""

    rules: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, j in self.rules:
            if not (0 <= i < 4 and 0 <= j < 4):
                raise ValueError(f"cheat rule key {(i, j)} is out of range 0..3")

    @property
    def honest(self):
        return not self.rules


@dataclass(frozen=True)
class SettingsPlan:
    alice: tuple
    bob: tuple
    counts_per_pair: object = DEFAULT_COUNTS_PER_PAIR
    trials: int = 10
    seed: int = 0

    def __post_init__(self):
        if len(self.alice) != 4 or len(self.bob) != 4:
            raise ValueError("each side needs exactly 4 settings")
        if self.counts_per_pair != EXACT:
            if int(self.counts_per_pair) != self.counts_per_pair or self.counts_per_pair < 100:
                raise ValueError("counts_per_pair must be an integer >= 100 or 'exact'")
        if self.trials < 2:
            raise ValueError("at least 2 trials are needed")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def exact(self):
        return self.counts_per_pair == EXACT


@dataclass(frozen=True)
class CountRecord:
    """Coincidences for outcomes (+,+), (+,-), (-,+), (-,-).

    Exact-mode records carry the (real-valued) Born probabilities instead of
    integer counts.
    """

    n_pp: float
    n_pm: float
    n_mp: float
    n_mm: float

    @property
    def total(self):
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def as_array(self):
        return np.array([self.n_pp, self.n_pm, self.n_mp, self.n_mm])


@dataclass
class TrialSet:
    grids: list
    chsh_values: list
    counts: list
    effective_bob: list

    @property
    def trials(self):
        return len(self.grids)


def paper_settings():
    """The four Alice and four Bob wave-plate settings, ``(alice, bob)``."""
    alice = (
        WavePlateSetting(0.0, 0.0),
        WavePlateSetting(PI / 4, PI / 8),
        WavePlateSetting(PI / 4, 0.0),
        WavePlateSetting(PI / 8, PI / 16),
    )
    bob = (
        WavePlateSetting(PI / 8, PI / 16),
        WavePlateSetting(-PI / 8, -PI / 16),
        WavePlateSetting(PI / 4, 0.0),
        WavePlateSetting(PI / 4, PI / 8),
    )
    return alice, bob


def paper_plan(counts_per_pair=DEFAULT_COUNTS_PER_PAIR, trials=10, seed=0):
    alice, bob = paper_settings()
    return SettingsPlan(alice, bob, counts_per_pair, trials, seed)


def paper_cheat_policy():
    """Bob rewrites his first two settings whenever Alice uses her first two."""
    return CheatPolicy({
        (0, 0): WavePlateSetting(0.0, 0.0),
        (0, 1): WavePlateSetting(0.0, 0.0),
        (1, 0): WavePlateSetting(PI / 4, PI / 8),
        (1, 1): WavePlateSetting(-PI / 4, -PI / 8),
    })


def effective_setting(policy, i, j, honest):
    return policy.rules.get((i, j), honest)


def pair_rng(seed, trial, i, j):
    """Independent Philox stream for one setting pair of one trial."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial, i, j))
    return np.random.Generator(np.random.Philox(ss))


def sample_counts(probs, n_expected, rng):
    """Draw each outcome channel from Poisson(n_expected * p)."""
    lam = n_expected * probs.as_array()
    return CountRecord(*(int(x) for x in rng.poisson(lam)))


def exact_counts(probs):
    return CountRecord(*probs.as_array())


def estimate_expectation(c):
    """``(n_pp - n_pm - n_mp + n_mm) / total``."""
    total = c.total
    if total <= 0:
        raise EmptyRecord("no coincidences recorded")
    return (c.n_pp - c.n_pm - c.n_mp + c.n_mm) / total


def chsh_from_grid(e):
    """``S = E00 + E01 + E10 - E11`` on the 2x2 CHSH block."""
    e = np.asarray(e, dtype=float)
    return float(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])


def pair_probabilities(state, plan, policy):
    """Born probabilities and effective Bob settings for all 16 pairs."""
    alice_obs = [observable_from_setting(s) for s in plan.alice]
    probs = [[None] * 4 for _ in range(4)]
    settings = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            bob_setting = effective_setting(policy, i, j, plan.bob[j])
            settings[i][j] = bob_setting
            probs[i][j] = born_probabilities(
                state, alice_obs[i], observable_from_setting(bob_setting))
    return probs, settings


def _run_one(trial, probs, plan):
    counts = [[None] * 4 for _ in range(4)]
    grid = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            if plan.exact:
                rec = exact_counts(probs[i][j])
            else:
                rec = sample_counts(probs[i][j], plan.counts_per_pair,
                                    pair_rng(plan.seed, trial, i, j))
            counts[i][j] = rec
            grid[i, j] = estimate_expectation(rec)
    return grid, counts


def run_trials(state, plan, policy=None, workers=1):
    """Simulate ``plan.trials`` repetitions of all 16 setting pairs.

    Trials draw from their own random substreams, so the result does not
    depend on ``workers`` or on execution order.
    """
    policy = policy or CheatPolicy()
    probs, settings = pair_probabilities(state, plan, policy)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: _run_one(t, probs, plan), range(plan.trials)))
    else:
        results = [_run_one(t, probs, plan) for t in range(plan.trials)]
    grids = [g for g, _ in results]
    return TrialSet(
        grids=grids,
        chsh_values=[chsh_from_grid(g[:2, :2]) for g in grids],
        counts=[c for _, c in results],
        effective_bob=settings,
    )


def pooled_counts(trial_set):
    """Sum each pair's records over all trials."""
    pooled = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            total = sum(trial[i][j].as_array() for trial in trial_set.counts)
            pooled[i][j] = CountRecord(*total)
    return pooled

"""Two-mode selection as a Bernoulli bandit.

Policies: KL-UCB, discounted KL-UCB, UCB, discounted UCB, explore-then-commit,
uniform random and a clairvoyant oracle. Environments are reward matrices of
shape ``(horizon, n_arms)`` (one Bernoulli draw per arm per round, so every
policy can be replayed on the same stream) together with the true per-round
means used to score regret.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import _backend

POLICIES = ("ucb", "etc", "random", "kl-ucb", "d-ucb", "d-kl-ucb", "oracle")
DEFAULT_GAMMA = 0.9
DEFAULT_ETC_M = 100
SCHEDULE_SEED = 20190611


def kl_divergence_bernoulli(p, q):
    """Bernoulli KL divergence ``d(p, q)``; ``+inf`` when ``q`` cannot explain ``p``."""
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    return _backend.kl_bernoulli(float(p), float(q))


def kl_ucb_index(mean, n, t, tol=1e-9):
    """Largest ``q`` in ``[mean, 1]`` with ``n * d(mean, q) <= log(t)``."""
    if not 0.0 <= mean <= 1.0:
        raise ValueError("mean must lie in [0, 1]")
    if not n > 0:
        raise ValueError("n must be positive")
    if not t >= 1:
        raise ValueError("t must be >= 1")
    return _backend.kl_ucb_bound(float(mean), math.log(t) / n, tol)


@dataclass
class PolicyState:
    """Raw and discounted per-arm counters of one episode."""

    n_arms: int = 2
    gamma: float = 1.0
    N: np.ndarray = None
    S: np.ndarray = None
    N_disc: np.ndarray = None
    S_disc: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("discount must lie in (0, 1]")
        k = self.n_arms
        for name, dt in (("N", np.int64), ("S", np.int64), ("N_disc", float), ("S_disc", float)):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(k, dtype=dt))

    def mean(self, arm):
        if self.N[arm] == 0:
            raise ValueError("unplayed arm")
        return self.S[arm] / self.N[arm]


def discounted_mean(state, arm):
    """Exponentially discounted empirical mean of ``arm``."""
    if state.N_disc[arm] <= 0.0:
        raise ValueError("unplayed arm")
    return state.S_disc[arm] / state.N_disc[arm]


def discounted_update(state, arm, reward, gamma=None):
    """Record one round: decay every arm, then credit the played one."""
    g = state.gamma if gamma is None else gamma
    if not 0.0 < g <= 1.0:
        raise ValueError("discount must lie in (0, 1]")
    if g != 1.0:
        state.N_disc *= g
        state.S_disc *= g
    state.N_disc[arm] += 1.0
    state.S_disc[arm] += reward
    state.N[arm] += 1
    state.S[arm] += int(reward)
    state.t += 1
    return state


def _argmax(values):
    # lowest index wins ties
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


class Policy:
    """Base class: play each arm once, then defer to :meth:`choose`."""

    name = "policy"
    discount = 1.0

    def reset(self, n_arms, horizon, rng):
        pass

    def select(self, state, true_means=None):
        if state.t < state.n_arms:
            return state.t
        return self.choose(state, true_means)

    def choose(self, state, true_means):
        raise NotImplementedError


class KLUCB(Policy):
    name = "kl-ucb"

    def choose(self, state, true_means):
        t = state.t + 1
        budget = math.log(t)
        return _argmax([_backend.kl_ucb_bound(state.S[i] / state.N[i], budget / state.N[i])
                        for i in range(state.n_arms)])


class DiscountedKLUCB(Policy):
    """KL-UCB on discounted means.

    By default the confidence budget keeps raw pull counts and ``log t``;
    ``canonical=True`` uses discounted counts and the log of their total.
    """

    name = "d-kl-ucb"

    def __init__(self, gamma=DEFAULT_GAMMA, canonical=False):
        if not 0.0 < gamma <= 1.0:
            raise ValueError("discount must lie in (0, 1]")
        self.discount = gamma
        self.canonical = canonical

    def choose(self, state, true_means):
        if self.canonical:
            lt = math.log(max(state.N_disc.sum(), 1.0))
            n = state.N_disc
        else:
            lt = math.log(state.t + 1)
            n = state.N
        out = []
        for i in range(state.n_arms):
            m = min(max(state.S_disc[i] / state.N_disc[i], 0.0), 1.0)
            out.append(_backend.kl_ucb_bound(m, lt / n[i]))
        return _argmax(out)


class UCB(Policy):
    name = "ucb"

    def choose(self, state, true_means):
        lt = 2.0 * math.log(state.t + 1)
        return _argmax([state.S[i] / state.N[i] + math.sqrt(lt / state.N[i])
                        for i in range(state.n_arms)])


class DiscountedUCB(Policy):
    """Discounted mean plus ``sqrt(2 log t / N_disc)``.

    ``canonical=True`` replaces ``log t`` by the log of the discounted total.
    """

    name = "d-ucb"

    def __init__(self, gamma=DEFAULT_GAMMA, canonical=False):
        if not 0.0 < gamma <= 1.0:
            raise ValueError("discount must lie in (0, 1]")
        self.discount = gamma
        self.canonical = canonical

    def choose(self, state, true_means):
        if self.canonical:
            lt = 2.0 * math.log(max(state.N_disc.sum(), 1.0))
        else:
            lt = 2.0 * math.log(state.t + 1)
        return _argmax([state.S_disc[i] / state.N_disc[i] + math.sqrt(lt / state.N_disc[i])
                        for i in range(state.n_arms)])


class ExploreThenCommit(Policy):
    name = "etc"

    def __init__(self, m=DEFAULT_ETC_M):
        if m < 1:
            raise ValueError("m must be >= 1")
        self.m = int(m)
        self._arm = None

    def reset(self, n_arms, horizon, rng):
        self._arm = None

    def select(self, state, true_means=None):
        if state.t < self.m * state.n_arms:
            return state.t % state.n_arms
        if self._arm is None:
            self._arm = _argmax([state.S[i] / state.N[i] for i in range(state.n_arms)])
        return self._arm


class RandomPolicy(Policy):
    name = "random"

    def reset(self, n_arms, horizon, rng):
        self._draws = rng.integers(0, n_arms, size=horizon)

    def select(self, state, true_means=None):
        return int(self._draws[state.t])


class Oracle(Policy):
    name = "oracle"

    def select(self, state, true_means=None):
        return _argmax(list(true_means))


def make_policy(name, gamma=DEFAULT_GAMMA, canonical=False, etc_m=DEFAULT_ETC_M):
    if name == "kl-ucb":
        return KLUCB()
    if name == "d-kl-ucb":
        return DiscountedKLUCB(gamma, canonical)
    if name == "ucb":
        return UCB()
    if name == "d-ucb":
        return DiscountedUCB(gamma, canonical)
    if name == "etc":
        return ExploreThenCommit(etc_m)
    if name == "random":
        return RandomPolicy()
    if name == "oracle":
        return Oracle()
    raise ValueError(f"unknown policy {name!r}")


@dataclass(frozen=True)
class ArmSchedule:
    """Piecewise-constant arm means; segment ``j`` starts at ``breakpoints[j]``."""

    breakpoints: tuple
    means: np.ndarray

    def __post_init__(self):
        bp = tuple(int(b) for b in self.breakpoints)
        m = np.atleast_2d(np.asarray(self.means, dtype=float))
        if not bp or bp[0] != 0:
            raise ValueError("first breakpoint must be round 0")
        if any(b >= c for b, c in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if m.shape[0] != len(bp):
            raise ValueError("one row of means per segment required")
        if np.any((m < 0) | (m > 1)):
            raise ValueError("means must lie in [0, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "means", m)

    @classmethod
    def stationary(cls, means):
        return cls((0,), np.asarray(means, dtype=float)[None, :])

    @property
    def n_arms(self):
        return self.means.shape[1]

    def segment_of(self, rounds):
        return np.searchsorted(self.breakpoints, rounds, side="right") - 1

    def mean_matrix(self, horizon):
        """``(horizon, n_arms)`` true means, round 0 first."""
        return self.means[self.segment_of(np.arange(horizon))]

    def draw(self, horizon, rng):
        """Bernoulli rewards for every arm on every round."""
        mu = self.mean_matrix(horizon)
        return (rng.random(mu.shape) < mu).astype(np.int8)


def canonical_schedule(n_segments=10, segment_length=1000, seed=SCHEDULE_SEED):
    """Shipped nonstationary schedule: the better arm alternates each segment.

    Means are uniform on [0.1, 0.9]; each segment sorts its pair so that arm
    ``j % 2`` is the better one.
    """
    rng = np.random.default_rng(seed)
    pairs = np.sort(rng.uniform(0.1, 0.9, size=(n_segments, 2)), axis=1)
    means = np.where((np.arange(n_segments) % 2 == 0)[:, None], pairs[:, ::-1], pairs)
    return ArmSchedule(tuple(range(0, n_segments * segment_length, segment_length)), means)


@dataclass
class RegretTrace:
    arms: np.ndarray
    rewards: np.ndarray
    best_mean: np.ndarray
    chosen_mean: np.ndarray
    regret: np.ndarray = field(init=False)

    def __post_init__(self):
        self.regret = np.cumsum(self.best_mean - self.chosen_mean)

    def __len__(self):
        return self.arms.shape[0]

    def tail_success_rate(self, fraction=0.5):
        """Average reward over the last ``fraction`` of rounds."""
        if not 0.0 < fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")
        k = max(int(round(len(self) * fraction)), 1)
        return float(self.rewards[-k:].mean())


def play(policy, rewards, means, rng=None, static_oracle=False):
    """Run ``policy`` over a fixed reward matrix and score it against ``means``.

    ``rewards`` and ``means`` are ``(horizon, n_arms)``. Regret is measured
    against the best mean of each round, or against the arm with the best
    average mean when ``static_oracle`` is set.
    """
    rewards = np.asarray(rewards)
    means = np.asarray(means, dtype=float)
    horizon, k = rewards.shape
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    if means.shape != rewards.shape:
        raise ValueError("rewards and means differ in shape")
    policy.reset(k, horizon, rng if rng is not None else np.random.default_rng(0))
    state = PolicyState(k, policy.discount)
    arms = np.empty(horizon, dtype=np.int64)
    for t in range(horizon):
        a = policy.select(state, means[t])
        arms[t] = a
        discounted_update(state, a, int(rewards[t, a]))
    rows = np.arange(horizon)
    if static_oracle:
        best = means[:, int(np.argmax(means.mean(axis=0)))]
    else:
        best = means.max(axis=1)
    return RegretTrace(arms, rewards[rows, arms].astype(np.int8), best, means[rows, arms])


def run_episode(policy, environment, horizon, rng, static_oracle=False):
    """One episode on an :class:`ArmSchedule` or on a relay slot stream.

    A relay environment is a pair ``(rewards, means)`` where ``rewards`` is
    an ``(n, 2)`` success matrix of simulated slots (column 0 active,
    column 1 passive) and ``means`` the per-mode success probabilities.
    """
    if isinstance(environment, ArmSchedule):
        rewards = environment.draw(horizon, rng)
        means = environment.mean_matrix(horizon)
    else:
        rewards, mu = environment
        rewards = np.asarray(rewards)[:horizon]
        if rewards.shape[0] < horizon:
            raise ValueError("slot stream shorter than the horizon")
        means = np.broadcast_to(np.asarray(mu, dtype=float), rewards.shape)
    return play(policy, rewards, means, rng, static_oracle)

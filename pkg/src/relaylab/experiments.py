"""Parameter sweeps and bandit regret races.

Each sweep point owns ``config.n_chunks`` slot chunks of ``config.horizon``
slots. Monte Carlo estimates pool every chunk; bandit replication ``r``
plays on chunk ``r`` so the learner and the estimates see the same slots.
Work items are independent and addressed by seed path, so results do not
depend on the number of worker threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from . import rng as rngs
from .analytic import theorem_terms
from .bandit import canonical_schedule, make_policy, play
from .relay_sim import simulate_slots

ANALYTIC_RULE = "proof"


@dataclass(frozen=True)
class ResultRow:
    sweep_variable: str
    sweep_value: float
    estimator: str
    estimate: float
    std_error: float
    replications: int
    n_samples: int

    def __post_init__(self):
        if not self.std_error >= 0:
            raise ValueError("standard error must be nonnegative")


@dataclass(frozen=True)
class RegretRow:
    policy: str
    round: int
    cumulative_regret: float
    std_error: float
    replications: int
    mean_arm0: float
    mean_arm1: float


def _map(fn, items, workers):
    # ordered results whatever the pool size
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _binomial_row(var, value, name, hits, n, reps):
    p = hits / n
    return ResultRow(var, value, name, p, math.sqrt(max(p * (1.0 - p), 0.0) / n), reps, n)


def _sample_row(var, value, name, samples):
    x = np.asarray(samples, dtype=float)
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return ResultRow(var, value, name, float(x.mean()), se, int(x.size), int(x.size))


def _chunk_job(config, code):
    def job(item):
        i, r = item
        params = config.point_params(config.grid[i])
        g = rngs.generator(config.seed, code, i, r, rngs.SLOTS)
        batch = simulate_slots(params, config.horizon, g, config.power_rule,
                               far_field=config.far_field)
        rewards = batch.rewards()
        coin = rngs.generator(config.seed, code, i, r, rngs.COIN).integers(0, 2, config.horizon)
        return rewards, int(rewards[np.arange(config.horizon), coin].sum())
    return job


def _analytic_job(config):
    def job(i):
        return theorem_terms(config.point_params(config.grid[i]), power_rule=ANALYTIC_RULE)
    return job


def run_sweep(config):
    """Success-probability table over ``config.grid``."""
    code = rngs.experiment_code(config.experiment)
    var = config.sweep_variable
    npts, nch = len(config.grid), config.n_chunks
    items = [(i, r) for i in range(npts) for r in range(nch)]
    chunks = _map(_chunk_job(config, code), items, config.workers)
    terms = _map(_analytic_job(config), range(npts), config.workers)

    def bandit_job(item):
        i, r, means = item
        rewards = chunks[i * nch + r][0]
        pol = make_policy("d-kl-ucb", config.gamma, config.canonical_discount, config.etc_m)
        tr = play(pol, rewards, np.broadcast_to(means, rewards.shape),
                  rngs.generator(config.seed, code, i, r, rngs.POLICY), config.static_oracle)
        return tr.tail_success_rate(config.tail_fraction)

    rows, bandit_items, pooled = [], [], []
    for i in range(npts):
        rw = np.concatenate([c[0] for c in chunks[i * nch:(i + 1) * nch]])
        pooled.append(rw)
        means = rw.mean(axis=0)
        bandit_items += [(i, r, means) for r in range(config.replications)]
    tails = _map(bandit_job, bandit_items, config.workers)

    for i, value in enumerate(config.grid):
        rw = pooled[i]
        n = rw.shape[0]
        a, b = int(rw[:, 0].sum()), int(rw[:, 1].sum())
        u = int((rw.max(axis=1)).sum())
        coin_hits = sum(c[1] for c in chunks[i * nch:(i + 1) * nch])
        t = terms[i]
        R = config.replications
        rows += [
            _binomial_row(var, value, "p_active", a, n, nch),
            _binomial_row(var, value, "p_passive", b, n, nch),
            _binomial_row(var, value, "p_optimal", u, n, nch),
            ResultRow(var, value, "p_optimal_analytic", t.total, 0.0, 0, 0),
            ResultRow(var, value, "term_PA_analytic", t.P_A, 0.0, 0, 0),
            ResultRow(var, value, "term_J_analytic", t.J, 0.0, 0, 0),
            ResultRow(var, value, "term_K_analytic", t.K, 0.0, 0, 0),
            _binomial_row(var, value, "p_random", coin_hits, n, nch),
            _sample_row(var, value, "p_bandit", tails[i * R:(i + 1) * R]),
        ]
    return rows


def run_fig2(config):
    if config.sweep_variable != "zeta":
        raise ValueError("fig2 sweeps zeta")
    return run_sweep(config)


def run_fig3(config):
    if config.sweep_variable != "E_C":
        raise ValueError("fig3 sweeps E_C")
    return run_sweep(config)


def fig4_traces(config, schedule=None):
    """Per-policy regret matrices ``(replications, horizon)`` on shared reward streams."""
    code = rngs.experiment_code("fig4")
    sched = schedule or canonical_schedule(segment_length=max(config.horizon // 10, 1))
    means = sched.mean_matrix(config.horizon)

    def job(r):
        rewards = sched.draw(config.horizon, rngs.generator(config.seed, code, 0, r, rngs.REWARDS))
        out = {}
        for k, name in enumerate(config.policies):
            pol = make_policy(name, config.gamma, config.canonical_discount, config.etc_m)
            g = rngs.generator(config.seed, code, k, r, rngs.POLICY)
            out[name] = play(pol, rewards, means, g, config.static_oracle).regret
        return out

    per_rep = _map(job, range(config.replications), config.workers)
    return {name: np.stack([d[name] for d in per_rep]) for name in config.policies}, sched


def run_fig4(config, schedule=None):
    """Averaged cumulative regret per policy and round."""
    traces, sched = fig4_traces(config, schedule)
    means = sched.mean_matrix(config.horizon)
    R = config.replications
    rows = []
    for name in config.policies:
        m = traces[name].mean(axis=0)
        se = traces[name].std(axis=0, ddof=1) / math.sqrt(R) if R > 1 else np.zeros_like(m)
        rows += [RegretRow(name, t + 1, float(m[t]), float(se[t]), R,
                           float(means[t, 0]), float(means[t, 1]))
                 for t in range(config.horizon)]
    return rows


RUNNERS = {"fig2": run_fig2, "fig3": run_fig3, "fig4": run_fig4}


def run(config):
    try:
        runner = RUNNERS[config.experiment]
    except KeyError:
        raise ValueError(f"no runner for experiment {config.experiment!r}") from None
    return runner(config)

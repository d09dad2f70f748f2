"""Regret of Algorithm 1 against the genie base policy on common realizations."""

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..channel import TransitionMatrix, generate_states, resolve_belief
from ..errors import DomainError
from ..meta import BlockSchedule, extract_suboptimal_counts, g_of_n_many, run_meta_on_states
from ..parallel import map_replications, mean_halfwidth
from ..policies import genie_policy
from ..rng import StreamKey


@dataclass(frozen=True)
class RegretSeries:
    """Mean cumulative rewards and regret at each checkpoint.

    ``regret`` is exactly ``genie_mean - meta_mean``; half-widths are 95%
    normal intervals from per-replication differences.
    """

    n: np.ndarray
    g_n: np.ndarray
    genie_mean: np.ndarray
    meta_mean: np.ndarray
    regret: np.ndarray
    regret_halfwidth: np.ndarray
    t_n_mean: np.ndarray
    replications: int

    @property
    def ln_n(self) -> np.ndarray:
        return np.log(self.n.astype(np.float64))

    @property
    def normalized(self) -> np.ndarray:
        """R(n) / (G(n) ln n), NaN where ln n = 0."""
        denom = self.g_n * self.ln_n
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(denom > 0, self.regret / np.where(denom > 0, denom, 1.0), np.nan)


def nearest_boundaries(targets, schedule: BlockSchedule, horizon=None) -> list[int]:
    """Block boundary closest to each target (ties to the earlier one)."""
    targets = [int(t) for t in targets]
    limit = horizon if horizon is not None else 2 * max(targets) + 100
    ends = schedule.boundaries(limit)
    out = []
    for t in targets:
        i = int(np.argmin(np.abs(ends - t)))
        out.append(int(ends[i]))
    return out


def _regret_chunk(P, n_channels, schedule, horizon, checkpoints, omega0, carry, key,
                  start, stop):
    genie = int(genie_policy(P))
    order = kernels.belief_order(omega0)
    idx = checkpoints - 1
    reps = stop - start
    genie_cum = np.empty((reps, checkpoints.shape[0]), dtype=np.int64)
    meta_cum = np.empty_like(genie_cum)
    t_counts = np.empty_like(genie_cum)
    channels = np.empty(horizon, dtype=np.int64)
    rewards = np.empty(horizon, dtype=np.int8)
    for r in range(start, stop):
        states = generate_states(P, n_channels, horizon, omega0, key.replicate(r))
        kernels.run_policy_window(genie, states, 0, horizon, order, channels, rewards)
        genie_cum[r - start] = np.cumsum(rewards, dtype=np.int64)[idx]
        traj = run_meta_on_states(states, schedule, horizon, omega0, carry)
        meta_cum[r - start] = np.cumsum(traj.slot_reward, dtype=np.int64)[idx]
        ends, t_n = extract_suboptimal_counts(traj, genie)
        t_counts[r - start] = t_n[np.searchsorted(ends, checkpoints)]
    return genie_cum, meta_cum, t_counts


def regret_curve(P: TransitionMatrix, n_channels: int, schedule: BlockSchedule, horizon: int,
                 checkpoints, replications: int, initial_belief, key: StreamKey,
                 carry_belief: bool = True, jobs: int = 1) -> RegretSeries:
    """Monte Carlo estimate of R(n) at block-boundary checkpoints.

    Each replication draws one channel matrix and plays both the genie policy
    (fixed for the whole run) and Algorithm 1 on it.
    """
    if replications < 1:
        raise DomainError("replications must be >= 1")
    cps = np.array(sorted(set(int(c) for c in checkpoints)), dtype=np.int64)
    if cps.size == 0:
        raise DomainError("at least one checkpoint is required")
    if cps[-1] > horizon:
        raise DomainError(f"checkpoint {cps[-1]} exceeds horizon {horizon}")
    ends = schedule.boundaries(horizon)
    off = [int(c) for c in cps if c not in set(ends.tolist())]
    if off:
        raise DomainError(f"checkpoints not on block boundaries: {off}")
    omega0 = resolve_belief(P, n_channels, initial_belief)
    run_to = int(cps[-1])
    genie_cum, meta_cum, t_counts = map_replications(
        _regret_chunk, replications, jobs,
        P, n_channels, schedule, run_to, cps, omega0, bool(carry_belief), key)
    genie_mean = genie_cum.mean(axis=0)
    meta_mean = meta_cum.mean(axis=0)
    _, hw = mean_halfwidth(genie_cum - meta_cum)
    return RegretSeries(
        n=cps,
        g_n=g_of_n_many(cps, schedule),
        genie_mean=genie_mean,
        meta_mean=meta_mean,
        regret=genie_mean - meta_mean,
        regret_halfwidth=hw,
        t_n_mean=t_counts.mean(axis=0),
        replications=replications,
    )


def log_fit(n, values):
    """Least-squares fit values ~ c0 + c1 ln n; returns (c0, c1, r_squared)."""
    x = np.log(np.asarray(n, dtype=np.float64))
    y = np.asarray(values, dtype=np.float64)
    c1, c0 = np.polyfit(x, y, 1)
    resid = y - (c0 + c1 * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(c0), float(c1), r2

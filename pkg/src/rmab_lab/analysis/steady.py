"""Steady-state reward of a base policy and its transient loss from a start belief."""

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..channel import TransitionMatrix, as_belief, resolve_belief
from ..errors import DomainError
from ..parallel import map_replications, mean_halfwidth
from ..policies import PolicyKind
from ..rng import StreamKey
from .oracle import MAX_CHANNELS, exact_expected_reward

# keep each uniform block under ~32 MB
_BATCH_BYTES = 32 * 2**20


def _cumulative_chunk(P, kinds, omega0, points, key, start, stop):
    """Cumulative rewards, shape (reps, len(kinds), len(points)), common states."""
    points = np.asarray(points, dtype=np.int64)
    length = int(points[-1])
    n = omega0.shape[0]
    per_rep = length * n * 8
    batch = max(1, _BATCH_BYTES // per_rep)
    out = np.empty((stop - start, len(kinds), points.shape[0]), dtype=np.int64)
    order = kernels.belief_order(omega0)
    for a in range(start, stop, batch):
        b = min(stop, a + batch)
        u = np.stack([key.replicate(r).generator().random((length, n)) for r in range(a, b)])
        states = kernels.markov_states_batch(u, omega0, float(P.p01), float(P.p11))
        for q, kind in enumerate(kinds):
            out[a - start:b - start, q] = kernels.policy_cumulative_batch(
                int(kind), states, order, points)
    return out


def simulate_cumulative(P: TransitionMatrix, kinds, initial_belief, points, reps: int,
                        key: StreamKey, jobs: int = 1) -> np.ndarray:
    """Monte Carlo cumulative rewards after each length in ``points``.

    All policies in ``kinds`` run on the same realizations; replication r draws
    its states from ``key.replicate(r)`` with initial law ``initial_belief``.
    """
    points = np.asarray(sorted(set(int(p) for p in points)), dtype=np.int64)
    if points[0] < 1:
        raise DomainError("run lengths must be >= 1")
    omega0 = as_belief(initial_belief)
    return map_replications(_cumulative_chunk, reps, jobs,
                            P, tuple(kinds), omega0, points, key)


@dataclass(frozen=True)
class PolicyProfile:
    policy: PolicyKind
    u_estimate: float
    u_halfwidth: float
    transient_bound_estimate: float = float("nan")

    @property
    def interval(self):
        return self.u_estimate - self.u_halfwidth, self.u_estimate + self.u_halfwidth


def estimate_steady_reward(P: TransitionMatrix, kind: PolicyKind, n_channels: int,
                           run_length: int, burn_in: int, replications: int, key: StreamKey,
                           initial_belief=None, jobs: int = 1) -> PolicyProfile:
    """Per-slot reward after ``burn_in`` slots, averaged over replications."""
    return estimate_steady_rewards(P, (kind,), n_channels, run_length, burn_in,
                                   replications, key, initial_belief, jobs)[0]


def estimate_steady_rewards(P, kinds, n_channels, run_length, burn_in, replications, key,
                            initial_belief=None, jobs=1):
    """Profiles for several policies evaluated on common realizations."""
    if not run_length > burn_in >= 0:
        raise DomainError(f"need run_length > burn_in >= 0, got {run_length}, {burn_in}")
    if replications < 1:
        raise DomainError("replications must be >= 1")
    omega0 = resolve_belief(P, n_channels, initial_belief)
    points = [run_length] if burn_in == 0 else [burn_in, run_length]
    cum = simulate_cumulative(P, kinds, omega0, points, replications, key, jobs)
    head = cum[:, :, 0] if burn_in else 0
    per_slot = (cum[:, :, -1] - head) / (run_length - burn_in)
    mean, hw = mean_halfwidth(per_slot)
    if replications < 2:
        hw = np.zeros_like(mean)
    return [PolicyProfile(PolicyKind(k), float(m), float(h)) for k, m, h in zip(kinds, mean, hw)]


@dataclass(frozen=True)
class TransientRow:
    belief: tuple
    length: int
    mean_reward: float
    halfwidth: float
    deviation: float
    exact: bool


def estimate_transient_bound(P: TransitionMatrix, kind: PolicyKind, belief_grid, L_grid,
                             replications: int, key: StreamKey, profile: PolicyProfile,
                             exact_limit: int = 12, jobs: int = 1):
    """Largest |E[sum of L rewards] - L * U| over a grid of start beliefs and lengths.

    Lengths up to ``exact_limit`` (and N <= 3) use the exact oracle and carry
    zero half-width; longer ones use Monte Carlo with common realizations
    across lengths. Returns ``(max_deviation, rows)``.
    """
    if not belief_grid or not L_grid:
        raise DomainError("belief and length grids must be non-empty")
    if profile.policy != kind:
        raise DomainError("profile belongs to a different policy")
    u = profile.u_estimate
    lengths = sorted(set(int(L) for L in L_grid))
    rows = []
    for belief in belief_grid:
        omega = as_belief(belief)
        exact_L = [L for L in lengths if L <= exact_limit and omega.shape[0] <= MAX_CHANNELS]
        mc_L = [L for L in lengths if L not in exact_L]
        for L in exact_L:
            m = exact_expected_reward(P, kind, omega, L)
            rows.append(TransientRow(tuple(omega), L, m, 0.0, abs(m - L * u), True))
        if mc_L:
            cum = simulate_cumulative(P, (kind,), omega, mc_L, replications,
                                      key, jobs)[:, 0, :]
            mean, hw = mean_halfwidth(cum)
            for L, m, h in zip(mc_L, mean, hw):
                rows.append(TransientRow(tuple(omega), L, float(m), float(h),
                                         abs(float(m) - L * u), False))
    rows.sort(key=lambda r: (r.belief, r.length))
    return max(r.deviation for r in rows), rows

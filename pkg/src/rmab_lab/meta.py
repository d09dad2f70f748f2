"""Block-scheduled UCB meta-policy over the base policies (Algorithm 1)."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import TransitionMatrix, as_belief, generate_states, resolve_belief
from .errors import DomainError
from .policies import PolicyKind
from .rng import StreamKey

RULES = ("const", "log", "sqrt", "linear")


@dataclass(frozen=True)
class BlockSchedule:
    """Rule generating the block lengths K_1, K_2, ...

    ``const`` uses ``param`` as the constant; ``log`` is ceil(ln(i + 1)),
    ``sqrt`` is ceil(sqrt(i)) and ``linear`` is i.
    """

    rule: str = "log"
    param: int = 1

    def __post_init__(self):
        if self.rule not in RULES:
            raise DomainError(f"unknown schedule rule {self.rule!r}; expected one of {RULES}")
        if self.rule == "const" and self.param < 1:
            raise DomainError(f"constant block length must be >= 1, got {self.param}")

    @classmethod
    def parse(cls, text: str) -> "BlockSchedule":
        text = text.strip().lower()
        if text.startswith("const:"):
            try:
                return cls("const", int(text.split(":", 1)[1]))
            except ValueError:
                raise DomainError(f"bad constant schedule {text!r}") from None
        return cls(text)

    def __str__(self):
        return f"const:{self.param}" if self.rule == "const" else self.rule

    def lengths(self, count: int) -> np.ndarray:
        """K_1 .. K_count as an int64 array."""
        return np.array([block_length(i, self) for i in range(1, count + 1)], dtype=np.int64)

    def lengths_covering(self, horizon: int) -> np.ndarray:
        """The shortest prefix K_1 .. K_I whose sum reaches ``horizon``."""
        out, total, i = [], 0, 1
        while total < horizon:
            k = block_length(i, self)
            out.append(k)
            total += k
            i += 1
        return np.array(out, dtype=np.int64)

    def boundaries(self, horizon: int) -> np.ndarray:
        """Block end slots K_1, K_1 + K_2, ... not exceeding ``horizon``."""
        ends = np.cumsum(self.lengths_covering(horizon))
        return ends[ends <= horizon]


def block_length(i: int, schedule: BlockSchedule) -> int:
    if i < 1:
        raise DomainError(f"block index must be >= 1, got {i}")
    if schedule.rule == "const":
        return schedule.param
    if schedule.rule == "log":
        return max(1, math.ceil(math.log(i + 1)))
    if schedule.rule == "sqrt":
        return math.isqrt(i - 1) + 1
    return i


def g_of_n(n: int, schedule: BlockSchedule) -> int:
    """Block length in force at slot n: K_I for the least I with K_1+..+K_I >= n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    total, i = 0, 0
    while total < n:
        i += 1
        total += block_length(i, schedule)
    return block_length(i, schedule)


def g_of_n_many(ns, schedule: BlockSchedule) -> np.ndarray:
    ns = np.asarray(ns, dtype=np.int64)
    lengths = schedule.lengths_covering(int(ns.max()))
    idx = np.searchsorted(np.cumsum(lengths), ns, side="left")
    return lengths[idx]


def ucb_index(x_hat_j: float, i_j: int, n: int) -> float:
    """X_j / i_j + sqrt(3 ln n / i_j)."""
    if i_j < 1 or n < 1:
        raise DomainError("ucb_index needs i_j >= 1 and n >= 1")
    return kernels.ucb_index(float(x_hat_j), float(i_j), float(n))


@dataclass(frozen=True)
class Trajectory:
    """One meta-policy run.

    Per-slot arrays cover slots 1..n (index 0 is slot 1); per-block arrays
    cover every completed block. ``block_policy`` holds PolicyKind codes.
    """

    slot_policy: np.ndarray
    slot_channel: np.ndarray
    slot_reward: np.ndarray
    block_policy: np.ndarray
    block_length: np.ndarray
    block_mean: np.ndarray

    @property
    def n_slots(self) -> int:
        return int(self.slot_reward.shape[0])

    @property
    def n_blocks(self) -> int:
        return int(self.block_length.shape[0])

    @property
    def block_end(self) -> np.ndarray:
        return np.cumsum(self.block_length)

    @property
    def slot_block(self) -> np.ndarray:
        """1-based block index of every slot."""
        return np.repeat(np.arange(1, self.n_blocks + 1), self.block_length)

    def final_state(self):
        """Algorithm 1 counters after the last block: (x_hat, i_j, n, i)."""
        x_hat = np.zeros(2)
        counts = np.zeros(2, dtype=np.int64)
        np.add.at(x_hat, self.block_policy, self.block_mean)
        np.add.at(counts, self.block_policy, 1)
        return x_hat, counts, self.n_slots, self.n_blocks + 1


ARMS = np.array([PolicyKind.PI1, PolicyKind.PI2], dtype=np.int64)


def run_meta_on_states(states: np.ndarray, schedule: BlockSchedule, horizon: int,
                       initial_belief, carry_belief: bool = True) -> Trajectory:
    """Algorithm 1 on a pre-generated state matrix (model-blind)."""
    n_channels = states.shape[1]
    omega0 = as_belief(initial_belief, n_channels)
    if horizon > states.shape[0]:
        raise DomainError(f"horizon {horizon} exceeds state matrix length {states.shape[0]}")
    lengths = schedule.lengths_covering(horizon)
    if lengths.shape[0] < 2 or lengths[0] + lengths[1] > horizon:
        raise DomainError(f"horizon {horizon} is shorter than the initialization blocks K_1 + K_2")
    slot_policy = np.empty(horizon, dtype=np.int8)
    slot_channel = np.empty(horizon, dtype=np.int64)
    slot_reward = np.empty(horizon, dtype=np.int8)
    block_arm = np.empty(lengths.shape[0], dtype=np.int64)
    block_mean = np.empty(lengths.shape[0], dtype=np.float64)
    n_blocks, n = kernels.meta_policy(states, ARMS, lengths, horizon, omega0, bool(carry_belief),
                                      slot_policy, slot_channel, slot_reward,
                                      block_arm, block_mean)
    return Trajectory(
        slot_policy=slot_policy[:n],
        slot_channel=slot_channel[:n],
        slot_reward=slot_reward[:n],
        block_policy=ARMS[block_arm[:n_blocks]],
        block_length=lengths[:n_blocks].copy(),
        block_mean=block_mean[:n_blocks],
    )


def run_meta_policy(P_env: TransitionMatrix, n_channels: int, schedule: BlockSchedule,
                    horizon: int, initial_belief, key: StreamKey,
                    carry_belief: bool = True) -> Trajectory:
    """Generate one channel realization from ``key`` and run Algorithm 1 on it.

    ``P_env`` only drives the state generator; the meta-policy sees the sensed
    states alone. Pass ``initial_belief=None`` for the stationary law.
    """
    omega0 = resolve_belief(P_env, n_channels, initial_belief)
    states = generate_states(P_env, n_channels, horizon, omega0, key)
    return run_meta_on_states(states, schedule, horizon, omega0, carry_belief)


def extract_suboptimal_counts(traj: Trajectory, genie: PolicyKind):
    """(n, T(n)) at every block boundary, T(n) = blocks so far not using ``genie``."""
    t_n = np.cumsum(traj.block_policy != int(genie))
    return traj.block_end, t_n

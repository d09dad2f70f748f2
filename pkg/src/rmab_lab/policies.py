"""Myopic base policies for identical two-state channels.

``pi1_select`` and ``pi2_select`` work on an explicit :class:`VisitLedger` and
are the readable reference for the decision rules. ``run_policy`` plays a whole
window through the compiled kernel, which encodes the same ledger compactly.
"""

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import kernels
from .channel import TransitionMatrix, as_belief
from .errors import DomainError


class PolicyKind(IntEnum):
    PI1 = kernels.PI1
    PI2 = kernels.PI2

    @property
    def label(self) -> str:
        return "pi1" if self is PolicyKind.PI1 else "pi2"

    @classmethod
    def parse(cls, text: str) -> "PolicyKind":
        try:
            return {"pi1": cls.PI1, "pi2": cls.PI2}[text.strip().lower()]
        except KeyError:
            raise DomainError(f"unknown policy {text!r}; expected pi1 or pi2") from None


def initial_order(belief) -> list[int]:
    """Channels by descending belief, ties broken by ascending index."""
    belief = np.asarray(belief, dtype=float)
    return sorted(range(belief.shape[0]), key=lambda c: (-belief[c], c))


@dataclass
class VisitLedger:
    """Visit history of one policy run.

    ``last_visit[c]`` is the run slot (0-based) in which channel ``c`` was last
    sensed, or None. Never-visited channels are ordered by ``never_rank``
    (lower rank means "older"). ``current_slot`` is the slot whose observation
    the next decision reacts to, -1 before the first slot.
    """

    last_visit: list
    never_rank: list
    current_channel: int
    current_slot: int = -1

    @classmethod
    def start(cls, belief) -> "VisitLedger":
        order = initial_order(belief)
        rank = [0] * len(order)
        for r, c in enumerate(order):
            rank[c] = r
        return cls([None] * len(order), rank, order[0], -1)

    @property
    def n_channels(self) -> int:
        return len(self.last_visit)

    def age_key(self, c: int) -> tuple:
        """Sort key: smaller means visited longer ago (never counts oldest)."""
        v = self.last_visit[c]
        return (0, self.never_rank[c]) if v is None else (1, v)

    def copy(self) -> "VisitLedger":
        return VisitLedger(list(self.last_visit), self.never_rank, self.current_channel,
                           self.current_slot)

    def record(self, channel: int) -> None:
        """Mark ``channel`` as sensed in the next slot."""
        self.current_slot += 1
        self.current_channel = channel
        self.last_visit[channel] = self.current_slot

    def oldest_other(self) -> int:
        others = [c for c in range(self.n_channels) if c != self.current_channel]
        return min(others, key=self.age_key)


def pi1_select(ledger: VisitLedger, last_observation) -> int:
    """Stay on a 1, otherwise move to the channel visited longest ago."""
    if last_observation is None or last_observation == 1:
        return ledger.current_channel
    return ledger.oldest_other()


def pi2_select(ledger: VisitLedger, last_observation) -> int:
    """Stay on a 0; on a 1 switch, preferring recent channels at even distance.

    Distance is measured from the slot being decided (``current_slot + 1``).
    Channels an even number of slots back last showed a 1 at an odd number of
    transitions ago, which under negative correlation puts their belief above
    the stationary value; the most recent of them is the myopic choice.
    """
    if last_observation is None or last_observation == 0:
        return ledger.current_channel
    even = [
        c for c in range(ledger.n_channels)
        if c != ledger.current_channel
        and ledger.last_visit[c] is not None
        and (ledger.current_slot + 1 - ledger.last_visit[c]) % 2 == 0
    ]
    if even:
        return max(even, key=lambda c: ledger.last_visit[c])
    return ledger.oldest_other()


SELECTORS = {PolicyKind.PI1: pi1_select, PolicyKind.PI2: pi2_select}


def genie_policy(P: TransitionMatrix) -> PolicyKind:
    """The myopic structure that is optimal for the correlation sign of P."""
    return PolicyKind.PI1 if P.p11 >= P.p01 else PolicyKind.PI2


@dataclass
class PolicyRun:
    reward_sum: int
    rewards: np.ndarray
    channels: np.ndarray
    final_ledger: VisitLedger = field(repr=False)


def _ledger_from_keys(keys, current_channel, length, belief) -> VisitLedger:
    start = VisitLedger.start(belief)
    last = [int(k) if k >= 0 else None for k in keys]
    return VisitLedger(last, start.never_rank, int(current_channel), length - 1)


def run_policy(kind: PolicyKind, states: np.ndarray, start_slot: int, length: int,
               initial_belief) -> PolicyRun:
    """Play ``kind`` on rows ``start_slot .. start_slot + length - 1`` of ``states``.

    The policy sees only the state of the channel it senses; ``initial_belief``
    fixes the first channel and the order among never-visited channels.
    """
    horizon, n_channels = states.shape
    if length < 1 or start_slot < 0 or start_slot + length > horizon:
        raise DomainError(
            f"slot window [{start_slot}, {start_slot + length}) outside horizon {horizon}"
        )
    belief = as_belief(initial_belief, n_channels)
    order = kernels.belief_order(belief)
    channels = np.empty(length, dtype=np.int64)
    rewards = np.empty(length, dtype=np.int8)
    keys = kernels.run_policy_window(int(kind), states, start_slot, length, order,
                                     channels, rewards)
    ledger = _ledger_from_keys(keys, channels[-1], length, belief)
    return PolicyRun(int(rewards.sum(dtype=np.int64)), rewards, channels, ledger)

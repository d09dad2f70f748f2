"""Simulation lab for a block-scheduled UCB meta-policy on restless two-state channels."""

__version__ = "0.1.0"

from .channel import TransitionMatrix, generate_states, stationary_probability, update_belief
from .errors import DomainError, NonErgodicError
from .meta import BlockSchedule, block_length, g_of_n, run_meta_policy, ucb_index
from .policies import PolicyKind, genie_policy, run_policy
from .rng import StreamKey

__all__ = [
    "BlockSchedule",
    "DomainError",
    "NonErgodicError",
    "PolicyKind",
    "StreamKey",
    "TransitionMatrix",
    "block_length",
    "g_of_n",
    "generate_states",
    "genie_policy",
    "run_meta_policy",
    "run_policy",
    "stationary_probability",
    "ucb_index",
    "update_belief",
]

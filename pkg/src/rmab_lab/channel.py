"""Identical two-state Markov channels and their one-step belief filter."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import DomainError, NonErgodicError
from .rng import StreamKey


def _check_prob(name, value):
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class TransitionMatrix:
    """Channel dynamics: P(0 -> 1) = p01 and P(1 -> 1) = p11."""

    p01: float
    p11: float

    def __post_init__(self):
        _check_prob("p01", self.p01)
        _check_prob("p11", self.p11)

    @property
    def positively_correlated(self) -> bool:
        return self.p11 >= self.p01

    @property
    def correlation(self) -> float:
        """Second eigenvalue p11 - p01 of the transition matrix."""
        return self.p11 - self.p01

    @property
    def ergodic(self) -> bool:
        return not (self.p01 == 0.0 and self.p11 == 1.0)


class Observation(Enum):
    SAW_1 = 1
    SAW_0 = 0
    UNOBSERVED = None


def update_belief(omega: float, observation: Observation, P: TransitionMatrix) -> float:
    """Next-slot probability of state 1 given this slot's observation."""
    _check_prob("omega", omega)
    if observation is Observation.SAW_1:
        return P.p11
    if observation is Observation.SAW_0:
        return P.p01
    w = omega * P.p11 + (1.0 - omega) * P.p01
    return min(1.0, max(0.0, w))


def stationary_probability(P: TransitionMatrix) -> float:
    """Long-run fraction of time in state 1.

    Raises NonErgodicError for p01 = 0, p11 = 1 where both states absorb.
    """
    denom = (1.0 - P.p11) + P.p01
    if denom <= 0.0:
        raise NonErgodicError("p01 = 0 and p11 = 1: no unique stationary law")
    return P.p01 / denom


def as_belief(omega, n_channels=None) -> np.ndarray:
    """Validate a belief vector and return it as a float64 array."""
    arr = np.asarray(omega, dtype=np.float64).reshape(-1)
    if n_channels is not None and arr.shape[0] != n_channels:
        raise DomainError(f"belief has {arr.shape[0]} entries, expected {n_channels}")
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise DomainError(f"belief entries must lie in [0, 1], got {arr.tolist()}")
    return arr


def resolve_belief(P: TransitionMatrix, n_channels: int, initial_belief=None) -> np.ndarray:
    """Explicit belief if given, otherwise the stationary law on every channel."""
    if initial_belief is None:
        return np.full(n_channels, stationary_probability(P))
    return as_belief(initial_belief, n_channels)


def generate_states(P: TransitionMatrix, n_channels: int, horizon: int,
                    initial_distribution, key: StreamKey) -> np.ndarray:
    """Sample a ``horizon x n_channels`` int8 matrix of channel states.

    Row t is slot t + 1; column i starts Bernoulli(initial_distribution[i]).
    """
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    if n_channels < 2:
        raise DomainError(f"n_channels must be >= 2, got {n_channels}")
    omega0 = as_belief(initial_distribution, n_channels)
    u = key.generator().random((horizon, n_channels))
    return kernels.markov_states(u, omega0, float(P.p01), float(P.p11))

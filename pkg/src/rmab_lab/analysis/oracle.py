"""Exact finite-horizon expected reward by enumerating observation branches.

Channels are independent, so along any observation history the posterior is a
product of per-channel beliefs. A deterministic policy therefore unfolds into a
binary tree (one branch per observation) with at most 2**L leaves for any N.
The decision rules come from ``policies.pi1_select``/``pi2_select`` acting on a
``VisitLedger``, not from the compiled kernels, so the two stay independent.
"""

from ..channel import TransitionMatrix, as_belief
from ..errors import DomainError
from ..policies import SELECTORS, PolicyKind, VisitLedger

MAX_LENGTH = 20
MAX_CHANNELS = 3


def _propagate(belief, sensed, obs, P):
    out = []
    for c, w in enumerate(belief):
        if c == sensed:
            out.append(P.p11 if obs == 1 else P.p01)
        else:
            out.append(w * P.p11 + (1.0 - w) * P.p01)
    return out


def exact_expected_reward(P: TransitionMatrix, kind: PolicyKind, initial_belief, L: int,
                          selector=None) -> float:
    """E[sum of rewards over L slots] for a policy started from ``initial_belief``.

    ``selector(ledger, last_obs) -> channel`` overrides the built-in rule for
    ``kind``; it is used to compare the base policies against other rules.
    """
    belief = [float(w) for w in as_belief(initial_belief)]
    if L < 1 or L > MAX_LENGTH:
        raise DomainError(f"exact oracle supports 1 <= L <= {MAX_LENGTH}, got {L}")
    if not 2 <= len(belief) <= MAX_CHANNELS:
        raise DomainError(f"exact oracle supports 2..{MAX_CHANNELS} channels, got {len(belief)}")
    select = selector or SELECTORS[PolicyKind(kind)]

    def expand(belief, ledger, last_obs, remaining):
        c = select(ledger, last_obs)
        w = belief[c]
        value = w
        if remaining == 1:
            return value
        for obs, prob in ((1, w), (0, 1.0 - w)):
            if prob == 0.0:
                continue
            child = ledger.copy()
            child.record(c)
            value += prob * expand(_propagate(belief, c, obs, P), child, obs, remaining - 1)
        return value

    ledger = VisitLedger.start(belief)
    ledger.current_slot = -1
    return expand(belief, ledger, None, L)

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmab_lab import kernels
from rmab_lab.analysis.oracle import exact_expected_reward
from rmab_lab.channel import TransitionMatrix, generate_states, stationary_probability
from rmab_lab.errors import DomainError
from rmab_lab.policies import (PolicyKind, VisitLedger, genie_policy, pi1_select, pi2_select,
                               run_policy)


def ledger(last_visit, current, slot):
    return VisitLedger(list(last_visit), list(range(len(last_visit))), current, slot)


class TestPi1:
    def test_stays_on_one(self):
        assert pi1_select(ledger([3, 1], 0, 3), 1) == 0

    def test_swaps_on_zero_two_channels(self):
        assert pi1_select(ledger([3, 1], 0, 3), 0) == 1

    def test_moves_to_longest_ago(self):
        assert pi1_select(ledger([10, 8, 5], 0, 10), 0) == 2

    def test_never_visited_counts_oldest(self):
        assert pi1_select(ledger([10, 8, None], 0, 10), 0) == 2
        lg = VisitLedger([10, None, None], [0, 2, 1], 0, 10)
        assert pi1_select(lg, 0) == 2


class TestPi2:
    def test_stays_on_zero(self):
        assert pi2_select(ledger([4, 2], 0, 4), 0) == 0

    def test_even_distance_from_decision_slot(self):
        # deciding slot 11: channel 1 is 3 back, channel 2 is 6 back
        assert pi2_select(ledger([10, 8, 5], 0, 10), 1) == 2

    def test_latest_among_even_distances(self):
        # deciding slot 11: both 4 and 6 back, take the more recent
        assert pi2_select(ledger([10, 7, 5], 0, 10), 1) == 1

    def test_falls_back_to_longest_ago(self):
        # 11 - 8 = 3 and 11 - 6 = 5 are both odd
        assert pi2_select(ledger([10, 8, 6], 0, 10), 1) == 2
        assert pi2_select(ledger([10, None, 8], 0, 10), 1) == 1


@pytest.mark.parametrize("current, obs", list(itertools.product([0, 1], [0, 1])))
def test_two_channel_rules_exhaustive(current, obs):
    lg = ledger([5, 4] if current == 0 else [4, 5], current, 5)
    other = 1 - current
    assert pi1_select(lg, obs) == (current if obs == 1 else other)
    assert pi2_select(lg, obs) == (current if obs == 0 else other)


@pytest.mark.parametrize("P, kind", [((0.2, 0.8), PolicyKind.PI1), ((0.8, 0.2), PolicyKind.PI2),
                                     ((0.5, 0.5), PolicyKind.PI1)])
def test_genie(P, kind):
    assert genie_policy(TransitionMatrix(*P)) is kind


def _keys(lg):
    n = lg.n_channels
    return np.array([v if v is not None else lg.never_rank[c] - n
                     for c, v in enumerate(lg.last_visit)], dtype=np.int64)


@st.composite
def ledgers(draw):
    n = draw(st.integers(2, 5))
    slot = draw(st.integers(n, 40))
    cur = draw(st.integers(0, n - 1))
    slots = draw(st.lists(st.integers(0, slot - 1), min_size=n, max_size=n, unique=True))
    seen = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    last = [s if ok else None for s, ok in zip(slots, seen)]
    last[cur] = slot
    rank = draw(st.permutations(list(range(n))))
    return VisitLedger(last, list(rank), cur, slot)


@given(ledgers(), st.sampled_from([0, 1]))
def test_kernel_selector_matches_ledger_rules(lg, obs):
    keys = _keys(lg)
    assert kernels.select_next(0, keys, lg.current_channel, lg.current_slot, obs) == pi1_select(lg, obs)
    assert kernels.select_next(1, keys, lg.current_channel, lg.current_slot, obs) == pi2_select(lg, obs)
    for kind in (0, 1):
        c = kernels.select_next(kind, keys, lg.current_channel, lg.current_slot, obs)
        assert 0 <= c < lg.n_channels


def _python_run(kind, states, belief):
    """Slot-by-slot replay through the ledger selectors."""
    lg = VisitLedger.start(belief)
    select = pi1_select if kind == PolicyKind.PI1 else pi2_select
    obs, picks = None, []
    for t in range(states.shape[0]):
        c = select(lg, obs)
        lg.record(c)
        obs = int(states[t, c])
        picks.append(c)
    return picks


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("kind", list(PolicyKind))
def test_run_policy_matches_ledger_replay(n, kind, key):
    P = TransitionMatrix(0.35, 0.7) if kind == PolicyKind.PI1 else TransitionMatrix(0.7, 0.3)
    belief = np.linspace(0.2, 0.8, n)[::-1]
    states = generate_states(P, n, 300, belief, key)
    run = run_policy(kind, states, 0, 300, belief)
    assert run.channels.tolist() == _python_run(kind, states, belief)
    assert run.reward_sum == int(states[np.arange(300), run.channels].sum())
    assert run.final_ledger.current_channel == run.channels[-1]
    assert run.final_ledger.last_visit[run.channels[-1]] == 299


def test_all_ones_gives_full_reward():
    states = np.ones((50, 3), dtype=np.int8)
    for kind in PolicyKind:
        run = run_policy(kind, states, 10, 40, [0.5, 0.5, 0.5])
        assert run.reward_sum == 40


def test_hand_traces():
    states = np.array([[1, 0], [0, 1]], dtype=np.int8)
    r1 = run_policy(PolicyKind.PI1, states, 0, 2, [0.5, 0.5])
    assert r1.channels.tolist() == [0, 0] and r1.reward_sum == 1
    r2 = run_policy(PolicyKind.PI2, states, 0, 2, [0.5, 0.5])
    assert r2.channels.tolist() == [0, 1] and r2.reward_sum == 2


def test_initial_channel_is_highest_belief():
    states = np.zeros((3, 3), dtype=np.int8)
    assert run_policy(PolicyKind.PI1, states, 0, 1, [0.2, 0.9, 0.9]).channels[0] == 1


def test_pi1_never_switches_on_ones_pi2_never_on_zeros():
    ones = np.ones((20, 3), dtype=np.int8)
    zeros = np.zeros((20, 3), dtype=np.int8)
    assert set(run_policy(PolicyKind.PI1, ones, 0, 20, [0.1, 0.5, 0.2]).channels) == {1}
    assert set(run_policy(PolicyKind.PI2, zeros, 0, 20, [0.1, 0.5, 0.2]).channels) == {1}


def test_run_policy_window_checks():
    states = np.zeros((5, 2), dtype=np.int8)
    with pytest.raises(DomainError):
        run_policy(PolicyKind.PI1, states, 3, 3, [0.5, 0.5])
    with pytest.raises(DomainError):
        run_policy(PolicyKind.PI1, states, 0, 0, [0.5, 0.5])


def test_deterministic_replay(key):
    P = TransitionMatrix(0.4, 0.6)
    states = generate_states(P, 3, 1000, [0.5] * 3, key)
    a = run_policy(PolicyKind.PI2, states, 0, 1000, [0.5] * 3)
    b = run_policy(PolicyKind.PI2, states, 0, 1000, [0.5] * 3)
    assert np.array_equal(a.channels, b.channels)


@pytest.mark.parametrize("kind", list(PolicyKind))
def test_iid_channels_average_p(kind, key):
    P = TransitionMatrix(0.3, 0.3)
    states = generate_states(P, 3, 200_000, [0.3] * 3, key)
    run = run_policy(kind, states, 0, 200_000, [0.3] * 3)
    se = np.sqrt(0.21 / 200_000)
    assert abs(run.reward_sum / 200_000 - 0.3) < 4 * se


def _myopic_value(P, belief, L):
    """Greedy-on-belief policy, evaluated exactly (independent of the ledger rules)."""
    def rec(b, rem):
        c = max(range(len(b)), key=lambda i: (b[i], -i))
        w = b[c]
        if rem == 1:
            return w
        v = w
        for obs, pr in ((1, w), (0, 1 - w)):
            if pr:
                nb = [(P.p11 if obs else P.p01) if i == c else x * P.p11 + (1 - x) * P.p01
                      for i, x in enumerate(b)]
                v += pr * rec(nb, rem - 1)
        return v
    return rec(list(belief), L)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("P", [(0.2, 0.8), (0.35, 0.6), (0.8, 0.2), (0.7, 0.3), (0.6, 0.35)])
def test_genie_policy_is_the_myopic_policy(n, P):
    P = TransitionMatrix(*P)
    belief = [stationary_probability(P)] * n
    kind = genie_policy(P)
    assert exact_expected_reward(P, kind, belief, 10) == pytest.approx(
        _myopic_value(P, belief, 10), abs=1e-12)

"""Hot inner loops: Markov state generation, base-policy runs, Algorithm 1.

Everything here operates on plain numpy arrays and scalars so that it compiles
under numba's nopython mode (see ``_jit``). Policy codes: ``PI1 = 0``,
``PI2 = 1``. Channel "visit keys" encode the visit ledger in one int array:
``key >= 0`` is the last slot a channel was sensed, ``key < 0`` means never
visited with tiebreak rank ``key + n_channels`` (rank 0 is the oldest).
"""

import math

import numpy as np

from ._jit import njit

PI1 = 0
PI2 = 1


@njit
def markov_states(uniforms, omega0, p01, p11):
    """Threshold a horizon x N block of uniforms into two-state Markov paths."""
    horizon, n = uniforms.shape
    out = np.empty((horizon, n), dtype=np.int8)
    for i in range(n):
        out[0, i] = 1 if uniforms[0, i] < omega0[i] else 0
    for t in range(1, horizon):
        for i in range(n):
            p = p11 if out[t - 1, i] == 1 else p01
            out[t, i] = 1 if uniforms[t, i] < p else 0
    return out


@njit
def predict_belief(omega, steps, p01, p11):
    """Apply the unobserved belief update ``steps`` times in closed form."""
    lam = p11 - p01
    if steps <= 0:
        return omega
    if 1.0 - lam <= 0.0:
        return omega
    w_star = p01 / (1.0 - lam)
    w = w_star + lam**steps * (omega - w_star)
    if w < 0.0:
        return 0.0
    if w > 1.0:
        return 1.0
    return w


@njit
def belief_order(belief):
    """Channel indices by descending belief, ties by ascending index."""
    n = belief.shape[0]
    order = np.empty(n, dtype=np.int64)
    for i in range(n):
        order[i] = i
    for i in range(1, n):
        c = order[i]
        j = i - 1
        while j >= 0 and belief[order[j]] < belief[c]:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = c
    return order


@njit
def init_keys(order):
    n = order.shape[0]
    keys = np.empty(n, dtype=np.int64)
    for r in range(n):
        keys[order[r]] = r - n
    return keys


@njit
def _oldest_other(keys, cur):
    best = -1
    for c in range(keys.shape[0]):
        if c == cur:
            continue
        if best < 0 or keys[c] < keys[best]:
            best = c
    return best


@njit
def select_next(kind, keys, cur, slot, obs):
    """Next channel after observing ``obs`` on ``cur`` in run-slot ``slot``."""
    if kind == PI1:
        if obs == 1:
            return cur
        return _oldest_other(keys, cur)
    if obs == 0:
        return cur
    best = -1
    for c in range(keys.shape[0]):
        if c == cur or keys[c] < 0:
            continue
        # parity counted from the slot being decided, slot + 1
        if (slot + 1 - keys[c]) % 2 == 0:
            if best < 0 or keys[c] > keys[best]:
                best = c
    if best >= 0:
        return best
    return _oldest_other(keys, cur)


@njit
def run_policy_window(kind, states, start, length, order, channels_out, rewards_out):
    """Play one base policy on ``states[start:start+length]``.

    Fills the per-slot channel and reward arrays and returns the final visit
    keys; the final current channel is ``channels_out[length - 1]``.
    """
    keys = init_keys(order)
    cur = order[0]
    for s in range(length):
        obs = states[start + s, cur]
        channels_out[s] = cur
        rewards_out[s] = obs
        keys[cur] = s
        if s + 1 < length:
            cur = select_next(kind, keys, cur, s, obs)
    return keys


@njit
def ucb_index(x_hat, count, n):
    return x_hat / count + math.sqrt(3.0 * math.log(n) / count)


@njit
def _block_beliefs(t0, omega0, carry, last_obs, last_slot, counts):
    n = omega0.shape[0]
    out = np.empty(n, dtype=np.float64)
    if not carry:
        for c in range(n):
            out[c] = omega0[c]
        return out
    # add-one smoothed plug-in estimate from same-channel consecutive observations
    p01 = (counts[0, 1] + 1.0) / (counts[0, 0] + counts[0, 1] + 2.0)
    p11 = (counts[1, 1] + 1.0) / (counts[1, 0] + counts[1, 1] + 2.0)
    for c in range(n):
        if last_obs[c] < 0:
            out[c] = predict_belief(omega0[c], t0, p01, p11)
        else:
            w1 = p11 if last_obs[c] == 1 else p01
            out[c] = predict_belief(w1, t0 - last_slot[c] - 1, p01, p11)
    return out


@njit
def meta_policy(states, arms, block_lengths, horizon, omega0, carry,
                slot_policy, slot_channel, slot_reward, block_arm, block_mean):
    """Algorithm 1 over the base policies listed in ``arms``.

    ``block_lengths`` holds K_1, K_2, ... (at least enough to cover
    ``horizon``). Writes per-slot and per-block records into the output arrays
    and returns ``(n_blocks, n_slots)``. Arm ``j`` refers to ``arms[j]``.
    """
    n_channels = omega0.shape[0]
    m = arms.shape[0]
    x_hat = np.zeros(m)
    picks = np.zeros(m, dtype=np.int64)
    last_obs = np.full(n_channels, -1, dtype=np.int64)
    last_slot = np.full(n_channels, -1, dtype=np.int64)
    counts = np.zeros((2, 2), dtype=np.int64)
    prev_channel = -1
    prev_obs = 0
    n = 0
    b = 0
    while b < block_lengths.shape[0]:
        k = block_lengths[b]
        if n + k > horizon:
            break
        if b < m:
            j = b
        else:
            j = 0
            best = ucb_index(x_hat[0], picks[0], n)
            for a in range(1, m):
                v = ucb_index(x_hat[a], picks[a], n)
                if v > best:
                    best = v
                    j = a
        belief = _block_beliefs(n, omega0, carry, last_obs, last_slot, counts)
        order = belief_order(belief)
        run_policy_window(arms[j], states, n, k, order,
                          slot_channel[n:n + k], slot_reward[n:n + k])
        total = 0
        for s in range(n, n + k):
            c = slot_channel[s]
            o = slot_reward[s]
            slot_policy[s] = arms[j]
            total += o
            if c == prev_channel:
                counts[prev_obs, o] += 1
            last_obs[c] = o
            last_slot[c] = s
            prev_channel = c
            prev_obs = o
        mean = total / k
        x_hat[j] += mean
        picks[j] += 1
        block_arm[b] = j
        block_mean[b] = mean
        n += k
        b += 1
    return b, n


@njit
def markov_states_batch(uniforms3, omega0, p01, p11):
    reps, horizon, n = uniforms3.shape
    out = np.empty((reps, horizon, n), dtype=np.int8)
    for r in range(reps):
        out[r] = markov_states(uniforms3[r], omega0, p01, p11)
    return out


@njit
def policy_cumulative_batch(kind, states3, order, points):
    """Cumulative reward after ``points[q]`` slots, per replication.

    A policy is causal, so the first L slots of one long run equal a run of
    length L; one pass serves every requested length.
    """
    reps, length, _ = states3.shape
    out = np.zeros((reps, points.shape[0]), dtype=np.int64)
    channels = np.empty(length, dtype=np.int64)
    rewards = np.empty(length, dtype=np.int8)
    for r in range(reps):
        run_policy_window(kind, states3[r], 0, length, order, channels, rewards)
        total = 0
        q = 0
        for s in range(length):
            total += rewards[s]
            while q < points.shape[0] and points[q] == s + 1:
                out[r, q] = total
                q += 1
    return out

"""Time the hot kernels compiled (numba) vs interpreted (RMAB_LAB_NO_JIT=1).

Each mode runs in a fresh interpreter so the env flag takes effect at import:

    python benchmarks/bench_kernels.py            # both modes, side by side
    python benchmarks/bench_kernels.py --slots 50000 --repeat 5
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from rmab_lab import kernels
from rmab_lab._jit import USING_JIT
from rmab_lab.meta import ARMS, BlockSchedule

slots, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
u = rng.random((slots, 3))
omega = np.full(3, 0.5)
lengths = BlockSchedule("log").lengths_covering(slots)
order = np.arange(3)

def states():
    return kernels.markov_states(u, omega, 0.1, 0.9)

def policy():
    ch = np.empty(slots, np.int64); rw = np.empty(slots, np.int8)
    kernels.run_policy_window(1, S, 0, slots, order, ch, rw)

def meta():
    bufs = (np.empty(slots, np.int8), np.empty(slots, np.int64), np.empty(slots, np.int8),
            np.empty(len(lengths), np.int64), np.empty(len(lengths)))
    kernels.meta_policy(S, ARMS, lengths, slots, omega, True, *bufs)

S = states()
out = {"jit": USING_JIT}
for name, fn in (("markov_states", states), ("run_policy_window", policy), ("meta_policy", meta)):
    fn()  # warm-up, includes compilation
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run_mode(no_jit, slots, repeat):
    env = dict(os.environ, RMAB_LAB_NO_JIT="1" if no_jit else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(slots), str(repeat)],
                         env=env, check=True, capture_output=True, text=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--slots", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    jit = run_mode(False, args.slots, args.repeat)
    py = run_mode(True, args.slots, args.repeat)
    print(f"{args.slots} slots, best of {args.repeat} (numba active: {jit['jit']})")
    print(f"{'kernel':<20}{'numba [ms]':>12}{'python [ms]':>13}{'speedup':>10}")
    for name in ("markov_states", "run_policy_window", "meta_policy"):
        a, b = jit[name] * 1e3, py[name] * 1e3
        print(f"{name:<20}{a:>12.3f}{b:>13.1f}{b / a:>9.0f}x")


if __name__ == "__main__":
    main()

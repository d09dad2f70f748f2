"""``rmab-lab`` command-line runner.

Every command writes ``manifest.txt`` (the fully resolved configuration), one
or more CSV tables and ``summary.txt`` into ``--out``. Exit codes: 0 success,
2 configuration error, 3 failed check (``oracle-check``/``chernoff-check``).
"""

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import csvio
from .analysis.chernoff import (GENERATORS, LemmaOneConfig, exact_bernoulli_tails,
                                verify_chernoff_variant)
from .analysis.oracle import MAX_CHANNELS, MAX_LENGTH, exact_expected_reward
from .analysis.regret import nearest_boundaries, regret_curve
from .analysis.steady import estimate_steady_rewards, estimate_transient_bound, simulate_cumulative
from .channel import TransitionMatrix, as_belief, generate_states, stationary_probability
from .config import COMMANDS, ConfigError, ExperimentConfig, resolve
from .errors import DomainError
from .meta import BlockSchedule, extract_suboptimal_counts, run_meta_on_states
from .policies import PolicyKind, genie_policy
from .rng import Purpose, StreamKey

log = logging.getLogger("rmab_lab")

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 2, 3


@dataclass
class ResultBundle:
    out_dir: Path
    manifest: str
    tables: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)
    passed: bool = True

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_CHECK


# --- validation -----------------------------------------------------------

def _int_list(text, name):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(name, f"expected comma-separated integers, got {text!r}") from None


def _matrix(cfg):
    for name in ("p01", "p11"):
        v = getattr(cfg, name)
        if not 0.0 <= v <= 1.0:
            raise ConfigError(name, f"probability must lie in [0, 1], got {v}")
    return TransitionMatrix(cfg.p01, cfg.p11)


def _schedule(cfg):
    try:
        return BlockSchedule.parse(cfg.schedule)
    except DomainError as exc:
        raise ConfigError("schedule", str(exc)) from None


def _belief(cfg, P):
    if cfg.channels < 2:
        raise ConfigError("channels", f"need at least 2 channels, got {cfg.channels}")
    if cfg.belief.strip().lower() == "stationary":
        if not P.ergodic:
            raise ConfigError("belief", "p01=0, p11=1 has no stationary law; give an explicit belief")
        return np.full(cfg.channels, stationary_probability(P))
    try:
        values = [float(tok) for tok in cfg.belief.split(",")]
        return as_belief(values, cfg.channels)
    except (ValueError, DomainError) as exc:
        raise ConfigError("belief", str(exc)) from None


def _common(cfg):
    if cfg.reps < 1:
        raise ConfigError("reps", f"need at least one replication, got {cfg.reps}")
    if cfg.jobs < 1:
        raise ConfigError("jobs", f"need at least one job, got {cfg.jobs}")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed", "seed must be a non-negative 64-bit integer")
    if cfg.belief_mode not in ("carry", "reset"):
        raise ConfigError("belief_mode", f"expected carry or reset, got {cfg.belief_mode!r}")


def _meta_horizon(cfg, schedule):
    lengths = schedule.lengths(2)
    if cfg.horizon < int(lengths.sum()):
        raise ConfigError("horizon", f"horizon {cfg.horizon} < K_1 + K_2 = {int(lengths.sum())}")


# --- commands -------------------------------------------------------------

def _simulate(cfg, bundle):
    P, schedule = _matrix(cfg), _schedule(cfg)
    omega0 = _belief(cfg, P)
    _meta_horizon(cfg, schedule)
    genie = genie_policy(P)
    key = StreamKey(cfg.seed)
    slot_rows, block_rows = [], []
    for r in range(cfg.reps):
        states = generate_states(P, cfg.channels, cfg.horizon, omega0, key.replicate(r))
        traj = run_meta_on_states(states, schedule, cfg.horizon, omega0, cfg.belief_mode == "carry")
        block = traj.slot_block
        for s in range(traj.n_slots):
            slot_rows.append((r, s + 1, int(block[s]), PolicyKind(int(traj.slot_policy[s])).label,
                              int(traj.slot_channel[s]), int(traj.slot_reward[s])))
        ends, t_n = extract_suboptimal_counts(traj, genie)
        for b in range(traj.n_blocks):
            block_rows.append((r, b + 1, PolicyKind(int(traj.block_policy[b])).label,
                               int(traj.block_length[b]), float(traj.block_mean[b]),
                               int(ends[b]), int(t_n[b])))
        bundle.summary.append(
            f"replication {r}: {traj.n_slots} slots in {traj.n_blocks} blocks, "
            f"mean reward {traj.slot_reward.mean():.6f}, T(n) = {int(t_n[-1])} "
            f"(genie {genie.label})")
    bundle.tables["trajectory.csv"] = (
        ("replication", "slot", "block", "policy", "channel", "reward"), slot_rows)
    bundle.tables["blocks.csv"] = (
        ("replication", "block", "policy", "length", "sample_mean", "end_slot", "T_n"), block_rows)


def _regret(cfg, bundle):
    P, schedule = _matrix(cfg), _schedule(cfg)
    omega0 = _belief(cfg, P)
    _meta_horizon(cfg, schedule)
    if cfg.checkpoints.strip():
        cps = _int_list(cfg.checkpoints, "checkpoints")
        ends = set(schedule.boundaries(cfg.horizon).tolist())
        bad = [c for c in cps if c not in ends]
        if bad:
            raise ConfigError("checkpoints", f"not on block boundaries within horizon: {bad}")
    else:
        targets = [max(1, cfg.horizon // 100), max(1, cfg.horizon // 10), cfg.horizon]
        cps = sorted(set(nearest_boundaries(targets, schedule, cfg.horizon)))
        cfg.checkpoints = ",".join(str(c) for c in cps)
    series = regret_curve(P, cfg.channels, schedule, cfg.horizon, cps, cfg.reps, omega0,
                          StreamKey(cfg.seed), cfg.belief_mode == "carry", cfg.jobs)
    bundle.tables["regret.csv"] = (csvio.REGRET_COLUMNS, csvio.regret_rows(series))
    bundle.summary.append(f"genie policy: {genie_policy(P).label}, {cfg.reps} replications")
    for row in csvio.regret_rows(series):
        bundle.summary.append(
            f"n={row[0]}: R(n)={row[5]:.4f} +/- {row[6]:.4f}, T(n)={row[8]:.3f}")


def _profile(cfg, bundle):
    P = _matrix(cfg)
    omega0 = _belief(cfg, P)
    if not cfg.horizon > cfg.burn_in >= 0:
        raise ConfigError("burn_in", f"need horizon > burn_in >= 0, got {cfg.burn_in}")
    lengths = _int_list(cfg.lengths, "lengths")
    if not lengths or min(lengths) < 1:
        raise ConfigError("lengths", "need positive run lengths")
    key = StreamKey(cfg.seed)
    kinds = (PolicyKind.PI1, PolicyKind.PI2)
    profiles = estimate_steady_rewards(P, kinds, cfg.channels, cfg.horizon, cfg.burn_in,
                                       cfg.reps, key, omega0, cfg.jobs)
    grid = [np.zeros(cfg.channels), np.ones(cfg.channels), omega0]
    prof_rows, trans_rows = [], []
    for prof in profiles:
        bound, rows = estimate_transient_bound(P, prof.policy, grid, lengths, cfg.reps,
                                               key.with_purpose(Purpose.TRANSIENT), prof,
                                               jobs=cfg.jobs)
        prof_rows.append((prof.policy.label, prof.u_estimate, prof.u_halfwidth, bound))
        for row in rows:
            trans_rows.append((prof.policy.label, " ".join(format(w, ".6g") for w in row.belief),
                               row.length, row.mean_reward, row.halfwidth, row.deviation,
                               row.exact))
        bundle.summary.append(f"{prof.policy.label}: U = {prof.u_estimate:.6f} +/- "
                              f"{prof.u_halfwidth:.6f}, transient bound {bound:.4f}")
    bundle.tables["profile.csv"] = (("policy", "u_estimate", "u_halfwidth", "transient_bound"),
                                    prof_rows)
    bundle.tables["transient.csv"] = (("policy", "belief", "L", "mean_reward", "halfwidth",
                                       "deviation", "exact"), trans_rows)


def _oracle_check(cfg, bundle):
    P = _matrix(cfg)
    omega0 = _belief(cfg, P)
    if not 1 <= cfg.length <= MAX_LENGTH:
        raise ConfigError("length", f"exact oracle needs 1 <= length <= {MAX_LENGTH}")
    if cfg.channels > MAX_CHANNELS:
        raise ConfigError("channels", f"exact oracle supports at most {MAX_CHANNELS} channels")
    kinds = (PolicyKind.PI1, PolicyKind.PI2)
    cum = simulate_cumulative(P, kinds, omega0, [cfg.length], cfg.reps,
                              StreamKey(cfg.seed), cfg.jobs)[:, :, 0]
    rows = []
    for q, kind in enumerate(kinds):
        exact = exact_expected_reward(P, kind, omega0, cfg.length)
        mean = float(cum[:, q].mean())
        se = float(cum[:, q].std(ddof=1) / math.sqrt(cfg.reps)) if cfg.reps > 1 else float("nan")
        z = (mean - exact) / se if se > 0 else (0.0 if mean == exact else float("inf"))
        ok = abs(z) <= 3.0
        bundle.passed &= ok
        rows.append((kind.label, cfg.length, exact, mean, se, z, ok))
        bundle.summary.append(f"{kind.label}: exact {exact:.6f}, Monte Carlo {mean:.6f} "
                              f"(se {se:.6f}, z {z:+.2f}) {'PASS' if ok else 'FAIL'}")
    bundle.tables["oracle.csv"] = (("policy", "L", "exact", "mc_mean", "mc_se", "z", "pass"), rows)


def _offsets(text, n):
    out = []
    for tok in (t.strip() for t in text.split(",") if t.strip()):
        if tok == "sqrt":
            out.append(math.sqrt(n))
        elif tok.endswith("n"):
            out.append(float(tok[:-1]) * n)
        else:
            out.append(float(tok))
    return out


def _chernoff_check(cfg, bundle):
    gens = [g.strip() for g in cfg.generators.split(",") if g.strip()]
    for g in gens:
        if g not in GENERATORS:
            raise ConfigError("generators", f"unknown generator {g!r}")
    ns = _int_list(cfg.n_values, "n_values")
    if cfg.trials < 1:
        raise ConfigError("trials", "need at least one trial")
    rows = []
    for g in gens:
        for n in ns:
            try:
                offsets = _offsets(cfg.a_values, n)
            except ValueError:
                raise ConfigError("a_values", f"cannot parse {cfg.a_values!r}") from None
            for a in offsets:
                try:
                    lc = LemmaOneConfig(cfg.mu, cfg.drift, cfg.b_range, n, a, g)
                except DomainError as exc:
                    raise ConfigError("mu", str(exc)) from None
                rep = verify_chernoff_variant(lc, cfg.trials, StreamKey(cfg.seed))
                ex_up, ex_lo = exact_bernoulli_tails(lc) if g == "bernoulli" else (None, None)
                bundle.passed &= rep.passed
                rows.append((g, n, a, rep.upper_empirical, rep.upper_bound, rep.upper_pass,
                             rep.lower_empirical, rep.lower_bound, rep.lower_pass, ex_up, ex_lo))
                bundle.summary.append(
                    f"{g} n={n} a={a:.4g}: upper {rep.upper_empirical:.3g} <= {rep.upper_bound:.4g}"
                    f" {'PASS' if rep.upper_pass else 'FAIL'}, lower {rep.lower_empirical:.3g}"
                    f" <= {rep.lower_bound:.4g} {'PASS' if rep.lower_pass else 'FAIL'}")
    bundle.tables["chernoff.csv"] = (
        ("generator", "n", "a", "upper_empirical", "upper_bound", "upper_pass",
         "lower_empirical", "lower_bound", "lower_pass", "exact_upper", "exact_lower"), rows)


DISPATCH = {
    "simulate": _simulate,
    "regret": _regret,
    "profile": _profile,
    "oracle-check": _oracle_check,
    "chernoff-check": _chernoff_check,
}


def run_experiment(config: ExperimentConfig) -> ResultBundle:
    """Validate, run and write one command's results. Raises ConfigError."""
    if config.command not in DISPATCH:
        raise ConfigError("command", f"unknown command {config.command!r}")
    _common(config)
    out = Path(config.out)
    bundle = ResultBundle(out, "")
    try:
        DISPATCH[config.command](config, bundle)
    except DomainError as exc:
        raise ConfigError(config.command, str(exc)) from None
    bundle.manifest = config.to_text()
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.txt").write_text(bundle.manifest, encoding="utf-8")
    for name, (columns, rows) in bundle.tables.items():
        csvio.write_table(out / name, columns, rows)
    status = "all checks passed" if bundle.passed else "CHECK FAILED"
    (out / "summary.txt").write_text("\n".join(bundle.summary + [status]) + "\n", encoding="utf-8")
    return bundle


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file (a previous manifest works)")
    opts = [
        ("--p01", float, "P(0 -> 1)"),
        ("--p11", float, "P(1 -> 1)"),
        ("--channels", int, "number of channels N"),
        ("--schedule", str, "block lengths: const:c | log | sqrt | linear"),
        ("--horizon", int, "slots (run length for profile)"),
        ("--checkpoints", str, "n1,n2,... on block boundaries (regret)"),
        ("--reps", int, "replications"),
        ("--seed", int, "master seed (default: $RMAB_LAB_SEED or 12345)"),
        ("--belief", str, "stationary | w1,w2,..."),
        ("--belief-mode", str, "carry beliefs across blocks or reset them: carry | reset"),
        ("--out", str, "output directory"),
        ("--jobs", int, "worker processes"),
        ("--length", int, "horizon L of the exact oracle (oracle-check)"),
        ("--burn-in", int, "slots discarded before averaging (profile)"),
        ("--lengths", str, "transient-loss lengths L1,L2,... (profile)"),
        ("--mu", float, "mean (chernoff-check)"),
        ("--drift", float, "conditional-mean drift C (chernoff-check)"),
        ("--b-range", float, "range b (chernoff-check)"),
        ("--n-values", str, "sequence lengths (chernoff-check)"),
        ("--a-values", str, "offsets: numbers, 'sqrt' or '<x>n' (chernoff-check)"),
        ("--trials", int, "sequences per configuration (chernoff-check)"),
        ("--generators", str, "bernoulli,drift (chernoff-check)"),
    ]
    for flag, typ, text in opts:
        common.add_argument(flag, type=typ, default=None, help=text)
    parser = argparse.ArgumentParser(prog="rmab-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "verbose")}
    try:
        cfg = resolve(args.command, args.config, overrides)
        bundle = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: field `{exc.field}`: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in bundle.summary:
        print(line)
    print(f"results written to {bundle.out_dir}")
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())

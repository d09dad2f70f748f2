"""Monte Carlo check of a Chernoff-Hoeffding variant with drifting conditional means.

For X_1..X_n in [0, b] with |E[X_t | past] - mu| <= C (0 < C < mu) and
S_n = X_1 + ... + X_n, the bounds under test are

    P{S_n >= n(mu + C) + a} <= exp(-2 (a (mu - C) / (b (mu + C)))**2 / n)
    P{S_n <= n(mu - C) - a} <= exp(-2 (a / b)**2 / n)

Both are evaluated exactly as written, with no renormalization.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..rng import Purpose, StreamKey

GENERATORS = ("bernoulli", "drift")

# S_n is compared to real thresholds such as n(mu + C) + a; absorb rounding in them
_EPS = 1e-9
_CHUNK = 10_000


@dataclass(frozen=True)
class LemmaOneConfig:
    mu: float
    c_drift: float
    b_range: float
    n_len: int
    a_offset: float
    generator: str = "bernoulli"

    def __post_init__(self):
        if not 0.0 < self.c_drift < self.mu:
            raise DomainError(f"need 0 < C < mu, got C={self.c_drift}, mu={self.mu}")
        if self.b_range <= 0 or self.mu + self.c_drift > self.b_range:
            raise DomainError("need b > 0 and mu + C <= b so that means fit in [0, b]")
        if self.n_len < 1 or self.a_offset < 0:
            raise DomainError("need n >= 1 and a >= 0")
        if self.generator not in GENERATORS:
            raise DomainError(f"generator must be one of {GENERATORS}, got {self.generator!r}")

    @property
    def upper_threshold(self) -> float:
        return self.n_len * (self.mu + self.c_drift) + self.a_offset

    @property
    def lower_threshold(self) -> float:
        return self.n_len * (self.mu - self.c_drift) - self.a_offset


def chernoff_bound_values(cfg: LemmaOneConfig):
    """(upper-tail bound, lower-tail bound) for the configuration."""
    mu, c, b, n, a = cfg.mu, cfg.c_drift, cfg.b_range, cfg.n_len, cfg.a_offset
    upper = math.exp(-2.0 * (a * (mu - c) / (b * (mu + c))) ** 2 / n)
    lower = math.exp(-2.0 * (a / b) ** 2 / n)
    return upper, lower


class GeneratorViolation(RuntimeError):
    """A generator produced a draw outside its certified constraint."""


def simulate_sums(cfg: LemmaOneConfig, trials: int, rng: np.random.Generator) -> np.ndarray:
    """S_n for ``trials`` independent sequences from the configured generator.

    ``bernoulli``: X_t = b * Bernoulli(mu / b), conditional mean mu.
    ``drift``: the conditional mean is mu + C while the running sum is at or
    above t * mu and mu - C otherwise, which pushes sums away from the centre.
    """
    mu, c, b, n = cfg.mu, cfg.c_drift, cfg.b_range, cfg.n_len
    sums = np.zeros(trials)
    for t in range(n):
        if cfg.generator == "bernoulli":
            mean = np.full(trials, mu)
        else:
            mean = np.where(sums >= t * mu, mu + c, mu - c)
        if np.any(np.abs(mean - mu) > c + 1e-12):
            raise GeneratorViolation(f"conditional mean left [mu - C, mu + C] at step {t + 1}")
        x = b * (rng.random(trials) < mean / b)
        if np.any((x < 0) | (x > b)):
            raise GeneratorViolation(f"draw left [0, b] at step {t + 1}")
        sums += x
    return sums


@dataclass(frozen=True)
class ChernoffReport:
    config: LemmaOneConfig
    trials: int
    upper_empirical: float
    lower_empirical: float
    upper_bound: float
    lower_bound: float

    def _slack(self, p):
        return 3.0 * math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)

    @property
    def upper_pass(self) -> bool:
        return self.upper_empirical <= self.upper_bound + self._slack(self.upper_bound)

    @property
    def lower_pass(self) -> bool:
        return self.lower_empirical <= self.lower_bound + self._slack(self.lower_bound)

    @property
    def passed(self) -> bool:
        return self.upper_pass and self.lower_pass


def verify_chernoff_variant(cfg: LemmaOneConfig, trials: int, key: StreamKey) -> ChernoffReport:
    """Empirical tail frequencies against both bounds.

    Passing means empirical <= bound + 3 binomial standard errors, the
    standard error being that of a frequency whose true value is the bound.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = key.with_purpose(Purpose.CHERNOFF).generator()
    upper_hits = lower_hits = 0
    for start in range(0, trials, _CHUNK):
        sums = simulate_sums(cfg, min(_CHUNK, trials - start), rng)
        upper_hits += int(np.sum(sums >= cfg.upper_threshold - _EPS))
        lower_hits += int(np.sum(sums <= cfg.lower_threshold + _EPS))
    up, lo = chernoff_bound_values(cfg)
    return ChernoffReport(cfg, trials, upper_hits / trials, lower_hits / trials, up, lo)


def binomial_tail(n: int, p: float, k: int, upper: bool = True) -> float:
    """P{Bin(n, p) >= k} (upper) or P{Bin(n, p) <= k} (lower), by direct summation."""
    ks = range(max(k, 0), n + 1) if upper else range(0, min(k, n) + 1)
    return math.fsum(math.comb(n, j) * p**j * (1.0 - p) ** (n - j) for j in ks)


def exact_bernoulli_tails(cfg: LemmaOneConfig):
    """Exact tail probabilities for the constant-mean generator (b = 1 scaling)."""
    if cfg.generator != "bernoulli":
        raise DomainError("exact tails exist only for the constant-mean generator")
    p = cfg.mu / cfg.b_range
    k_up = math.ceil(cfg.upper_threshold / cfg.b_range - _EPS)
    k_lo = math.floor(cfg.lower_threshold / cfg.b_range + _EPS)
    return binomial_tail(cfg.n_len, p, k_up, True), binomial_tail(cfg.n_len, p, k_lo, False)

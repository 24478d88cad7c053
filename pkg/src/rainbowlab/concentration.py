"""Random perfect matchings and checks of the concentration inequalities.

Exact statements (pair probabilities, the conditional-expectation bounds) are
evaluated with ``fractions.Fraction``. Tail statements are checked by Monte
Carlo with a one-sided 3-sigma allowance.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .matching import OrderedMatching
from .tuple_space import Family, ParameterError, SpaceParams, disjoint_masks

SIGMAS = 3.0


@dataclass(frozen=True)
class SamplerConfig:
    params: SpaceParams
    seed: int
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must fit in 64 bits, got {self.seed}")


def draw_rng(seed: int, draw: int) -> np.random.Generator:
    """Independent counter-based stream for draw ``draw``: Philox keyed by (seed, draw)."""
    return np.random.Generator(np.random.Philox(key=seed | draw << 64))


def _draw_perms(config: SamplerConfig, draw: int) -> list[np.ndarray]:
    rng = draw_rng(config.seed, draw)
    n, k = config.params.n, config.params.k
    return [rng.permutation(n) for _ in range(k)]


def sample_matching(config: SamplerConfig, draw: int) -> OrderedMatching:
    """Uniform ordered perfect matching number ``draw`` of the stream ``config.seed``."""
    perms = _draw_perms(config, draw)
    return OrderedMatching(config.params.space(), tuple(tuple(int(v) + 1 for v in p) for p in perms))


def sample_ranks(config: SamplerConfig, start: int, stop: int) -> np.ndarray:
    """Edge ranks of draws ``start..stop-1``, shape (stop-start, n)."""
    n, k = config.params.n, config.params.k
    out = np.zeros((stop - start, n), dtype=np.int64)
    for row, t in enumerate(range(start, stop)):
        acc = out[row]
        for p in _draw_perms(config, t):
            acc *= n
            acc += p
    return out


def _chunks(trials: int, threads: int) -> list[tuple[int, int]]:
    step = max(1, math.ceil(trials / max(threads, 1)))
    return [(a, min(a + step, trials)) for a in range(0, trials, step)]


@dataclass(frozen=True)
class EtaSamples:
    """Per-draw |F & M| over the whole matching and over its first half."""

    eta: np.ndarray
    eta_half: np.ndarray
    alpha_n: Fraction


def sample_eta(family: Family, config: SamplerConfig, threads: int = 1) -> EtaSamples:
    space = config.params.space()
    if family.params != space:
        raise ParameterError("family and sampler live in different spaces")
    member = np.zeros(space.size, dtype=np.int8)
    for r in family.ranks():
        member[r] = 1
    half = space.n // 2

    def work(bounds):
        ranks = sample_ranks(config, *bounds)
        hits = member[ranks]
        return hits.sum(axis=1), hits[:, :half].sum(axis=1)

    parts = _chunks(config.trials, threads)
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, parts))
    else:
        results = [work(p) for p in parts]
    eta = np.concatenate([r[0] for r in results])
    eta_half = np.concatenate([r[1] for r in results])
    alpha_n = Fraction(len(family) * space.n, space.size)
    return EtaSamples(eta, eta_half, alpha_n)


def tail_bound_1(alpha_n: float, lam: float, clamp: bool = True) -> float:
    """2 exp(-lam^2 / (alpha_n/2 + 2 lam)), bounding P[delta(eta - alpha n) >= 2 lam]."""
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if alpha_n < 0:
        raise ParameterError(f"alpha*n must be non-negative, got {alpha_n}")
    val = 2.0 * math.exp(-lam * lam / (alpha_n / 2.0 + 2.0 * lam))
    return min(val, 1.0) if clamp else val


def tail_bound_2_factor(alpha_n: float, lam: float, mu: float) -> float:
    """4 exp(-mu^2 / ((alpha_n + 2 lam)/2 + 2 mu)).

    Multiplies P[delta(eta - alpha n) >= 1] in the conditional tail bound.
    The caller is responsible for lam >= 2 sqrt(alpha_n) + 1 >= 9.
    """
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    return 4.0 * math.exp(-mu * mu / ((alpha_n + 2.0 * lam) / 2.0 + 2.0 * mu))


def _freq(hits: np.ndarray, trials: int) -> tuple[float, float]:
    p = float(np.count_nonzero(hits)) / trials
    return p, math.sqrt(p * (1.0 - p) / trials)


def _deviation(eta: np.ndarray, mean: Fraction, delta: int) -> np.ndarray:
    """delta * (eta - mean) scaled by mean.denominator, as exact integers."""
    return delta * (eta.astype(np.int64) * mean.denominator - mean.numerator)


@dataclass
class TailReport:
    delta: int
    alpha_n: float
    lambda_grid: list[float]
    empirical: list[float]
    stderr: list[float]
    bound: list[float]
    passed: list[bool] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.passed)

    def rows(self) -> list[dict]:
        return [
            {"delta": self.delta, "lambda": lam, "empirical": e, "stderr": se, "bound": b, "pass": p}
            for lam, e, se, b, p in zip(self.lambda_grid, self.empirical, self.stderr, self.bound, self.passed)
        ]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["delta", "lambda", "empirical", "stderr", "bound", "pass"], lineterminator="\n")
        if header:
            w.writeheader()
        for row in self.rows():
            w.writerow({**row, "pass": str(row["pass"]).lower()})
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"delta": self.delta, "alpha_n": self.alpha_n, "rows": self.rows()}


def tail_report(samples: EtaSamples, lambda_grid: Sequence[float], delta: int) -> TailReport:
    if delta not in (-1, 1):
        raise ParameterError(f"delta must be +1 or -1, got {delta}")
    trials = len(samples.eta)
    dev = _deviation(samples.eta, samples.alpha_n, delta)
    scale = samples.alpha_n.denominator
    rep = TailReport(delta, float(samples.alpha_n), [float(x) for x in lambda_grid], [], [], [], [])
    for lam in rep.lambda_grid:
        p, se = _freq(dev >= 2 * lam * scale, trials)
        b = tail_bound_1(float(samples.alpha_n), lam)
        rep.empirical.append(p)
        rep.stderr.append(se)
        rep.bound.append(b)
        rep.passed.append(p <= b + SIGMAS * se)
    return rep


def empirical_tail(
    family: Family,
    config: SamplerConfig,
    lambda_grid: Sequence[float],
    delta: int,
    threads: int = 1,
) -> TailReport:
    """Monte Carlo frequency of delta(eta - alpha n) >= 2 lam against the closed-form bound."""
    return tail_report(sample_eta(family, config, threads), lambda_grid, delta)


@dataclass
class MeanCheck:
    mean: float
    stderr: float
    alpha_n: float

    @property
    def ok(self) -> bool:
        return abs(self.mean - self.alpha_n) <= SIGMAS * self.stderr

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "alpha_n": self.alpha_n, "pass": self.ok}


def mean_check(samples: EtaSamples) -> MeanCheck:
    eta = samples.eta.astype(np.float64)
    se = float(eta.std(ddof=1) / math.sqrt(len(eta))) if len(eta) > 1 else 0.0
    return MeanCheck(float(eta.mean()), se, float(samples.alpha_n))


@dataclass
class HalfSplitReport:
    delta: int
    a: float
    lhs: float
    rhs: float
    stderr_lhs: float
    stderr_rhs: float

    @property
    def tolerance(self) -> float:
        return SIGMAS * math.hypot(self.stderr_lhs, 2.0 * self.stderr_rhs)

    @property
    def ok(self) -> bool:
        return self.lhs <= 2.0 * self.rhs + self.tolerance

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "a": self.a,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "stderr_lhs": self.stderr_lhs,
            "stderr_rhs": self.stderr_rhs,
            "pass": self.ok,
        }


def half_split_report(samples: EtaSamples, a: float, delta: int, n: int) -> HalfSplitReport:
    if n % 2:
        raise ParameterError(f"the half-split check needs even n, got {n}")
    if delta not in (-1, 1):
        raise ParameterError(f"delta must be +1 or -1, got {delta}")
    trials = len(samples.eta)
    full = _deviation(samples.eta, samples.alpha_n, delta)
    half = _deviation(samples.eta_half, samples.alpha_n / 2, delta)
    lhs, se_l = _freq(full >= 2 * a * samples.alpha_n.denominator, trials)
    rhs, se_r = _freq(half >= a * (samples.alpha_n / 2).denominator, trials)
    return HalfSplitReport(delta, float(a), lhs, rhs, se_l, se_r)


def half_split_check(
    family: Family, config: SamplerConfig, a: float, delta: int, threads: int = 1
) -> HalfSplitReport:
    """P[delta(eta - E eta) >= 2a] against 2 P[delta(eta_half - E eta_half) >= a], same draws."""
    if config.params.n % 2:
        raise ParameterError(f"the half-split check needs even n, got {config.params.n}")
    return half_split_report(sample_eta(family, config, threads), a, delta, config.params.n)


@dataclass
class ConditionalTailReport:
    """Empirical side of the conditional large-deviation bound.

    Checks P[delta(eta - alpha n) >= 2 lam + 2 mu + 1] against
    P[delta(eta - alpha n) >= 1] * factor; the ">" of the original statement is
    replaced by ">= ... + 1" on the integer-valued eta, which is the weaker event
    whenever alpha n is not an integer.
    """

    delta: int
    lam: float
    mu: float
    lhs: float
    base: float
    factor: float
    stderr: float
    hypothesis_ok: bool
    note: str = "strict '>' checked as '>= 2*lambda + 2*mu + 1'"

    @property
    def bound(self) -> float:
        return min(1.0, self.base * self.factor)

    @property
    def ok(self) -> bool:
        return self.lhs <= self.bound + SIGMAS * self.stderr

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "lambda": self.lam,
            "mu": self.mu,
            "lhs": self.lhs,
            "base": self.base,
            "factor": self.factor,
            "bound": self.bound,
            "stderr": self.stderr,
            "hypothesis_ok": self.hypothesis_ok,
            "pass": self.ok,
            "note": self.note,
        }


def conditional_tail_report(samples: EtaSamples, lam: float, mu: float, delta: int) -> ConditionalTailReport:
    trials = len(samples.eta)
    scale = samples.alpha_n.denominator
    dev = _deviation(samples.eta, samples.alpha_n, delta)
    lhs, se_l = _freq(dev >= (2 * lam + 2 * mu + 1) * scale, trials)
    base, se_b = _freq(dev >= scale, trials)
    an = float(samples.alpha_n)
    factor = tail_bound_2_factor(an, lam, mu)
    hyp = lam >= 2 * math.sqrt(an) + 1 >= 9
    return ConditionalTailReport(delta, float(lam), float(mu), lhs, base, factor, math.hypot(se_l, factor * se_b), hyp)


def _ordered_disjoint_pairs(family: Family) -> int:
    dm = disjoint_masks(family.params.n, family.params.k)
    m = family.mask
    return sum((dm[r] & m).bit_count() for r in family.ranks())


def exact_pair_probabilities(family: Family) -> tuple[Fraction, Fraction]:
    """(P[A1 & A2], P[not A1 & A2]) for a uniform ordered pair of disjoint tuples."""
    n, k = family.params.n, family.params.k
    if n < 2:
        raise ParameterError("no disjoint pairs exist for n < 2")
    p11 = Fraction(_ordered_disjoint_pairs(family), n**k * (n - 1) ** k)
    return p11, family.density() - p11


def check_prop_prob(family: Family) -> bool:
    """Both pair-probability deviations are at most alpha(1-alpha)/(n-1), exactly."""
    alpha = family.density()
    p11, p01 = exact_pair_probabilities(family)
    rhs = alpha * (1 - alpha) / (family.params.n - 1)
    return abs(p11 - alpha**2) <= rhs and abs(p01 - alpha * (1 - alpha)) <= rhs


@dataclass
class ConditionalExpectationReport:
    alpha: Fraction
    e_given_hit: Fraction | None
    e_given_miss: Fraction | None
    variance: Fraction
    var_bound: Fraction
    dev_bound: Fraction
    degenerate: bool

    @property
    def ok(self) -> bool:
        devs = [abs(e - self.alpha) for e in (self.e_given_hit, self.e_given_miss) if e is not None]
        return self.variance <= self.var_bound and all(d <= self.dev_bound for d in devs)

    def to_dict(self) -> dict:
        def fr(x):
            return None if x is None else str(x)

        return {
            "alpha": fr(self.alpha),
            "e_given_hit": fr(self.e_given_hit),
            "e_given_miss": fr(self.e_given_miss),
            "variance": fr(self.variance),
            "var_bound": fr(self.var_bound),
            "dev_bound": fr(self.dev_bound),
            "degenerate": self.degenerate,
            "pass": self.ok,
        }


def check_eqnew2(family: Family) -> ConditionalExpectationReport:
    """Conditional expectation of the last indicator given the first one.

    Checks Var[E[eta_n | eta_1]] <= alpha/(n-1)^2 and
    |E[eta_n | eta_1] - alpha| <= 1/(n-1) at the first exposure step; later
    steps are the same statement on a smaller space.
    """
    n = family.params.n
    alpha = family.density()
    p11, p01 = exact_pair_probabilities(family)
    e1 = p11 / alpha if alpha else None
    e0 = p01 / (1 - alpha) if alpha != 1 else None
    var = Fraction(0)
    if e1 is not None:
        var += alpha * (e1 - alpha) ** 2
    if e0 is not None:
        var += (1 - alpha) * (e0 - alpha) ** 2
    return ConditionalExpectationReport(
        alpha,
        e1,
        e0,
        var,
        alpha / (n - 1) ** 2,
        Fraction(1, n - 1),
        e1 is None or e0 is None,
    )

"""Scalar endgame of the s >= s0 argument: x(s), z(s), the tail sum, and s0.

Every quantity is evaluated in 80-bit extended precision (``np.longdouble``)
and again in IEEE double; reports carry a flag saying whether the two agree
to 6 significant digits.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .tuple_space import ParameterError

EXT = np.longdouble
COEFF = "3.7"
TERM_CUTOFF = 1e-30
S_MAX = 10**7
_CHUNK = 256

LOG_BASES = ("e", "2", "10")


def _check_s(s: int) -> None:
    if s < 2:
        raise ParameterError(f"s must be >= 2 (log s > 0), got {s}")


def _log(s, base: str, dtype):
    if base == "e":
        return np.log(s)
    if base not in LOG_BASES:
        raise ParameterError(f"unknown log base {base!r}")
    return np.log(s) / np.log(dtype(int(base)))


def _root(s: int, base: str, dtype):
    """sqrt(s log s) in ``dtype``."""
    s_ = dtype(s)
    return np.sqrt(s_ * _log(s_, base, dtype))


def _x(s: int, base: str, dtype) -> int:
    return int(np.floor(dtype(COEFF) * _root(s, base, dtype)))


def _z(s: int, x: int, dtype):
    s_ = dtype(s)
    r = np.sqrt(s_)
    num = s_ - x - 4 * r
    den = 6 * s_ - 4 * x - 8 * r
    if num <= 0 or den <= 0:
        return None
    return num * num / den


def _tail(s: int, base: str, dtype, cutoff: float):
    """Tail series summed in chunks until terms drop below ``cutoff`` while decreasing.

    t^2/(c+2t) is convex in t and (m+1)/m decreases, so once terms decrease the
    ratio of consecutive terms is non-increasing; what is left after the cut is
    bounded by a geometric series with the last observed ratio.
    """
    s_ = dtype(s)
    r = np.sqrt(s_)
    root = _root(s, base, dtype)
    c = (s_ + 4 * r) / 2
    m0 = int(np.ceil(2 * root + 4 * r))
    total = dtype(0)
    prev = None
    while True:
        m = np.arange(m0, m0 + _CHUNK, dtype=dtype)
        t = (m - 4 * r) / 2
        terms = m * 4 * np.exp(-t * t / (c + 2 * t))
        if prev is not None:
            terms = np.concatenate(([prev], terms))
        small = np.nonzero((terms[1:] < cutoff) & (terms[1:] < terms[:-1]))[0]
        start = 1 if prev is not None else 0
        if small.size:
            last = small[0] + 1
            total += terms[start : last + 1].sum()
            ratio = terms[last] / terms[last - 1]
            total += terms[last] * ratio / (1 - ratio)
            return total, 2 * root + 4 * r + total
        total += terms[start:].sum()
        prev = terms[-1]
        m0 += _CHUNK


def x_of(s: int, base: str = "e") -> int:
    """floor(3.7 sqrt(s log s)), natural log unless ``base`` says otherwise."""
    _check_s(s)
    return _x(s, base, EXT)


def z_of(s: int, base: str = "e") -> float | None:
    """(s - x - 4 sqrt s)^2 / (6s - 4x - 8 sqrt s); None where the formula is inapplicable."""
    _check_s(s)
    z = _z(s, _x(s, base, EXT), EXT)
    return None if z is None else float(z)


def expectation_tail_bound(s: int, base: str = "e", cutoff: float = TERM_CUTOFF) -> tuple[float, float]:
    """(tail_sum, e_bound) for the conditional expectation of a positive zeta_i.

    tail_sum sums m * 4 exp(-t^2 / ((s + 4 sqrt s)/2 + 2t)) with
    t = (m - 4 sqrt s)/2 over all integers m >= 2 sqrt(s log s) + 4 sqrt s;
    e_bound = 2 sqrt(s log s) + 4 sqrt s + tail_sum.
    """
    _check_s(s)
    tail, e = _tail(s, base, EXT, cutoff)
    return float(tail), float(e)


def contradiction_value(s: int, base: str = "e") -> float | None:
    """4 s x (x+1) e^{-z(s)}; None where z(s) is inapplicable."""
    _check_s(s)
    x = _x(s, base, EXT)
    z = _z(s, x, EXT)
    if z is None:
        return None
    return float(4 * EXT(s) * x * (x + 1) * np.exp(-z))


def _evaluate(s: int, base: str, dtype) -> dict:
    x = _x(s, base, dtype)
    z = _z(s, x, dtype)
    tail, e = _tail(s, base, dtype, TERM_CUTOFF)
    cv = None if z is None else 4 * dtype(s) * x * (x + 1) * np.exp(-z)
    return {
        "x": x,
        "z": z,
        "tail_sum": tail,
        "e_bound": e,
        "e_limit": dtype(COEFF) * _root(s, base, dtype),
        "contradiction_value": cv,
    }


def _agree(a, b, digits: int = 6) -> bool:
    if a is None or b is None:
        return a is None and b is None
    a, b = float(a), float(b)
    if a == b:
        return True
    return abs(a - b) <= 10.0 ** (1 - digits) * max(abs(a), abs(b)) / 2


@dataclass
class ThresholdReport:
    s: int
    log_base: str
    x: int
    z: float | None
    tail_sum: float
    e_bound: float
    e_limit: float
    contradiction_value: float | None
    hypothesis_ok: bool
    eq2_plus_one_ok: bool
    passes: bool
    double_agrees: bool

    def to_dict(self) -> dict:
        return asdict(self)


def threshold_report(s: int, base: str = "e") -> ThresholdReport:
    """All endgame quantities at ``s`` with the pass/fail verdict.

    passes requires contradiction_value < 1, e_bound <= 3.7 sqrt(s log s) and
    ``hypothesis_ok``, which records sqrt(alpha n) >= 4 for alpha n ~ s - 1,
    i.e. s >= 17. ``eq2_plus_one_ok`` records whether lambda = 2 sqrt s reaches
    2 sqrt(s-1) + 1; it never does, and it is reported rather than enforced.
    """
    _check_s(s)
    ext = _evaluate(s, base, EXT)
    dbl = _evaluate(s, base, np.float64)
    cv = ext["contradiction_value"]
    hyp = s >= 17
    passes = cv is not None and cv < 1 and ext["e_bound"] <= ext["e_limit"] and hyp
    plus_one = 2 * math.sqrt(s) >= 2 * math.sqrt(s - 1) + 1

    def fl(v):
        return None if v is None else float(v)

    return ThresholdReport(
        s=s,
        log_base=base,
        x=ext["x"],
        z=fl(ext["z"]),
        tail_sum=fl(ext["tail_sum"]),
        e_bound=fl(ext["e_bound"]),
        e_limit=fl(ext["e_limit"]),
        contradiction_value=fl(cv),
        hypothesis_ok=hyp,
        eq2_plus_one_ok=plus_one,
        passes=bool(passes),
        double_agrees=all(_agree(ext[key], dbl[key]) for key in ext),
    )


def passes(s: int, base: str = "e") -> bool:
    return threshold_report(s, base).passes


def sweep(lo: int, hi: int, base: str = "e") -> list[ThresholdReport]:
    _check_range(lo, hi)
    return [threshold_report(s, base) for s in range(lo, hi + 1)]


def _check_range(lo: int, hi: int) -> None:
    if lo < 2 or hi > S_MAX or lo > hi:
        raise ParameterError(f"range must lie within [2, {S_MAX}], got [{lo}, {hi}]")


def min_passing_s(lo: int, hi: int, base: str = "e") -> ThresholdReport | None:
    """Report at the smallest s in [lo, hi] where the endgame closes, or None."""
    _check_range(lo, hi)
    for s in range(lo, hi + 1):
        rep = threshold_report(s, base)
        if rep.passes:
            return rep
    return None

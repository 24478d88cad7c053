"""Size sequences, the c-sequence counterexample, and shifting (compression).

A size sequence f_1 <= ... <= f_s is *satisfying* when any families with
|F_i| > f_i contain a rainbow matching.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matching import (
    BudgetExceeded,
    SearchStatus,
    count_families_at_least,
    families_at_least,
    rainbow_search,
)
from .tuple_space import (
    Family,
    ParameterError,
    SpaceParams,
    check_same_space,
    coordinate_masks,
    disjoint_masks,
    encode_tuple,
    random_family,
)


@dataclass(frozen=True)
class SizeSequence:
    values: tuple[int, ...]
    params: SpaceParams

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ParameterError(f"sequence {vals} is not nondecreasing")
        if any(v > self.params.size for v in vals):
            raise ParameterError(f"sequence {vals} exceeds n^k = {self.params.size}")

    def __len__(self) -> int:
        return len(self.values)

    def to_dict(self) -> dict:
        return {"n": self.params.n, "k": self.params.k, "values": list(self.values)}


def _ramp(s: int, n: int, k: int, C: float, cap_at: float | None) -> SizeSequence:
    block = n ** (k - 1)
    shift = C * math.sqrt(s * math.log(s)) if s > 1 else 0.0
    vals = []
    for i in range(1, s + 1):
        level = i + shift
        if cap_at is not None:
            level = min(level, cap_at)
        vals.append(min(math.ceil(level * block), n**k))
    return SizeSequence(tuple(vals), SpaceParams(n, k, s))


def sequence_a(s: int, n: int, k: int, C: float) -> SizeSequence:
    """a_i = ceil((i + C sqrt(s ln s)) n^{k-1}), capped at n^k."""
    if C < 0:
        raise ParameterError(f"C must be non-negative, got {C}")
    return _ramp(s, n, k, C, None)


def sequence_b(s: int, n: int, k: int, C: float, eps: float) -> SizeSequence:
    """b_i = ceil(min(i + C sqrt(s ln s), s - 1 + eps) n^{k-1}). Generator only."""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    return _ramp(s, n, k, C, s - 1 + eps)


def sequence_d(s: int, n: int, k: int, C: float) -> SizeSequence:
    """d_i = ceil(min(i + C sqrt(s ln s), s - 1) n^{k-1}). Generator only."""
    return _ramp(s, n, k, C, s - 1)


def sequence_e(s: int, n: int, k: int) -> SizeSequence:
    """e_i = i n^{k-1}. Generator only."""
    return _ramp(s, n, k, 0.0, None)


def sequence_c(s: int, n: int, k: int) -> SizeSequence:
    """c_1 = ... = c_{s-1} = (s-1) n^{k-1} - (n-1)^{k-1} - 1 and c_s = (s-1) n^{k-1}."""
    if n <= s:
        raise ParameterError(f"the c-sequence needs n >= s + 1, got n={n}, s={s}")
    top = (s - 1) * n ** (k - 1)
    low = top - (n - 1) ** (k - 1) - 1
    return SizeSequence((low,) * (s - 1) + (top,), SpaceParams(n, k, s))


def c_counterexample(s: int, n: int, k: int, F: Sequence[int]) -> list[Family]:
    """Families exceeding the c-sequence pointwise that have no rainbow matching.

    The first s-1 families are [s-1] x [n]^{k-1} minus the tuples of
    {1} x [n]^{k-1} disjoint from F; the last is [s-1] x [n]^{k-1} plus F.
    """
    if n <= s:
        raise ParameterError(f"the c-sequence needs n >= s + 1, got n={n}, s={s}")
    space = SpaceParams(n, k)
    if len(F) != k or not s + 1 <= F[0] <= n:
        raise ParameterError(f"F must have first coordinate in [{s + 1}, {n}], got {tuple(F)}")
    rank = encode_tuple(F, space)
    base = (1 << (s - 1) * n ** (k - 1)) - 1
    first_is_one = coordinate_masks(n, k)[0][0]
    cut = disjoint_masks(n, k)[rank] & first_is_one
    small = Family(space, base & ~cut)
    return [small] * (s - 1) + [Family(space, base | 1 << rank)]


class Status(enum.Enum):
    SATISFYING = "Satisfying"
    COUNTEREXAMPLE = "CounterexampleFound"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    status: Status
    witness: tuple[Family, ...] | None = None
    checked: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "checked": self.checked,
            "witness": None if self.witness is None else [f.to_dict() for f in self.witness],
        }


def _is_counterexample(seq: SizeSequence, fams: Sequence[Family], budget: int | None) -> bool:
    if len(fams) != len(seq) or any(len(f) <= v for f, v in zip(fams, seq.values)):
        return False
    return rainbow_search(fams, budget).status is SearchStatus.ABSENT


def sequence_satisfying_check(
    seq: SizeSequence,
    mode: str = "exhaustive",
    budget: int = 10**6,
    seed: int = 0,
    candidates: Sequence[Sequence[Family]] = (),
    search_budget: int | None = 10**6,
) -> Verdict:
    """Decide (exhaustive) or probe (random) whether ``seq`` is satisfying.

    ``candidates`` are known constructions tried before the sweep; a candidate
    that exceeds ``seq`` pointwise and has no rainbow matching is returned as
    the witness. Exhaustive mode enumerates every family tuple with
    |F_i| > f_i and refuses with ``BudgetExceeded`` when there are more than
    ``budget``. Random mode draws ``budget`` tuples of families of size
    f_i + 1 (adding members never destroys a rainbow matching) and can only
    report a counterexample or Inconclusive.
    """
    space = seq.params.space()
    for cand in candidates:
        cand = tuple(cand)
        check_same_space(*cand, Family(space))
        if _is_counterexample(seq, cand, search_budget):
            return Verdict(Status.COUNTEREXAMPLE, cand, 0)

    if mode == "exhaustive":
        mins = [v + 1 for v in seq.values]
        total = math.prod(count_families_at_least(space, m) for m in mins)
        if total > budget:
            raise BudgetExceeded(f"{total} family tuples exceed the budget {budget}", total)
        pools = {m: list(families_at_least(space, m)) for m in set(mins)}
        checked = 0
        unsure = False
        for combo in itertools.product(*(pools[m] for m in mins)):
            checked += 1
            res = rainbow_search(combo, search_budget)
            if res.status is SearchStatus.ABSENT:
                return Verdict(Status.COUNTEREXAMPLE, tuple(combo), checked)
            unsure |= res.status is SearchStatus.INCONCLUSIVE
        return Verdict(Status.INCONCLUSIVE if unsure else Status.SATISFYING, None, checked)

    if mode == "random":
        if any(v + 1 > space.size for v in seq.values):
            return Verdict(Status.SATISFYING, None, 0)  # no family can exceed n^k
        seeds = np.random.SeedSequence(seed).generate_state(budget, dtype=np.uint64)
        for t in range(budget):
            sub = np.random.SeedSequence(int(seeds[t])).generate_state(len(seq), dtype=np.uint64)
            fams = tuple(random_family(space, v + 1, int(x)) for v, x in zip(seq.values, sub))
            if rainbow_search(fams, search_budget).status is SearchStatus.ABSENT:
                return Verdict(Status.COUNTEREXAMPLE, fams, t + 1)
        return Verdict(Status.INCONCLUSIVE, None, budget)

    raise ParameterError(f"mode must be 'exhaustive' or 'random', got {mode!r}")


def _compress(mask: int, lower: int, upper: int, d: int) -> int:
    """Move members of ``upper`` down by ``d`` bits where the target slot is free."""
    free = ((mask & upper) >> d) & lower & ~mask
    return (mask ^ (free << d)) | free


def shift_closure(families: Sequence[Family]) -> list[Family]:
    """Iterate elementary compressions on all families at once until nothing moves.

    For coordinate j, b descending and a < b ascending, each tuple with
    j-th coordinate b is replaced by its copy with coordinate a when that copy
    is absent. The fixpoint is a down-set in the coordinatewise order.
    """
    if not families:
        return []
    space = check_same_space(*families)
    n, k = space.n, space.k
    cm = coordinate_masks(n, k)
    masks = [f.mask for f in families]
    changed = True
    while changed:
        changed = False
        for j in range(k):
            w = n ** (k - 1 - j)
            for b in range(n - 1, 0, -1):
                for a in range(b):
                    d = (b - a) * w
                    for i, m in enumerate(masks):
                        new = _compress(m, cm[j][a], cm[j][b], d)
                        if new != m:
                            masks[i] = new
                            changed = True
    return [Family(space, m) for m in masks]


def is_down_set(family: Family) -> bool:
    n, k = family.params.n, family.params.k
    cm = coordinate_masks(n, k)
    m = family.mask
    for j in range(k):
        w = n ** (k - 1 - j)
        for v in range(1, n):
            if ((m & cm[j][v]) >> w) & ~m:
                return False
    return True

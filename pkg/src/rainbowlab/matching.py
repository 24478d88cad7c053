"""Ordered perfect matchings, the Hall graph G(M), and rainbow matching search."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .tuple_space import (
    Coords,
    Family,
    ParameterError,
    SpaceParams,
    check_same_space,
    decode_tuple,
    disjoint_masks,
)


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured ceiling."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class OrderedMatching:
    """M_i = (pi_1(i), ..., pi_k(i)) for k permutations of [n], all 1-based."""

    params: SpaceParams
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n, k = self.params.n, self.params.k
        if len(self.perms) != k:
            raise ParameterError(f"need {k} permutations, got {len(self.perms)}")
        target = list(range(1, n + 1))
        for p in self.perms:
            if sorted(p) != target:
                raise ParameterError(f"{p} is not a permutation of [{n}]")

    @classmethod
    def from_edges(cls, params: SpaceParams, edges: Sequence[Sequence[int]]) -> OrderedMatching:
        if len(edges) != params.n:
            raise ParameterError(f"a perfect matching has {params.n} edges, got {len(edges)}")
        perms = tuple(tuple(e[j] for e in edges) for j in range(params.k))
        return cls(params, perms)

    @classmethod
    def identity(cls, params: SpaceParams) -> OrderedMatching:
        ident = tuple(range(1, params.n + 1))
        return cls(params, (ident,) * params.k)

    @property
    def edges(self) -> tuple[Coords, ...]:
        return tuple(zip(*self.perms))

    def ranks(self) -> list[int]:
        n = self.params.n
        out = [0] * n
        for p in self.perms:
            for i, v in enumerate(p):
                out[i] = out[i] * n + (v - 1)
        return out

    def mask(self) -> int:
        m = 0
        for r in self.ranks():
            m |= 1 << r
        return m


@dataclass(frozen=True)
class RainbowMatching:
    picks: tuple[Coords, ...]

    def to_dict(self) -> dict:
        return {"picks": [list(p) for p in self.picks]}


@dataclass(frozen=True)
class HallReport:
    eta: tuple[int, ...]
    zeta: tuple[int, ...]
    j_m: int | None
    saturating: RainbowMatching | None

    @property
    def saturated(self) -> bool:
        return self.saturating is not None

    def to_dict(self) -> dict:
        return {
            "eta": list(self.eta),
            "zeta": list(self.zeta),
            "j_m": self.j_m,
            "saturated": self.saturated,
        }


class SearchStatus(enum.Enum):
    PRESENT = "present"
    ABSENT = "absent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SearchResult:
    status: SearchStatus
    matching: RainbowMatching | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.PRESENT


def intersection_count(family: Family, matching: OrderedMatching) -> int:
    check_same_space(family, Family(matching.params))
    return (family.mask & matching.mask()).bit_count()


def hall_deficiency_j(zeta: Sequence[int]) -> int | None:
    """Largest j in [0, s-1] such that at least s-j entries satisfy zeta_i <= -j.

    Returns None when no j qualifies.
    """
    s = len(zeta)
    desc = sorted(zeta, reverse=True)
    # #{i : zeta_i <= -j} >= s-j  <=>  the (j+1)-th largest entry is <= -j
    for j in range(s - 1, -1, -1):
        if desc[j] <= -j:
            return j
    return None


def saturating_matching(families: Sequence[Family], matching: OrderedMatching) -> RainbowMatching | None:
    """Match every family to a distinct edge of ``matching`` that it contains.

    Simple augmenting paths (Kuhn); s is small, so no need for Hopcroft-Karp.
    """
    if not families:
        return RainbowMatching(())
    check_same_space(*families, Family(matching.params))
    ranks = matching.ranks()
    adj = [[e for e, r in enumerate(ranks) if f.mask >> r & 1] for f in families]
    owner: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for e in adj[i]:
            if e in seen:
                continue
            seen.add(e)
            if e not in owner or augment(owner[e], seen):
                owner[e] = i
                return True
        return False

    for i in range(len(families)):
        if not augment(i, set()):
            return None
    edge_of = {i: e for e, i in owner.items()}
    edges = matching.edges
    return RainbowMatching(tuple(edges[edge_of[i]] for i in range(len(families))))


def hall_report(families: Sequence[Family], matching: OrderedMatching) -> HallReport:
    s = len(families)
    eta = tuple(intersection_count(f, matching) for f in families)
    zeta = tuple(e - s + 1 for e in eta)
    return HallReport(eta, zeta, hall_deficiency_j(zeta), saturating_matching(families, matching))


class _OutOfBudget(Exception):
    pass


def rainbow_search(families: Sequence[Family], budget: int | None = 10**7) -> SearchResult:
    """Exact search for pairwise disjoint picks F_i in families[i].

    Families are visited smallest first (ties by index) and candidates in rank
    order; each pick intersects the remaining candidate sets with its
    disjointness mask and backtracks as soon as one becomes empty. ``budget``
    caps the number of picks tried; running out yields INCONCLUSIVE.
    """
    s = len(families)
    if s == 0:
        return SearchResult(SearchStatus.PRESENT, RainbowMatching(()), 0)
    space = check_same_space(*families)
    dm = disjoint_masks(space.n, space.k)
    order = sorted(range(s), key=lambda i: (len(families[i]), i))
    chosen = [0] * s
    nodes = 0

    def rec(depth: int, cands: list[int]) -> bool:
        nonlocal nodes
        if depth == s:
            return True
        head, rest = cands[0], cands[1:]
        while head:
            low = head & -head
            head ^= low
            nodes += 1
            if budget is not None and nodes > budget:
                raise _OutOfBudget
            r = low.bit_length() - 1
            nbr = dm[r]
            nxt = [c & nbr for c in rest]
            if all(nxt) and rec(depth + 1, nxt):
                chosen[depth] = r
                return True
        return False

    try:
        ok = rec(0, [families[i].mask for i in order])
    except _OutOfBudget:
        return SearchResult(SearchStatus.INCONCLUSIVE, None, nodes)
    if not ok:
        return SearchResult(SearchStatus.ABSENT, None, nodes)
    picks: list[Coords] = [()] * s
    for depth, i in enumerate(order):
        picks[i] = decode_tuple(chosen[depth], space)
    return SearchResult(SearchStatus.PRESENT, RainbowMatching(tuple(picks)), nodes)


def is_rainbow(families: Sequence[Family], picks: Sequence[Sequence[int]]) -> bool:
    if len(picks) != len(families):
        return False
    for f, p in zip(families, picks):
        if tuple(p) not in f:
            return False
    for a, b in itertools.combinations(picks, 2):
        if any(x == y for x, y in zip(a, b)):
            return False
    return True


def count_families_at_least(space: SpaceParams, min_size: int) -> int:
    N = space.size
    return sum(math.comb(N, j) for j in range(max(min_size, 0), N + 1))


def families_at_least(space: SpaceParams, min_size: int) -> Iterator[Family]:
    """Every family with at least ``min_size`` members, in ascending mask order."""
    N = space.size
    min_size = max(min_size, 0)
    if min_size <= N // 2:
        for m in range(1 << N):
            if m.bit_count() >= min_size:
                yield Family(space, m)
        return
    masks = []
    for size in range(min_size, N + 1):
        for combo in itertools.combinations(range(N), N - size):
            m = (1 << N) - 1
            for r in combo:
                m ^= 1 << r
            masks.append(m)
    for m in sorted(masks):
        yield Family(space, m)


@dataclass
class ConjectureVerdict:
    verified: bool
    checked: int
    counterexample: tuple[Family, ...] | None = None
    inconclusive: int = 0
    bounds: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "verified": self.verified,
            "checked": self.checked,
            "inconclusive": self.inconclusive,
            "bounds": list(self.bounds),
            "counterexample": None
            if self.counterexample is None
            else [f.to_dict() for f in self.counterexample],
        }


def verify_conjecture_exhaustive(
    params: SpaceParams,
    bounds: Sequence[int] | None = None,
    ceiling: int = 10**7,
    budget: int | None = 10**6,
) -> ConjectureVerdict:
    """Check every s-tuple of families with |F_i| >= bounds[i] for a rainbow matching.

    ``bounds`` defaults to (s-1)n^{k-1} + 1, i.e. the hypothesis of the
    Aharoni-Howard conjecture. Stops at the first counterexample in
    lexicographic mask order.
    """
    if params.s is None:
        raise ParameterError("verify_conjecture_exhaustive needs s")
    space, s = params.space(), params.s
    if bounds is None:
        bounds = [(s - 1) * params.n ** (params.k - 1) + 1] * s
    bounds = tuple(int(b) for b in bounds)
    if len(bounds) != s:
        raise ParameterError(f"need {s} bounds, got {len(bounds)}")
    counts = [count_families_at_least(space, b) for b in bounds]
    total = math.prod(counts)
    if total > ceiling:
        raise BudgetExceeded(f"{total} family tuples exceed the ceiling {ceiling}", total)
    pools = {b: list(families_at_least(space, b)) for b in set(bounds)}
    checked = 0
    inconclusive = 0
    for combo in itertools.product(*(pools[b] for b in bounds)):
        checked += 1
        res = rainbow_search(combo, budget)
        if res.status is SearchStatus.ABSENT:
            return ConjectureVerdict(False, checked, tuple(combo), inconclusive, bounds)
        if res.status is SearchStatus.INCONCLUSIVE:
            inconclusive += 1
    return ConjectureVerdict(inconclusive == 0, checked, None, inconclusive, bounds)

"""Tuples of [n]^k, their mixed-radix ranks, and families stored as bitsets.

Coordinates are 1-based at every public boundary and 0-based internally.
A family is a Python ``int`` used as a packed bit array: bit ``r`` is set iff
the tuple of rank ``r`` is a member.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

MAX_SPACE = 2**32

Coords = tuple[int, ...]


class ParameterError(ValueError):
    """Raised when (n, k, s) or a derived argument is outside its domain."""


@dataclass(frozen=True)
class SpaceParams:
    n: int
    k: int
    s: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ParameterError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        if self.s is not None and self.s < 1:
            raise ParameterError(f"need s >= 1, got s={self.s}")
        if self.n**self.k > MAX_SPACE:
            raise ParameterError(f"n^k = {self.n ** self.k} exceeds the 2^32 cap")

    @property
    def size(self) -> int:
        return self.n**self.k

    def space(self) -> SpaceParams:
        """The (n, k) part only, used to compare families across different s."""
        return SpaceParams(self.n, self.k)


def encode_tuple(coords: Sequence[int], params: SpaceParams) -> int:
    """Row-major rank of a 1-based coordinate vector."""
    if len(coords) != params.k:
        raise ParameterError(f"expected {params.k} coordinates, got {len(coords)}")
    rank = 0
    for c in coords:
        if not 1 <= c <= params.n:
            raise ParameterError(f"coordinate {c} outside [1, {params.n}]")
        rank = rank * params.n + (c - 1)
    return rank


def decode_tuple(rank: int, params: SpaceParams) -> Coords:
    if not 0 <= rank < params.size:
        raise ParameterError(f"rank {rank} outside [0, {params.size})")
    out = [0] * params.k
    for j in range(params.k - 1, -1, -1):
        rank, d = divmod(rank, params.n)
        out[j] = d + 1
    return tuple(out)


def disjoint(t1: Sequence[int], t2: Sequence[int]) -> bool:
    """True iff the two tuples differ in every coordinate."""
    if len(t1) != len(t2):
        raise ParameterError(f"arity mismatch: {len(t1)} vs {len(t2)}")
    return all(a != b for a, b in zip(t1, t2))


@lru_cache(maxsize=64)
def coordinate_masks(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """``masks[j][v]`` is the bitset of tuples whose j-th coordinate is v+1."""
    masks = [[0] * n for _ in range(k)]
    bits = [[[] for _ in range(n)] for _ in range(k)]
    for r in range(n**k):
        rem = r
        for j in range(k - 1, -1, -1):
            rem, d = divmod(rem, n)
            bits[j][d].append(r)
    for j in range(k):
        for v in range(n):
            m = 0
            for r in bits[j][v]:
                m |= 1 << r
            masks[j][v] = m
    return tuple(tuple(row) for row in masks)


@lru_cache(maxsize=16)
def disjoint_masks(n: int, k: int) -> tuple[int, ...]:
    """Per rank, the bitset of tuples disjoint from it (its PG_{n,k} neighbourhood)."""
    cm = coordinate_masks(n, k)
    full = (1 << n**k) - 1
    out = []
    for r in range(n**k):
        rem = r
        meet = 0
        for j in range(k - 1, -1, -1):
            rem, d = divmod(rem, n)
            meet |= cm[j][d]
        out.append(full & ~meet)
    return tuple(out)


def iter_bits(mask: int) -> Iterator[int]:
    """Set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Family:
    """A subset of [n]^k. ``mask`` is the packed membership bit array."""

    params: SpaceParams
    mask: int = 0

    def __post_init__(self):
        if self.params.s is not None:
            object.__setattr__(self, "params", self.params.space())
        if self.mask < 0 or self.mask >> self.params.size:
            raise ParameterError("family mask has bits beyond n^k")

    @classmethod
    def from_ranks(cls, params: SpaceParams, ranks: Iterable[int]) -> Family:
        m = 0
        for r in ranks:
            if not 0 <= r < params.size:
                raise ParameterError(f"rank {r} outside [0, {params.size})")
            m |= 1 << r
        return cls(params, m)

    @classmethod
    def from_tuples(cls, params: SpaceParams, tuples: Iterable[Sequence[int]]) -> Family:
        return cls.from_ranks(params, (encode_tuple(t, params) for t in tuples))

    @classmethod
    def full(cls, params: SpaceParams) -> Family:
        return cls(params, (1 << params.size) - 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, item) -> bool:
        r = item if isinstance(item, int) else encode_tuple(item, self.params)
        return 0 <= r < self.params.size and bool(self.mask >> r & 1)

    def __iter__(self) -> Iterator[Coords]:
        return (decode_tuple(r, self.params) for r in self.ranks())

    def ranks(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def with_tuple(self, coords: Sequence[int]) -> Family:
        return Family(self.params, self.mask | 1 << encode_tuple(coords, self.params))

    def without_tuple(self, coords: Sequence[int]) -> Family:
        return Family(self.params, self.mask & ~(1 << encode_tuple(coords, self.params)))

    def density(self) -> Fraction:
        return family_density(self)

    def to_dict(self) -> dict:
        return {"n": self.params.n, "k": self.params.k, "members": list(self.ranks())}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> Family:
        return cls.from_ranks(SpaceParams(int(data["n"]), int(data["k"])), data["members"])

    @classmethod
    def from_json(cls, text: str) -> Family:
        return cls.from_dict(json.loads(text))


def family_density(family: Family) -> Fraction:
    """Exact |F| / n^k. Use ``float()`` on the result for the double value."""
    return Fraction(len(family), family.params.size)


def extremal_family(params: SpaceParams) -> Family:
    """All tuples whose first coordinate lies in [s-1]."""
    if params.s is None:
        raise ParameterError("extremal_family needs s")
    if not 1 <= params.s - 1 <= params.n:
        raise ParameterError(f"need 1 <= s-1 <= n, got s={params.s}, n={params.n}")
    block = params.n ** (params.k - 1)
    # row-major order puts the first coordinate outermost
    return Family(params.space(), (1 << (params.s - 1) * block) - 1)


def check_same_space(*families: Family) -> SpaceParams:
    spaces = {f.params.space() for f in families}
    if len(spaces) != 1:
        raise ParameterError(f"families live in different spaces: {sorted(map(str, spaces))}")
    return spaces.pop()


def random_family(params: SpaceParams, size: int, seed: int) -> Family:
    """A uniformly random family of exactly ``size`` members, reproducible from ``seed``."""
    import numpy as np

    if not 0 <= size <= params.size:
        raise ParameterError(f"size {size} outside [0, {params.size}]")
    rng = np.random.default_rng(seed)
    ranks = rng.choice(params.size, size=size, replace=False)
    return Family.from_ranks(params, (int(r) for r in ranks))

"""Spectrum of the disjointness graph PG_{n,k} and the Alon-Chung mixing check."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .tuple_space import Family, ParameterError, disjoint_masks


@dataclass(frozen=True)
class SpectrumSummary:
    D: int
    lambda2: int
    spectrum: tuple[tuple[int, int], ...]  # (eigenvalue, multiplicity), descending

    def to_dict(self) -> dict:
        return {"D": self.D, "lambda2": self.lambda2, "spectrum": [list(p) for p in self.spectrum]}


def pg_spectrum(n: int, k: int) -> SpectrumSummary:
    """Closed form: PG_{n,k} is the k-th tensor power of K_n.

    K_n has eigenvalues n-1 (once) and -1 (n-1 times), so the products are
    (-1)^j (n-1)^(k-j) with multiplicity C(k, j) (n-1)^j.
    """
    if n < 2:
        raise ParameterError(f"PG_(n,k) needs n >= 2, got {n}")
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    mult: dict[int, int] = defaultdict(int)
    for j in range(k + 1):
        mult[(-1) ** j * (n - 1) ** (k - j)] += math.comb(k, j) * (n - 1) ** j
    spec = tuple(sorted(mult.items(), reverse=True))
    return SpectrumSummary((n - 1) ** k, (n - 1) ** (k - 1), spec)


def edge_count(S: Family) -> int:
    """Number of unordered disjoint pairs inside S."""
    n, k = S.params.n, S.params.k
    if n < 2:
        raise ParameterError("PG_(n,k) has no edges for n < 2")
    dm = disjoint_masks(n, k)
    m = S.mask
    ordered = sum((dm[r] & m).bit_count() for r in S.ranks())
    return ordered // 2


def alon_chung_check(S: Family) -> bool:
    """|2e(S)/(Dm) - alpha^2| <= lambda2 alpha (1 - alpha) / D, in exact arithmetic."""
    n, k = S.params.n, S.params.k
    summary = pg_spectrum(n, k)
    m = S.params.size
    alpha = Fraction(len(S), m)
    lhs = abs(Fraction(2 * edge_count(S), summary.D * m) - alpha**2)
    return lhs <= summary.lambda2 * alpha * (1 - alpha) / summary.D

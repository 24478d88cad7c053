"""Brute-force reference implementations, deliberately independent of the library.

Nothing here touches bitsets or the library's disjointness masks: tuples are
plain Python tuples and everything is enumerated directly.
"""

import itertools
from fractions import Fraction

import mpmath
import networkx as nx
import numpy as np


def all_tuples(n, k):
    return list(itertools.product(range(1, n + 1), repeat=k))


def meets(a, b):
    return any(x == y for x, y in zip(a, b))


def brute_rainbow(families_as_sets):
    """First rainbow choice found by full enumeration, or None."""
    for picks in itertools.product(*[sorted(f) for f in families_as_sets]):
        if all(not meets(a, b) for a, b in itertools.combinations(picks, 2)):
            return picks
    return None


def brute_ordered_disjoint_pairs(members):
    return sum(1 for a in members for b in members if not meets(a, b))


def brute_edge_count(members):
    return sum(1 for a, b in itertools.combinations(sorted(members), 2) if not meets(a, b))


def brute_pair_probabilities(members, n, k):
    total = n**k * (n - 1) ** k
    p11 = Fraction(brute_ordered_disjoint_pairs(members), total)
    alpha = Fraction(len(members), n**k)
    return p11, alpha - p11


def dense_pg_eigenvalues(n, k):
    kn = np.ones((n, n)) - np.eye(n)
    a = np.array([[1.0]])
    for _ in range(k):
        a = np.kron(a, kn)
    return np.sort(np.linalg.eigvalsh(a))


def nx_max_matching(families_as_sets, edges):
    """Size of a maximum matching between families and matching edges (networkx)."""
    g = nx.Graph()
    left = [("F", i) for i in range(len(families_as_sets))]
    g.add_nodes_from(left)
    g.add_nodes_from(("M", e) for e in range(len(edges)))
    for i, fam in enumerate(families_as_sets):
        for e, edge in enumerate(edges):
            if tuple(edge) in fam:
                g.add_edge(("F", i), ("M", e))
    m = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return sum(1 for node in m if node[0] == "F")


def all_ordered_matchings(n, k):
    """Every sequence of n pairwise-disjoint tuples, found by direct search."""
    tuples = all_tuples(n, k)
    out = []

    def rec(prefix):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for t in tuples:
            if all(not meets(t, p) for p in prefix):
                rec(prefix + [t])

    rec([])
    return out


def is_down_set(members, n):
    for t in members:
        for j in range(len(t)):
            if t[j] > 1:
                smaller = t[:j] + (t[j] - 1,) + t[j + 1 :]
                if smaller not in members:
                    return False
    return True


def mp_threshold(s, dps=50):
    """x, z, contradiction value, tail sum and e_bound at s, all in mpmath."""
    with mpmath.workdps(dps):
        s_ = mpmath.mpf(s)
        r = mpmath.sqrt(s_)
        root = mpmath.sqrt(s_ * mpmath.log(s_))
        x = int(mpmath.floor(mpmath.mpf("3.7") * root))
        num = s_ - x - 4 * r
        den = 6 * s_ - 4 * x - 8 * r
        z = num**2 / den if num > 0 and den > 0 else None
        cv = None if z is None else 4 * s_ * x * (x + 1) * mpmath.exp(-z)
        c = (s_ + 4 * r) / 2
        m = int(mpmath.ceil(2 * root + 4 * r))
        tail = mpmath.mpf(0)
        while True:
            t = (m - 4 * r) / 2
            term = m * 4 * mpmath.exp(-t * t / (c + 2 * t))
            tail += term
            if term < mpmath.mpf("1e-45") and t > s_:
                break
            m += 1
        return {
            "x": x,
            "z": None if z is None else float(z),
            "contradiction_value": None if cv is None else float(cv),
            "tail_sum": float(tail),
            "e_bound": float(2 * root + 4 * r + tail),
            "e_limit": float(mpmath.mpf("3.7") * root),
        }

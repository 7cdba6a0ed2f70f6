"""Independent reference implementations used only by the tests.

Each one is written the slow, obvious way and shares no code with the
package, so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction

import numpy as np


def bfs_all_pairs(vertices, edges):
    """Hop distances by one BFS per vertex; missing pairs are absent."""
    adj = {v: set() for v in vertices}
    for u, v, *_ in edges:
        adj[u].add(v)
        adj[v].add(u)
    out = {}
    for s in vertices:
        seen = {s: 0}
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen[y] = seen[x] + 1
                    q.append(y)
        for t, d in seen.items():
            out[(s, t)] = d
    return out


def levenshtein_recursive(a, b):
    """Memoised textbook recursion."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def brute_force_stretch(guest_vertices, guest_edges, host_vertices, host_edges, chunk=400_000):
    """Minimum of sum mass * (d_H - 1) over every injective placement.

    guest_edges are (u, v, mass) with rational masses.  All injections are
    scored with integer numpy arithmetic, in chunks.  Returns the minimum as a
    Fraction, or inf when every placement splits a positive-mass edge across
    host components.
    """
    hd = bfs_all_pairs(host_vertices, host_edges)
    nh = len(host_vertices)
    far = 10 ** 6
    D = np.full((nh, nh), far, dtype=np.int64)
    hidx = {v: i for i, v in enumerate(host_vertices)}
    for (s, t), d in hd.items():
        D[hidx[s], hidx[t]] = d
    gidx = {v: i for i, v in enumerate(guest_vertices)}
    fr = [Fraction(m) for _, _, m in guest_edges]
    scale = math.lcm(*(f.denominator for f in fr)) if fr else 1
    ints = [int(f * scale) for f in fr]
    best = None
    it = itertools.permutations(range(nh), len(guest_vertices))
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        perms = np.array(block, dtype=np.int64).reshape(len(block), len(guest_vertices))
        total = np.zeros(len(perms), dtype=np.int64)
        ok = np.ones(len(perms), dtype=bool)
        for (u, v, _), m in zip(guest_edges, ints):
            d = D[perms[:, gidx[u]], perms[:, gidx[v]]]
            if m:
                ok &= d < far
            total += m * np.where(d < far, d - 1, 0)
        if ok.any():
            c = int(total[ok].min())
            best = c if best is None else min(best, c)
    if best is None:
        return math.inf
    return Fraction(best, scale)


def min_expected_length(probs, max_len=None):
    """Minimum expected length over every binary prefix code, by searching all
    length vectors that satisfy Kraft (such a code exists for each of them)."""
    k = len(probs)
    max_len = max_len or k
    best = None
    for lengths in itertools.product(range(1, max_len + 1), repeat=k):
        if sum(Fraction(1, 2 ** L) for L in lengths) > 1:
            continue
        val = sum(Fraction(p) * L for p, L in zip(probs, lengths))
        if best is None or val < best:
            best = val
    return best


def optimal_codes_exhaustive(probs, max_len):
    """Every binary prefix code (as a tuple of codewords) of minimum expected length."""
    k = len(probs)
    words = [w for L in range(1, max_len + 1) for w in itertools.product((0, 1), repeat=L)]
    best = None
    found = []
    for combo in itertools.permutations(words, k):
        if any(b[:len(a)] == a for a, b in itertools.permutations(combo, 2)):
            continue
        val = sum(Fraction(p) * len(w) for p, w in zip(probs, combo))
        if best is None or val < best:
            best, found = val, [combo]
        elif val == best:
            found.append(combo)
    return best, found


def typical_by_definition(seq, probs, alphabet, delta):
    n = len(seq)
    return sum(abs(Fraction(seq.count(a), n) - Fraction(p)) for a, p in zip(alphabet, probs)) <= delta


def jointly_typical_by_definition(x, y, joint, alphabet, delta):
    n = len(x)
    pairs = list(zip(x, y))
    tot = Fraction(0)
    for i, a in enumerate(alphabet):
        for j, b in enumerate(alphabet):
            tot += abs(Fraction(pairs.count((a, b)), n) - Fraction(joint[i][j]))
    return tot <= delta


def reflected_gray(m):
    if m == 1:
        return [(0,), (1,)]
    prev = reflected_gray(m - 1)
    return [(0,) + w for w in prev] + [(1,) + w for w in reversed(prev)]

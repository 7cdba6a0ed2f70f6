"""Rate, malleability and error rate of a code pair.

Exact mode sums over every positive-mass block pair of the memoryless
extension (rationals stay rationals).  Monte Carlo mode samples block pairs
with a seeded PCG64 generator and reports 95% normal half-widths.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .edit_metrics import EditMetric
from .errors import InputError, ResourceError
from .prob_core import JointSource, Number, prob_blocks_differ

PAIR_CAP = 10 ** 8
Z95 = 1.96


@dataclass(frozen=True)
class RateMalleabilityTriple:
    K: Number
    L: Number
    M: Number
    delta: Number
    exact: bool
    seed: int | None = None
    halfwidth: dict | None = None
    rng: str | None = None

    def as_tuple(self) -> tuple:
        return (self.K, self.L, self.M)

    def to_json(self) -> dict:
        doc = {k: format_number(getattr(self, k)) for k in ("K", "L", "M", "delta")}
        doc["exact"] = self.exact
        if self.seed is not None:
            doc["seed"] = self.seed
            doc["rng"] = self.rng
        if self.halfwidth is not None:
            doc["halfwidth"] = {k: format_number(v) for k, v in self.halfwidth.items()}
        return doc


def format_number(v):
    """Rationals as ``"p/q"`` strings, floats rounded to 12 significant digits."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if math.isinf(v) or math.isnan(v):
        return str(v)
    return float(format(v, ".12g"))


def _pair_terms(src, code_x, code_y, metric, xi, yi):
    names = src.source_alphabet
    x = tuple(names[i] for i in xi)
    y = tuple(names[i] for i in yi)
    a = code_x.encode(x)
    b = code_y.encode(y, context=x)
    err_x = code_x.decode(a) != x
    err_y = code_y.decode(b) != y
    return len(a), len(b), metric(a, b), int(err_x or err_y), int(err_x), int(err_y)


def _check_codes(src, code_x, code_y, metric):
    if code_x.block_n != code_y.block_n:
        raise InputError("the two codes use different block lengths")
    if metric.alphabet_size != code_x.alphabet_size:
        raise InputError("metric alphabet size does not match the code")


def evaluate_exact(src: JointSource, code_x, code_y, metric: EditMetric,
                   cap: int = PAIR_CAP) -> RateMalleabilityTriple:
    """Exact (K, L, M, delta) by enumerating positive-mass block pairs.

    delta is max(Pr[x misdecoded], Pr[y misdecoded]).
    """
    _check_codes(src, code_x, code_y, metric)
    n = code_x.block_n
    support = [(i, j, src.joint[i][j]) for i in range(src.size) for j in range(src.size)
               if src.joint[i][j] > 0]
    if len(support) ** n > cap:
        raise ResourceError(f"{len(support) ** n} block pairs exceed the cap {cap}; "
                            "use Monte Carlo evaluation")
    acc = [[] for _ in range(5)]
    for combo in itertools.product(support, repeat=n):
        mass = Fraction(1) if src.exact else 1.0
        for _, _, m in combo:
            mass *= m
        xi = tuple(c[0] for c in combo)
        yi = tuple(c[1] for c in combo)
        la, lb, d, _, ex, ey = _pair_terms(src, code_x, code_y, metric, xi, yi)
        for slot, v in zip(acc, (la, lb, d, ex, ey)):
            if v:
                slot.append(mass * v)
    if src.exact:
        K, L, M, dx, dy = (sum(s, Fraction(0)) for s in acc)
        K, L, M = K / n, L / n, M / n
    else:
        K, L, M, dx, dy = (math.fsum(s) for s in acc)
        K, L, M = K / n, L / n, M / n
    return RateMalleabilityTriple(K, L, M, max(dx, dy), src.exact)


def evaluate_mc(src: JointSource, code_x, code_y, metric: EditMetric,
                samples: int, seed: int) -> RateMalleabilityTriple:
    """Sample means over ``samples`` block pairs drawn with PCG64(seed)."""
    if samples < 1:
        raise InputError("samples must be >= 1")
    _check_codes(src, code_x, code_y, metric)
    n = code_x.block_n
    w = src.size
    flat = np.array([float(src.joint[i][j]) for i in range(w) for j in range(w)])
    flat = flat / flat.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.choice(w * w, size=(samples, n), p=flat)
    rows, counts = np.unique(draws, axis=0, return_counts=True)
    vals = np.empty((len(rows), 5))
    for r, row in enumerate(rows):
        xi = tuple(int(v) // w for v in row)
        yi = tuple(int(v) % w for v in row)
        la, lb, d, _, ex, ey = _pair_terms(src, code_x, code_y, metric, xi, yi)
        vals[r] = (la / n, lb / n, d / n, ex, ey)
    c = counts.astype(float)
    mean = (vals * c[:, None]).sum(axis=0) / samples
    if samples > 1:
        var = (((vals - mean) ** 2) * c[:, None]).sum(axis=0) / (samples - 1)
    else:
        var = np.zeros(5)
    half = Z95 * np.sqrt(var / samples)
    delta_idx = 3 if mean[3] >= mean[4] else 4
    names = ("K", "L", "M")
    hw = {k: float(h) for k, h in zip(names, half[:3])}
    hw["delta"] = float(half[delta_idx])
    return RateMalleabilityTriple(float(mean[0]), float(mean[1]), float(mean[2]),
                                  float(mean[delta_idx]), False, seed, hw, "PCG64")


def malleability_lower_bound(src: JointSource, block_n: int = 1) -> Number:
    """(1/n) Pr[X^n != Y^n]: every changed block costs at least one edit."""
    if block_n < 1:
        raise InputError("block_n must be >= 1")
    return prob_blocks_differ(src, block_n) / block_n

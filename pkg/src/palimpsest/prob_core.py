"""Joint sources, information measures and the K-L rate-loss frontier.

Probabilities are carried either as :class:`fractions.Fraction` (exact mode)
or as floats.  A source or distribution is exact only when every entry is
rational; a single float entry promotes the whole object to float mode.
Entropies and divergences are always floats since they are irrational in
general.  Logarithms default to base 2 but every routine takes a ``base`` so
that rates can be expressed in storage-alphabet symbols (base ``|V|``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .errors import InputError

FLOAT_TOL = 1e-12

Number = Fraction | float


def parse_probability(value) -> Number:
    """Parse ``"p/q"`` strings, ints and Fractions exactly; floats stay floats."""
    if isinstance(value, bool):
        raise InputError(f"not a probability: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            if any(ch in text for ch in ".eE") and "/" not in text:
                return float(text)
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse probability {value!r}") from exc
    raise InputError(f"unsupported probability type: {type(value).__name__}")


def _normalise_entries(entries: Sequence) -> tuple[tuple[Number, ...], bool]:
    parsed = [parse_probability(v) for v in entries]
    exact = all(isinstance(v, Fraction) for v in parsed)
    if not exact:
        parsed = [float(v) for v in parsed]
    return tuple(parsed), exact


def _check_total(total: Number, exact: bool, what: str) -> None:
    if exact:
        if total != 1:
            raise InputError(f"{what} sums to {total}, not 1")
    elif abs(total - 1.0) > FLOAT_TOL:
        raise InputError(f"{what} sums to {total!r}, not 1 (tolerance {FLOAT_TOL})")


@dataclass(frozen=True)
class Distribution:
    """A probability vector, optionally tagged with the symbols it ranges over."""

    probs: tuple
    symbols: tuple | None = None

    def __post_init__(self):
        probs, exact = _normalise_entries(self.probs)
        if not probs:
            raise InputError("distribution must have at least one entry")
        if any(p < 0 for p in probs):
            raise InputError("distribution has a negative entry")
        _check_total(sum(probs), exact, "distribution")
        object.__setattr__(self, "probs", probs)
        if self.symbols is None:
            object.__setattr__(self, "symbols", tuple(range(len(probs))))
        else:
            syms = tuple(self.symbols)
            if len(syms) != len(probs):
                raise InputError("symbols and probabilities differ in length")
            object.__setattr__(self, "symbols", syms)

    @property
    def exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.probs) if p > 0)

    def prob_of(self, symbol) -> Number:
        return self.probs[self.symbols.index(symbol)]

    def close_to(self, other: "Distribution") -> bool:
        if len(self) != len(other):
            return False
        if self.exact and other.exact:
            return self.probs == other.probs
        return all(abs(float(a) - float(b)) <= FLOAT_TOL for a, b in zip(self.probs, other.probs))


@dataclass(frozen=True)
class JointSource:
    """Finite joint distribution ``p(x, y)`` of an original and an edited letter.

    ``joint[i][j]`` is the probability that the original letter is
    ``source_alphabet[i]`` and the edited letter is ``source_alphabet[j]``.
    """

    source_alphabet: tuple
    joint: tuple
    storage_alphabet_size: int = 2

    def __post_init__(self):
        alphabet = tuple(self.source_alphabet)
        if len(alphabet) < 1:
            raise InputError("source alphabet must be non-empty")
        if len(set(alphabet)) != len(alphabet):
            raise InputError("source alphabet has repeated symbols")
        rows = [tuple(r) for r in self.joint]
        if len(rows) != len(alphabet) or any(len(r) != len(alphabet) for r in rows):
            raise InputError(
                f"joint matrix must be {len(alphabet)}x{len(alphabet)} to match the alphabet"
            )
        flat, exact = _normalise_entries([v for r in rows for v in r])
        if any(v < 0 for v in flat):
            raise InputError("joint matrix has a negative entry")
        _check_total(sum(flat), exact, "joint matrix")
        k = len(alphabet)
        joint = tuple(flat[i * k:(i + 1) * k] for i in range(k))
        if not isinstance(self.storage_alphabet_size, int) or self.storage_alphabet_size < 2:
            raise InputError("storage_alphabet_size must be an integer >= 2")
        object.__setattr__(self, "source_alphabet", alphabet)
        object.__setattr__(self, "joint", joint)

    @classmethod
    def from_channel(cls, alphabet, prior, channel, storage_alphabet_size: int = 2) -> "JointSource":
        """Build ``p(x, y) = p(x) p(y|x)`` from a prior and a row-stochastic channel."""
        prior = [parse_probability(v) for v in prior]
        joint = [[prior[i] * parse_probability(v) for v in row] for i, row in enumerate(channel)]
        return cls(tuple(alphabet), tuple(tuple(r) for r in joint), storage_alphabet_size)

    @property
    def size(self) -> int:
        return len(self.source_alphabet)

    @property
    def exact(self) -> bool:
        return isinstance(self.joint[0][0], Fraction)

    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0

    def p(self, i: int, j: int) -> Number:
        return self.joint[i][j]

    def diagonal_mass(self) -> Number:
        """``Pr[X = Y]`` for a single letter."""
        return sum((self.joint[i][i] for i in range(self.size)), self.zero())

    def block_pair_mass(self, xs: Sequence[int], ys: Sequence[int]) -> Number:
        """Probability of an index-block pair under the memoryless extension."""
        out = Fraction(1) if self.exact else 1.0
        for i, j in zip(xs, ys):
            out *= self.joint[i][j]
        return out

    def to_dict(self) -> dict:
        def fmt(v):
            return str(v) if isinstance(v, Fraction) else v
        return {
            "alphabet": list(self.source_alphabet),
            "joint": [[fmt(v) for v in row] for row in self.joint],
            "storage_alphabet_size": self.storage_alphabet_size,
        }


@dataclass(frozen=True)
class RateLossPoint:
    t: Number
    K_loss: float
    L_loss: float


def marginals(src: JointSource) -> tuple[Distribution, Distribution]:
    k = src.size
    px = [sum(src.joint[i], src.zero()) for i in range(k)]
    py = [sum((src.joint[i][j] for i in range(k)), src.zero()) for j in range(k)]
    return Distribution(tuple(px), src.source_alphabet), Distribution(tuple(py), src.source_alphabet)


def _xlogx_terms(probs, base) -> float:
    return -sum(float(p) * math.log(float(p), base) for p in probs if p > 0)


def entropy(d: Distribution | Sequence, base: int = 2) -> float:
    if not isinstance(d, Distribution):
        d = Distribution(tuple(d))
    h = _xlogx_terms(d.probs, base)
    return max(h, 0.0)


def joint_entropy(src: JointSource, base: int = 2) -> float:
    return max(_xlogx_terms([v for r in src.joint for v in r], base), 0.0)


def conditional_entropy(src: JointSource, base: int = 2) -> float:
    """``H(Y|X)``, summed directly as ``-sum p(x,y) log p(y|x)``."""
    px, _ = marginals(src)
    total = 0.0
    for i, row in enumerate(src.joint):
        if px[i] == 0:
            continue
        for v in row:
            if v > 0:
                total -= float(v) * math.log(float(v / px[i]), base)
    return max(total, 0.0)


def relative_entropy(p: Distribution | Sequence, q: Distribution | Sequence, base: int = 2) -> float:
    """``D(p||q)``; returns ``math.inf`` when ``p`` is not absolutely continuous wrt ``q``.

    Python float arithmetic raises ``OverflowError`` rather than producing
    ``inf``, so an infinite result always means a support violation.
    """
    if not isinstance(p, Distribution):
        p = Distribution(tuple(p))
    if not isinstance(q, Distribution):
        q = Distribution(tuple(q))
    if len(p) != len(q):
        raise InputError("distributions have different lengths")
    total = 0.0
    for a, b in zip(p.probs, q.probs):
        if a == 0:
            continue
        if b == 0:
            return math.inf
        total += float(a) * math.log(float(a / b), base)
    return max(total, 0.0)


def mu(p: Distribution, q: Distribution, t) -> float:
    """Normaliser ``sum_x p(x)^(1-t) q(x)^t`` of the geometric mixture."""
    if t == 0:
        return float(sum(a for a, b in zip(p.probs, q.probs) if a > 0))
    if t == 1:
        return float(sum(b for a, b in zip(p.probs, q.probs) if b > 0))
    t = float(t)
    return sum(float(a) ** (1 - t) * float(b) ** t for a, b in zip(p.probs, q.probs) if a > 0 and b > 0)


def tilted_distribution(p: Distribution, q: Distribution, t) -> Distribution:
    """Geometric mixture ``p^(1-t) q^t / mu(t)``; exact at the endpoints."""
    if not 0 <= t <= 1:
        raise InputError(f"t must lie in [0, 1], got {t}")
    if len(p) != len(q):
        raise InputError("distributions have different lengths")
    if t == 0:
        return p
    if t == 1:
        return Distribution(q.probs, p.symbols)
    norm = mu(p, q, t)
    if norm == 0:
        raise InputError("p and q have no common support; the tilted family is empty")
    t = float(t)
    probs = [
        float(a) ** (1 - t) * float(b) ** t / norm if a > 0 and b > 0 else 0.0
        for a, b in zip(p.probs, q.probs)
    ]
    # renormalise away rounding so the Distribution validator accepts it
    s = sum(probs)
    return Distribution(tuple(v / s for v in probs), p.symbols)


def balanced_t(p: Distribution, q: Distribution) -> float:
    """Point on the geodesic where both rate losses coincide."""
    d_pq = relative_entropy(p, q)
    d_qp = relative_entropy(q, p)
    if d_pq == 0 and d_qp == 0:
        raise InputError("p == q: both divergences vanish and the balanced t is undefined")
    if math.isinf(d_pq) or math.isinf(d_qp):
        raise InputError("balanced t needs finite divergences in both directions")
    return d_qp / (d_qp + d_pq)


def harmonic_rate_loss(p: Distribution, q: Distribution, base: int = 2) -> float:
    """``R(p, q)`` with ``1/R = 1/D(p||q) + 1/D(q||p)``."""
    d_pq = relative_entropy(p, q, base)
    d_qp = relative_entropy(q, p, base)
    if d_pq == 0 or d_qp == 0:
        return 0.0
    return 1.0 / (1.0 / d_pq + 1.0 / d_qp)


def stationary(src: JointSource) -> bool:
    px, py = marginals(src)
    return px.close_to(py)


def rate_frontier(src: JointSource, grid: int, base: int | None = None) -> list[RateLossPoint]:
    """Rate losses of Huffman-style codes designed for ``Z_t`` along the geodesic.

    ``t`` runs over ``grid`` evenly spaced points in ``[0, 1]``.  Losses are in
    base ``|V|`` unless ``base`` overrides it.  A stationary source collapses
    to a single lossless point.
    """
    if grid < 2:
        raise InputError("grid must be at least 2")
    base = base or src.storage_alphabet_size
    px, py = marginals(src)
    if stationary(src):
        zero = Fraction(0) if src.exact else 0.0
        return [RateLossPoint(zero, 0.0, 0.0)]
    points = []
    for k in range(grid):
        t = Fraction(k, grid - 1) if src.exact else k / (grid - 1)
        z = tilted_distribution(px, py, t)
        points.append(RateLossPoint(t, relative_entropy(px, z, base), relative_entropy(py, z, base)))
    return points


def product_distribution(d: Distribution, n: int) -> Distribution:
    """Memoryless extension of ``d`` to blocks of length ``n`` (symbols become tuples)."""
    if n < 1:
        raise InputError("block length must be >= 1")
    probs = []
    symbols = []
    one = Fraction(1) if d.exact else 1.0
    for combo in itertools.product(range(len(d)), repeat=n):
        v = one
        for i in combo:
            v *= d.probs[i]
        probs.append(v)
        symbols.append(tuple(d.symbols[i] for i in combo))
    return Distribution(tuple(probs), tuple(symbols))


def prob_blocks_differ(src: JointSource, n: int) -> Number:
    """``Pr[X_1^n != Y_1^n]`` for the memoryless extension, in closed form."""
    return 1 - src.diagonal_mass() ** n

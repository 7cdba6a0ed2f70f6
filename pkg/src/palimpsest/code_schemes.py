"""Concrete palimpsest codes.

Every code maps source blocks (tuples of source symbols) to storage strings
(tuples of ints).  Plain codes use one codebook for both versions; the
incremental scheme's Y side is a :class:`IncrementalCode`, whose codeword for
the edited block depends on the original block it overwrites.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .edit_metrics import format_string, parse_string
from .embedding import EmbeddingResult, tolerant_embed
from .errors import InfeasibleEmbedding, InputError, ResourceError
from .graph_core import LabeledGraph, adjacency_graph, gray_sequence, hypercube
from .prob_core import Distribution, JointSource, marginals, product_distribution

FAMILY_CAP = 4096
PPM_CAP = 4096


def _block_key(block: tuple) -> str:
    return " ".join(str(s) for s in block)


def _as_block(sym) -> tuple:
    return sym if isinstance(sym, tuple) else (sym,)


@dataclass(frozen=True)
class PalimpsestCode:
    """Injective map from source blocks to storage strings.

    ``fallback`` names a covered block whose codeword is reused for blocks
    outside the codebook (typical-set codes); those blocks then decode wrongly,
    which is what the error rate measures.
    """

    codebook: dict
    block_n: int = 1
    alphabet_size: int = 2
    kind: str = "custom"
    fallback: tuple | None = None
    _inverse: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        inv = {}
        for block, word in self.codebook.items():
            if len(block) != self.block_n:
                raise InputError(f"block {block!r} does not have length {self.block_n}")
            if word in inv:
                raise InputError(f"codeword {word!r} assigned twice; code is not injective")
            inv[word] = block
        object.__setattr__(self, "_inverse", inv)

    def encode(self, block: tuple, context: tuple | None = None) -> tuple:
        try:
            return self.codebook[block]
        except KeyError:
            if self.fallback is None:
                raise
            return self.codebook[self.fallback]

    def decode(self, word: tuple):
        return self._inverse.get(word)

    def lengths(self) -> set[int]:
        return {len(w) for w in self.codebook.values()}

    @property
    def fixed_length(self) -> bool:
        return len(self.lengths()) == 1

    def is_prefix_free(self) -> bool:
        words = sorted(self.codebook.values())
        return all(not b[:len(a)] == a for a, b in zip(words, words[1:]))

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, self.alphabet_size ** len(w)) for w in self.codebook.values()),
                   Fraction(0))

    def to_json(self) -> dict:
        doc = {
            "kind": self.kind,
            "block_n": self.block_n,
            "alphabet_size": self.alphabet_size,
            "codebook": {_block_key(b): format_string(w, self.alphabet_size)
                         for b, w in self.codebook.items()},
        }
        if self.fallback is not None:
            doc["fallback"] = _block_key(self.fallback)
        return doc


@dataclass(frozen=True)
class IncrementalCode:
    """Edited version = original codeword followed by a conditional increment."""

    base: PalimpsestCode
    increments: dict  # original block -> {edited block -> increment string}
    kind: str = "incremental"

    @property
    def block_n(self) -> int:
        return self.base.block_n

    @property
    def alphabet_size(self) -> int:
        return self.base.alphabet_size

    def encode(self, block: tuple, context: tuple | None = None) -> tuple:
        if context is None:
            raise InputError("the incremental code needs the original block as context")
        return self.base.encode(context) + self.increments[context][block]

    def decode(self, word: tuple):
        for k in range(len(word) + 1):
            x = self.base.decode(word[:k])
            if x is not None:
                rest = word[k:]
                for y, inc in self.increments.get(x, {}).items():
                    if inc == rest:
                        return y
                return None
        return None

    def to_json(self) -> dict:
        doc = self.base.to_json()
        doc["kind"] = self.kind
        doc["increments"] = {
            _block_key(x): {_block_key(y): format_string(w, self.alphabet_size) for y, w in inc.items()}
            for x, inc in self.increments.items()
        }
        return doc


def code_from_json(doc: dict, src: JointSource | None = None):
    """Rebuild a code written by ``to_json``; block keys are split back into symbols."""
    try:
        r = int(doc["alphabet_size"])
        n = int(doc["block_n"])

        def block(key: str) -> tuple:
            parts = tuple(key.split(" ")) if key else ()
            if src is not None and any(p not in src.source_alphabet for p in parts):
                raise InputError(f"codebook block {key!r} uses symbols outside the source alphabet")
            return parts

        book = {block(k): parse_string(v, r) for k, v in doc["codebook"].items()}
        fallback = block(doc["fallback"]) if "fallback" in doc else None
        base = PalimpsestCode(book, n, r, doc.get("kind", "custom"), fallback)
        if "increments" in doc:
            base = PalimpsestCode(book, n, r, "huffman")
            inc = {block(x): {block(y): parse_string(w, r) for y, w in m.items()}
                   for x, m in doc["increments"].items()}
            return IncrementalCode(base, inc)
        return base
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed codebook document: {exc}") from exc


# -- Huffman ------------------------------------------------------------------

def _dummies(k: int, arity: int) -> int:
    if arity == 2 or k <= 1:
        return 0
    return (-(k - 1)) % (arity - 1)


def huffman_lengths(weights, arity: int = 2) -> list[int]:
    """Codeword lengths of a Huffman code (ties broken by symbol order)."""
    k = len(weights)
    if k == 0:
        return []
    if k == 1:
        return [0]
    heap = [(w, i, (i,)) for i, w in enumerate(weights)]
    heap += [(0, k + d, ()) for d in range(_dummies(k, arity))]
    heapq.heapify(heap)
    depth = [0] * k
    counter = len(heap)
    while len(heap) > 1:
        group = [heapq.heappop(heap) for _ in range(min(arity, len(heap)))]
        members = tuple(itertools.chain.from_iterable(g[2] for g in group))
        for i in members:
            depth[i] += 1
        heapq.heappush(heap, (sum(g[0] for g in group), counter, members))
        counter += 1
    return depth


def canonical_codewords(lengths: list[int], arity: int = 2) -> list[tuple]:
    """Canonical prefix code for the given lengths (Kraft sum must be <= 1)."""
    order = sorted(range(len(lengths)), key=lambda i: (lengths[i], i))
    words: list[tuple] = [()] * len(lengths)
    code = 0
    prev = None
    for i in order:
        L = lengths[i]
        if prev is not None:
            code = (code + 1) * arity ** (L - prev)
        digits = []
        c = code
        for _ in range(L):
            digits.append(c % arity)
            c //= arity
        if c:
            raise InputError("lengths violate the Kraft inequality")
        words[i] = tuple(reversed(digits))
        prev = L
    return words


def _codebook_for(symbols, weights, arity) -> dict:
    lengths = huffman_lengths(list(weights), arity)
    words = canonical_codewords(lengths, arity)
    return {_as_block(s): w for s, w in zip(symbols, words)}


def huffman(dist: Distribution, arity: int = 2) -> PalimpsestCode:
    """Canonical Huffman code for ``dist`` over an ``arity``-ary storage alphabet."""
    if len(dist) < 2:
        raise InputError("Huffman coding needs at least two symbols")
    if arity < 2:
        raise InputError("arity must be >= 2")
    book = _codebook_for(dist.symbols, dist.probs, arity)
    n = len(next(iter(book)))
    return PalimpsestCode(book, n, arity, "huffman")


@dataclass(frozen=True)
class HuffmanFamily:
    base: Distribution
    codes: tuple
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self):
        return iter(self.codes)


def _canon(tree):
    if not isinstance(tree, tuple):
        return tree
    kids = [_canon(t) for t in tree]
    return tuple(sorted(kids, key=repr))


def _optimal_trees(weights, arity) -> Iterator[tuple]:
    """All Huffman trees reachable by resolving ties in the merge order."""
    k = len(weights)
    leaves = [(w, i) for i, w in enumerate(weights)] + [(0, None)] * _dummies(k, arity)
    seen: set = set()

    def rec(nodes):
        if len(nodes) == 1:
            key = _canon(nodes[0][1])
            if key not in seen:
                seen.add(key)
                yield nodes[0][1]
            return
        nodes = sorted(nodes, key=lambda t: (t[0], repr(t[1])))
        r = min(arity, len(nodes))
        cut = nodes[r - 1][0]
        forced = [i for i, t in enumerate(nodes) if t[0] < cut]
        tied = [i for i, t in enumerate(nodes) if t[0] == cut]
        tried = set()
        for pick in itertools.combinations(tied, r - len(forced)):
            chosen = forced + list(pick)
            merged = tuple(nodes[i][1] for i in chosen)
            rest = [nodes[i] for i in range(len(nodes)) if i not in chosen]
            state = _canon(tuple([merged] + [t[1] for t in rest]))
            if state in tried:
                continue
            tried.add(state)
            yield from rec(rest + [(sum(nodes[i][0] for i in chosen), merged)])

    yield from rec(leaves)


def _labelings(tree, arity, prefix=()) -> Iterator[dict]:
    if not isinstance(tree, tuple):
        yield {tree: prefix}
        return
    for perm in itertools.permutations(range(len(tree))):
        # child tree[perm[d]] gets digit d
        parts = [list(_labelings(tree[perm[d]], arity, prefix + (d,))) for d in range(len(tree))]
        for combo in itertools.product(*parts):
            out = {}
            for m in combo:
                out.update(m)
            yield out


def huffman_family(dist: Distribution, arity: int = 2, cap: int = FAMILY_CAP) -> HuffmanFamily:
    """Distinct optimal codes from every tie resolution and child ordering.

    The canonical code from :func:`huffman` comes first; enumeration stops at
    ``cap`` members with ``truncated`` set.
    """
    if cap < 1:
        raise InputError("cap must be >= 1")
    first = huffman(dist, arity)
    codes = [first]
    seen = {tuple(first.codebook[_as_block(s)] for s in dist.symbols)}
    truncated = False
    n = first.block_n
    for tree in _optimal_trees(list(dist.probs), arity):
        for lab in _labelings(tree, arity):
            words = tuple(lab[i] for i in range(len(dist)))
            if words in seen:
                continue
            if len(codes) >= cap:
                truncated = True
                break
            seen.add(words)
            codes.append(PalimpsestCode({_as_block(s): w for s, w in zip(dist.symbols, words)},
                                        n, arity, "huffman"))
        if truncated:
            break
    return HuffmanFamily(dist, tuple(codes), truncated)


# -- the schemes ----------------------------------------------------------------

def _blocks(src: JointSource, n: int) -> list[tuple]:
    return [tuple(src.source_alphabet[i] for i in b)
            for b in itertools.product(range(src.size), repeat=n)]


def identity_code(src: JointSource, block_n: int = 1) -> PalimpsestCode:
    """Store each source letter as the storage symbol with the same index."""
    if src.size != src.storage_alphabet_size:
        raise InputError(
            f"identity code needs |W| = |V| (got {src.size} and {src.storage_alphabet_size})")
    pos = {s: i for i, s in enumerate(src.source_alphabet)}
    book = {b: tuple(pos[s] for s in b) for b in _blocks(src, block_n)}
    return PalimpsestCode(book, block_n, src.storage_alphabet_size, "identity")


def block_huffman(src: JointSource, block_n: int = 1, design: Distribution | str = "x") -> PalimpsestCode:
    """Huffman code on ``block_n``-blocks for ``p_X``, ``p_Y`` or any design distribution."""
    px, py = marginals(src)
    if design == "x":
        d = px
    elif design == "y":
        d = py
    elif isinstance(design, Distribution):
        d = design
    else:
        raise InputError(f"unknown design distribution {design!r}")
    return huffman(product_distribution(d, block_n), src.storage_alphabet_size)


def incremental_code(src: JointSource, block_n: int = 1) -> tuple[PalimpsestCode, IncrementalCode]:
    """Huffman code for the original plus, per original block, a conditional
    Huffman code for the edit appended after the original codeword.

    Each conditional code ranges over the support of ``p(y|x)`` together with
    ``x`` itself, so a changed block always gets a non-empty increment.
    """
    px, _ = marginals(src)
    x_code = huffman(product_distribution(px, block_n), src.storage_alphabet_size)
    idx = list(itertools.product(range(src.size), repeat=block_n))
    names = _blocks(src, block_n)
    increments = {}
    for xi, x in zip(idx, names):
        row = [(y, src.block_pair_mass(xi, yi)) for yi, y in zip(idx, names)]
        total = sum((m for _, m in row), src.zero())
        if total == 0:
            continue
        cand = [(y, m / total) for y, m in row if m > 0 or y == x]
        increments[x] = _codebook_for([y for y, _ in cand], [w for _, w in cand],
                                      src.storage_alphabet_size)
    return x_code, IncrementalCode(x_code, increments)


def ppm_code(src: JointSource, block_n: int = 1, typical_only: bool = False,
             delta=None, cap: int = PPM_CAP) -> PalimpsestCode:
    """Pulse-position code: one weight-1 binary word per covered block.

    With ``typical_only`` only the connected typical sequences of either
    version get positions; every other block reuses the first covered one.
    """
    if typical_only:
        from .block_typicality import TypicalityConfig, connected_union
        cfg = TypicalityConfig(block_n, "auto" if delta is None else delta)
        covered = connected_union(src, cfg)
        if not covered:
            raise InputError("the connected typical set is empty at this delta")
    else:
        if src.size ** block_n > cap:
            raise ResourceError(f"PPM needs {src.size ** block_n} positions (cap {cap})")
        covered = _blocks(src, block_n)
    m = len(covered)
    if m > cap:
        raise ResourceError(f"PPM needs {m} positions (cap {cap})")
    book = {b: tuple(1 if j == i else 0 for j in range(m)) for i, b in enumerate(covered)}
    fallback = covered[0] if typical_only else None
    return PalimpsestCode(book, block_n, 2, "ppm", fallback)


def gray_code(m: int) -> list[tuple]:
    return gray_sequence(m)


def _is_hypercube(host: LabeledGraph) -> int | None:
    m = len(host).bit_length() - 1
    if m < 1 or len(host) != 2 ** m or host.edge_count != m * 2 ** (m - 1):
        return None
    if any(host.attribute(v) is None or len(host.attribute(v)) != m for v in host.vertices):
        return None
    return m


def _letterwise_placement(src, block_n, host, node_budget):
    """Concatenate an optimal per-letter cube embedding across the block.

    A good starting point for block codes on a hypercube whose dimension is a
    multiple of the block length; ``None`` when that shape does not apply.
    """
    m = _is_hypercube(host)
    if block_n < 2 or m is None or m % block_n:
        return None
    per = m // block_n
    if src.size > 2 ** per:
        return None
    cube = hypercube(per)
    try:
        res = tolerant_embed(adjacency_graph(src, 1), cube, node_budget=node_budget)
    except (InfeasibleEmbedding, ResourceError):
        return None
    letter = {v[0]: cube.attribute(res.vertex_map[v]) for v in res.vertex_map}
    by_label = {host.attribute(v): v for v in host.vertices}
    return {b: by_label[tuple(itertools.chain.from_iterable(letter[s] for s in b))]
            for b in _blocks(src, block_n)}


def embedding_code(src: JointSource, block_n: int, host: LabeledGraph,
                   family: HuffmanFamily | str = "fixed",
                   node_budget: int | None = None) -> tuple[PalimpsestCode, EmbeddingResult]:
    """Pick codewords by embedding the source adjacency graph into ``host``.

    ``family="fixed"`` lets the search place blocks freely on the (attributed)
    host vertices and reads codewords off the host labels.  With a Huffman
    family every member is tried as fixed vertex labels; the member with the
    smallest subgraph distance wins, earliest member on ties.
    """
    guest = adjacency_graph(src, block_n)
    r = src.storage_alphabet_size
    if isinstance(family, str):
        if family != "fixed":
            raise InputError(f"unknown labelling {family!r}")
        if host.attributes is None:
            raise InputError("fixed labelling needs a host with vertex labels")
        start = _letterwise_placement(src, block_n, host, node_budget)
        res = tolerant_embed(guest, host, node_budget=node_budget, incumbent=start)
        book = {b: host.attribute(res.vertex_map[b]) for b in guest.vertices}
        return PalimpsestCode(book, block_n, r, "embedding"), res
    best = None
    for code in family:
        labelled = guest.with_attributes(code.codebook)
        try:
            res = tolerant_embed(labelled, host, respect_attributes=True, node_budget=node_budget)
        except InfeasibleEmbedding:
            continue
        if best is None or res.cost < best[1].cost:
            best = (code, res)
    if best is None:
        raise InfeasibleEmbedding("no member of the Huffman family fits in the host")
    code, res = best
    return PalimpsestCode(code.codebook, block_n, r, "embedding-huffman"), res

"""Attributed weighted graphs and the path-metric quantities built on them.

Edge weights are probabilities, never lengths: every path metric here counts
hops.  Vertices are arbitrary hashables (symbols, tuples of symbols, bit
tuples); the order they are given in is the canonical order used by the
embedding search for tie-breaking.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .edit_metrics import format_string
from .errors import InputError, ResourceError
from .prob_core import JointSource

HYPERCUBE_CAP = 24
GRAPH_VERTEX_CAP = 100_000


class LabeledGraph:
    """Undirected simple graph with optional vertex attributes and edge weights.

    Instances are treated as immutable: the editing helpers return new graphs.
    """

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable = (),
                 attributes: Mapping | None = None):
        self.vertices = tuple(vertices)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        self._adj: list[set[int]] = [set() for _ in self.vertices]
        self._edges: dict[tuple[int, int], object] = {}
        for e in edges:
            u, v, *rest = e
            w = rest[0] if rest else 1
            if w < 0:
                raise InputError(f"negative weight on edge {u!r}-{v!r}")
            i, j = self._index[u], self._index[v]
            if i == j:
                raise InputError(f"self-loop at {u!r}")
            key = (i, j) if i < j else (j, i)
            if key in self._edges:
                raise InputError(f"duplicate edge {u!r}-{v!r}")
            self._edges[key] = w
            self._adj[i].add(j)
            self._adj[j].add(i)
        if attributes is None:
            self.attributes = None
        else:
            self.attributes = {v: tuple(attributes[v]) for v in self.vertices if v in attributes}

    # -- basic queries -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"LabeledGraph(n={len(self)}, m={self.edge_count})"

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def index(self, v) -> int:
        return self._index[v]

    def __contains__(self, v) -> bool:
        return v in self._index

    def edges(self) -> list[tuple]:
        """``(u, v, weight)`` triples in canonical (insertion) order."""
        vs = self.vertices
        return [(vs[i], vs[j], w) for (i, j), w in self._edges.items()]

    def edge_index_pairs(self) -> list[tuple[int, int]]:
        return list(self._edges)

    def has_edge(self, u, v) -> bool:
        i, j = self._index.get(u), self._index.get(v)
        if i is None or j is None:
            return False
        return (min(i, j), max(i, j)) in self._edges

    def weight(self, u, v):
        i, j = self._index[u], self._index[v]
        return self._edges[(min(i, j), max(i, j))]

    def neighbors(self, v) -> list:
        return [self.vertices[j] for j in sorted(self._adj[self._index[v]])]

    def neighbor_indices(self, i: int) -> set[int]:
        return self._adj[i]

    def degree(self, v) -> int:
        return len(self._adj[self._index[v]])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def attribute(self, v):
        if self.attributes is None:
            return None
        return self.attributes.get(v)

    # -- derived graphs ------------------------------------------------------

    def without_edges(self, removed: Iterable[tuple]) -> "LabeledGraph":
        drop = set()
        for u, v, *_ in removed:
            i, j = self._index[u], self._index[v]
            key = (min(i, j), max(i, j))
            if key not in self._edges:
                raise InputError(f"edge {u!r}-{v!r} is not in the graph")
            drop.add(key)
        vs = self.vertices
        kept = [(vs[i], vs[j], w) for (i, j), w in self._edges.items() if (i, j) not in drop]
        return LabeledGraph(vs, kept, self.attributes)

    def with_attributes(self, attributes: Mapping) -> "LabeledGraph":
        return LabeledGraph(self.vertices, self.edges(), attributes)

    def relabel(self, mapping: Mapping) -> "LabeledGraph":
        attrs = None
        if self.attributes is not None:
            attrs = {mapping[v]: a for v, a in self.attributes.items()}
        return LabeledGraph([mapping[v] for v in self.vertices],
                            [(mapping[u], mapping[v], w) for u, v, w in self.edges()], attrs)

    def adjacency_matrix(self) -> csr_matrix:
        n = len(self)
        if not self._edges:
            return csr_matrix((n, n), dtype=np.int8)
        ij = np.array(list(self._edges), dtype=np.int64)
        rows = np.concatenate([ij[:, 0], ij[:, 1]])
        cols = np.concatenate([ij[:, 1], ij[:, 0]])
        return csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))


@dataclass(frozen=True)
class PathMetric:
    """Dense all-pairs hop-count matrix; ``inf`` marks disconnected pairs."""

    vertices: tuple
    dist: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "_idx", {x: i for i, x in enumerate(self.vertices)})

    def __call__(self, u, v) -> float:
        return self.dist[self._idx[u], self._idx[v]]

    @property
    def connected(self) -> bool:
        return bool(np.isfinite(self.dist).all())

    def diameter(self) -> float:
        """Largest finite distance (0 for an empty or edgeless graph)."""
        finite = self.dist[np.isfinite(self.dist)]
        return float(finite.max()) if finite.size else 0.0


def distance_matrix(g: LabeledGraph) -> np.ndarray:
    if len(g) == 0:
        return np.zeros((0, 0))
    return shortest_path(g.adjacency_matrix(), method="D", directed=False, unweighted=True)


def path_metric(g: LabeledGraph) -> PathMetric:
    return PathMetric(g.vertices, distance_matrix(g))


def wiener_index(g: LabeledGraph) -> float | int:
    """Sum of hop distances over ordered vertex pairs (``inf`` if disconnected)."""
    d = distance_matrix(g)
    if not np.isfinite(d).all():
        return math.inf
    return int(d.sum())


def closeness_vitality(g: LabeledGraph, edge: tuple) -> float | int:
    """Change in Wiener index when ``edge`` is removed.

    Only pairs connected in ``g`` are summed, so the value agrees with
    ``wiener_index(g) - wiener_index(g - edge)`` on connected graphs.  If the
    removal disconnects a previously connected pair the result is ``-inf``.
    """
    u, v = edge[0], edge[1]
    if not g.has_edge(u, v):
        raise InputError(f"edge {u!r}-{v!r} is not in the graph")
    before = distance_matrix(g)
    after = distance_matrix(g.without_edges([(u, v)]))
    reach = np.isfinite(before)
    if not np.isfinite(after[reach]).all():
        return -math.inf
    return int((before[reach] - after[reach]).sum())


def cartesian_product(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    """Cartesian product; vertices are pairs ``(u, v)`` and attributes concatenate."""
    vertices = [(u, v) for u in g.vertices for v in h.vertices]
    edges = []
    for u in g.vertices:
        for v1, v2, w in h.edges():
            edges.append(((u, v1), (u, v2), w))
    for v in h.vertices:
        for u1, u2, w in g.edges():
            edges.append(((u1, v), (u2, v), w))
    attrs = None
    if g.attributes is not None and h.attributes is not None:
        attrs = {(u, v): g.attributes[u] + h.attributes[v]
                 for u in g.vertices for v in h.vertices
                 if u in g.attributes and v in h.attributes}
    return LabeledGraph(vertices, edges, attrs)


def gray_sequence(m: int) -> list[tuple[int, ...]]:
    """Binary reflected Gray code as bit tuples, most significant bit first."""
    if m < 1:
        raise InputError("Gray code length must be >= 1")
    out = []
    for i in range(2 ** m):
        g = i ^ (i >> 1)
        out.append(tuple((g >> (m - 1 - b)) & 1 for b in range(m)))
    return out


def hypercube(m: int, cap: int = HYPERCUBE_CAP) -> LabeledGraph:
    """The ``m``-cube, vertices listed in binary reflected Gray code order.

    Each vertex is its own bit tuple and carries that tuple as attribute.
    """
    if m < 1:
        raise InputError("hypercube dimension must be >= 1")
    if m > cap:
        raise ResourceError(f"hypercube({m}) exceeds the dimension cap {cap}")
    verts = gray_sequence(m)
    pos = {v: i for i, v in enumerate(verts)}
    edges = []
    for i, v in enumerate(verts):
        for b in range(m):
            w = v[:b] + (1 - v[b],) + v[b + 1:]
            if pos[w] > i:
                edges.append((v, w))
    return LabeledGraph(verts, edges, {v: v for v in verts})


def levenshtein_graph(alphabet_size: int, max_len: int, include_empty: bool = False,
                      cap: int = GRAPH_VERTEX_CAP) -> LabeledGraph:
    """Strings of length up to ``max_len``, joined when one edit apart."""
    if max_len < 1:
        raise InputError("max_len must be >= 1")
    total = sum(alphabet_size ** k for k in range(0 if include_empty else 1, max_len + 1))
    if total > cap:
        raise ResourceError(f"Levenshtein graph would have {total} vertices (cap {cap})")
    verts = []
    for k in range(0 if include_empty else 1, max_len + 1):
        verts.extend(itertools.product(range(alphabet_size), repeat=k))
    present = set(verts)
    edges = []
    for s in verts:
        # substitutions at the same length, insertions one longer
        for i in range(len(s)):
            for c in range(s[i] + 1, alphabet_size):
                edges.append((s, s[:i] + (c,) + s[i + 1:]))
        if len(s) < max_len:
            seen = set()
            for i in range(len(s) + 1):
                for c in range(alphabet_size):
                    t = s[:i] + (c,) + s[i:]
                    if t not in seen and t in present:
                        seen.add(t)
                        edges.append((s, t))
    return LabeledGraph(verts, edges, {v: v for v in verts})


def adjacency_graph(src: JointSource, block_n: int = 1, weighting: str = "joint",
                    cap: int = GRAPH_VERTEX_CAP) -> LabeledGraph:
    """Weighted adjacency graph of a source on blocks of ``block_n`` letters.

    ``weighting="joint"`` puts ``p(u,v) + p(v,u)`` on each edge (the mass that
    enters the malleability expectation); ``"conditional"`` uses
    ``p(v|u) + p(u|v)``, the convention of the usual hand-drawn figures.
    Vertices are ``block_n``-tuples of source symbols.
    """
    if block_n < 1:
        raise InputError("block length must be >= 1")
    k = src.size
    if k ** block_n > cap:
        raise ResourceError(f"{k}^{block_n} blocks exceed the vertex cap {cap}")
    if weighting not in ("joint", "conditional"):
        raise InputError(f"unknown weighting {weighting!r}")
    blocks = list(itertools.product(range(k), repeat=block_n))
    names = [tuple(src.source_alphabet[i] for i in b) for b in blocks]
    px = [sum(row, src.zero()) for row in src.joint]
    edges = []
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            fwd = src.block_pair_mass(blocks[a], blocks[b])
            bwd = src.block_pair_mass(blocks[b], blocks[a])
            if fwd + bwd <= 0:
                continue
            if weighting == "joint":
                w = fwd + bwd
            else:
                pa = _block_prob(px, blocks[a], src.exact)
                pb = _block_prob(px, blocks[b], src.exact)
                w = (fwd / pa if pa else 0) + (bwd / pb if pb else 0)
            edges.append((names[a], names[b], w))
    return LabeledGraph(names, edges)


def _block_prob(px, block, exact):
    out = Fraction(1) if exact else 1.0
    for i in block:
        out *= px[i]
    return out


def cycle_graph(n: int) -> LabeledGraph:
    return LabeledGraph(range(n), [(i, (i + 1) % n) for i in range(n)] if n > 2 else
                        ([(0, 1)] if n == 2 else []))


def path_graph(n: int) -> LabeledGraph:
    return LabeledGraph(range(n), [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> LabeledGraph:
    return LabeledGraph(range(n), itertools.combinations(range(n), 2))


def format_vertex(v) -> str:
    if isinstance(v, tuple):
        parts = [format_vertex(x) for x in v]
        if all(len(p) == 1 for p in parts):
            return "".join(parts)
        return "(" + ",".join(parts) + ")"
    return str(v)


def _format_weight(w) -> str:
    if isinstance(w, Fraction):
        return str(w)
    if isinstance(w, float):
        return format(w, ".12g")
    return str(w)


def to_edge_list(g: LabeledGraph, alphabet_size: int = 2) -> str:
    """Plain-text export: a ``# vertex id attribute`` table, then ``u v weight`` lines."""
    lines = [f"# vertices {len(g)} edges {g.edge_count}"]
    for v in g.vertices:
        attr = g.attribute(v)
        label = "-" if attr is None else (format_string(attr, alphabet_size) or "eps")
        lines.append(f"# vertex {format_vertex(v)} {label}")
    for u, v, w in g.edges():
        lines.append(f"{format_vertex(u)} {format_vertex(v)} {_format_weight(w)}")
    return "\n".join(lines) + "\n"


def flatten_product_vertex(v) -> tuple:
    """Flatten nested pairs from repeated products into one tuple of leaves."""
    if isinstance(v, tuple) and len(v) == 2 and all(isinstance(x, tuple) for x in v):
        return flatten_product_vertex(v[0]) + flatten_product_vertex(v[1])
    return v if isinstance(v, tuple) else (v,)


def power(g: LabeledGraph, n: int) -> LabeledGraph:
    """``n``-fold Cartesian power with flattened tuple vertices."""
    out = g
    for _ in range(n - 1):
        out = cartesian_product(out, g)
    if n == 1:
        return g
    mapping = {v: flatten_product_vertex(v) for v in out.vertices}
    return out.relabel(mapping)



def components(g: LabeledGraph) -> list[list]:
    seen: set[int] = set()
    out = []
    for s in range(len(g)):
        if s in seen:
            continue
        stack = [s]
        seen.add(s)
        comp = []
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in g.neighbor_indices(i):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        out.append([g.vertices[i] for i in sorted(comp)])
    return out


def isomorphic_by_map(g: LabeledGraph, h: LabeledGraph, mapping: Mapping) -> bool:
    """True when ``mapping`` is a bijection carrying ``g``'s edge set onto ``h``'s."""
    if len(g) != len(h) or g.edge_count != h.edge_count:
        return False
    if set(mapping.values()) != set(h.vertices):
        return False
    return all(h.has_edge(mapping[u], mapping[v]) for u, v, _ in g.edges())


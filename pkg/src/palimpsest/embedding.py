"""Exact and error-tolerant subgraph embedding.

The guest is a source adjacency graph whose edges carry the probability mass
of the corresponding edits; the host is the graph induced by an edit distance
(a hypercube for Hamming, a Levenshtein graph, ...).  An error-tolerant
embedding may break guest edges; a broken edge ``{x, y}`` is paid for with its
mass times the extra hops it needs in the host.  The minimum of that price over
all injective placements is the subgraph distance.

Both searches are deterministic: the exact search picks the most constrained
guest vertex next, the tolerant search walks guest vertices in canonical
order, and host vertices are always tried in ascending order.  Host adjacency
is kept as Python int bitsets.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InfeasibleEmbedding, InputError, ResourceError
from .graph_core import LabeledGraph, distance_matrix


class SearchBudgetExceeded(ResourceError):
    """The node budget ran out before the search could decide."""


@dataclass(frozen=True)
class EmbeddingResult:
    vertex_map: dict
    deleted_edges: tuple = ()
    cost: Fraction | float = Fraction(0)
    proven_optimal: bool = True
    nodes: int = 0
    deleted_mass: Fraction | float = field(default=Fraction(0))

    @property
    def exact(self) -> bool:
        return not self.deleted_edges


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _host_bitsets(host: LabeledGraph) -> list[int]:
    out = []
    for i in range(len(host)):
        m = 0
        for j in host.neighbor_indices(i):
            m |= 1 << j
        out.append(m)
    return out


def _initial_domains(guest: LabeledGraph, host: LabeledGraph, respect_attributes: bool,
                     degree_filter: bool) -> list[int]:
    hdeg = host.degrees()
    gdeg = guest.degrees()
    by_attr: dict = {}
    if respect_attributes:
        if guest.attributes is None or host.attributes is None:
            raise InputError("attribute-respecting embedding needs attributes on both graphs")
        for j, h in enumerate(host.vertices):
            a = host.attribute(h)
            if a is not None:
                by_attr.setdefault(a, 0)
                by_attr[a] |= 1 << j
    full = (1 << len(host)) - 1
    doms = []
    for i, v in enumerate(guest.vertices):
        d = full
        if respect_attributes:
            a = guest.attribute(v)
            if a is None:
                raise InputError(f"guest vertex {v!r} has no attribute")
            d = by_attr.get(a, 0)
        if degree_filter:
            d &= sum(1 << j for j in range(len(host)) if hdeg[j] >= gdeg[i])
        doms.append(d)
    return doms


def exact_embed(guest: LabeledGraph, host: LabeledGraph, respect_attributes: bool = False,
                node_budget: int | None = None) -> EmbeddingResult | None:
    """Find an embedding of ``guest`` into ``host`` by deterministic backtracking.

    The next guest vertex is the one with the fewest host candidates left
    (ties: higher degree, then lower index), and host candidates are tried in
    index order.  Returns ``None`` when no embedding exists.  Raises
    :class:`SearchBudgetExceeded` if ``node_budget`` runs out first.
    """
    n = len(guest)
    if n > len(host):
        return None
    if n == 0:
        return EmbeddingResult({}, nodes=0)
    hadj = _host_bitsets(host)
    doms = _initial_domains(guest, host, respect_attributes, degree_filter=True)
    if any(d == 0 for d in doms):
        return None
    gnbr = [set(guest.neighbor_indices(i)) for i in range(n)]
    gdeg = guest.degrees()
    assign = [0] * n
    nodes = 0

    def search(free: list[int], doms: list[int]) -> bool:
        nonlocal nodes
        if not free:
            return True
        k = min(free, key=lambda w: (doms[w].bit_count(), -gdeg[w], w))
        rest = [w for w in free if w != k]
        for h in _bits(doms[k]):
            nodes += 1
            if node_budget is not None and nodes > node_budget:
                raise SearchBudgetExceeded(f"exact embedding search exceeded {node_budget} nodes")
            bit = 1 << h
            nxt = doms[:]
            ok = True
            union = 0
            for w in rest:
                d = nxt[w] & ~bit
                if w in gnbr[k]:
                    d &= hadj[h]
                if not d:
                    ok = False
                    break
                nxt[w] = d
                union |= d
            # pigeonhole: the unplaced vertices need that many distinct hosts
            if not ok or union.bit_count() < len(rest):
                continue
            assign[k] = h
            if search(rest, nxt):
                return True
        return False

    if not search(list(range(n)), doms):
        return None
    vmap = {guest.vertices[i]: host.vertices[assign[i]] for i in range(n)}
    return EmbeddingResult(vmap, nodes=nodes)


# -- error-tolerant search ----------------------------------------------------

def edge_masses(guest: LabeledGraph, pair_mass=None) -> list:
    """Mass of each guest edge, in canonical edge order.

    ``pair_mass`` may be a mapping ``{(u, v): p}`` over ordered vertex pairs,
    a square matrix in guest vertex order, or ``None`` (use edge weights).
    Ordered masses are symmetrised.  Positive mass between non-adjacent
    distinct vertices is rejected: such a pair could never be at distance one.
    """
    pairs = guest.edge_index_pairs()
    if pair_mass is None:
        return [w for _, _, w in guest.edges()]
    pos = {p: k for k, p in enumerate(pairs)}
    acc: list = [0] * len(pairs)

    def add(i, j, val):
        if i == j or val == 0:
            return
        key = (min(i, j), max(i, j))
        if key not in pos:
            raise InputError(
                f"positive mass on non-adjacent pair {guest.vertices[i]!r}, {guest.vertices[j]!r}")
        acc[pos[key]] += val

    if isinstance(pair_mass, Mapping):
        for (u, v), val in pair_mass.items():
            add(guest.index(u), guest.index(v), val)
    else:
        mat = np.asarray(pair_mass, dtype=object)
        if mat.shape != (len(guest), len(guest)):
            raise InputError("pair_mass matrix must be square in the guest vertex count")
        for i in range(len(guest)):
            for j in range(len(guest)):
                add(i, j, mat[i, j])
    return acc


def _integerise(masses: list):
    """Scale rational masses to integers so the search compares exactly."""
    if all(isinstance(m, (int, Fraction)) for m in masses):
        fr = [Fraction(m) for m in masses]
        scale = math.lcm(*(f.denominator for f in fr)) if fr else 1
        return [int(f * scale) for f in fr], Fraction(1, scale)
    return [float(m) for m in masses], None


def tolerant_embed(guest: LabeledGraph, host: LabeledGraph, pair_mass=None,
                   respect_attributes: bool = False,
                   node_budget: int | None = None,
                   incumbent: Mapping | None = None) -> EmbeddingResult:
    """Minimum-cost error-tolerant embedding using edge deletions only.

    A placement ``phi`` breaks every guest edge whose endpoints land on
    non-adjacent host vertices; the cost is ``sum mass(e) * (d_H(phi(e)) - 1)``
    over guest edges, i.e. the expected malleability above ``Pr[X != Y]``.
    Branch and bound over placements; the bound adds, for every unplaced
    vertex, the cheapest stretch it must incur against already placed
    neighbours.  Ties are broken by the sorted set of deleted edge indices
    and then by the vertex map.

    ``incumbent`` is an optional known placement; its cost seeds the bound, and
    it is returned if the budget runs out before anything better turns up.
    """
    n = len(guest)
    if n > len(host):
        raise InfeasibleEmbedding(f"guest has {n} vertices but host only {len(host)}")
    raw = edge_masses(guest, pair_mass)
    if any(m < 0 for m in raw):
        raise InputError("edge masses must be non-negative")
    masses, unit = _integerise(raw)
    pairs = guest.edge_index_pairs()

    def to_cost(c):
        return c * unit if unit is not None else c

    if n == 0:
        return EmbeddingResult({}, cost=to_cost(0))

    # exact embeddings are optimal, and the canonical one breaks ties
    try:
        found = exact_embed(guest, host, respect_attributes, node_budget)
    except SearchBudgetExceeded:
        found = None
    if found is not None:
        zero = to_cost(0)
        return EmbeddingResult(found.vertex_map, (), zero, True, found.nodes, zero)

    dist = distance_matrix(host)
    big = math.inf
    D = [[(int(x) if np.isfinite(x) else big) for x in row] for row in dist]
    doms = _initial_domains(guest, host, respect_attributes, degree_filter=False)
    if any(d == 0 for d in doms):
        raise InfeasibleEmbedding("some guest vertex has no admissible host vertex")

    # for vertex k: the earlier neighbours with their edge mass and edge index
    back: list[list[tuple[int, object, int]]] = [[] for _ in range(n)]
    for e, (i, j) in enumerate(pairs):
        back[j].append((i, masses[e], e))  # i < j by construction
    # for every vertex, all neighbours (to evaluate lower bounds for unplaced ones)
    nbrs: list[list[tuple[int, object]]] = [[] for _ in range(n)]
    for e, (i, j) in enumerate(pairs):
        nbrs[i].append((j, masses[e]))
        nbrs[j].append((i, masses[e]))

    best_cost = big
    best_del: tuple | None = None
    best_map: list[int] | None = None
    assign = [-1] * n
    nodes = 0
    exhausted = False

    def stretch(k: int, h: int):
        c = 0
        for u, m, _ in back[k]:
            d = D[assign[u]][h]
            if d == big:
                if m:
                    return big
                continue
            c += m * (d - 1)
        return c

    def lower_bound(k: int, used: int) -> object:
        # each unplaced vertex must pay at least its cheapest stretch to placed neighbours
        total = 0
        for w in range(k, n):
            placed = [(assign[u], m) for u, m in nbrs[w] if u < k and m]
            if not placed:
                continue
            cheapest = big
            for h in _bits(doms[w] & ~used):
                c = 0
                for hu, m in placed:
                    d = D[hu][h]
                    if d == big:
                        c = big
                        break
                    c += m * (d - 1)
                if c < cheapest:
                    cheapest = c
                    if c == 0:
                        break
            if cheapest == big:
                return big
            total += cheapest
        return total

    def search(k: int, used: int, partial):
        nonlocal best_cost, best_del, best_map, nodes, exhausted
        if k == n:
            deleted = tuple(e for e, (i, j) in enumerate(pairs) if D[assign[i]][assign[j]] != 1)
            if partial < best_cost or (partial == best_cost and deleted < best_del):
                best_cost, best_del, best_map = partial, deleted, assign[:]
            return
        for h in _bits(doms[k] & ~used):
            if exhausted:
                return
            nodes += 1
            if node_budget is not None and nodes > node_budget:
                exhausted = True
                return
            c = stretch(k, h)
            if c == big:
                continue
            total = partial + c
            if total > best_cost:
                continue
            assign[k] = h
            if k + 1 < n:
                lb = lower_bound(k + 1, used | (1 << h))
                if lb == big or total + lb > best_cost:
                    assign[k] = -1
                    continue
            search(k + 1, used | (1 << h), total)
            assign[k] = -1

    if incumbent is not None:
        seed = [host.index(incumbent[v]) for v in guest.vertices]
        if len(set(seed)) != n or any(not (doms[i] >> h) & 1 for i, h in enumerate(seed)):
            raise InputError("incumbent is not an admissible injective placement")
        c = 0
        for e, (i, j) in enumerate(pairs):
            d = D[seed[i]][seed[j]]
            if d == big:
                if masses[e]:
                    c = big
                    break
                continue
            c += masses[e] * (d - 1)
        if c != big:
            best_cost = c
            best_map = seed
            best_del = tuple(e for e, (i, j) in enumerate(pairs) if D[seed[i]][seed[j]] != 1)

    search(0, 0, 0)
    if best_map is None:
        if exhausted:
            raise SearchBudgetExceeded(f"no feasible placement found within {node_budget} nodes")
        raise InfeasibleEmbedding("no placement of the guest in the host has finite cost")
    vmap = {guest.vertices[i]: host.vertices[best_map[i]] for i in range(n)}
    vs = guest.vertices
    deleted = tuple((vs[pairs[e][0]], vs[pairs[e][1]]) for e in best_del)
    deleted_mass = to_cost(sum((masses[e] for e in best_del), 0))
    return EmbeddingResult(vmap, deleted, to_cost(best_cost), not exhausted, nodes, deleted_mass)


def subgraph_distance(guest: LabeledGraph, host: LabeledGraph, pair_mass=None,
                      respect_attributes: bool = False, node_budget: int | None = None):
    """Cost of the cheapest error-tolerant embedding (not symmetric in its arguments)."""
    return tolerant_embed(guest, host, pair_mass, respect_attributes, node_budget).cost


def placement_cost(guest: LabeledGraph, host: LabeledGraph, vertex_map: Mapping, pair_mass=None):
    """Stretch cost of a given placement, computed straight from host distances."""
    masses = edge_masses(guest, pair_mass)
    dist = distance_matrix(host)
    total = 0
    for (u, v, _), m in zip(guest.edges(), masses):
        d = dist[host.index(vertex_map[u]), host.index(vertex_map[v])]
        if not np.isfinite(d):
            if m:
                return math.inf
            continue
        total += m * (int(d) - 1)
    return total


def deletion_cost(guest: LabeledGraph, deleted, pair_mass=None):
    """Negative expected closeness vitality of removing ``deleted`` from ``guest``.

    Prices each edited pair by how far apart the pruned guest itself puts it:
    ``sum mass(x,y) * (d_{G-E}(x,y) - d_G(x,y))``.  A positive-mass pair that
    the removal disconnects costs ``inf``.  This upper-bounds the stretch cost
    of any embedding of the pruned guest whose pairs stay connected.
    """
    masses = edge_masses(guest, pair_mass)
    before = distance_matrix(guest)
    after = distance_matrix(guest.without_edges(deleted))
    total = 0
    for (i, j), m in zip(guest.edge_index_pairs(), masses):
        if not m:
            continue
        if not np.isfinite(after[i, j]):
            return math.inf
        total += m * int(after[i, j] - before[i, j])
    return total


def verify_embedding(guest: LabeledGraph, host: LabeledGraph, result: EmbeddingResult,
                     respect_attributes: bool = False) -> bool:
    """Independent check that ``result`` is a valid (possibly tolerant) embedding."""
    vmap = result.vertex_map
    if set(vmap) != set(guest.vertices):
        return False
    if len(set(vmap.values())) != len(vmap):
        return False
    if any(h not in host for h in vmap.values()):
        return False
    removed = {frozenset((u, v)) for u, v in result.deleted_edges}
    for u, v, _ in guest.edges():
        if frozenset((u, v)) in removed:
            continue
        if not host.has_edge(vmap[u], vmap[v]):
            return False
    if respect_attributes:
        return all(guest.attribute(v) == host.attribute(vmap[v]) for v in guest.vertices)
    return True

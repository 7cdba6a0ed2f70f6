import itertools
import random
from fractions import Fraction as F

import networkx as nx
import pytest
from networkx.algorithms import isomorphism

from oracles import brute_force_stretch
from palimpsest.embedding import (SearchBudgetExceeded, deletion_cost, edge_masses, exact_embed,
                                  placement_cost, subgraph_distance, tolerant_embed,
                                  verify_embedding)
from palimpsest.errors import InfeasibleEmbedding, InputError
from palimpsest.graph_core import (LabeledGraph, adjacency_graph, complete_graph, cycle_graph,
                                   hypercube, levenshtein_graph, path_graph)

REFERENCE_CUBE_CODE = {"k": "0000", "K": "0100", "G": "1000", "g": "0010",
           "j": "0011", "J": "1001", "C": "0101", "c": "0001"}


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from((u, v) for u, v, _ in g.edges())
    return h


def random_guest(rnd, n, p=0.5):
    edges = [(i, j, F(rnd.randint(1, 9), 40)) for i in range(n) for j in range(i + 1, n)
             if rnd.random() < p]
    return LabeledGraph(range(n), edges)


def test_typewriter_cycle_embeds_in_cube(typewriter):
    g = adjacency_graph(typewriter)
    res = exact_embed(g, hypercube(3))
    assert res is not None and verify_embedding(g, hypercube(3), res)


def test_editprocess2_needs_four_dimensions(editprocess2):
    g = adjacency_graph(editprocess2)
    assert exact_embed(g, hypercube(3)) is None
    res = exact_embed(g, hypercube(4))
    assert res is not None and verify_embedding(g, hypercube(4), res)


def test_editprocess2_q4_matches_reference_up_to_automorphism(editprocess2):
    g = adjacency_graph(editprocess2)
    res = tolerant_embed(g, hypercube(4))
    ours = {v[0]: res.vertex_map[v] for v in g.vertices}
    table = {k: tuple(int(c) for c in w) for k, w in REFERENCE_CUBE_CODE.items()}
    # every automorphism of the 4-cube is a coordinate permutation followed by an XOR
    hits = 0
    for perm in itertools.permutations(range(4)):
        for mask in itertools.product((0, 1), repeat=4):
            mapped = {k: tuple(w[perm[i]] ^ mask[i] for i in range(4)) for k, w in ours.items()}
            hits += mapped == table
    assert hits >= 1
    # and the reference codebook itself is a valid embedding
    q4 = hypercube(4)
    assert all(q4.has_edge(table[u[0]], table[v[0]]) for u, v, _ in g.edges())


def test_editprocess2_q3_deletes_the_two_lightest_edges(editprocess2):
    g = adjacency_graph(editprocess2)
    res = tolerant_embed(g, hypercube(3))
    assert res.cost == F(1, 40)
    assert {frozenset((u[0], v[0])) for u, v in res.deleted_edges} == {
        frozenset("kG"), frozenset("Jc")}
    assert res.proven_optimal
    assert verify_embedding(g, hypercube(3), res)
    assert placement_cost(g, hypercube(3), res.vertex_map) == F(1, 40)


def test_huffman_path_embeds_in_levenshtein_graph():
    words = [(0,), (1, 0), (1, 1, 0), (1, 1, 1)]
    path = LabeledGraph(range(4), [(0, 1), (1, 2), (2, 3)], dict(enumerate(words)))
    host = levenshtein_graph(2, 3)
    res = exact_embed(path, host, respect_attributes=True)
    assert res is not None
    assert verify_embedding(path, host, res, respect_attributes=True)
    assert exact_embed(path, host) is not None


def test_already_embeddable_costs_nothing():
    res = tolerant_embed(cycle_graph(6), hypercube(3))
    assert res.cost == 0 and res.deleted_edges == ()


def test_infeasible_cases():
    with pytest.raises(InfeasibleEmbedding):
        tolerant_embed(complete_graph(9), hypercube(3))
    disconnected_host = LabeledGraph(range(4), [(0, 1), (2, 3)])
    with pytest.raises(InfeasibleEmbedding):
        tolerant_embed(path_graph(3), disconnected_host)


def test_positive_mass_on_non_edge_is_rejected():
    with pytest.raises(InputError):
        edge_masses(path_graph(3), {(0, 2): F(1, 2)})


def test_budget_returns_flagged_result(editprocess2):
    g = adjacency_graph(editprocess2)
    res = tolerant_embed(g, hypercube(3), node_budget=60)
    assert not res.proven_optimal
    assert verify_embedding(g, hypercube(3), res)
    assert res.cost >= F(1, 40)
    with pytest.raises(SearchBudgetExceeded):
        tolerant_embed(complete_graph(8), hypercube(3), node_budget=3)


def test_deletion_cost_bounds_stretch(editprocess2):
    g = adjacency_graph(editprocess2)
    # removing both 1/80 edges separates {G, J} from the rest
    assert deletion_cost(g, [(("k",), ("G",)), (("J",), ("c",))]) == float("inf")
    one = deletion_cost(g, [(("k",), ("G",))])
    res = tolerant_embed(g.without_edges([(("k",), ("G",))]), hypercube(4))
    assert one >= 0 and res.cost == 0


@pytest.mark.parametrize("seed", range(12))
def test_matches_brute_force_small(seed):
    rnd = random.Random(seed)
    guest = random_guest(rnd, rnd.randint(3, 5))
    host = rnd.choice([hypercube(3), cycle_graph(7), path_graph(6), hypercube(2)])
    if len(guest) > len(host):
        return
    expect = brute_force_stretch(guest.vertices, guest.edges(), host.vertices, host.edges())
    try:
        res = tolerant_embed(guest, host)
    except InfeasibleEmbedding:
        assert expect == float("inf")
        return
    assert res.cost == expect
    assert verify_embedding(guest, host, res)
    assert placement_cost(guest, host, res.vertex_map) == res.cost
    assert (res.cost == 0) == (exact_embed(guest, host) is not None)


@pytest.mark.parametrize("seed", range(10))
def test_exact_embed_agrees_with_networkx(seed):
    rnd = random.Random(100 + seed)
    guest = random_guest(rnd, rnd.randint(3, 6), 0.45)
    host = rnd.choice([hypercube(3), hypercube(4), levenshtein_graph(2, 3)])
    gm = isomorphism.GraphMatcher(to_nx(host), to_nx(guest))
    expect = gm.subgraph_is_monomorphic()
    assert (exact_embed(guest, host) is not None) == expect


def test_attribute_embedding_implies_plain_embedding():
    host = levenshtein_graph(2, 3)
    rnd = random.Random(7)
    for _ in range(20):
        guest = random_guest(rnd, 4, 0.6)
        labels = dict(zip(guest.vertices, rnd.sample(list(host.vertices), 4)))
        attributed = guest.with_attributes(labels)
        if exact_embed(attributed, host, respect_attributes=True) is not None:
            assert exact_embed(guest, host) is not None


def test_witness_is_canonical():
    g = cycle_graph(4)
    a = exact_embed(g, hypercube(3))
    b = exact_embed(g, hypercube(3))
    assert a.vertex_map == b.vertex_map
    assert a.vertex_map[0] == hypercube(3).vertices[0]


def test_subgraph_distance_is_cost(editprocess2):
    assert subgraph_distance(adjacency_graph(editprocess2), hypercube(3)) == F(1, 40)


def test_incumbent_seeds_the_bound(editprocess2):
    g = adjacency_graph(editprocess2)
    q3 = hypercube(3)
    best = tolerant_embed(g, q3)
    seeded = tolerant_embed(g, q3, incumbent=best.vertex_map)
    assert seeded.cost == best.cost and seeded.proven_optimal
    # with no budget left the incumbent comes straight back
    stuck = tolerant_embed(g, q3, incumbent=best.vertex_map, node_budget=1)
    assert stuck.cost == best.cost and not stuck.proven_optimal
    clash = dict(best.vertex_map)
    u, v = list(clash)[:2]
    clash[u] = clash[v]
    with pytest.raises(InputError):
        tolerant_embed(g, q3, incumbent=clash)

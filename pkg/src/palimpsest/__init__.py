"""Codes for storage that is overwritten in place: rate, malleability and the
graph-embedding view of code design."""

from .code_schemes import (HuffmanFamily, IncrementalCode, PalimpsestCode, code_from_json,
                           embedding_code, gray_code, huffman, huffman_family, identity_code,
                           incremental_code, ppm_code)
from .edit_metrics import EditMetric, extended_hamming, hamming, levenshtein
from .embedding import EmbeddingResult, exact_embed, tolerant_embed
from .errors import InfeasibleEmbedding, InputError, PalimpsestError, ResourceError
from .evaluator import (RateMalleabilityTriple, evaluate_exact, evaluate_mc,
                        malleability_lower_bound)
from .graph_core import LabeledGraph, adjacency_graph, hypercube, levenshtein_graph
from .prob_core import Distribution, JointSource
from .sources import load_source, parse_source

__all__ = [
    "Distribution", "EditMetric", "EmbeddingResult", "HuffmanFamily", "IncrementalCode",
    "InfeasibleEmbedding", "InputError", "JointSource", "LabeledGraph", "PalimpsestCode",
    "PalimpsestError", "RateMalleabilityTriple", "ResourceError", "adjacency_graph",
    "code_from_json", "embedding_code", "evaluate_exact", "evaluate_mc", "exact_embed",
    "extended_hamming", "gray_code", "hamming", "huffman", "huffman_family", "hypercube",
    "identity_code", "incremental_code", "levenshtein", "levenshtein_graph", "load_source",
    "malleability_lower_bound", "parse_source", "ppm_code", "tolerant_embed",
]

__version__ = "0.1.0"

"""Strong typicality on blocks, the joint typicality graph and embedding diagnostics.

Sequences are handled internally as rows of an integer array (symbol indices);
public results use tuples of source symbols, the same block ids as the codes
and the block adjacency graph.  Typicality tests are done in exact integer
arithmetic whenever the source is rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .edit_metrics import EditMetric
from .errors import InputError, ResourceError
from .graph_core import LabeledGraph, PathMetric, components, path_metric
from .prob_core import FLOAT_TOL, JointSource, conditional_entropy, entropy, marginals

SEQUENCE_CAP = 2 ** 20
EDGE_CAP = 2_000_000
TYPE_CAP = 2_000_000
_CHUNK = 256


@dataclass(frozen=True)
class TypicalityConfig:
    """Block length and typicality slack; ``delta="auto"`` means c * n^(-1/2 + omega).

    An explicit delta of 0 is allowed and selects exact-type sequences only.
    """

    block_n: int
    delta: object = "auto"
    omega: float = 0.1
    c: float = 1.0

    def __post_init__(self):
        if self.block_n < 1:
            raise InputError("block_n must be >= 1")
        if self.omega <= 0 or self.c <= 0:
            raise InputError("omega and c must be positive")
        if self.delta != "auto":
            try:
                d = Fraction(self.delta) if isinstance(self.delta, (str, int, Fraction)) else float(self.delta)
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"bad delta {self.delta!r}") from exc
            if d < 0:
                raise InputError("delta must be non-negative")
            object.__setattr__(self, "delta", d)

    @property
    def value(self):
        if self.delta == "auto":
            return self.c * self.block_n ** (-0.5 + self.omega)
        return self.delta


# -- exact typicality tests ----------------------------------------------------

class _Tester:
    """Decides sum_a |N(a) - n p(a)| <= n delta on integer count vectors."""

    def __init__(self, probs, n: int, delta, exact: bool):
        self.n = n
        if exact:
            scale = reduce(math.lcm, (Fraction(p).denominator for p in probs), 1)
            self.scale = scale
            self.target = np.array([int(Fraction(p) * n * scale) for p in probs], dtype=np.int64)
            self.limit = math.floor(Fraction(delta) * n * scale)
            self.exact = True
        else:
            self.scale = 1
            self.target = np.array([float(p) * n for p in probs])
            self.limit = float(delta) * n * (1 + FLOAT_TOL) + FLOAT_TOL
            self.exact = False

    def deviation(self, counts: np.ndarray) -> np.ndarray:
        """Scaled deviation sum for each row of ``counts`` (last axis = symbols)."""
        if self.exact:
            return np.abs(counts.astype(np.int64) * self.scale - self.target).sum(axis=-1)
        return np.abs(counts - self.target).sum(axis=-1)

    def ok(self, counts: np.ndarray) -> np.ndarray:
        return self.deviation(counts) <= self.limit


def all_sequences(size: int, n: int, cap: int = SEQUENCE_CAP) -> np.ndarray:
    total = size ** n
    if total > cap:
        raise ResourceError(f"{total} sequences of length {n} exceed the cap {cap}")
    # row k is k written in base ``size``, most significant symbol first
    k = np.arange(total, dtype=np.int64)
    out = np.empty((total, n), dtype=np.int64)
    for pos in range(n - 1, -1, -1):
        out[:, pos] = k % size
        k //= size
    return out


def symbol_counts(seqs: np.ndarray, size: int) -> np.ndarray:
    return np.stack([(seqs == a).sum(axis=1) for a in range(size)], axis=1)


def _flat_joint(src: JointSource) -> list:
    return [src.joint[i][j] for i in range(src.size) for j in range(src.size)]


def _testers(src: JointSource, cfg: TypicalityConfig):
    px, py = marginals(src)
    d = cfg.value
    # float deltas are exact binary fractions, so rational sources stay exact
    ex = src.exact
    return (_Tester(px.probs, cfg.block_n, d, ex),
            _Tester(py.probs, cfg.block_n, d, ex),
            _Tester(_flat_joint(src), cfg.block_n, d, ex))


def _names(src: JointSource, rows: np.ndarray) -> list[tuple]:
    alpha = src.source_alphabet
    return [tuple(alpha[i] for i in r) for r in rows.tolist()]


def joint_typical_matrix(src: JointSource, cfg: TypicalityConfig,
                         xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Boolean matrix: entry (r, c) says (xs[r], ys[c]) is jointly typical."""
    w = src.size
    _, _, tj = _testers(src, cfg)
    ox = [(xs == a).astype(np.int64) for a in range(w)]
    oy = [(ys == b).astype(np.int64).T for b in range(w)]
    out = np.zeros((len(xs), len(ys)), dtype=bool)
    for start in range(0, len(xs), _CHUNK):
        stop = min(start + _CHUNK, len(xs))
        dev = np.zeros((stop - start, len(ys)), dtype=np.int64 if tj.exact else float)
        for a in range(w):
            for b in range(w):
                cnt = ox[a][start:stop] @ oy[b]
                k = a * w + b
                if tj.exact:
                    dev += np.abs(cnt * tj.scale - tj.target[k])
                else:
                    dev += np.abs(cnt - tj.target[k])
        out[start:stop] = dev <= tj.limit
    return out


@dataclass
class TypicalSets:
    """Index arrays of the typical sets plus the X-by-Y joint typicality matrix."""

    seqs: np.ndarray
    tx: np.ndarray          # row indices into seqs
    ty: np.ndarray
    matrix: np.ndarray      # tx x ty
    sx: np.ndarray          # subset of tx with a typical partner
    sy: np.ndarray


def typical_sets(src: JointSource, cfg: TypicalityConfig, cap: int = SEQUENCE_CAP) -> TypicalSets:
    seqs = all_sequences(src.size, cfg.block_n, cap)
    counts = symbol_counts(seqs, src.size)
    t_x, t_y, _ = _testers(src, cfg)
    tx = np.flatnonzero(t_x.ok(counts))
    ty = np.flatnonzero(t_y.ok(counts))
    if len(tx) * len(ty) > cap * 64:
        raise ResourceError(f"{len(tx)} x {len(ty)} typical pairs exceed the cap")
    mat = joint_typical_matrix(src, cfg, seqs[tx], seqs[ty])
    sx = tx[mat.any(axis=1)] if len(ty) else tx[:0]
    sy = ty[mat.any(axis=0)] if len(tx) else ty[:0]
    return TypicalSets(seqs, tx, ty, mat, sx, sy)


def typical_set(src: JointSource, cfg: TypicalityConfig, which: str = "x") -> list[tuple]:
    """Typical blocks: ``which`` is x, y, connected_x or connected_y."""
    ts = typical_sets(src, cfg)
    pick = {"x": ts.tx, "y": ts.ty, "connected_x": ts.sx, "connected_y": ts.sy}
    if which not in pick:
        raise InputError(f"unknown typical set {which!r}")
    return _names(src, ts.seqs[pick[which]])


def joint_typical_pairs(src: JointSource, cfg: TypicalityConfig) -> list[tuple[tuple, tuple]]:
    """All jointly typical pairs over the full sequence space (desk-scale only)."""
    seqs = all_sequences(src.size, cfg.block_n)
    mat = joint_typical_matrix(src, cfg, seqs, seqs)
    names = _names(src, seqs)
    return [(names[i], names[j]) for i, j in zip(*np.nonzero(mat))]


def conditional_typical_set(src: JointSource, cfg: TypicalityConfig, x: tuple) -> list[tuple]:
    """Typical y blocks jointly typical with ``x`` (empty if ``x`` is atypical)."""
    ts = typical_sets(src, cfg)
    names = _names(src, ts.seqs[ts.tx])
    if x not in names:
        return []
    row = ts.matrix[names.index(x)]
    return _names(src, ts.seqs[ts.ty[row]])


def connected_union(src: JointSource, cfg: TypicalityConfig) -> list[tuple]:
    """Blocks in either connected typical set, in lexicographic index order."""
    ts = typical_sets(src, cfg)
    return _names(src, ts.seqs[np.union1d(ts.sx, ts.sy)])


# -- type-class counting --------------------------------------------------------

def _compositions(n: int, k: int):
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + k - 2 - prev)
        yield out


def joint_typical_count_and_mass(src: JointSource, cfg: TypicalityConfig,
                                 cap: int = TYPE_CAP) -> tuple[int, object]:
    """|T_XY| and Pr[(X^n, Y^n) in T_XY], summed over joint type classes."""
    n = cfg.block_n
    flat = _flat_joint(src)
    k = len(flat)
    if math.comb(n + k - 1, k - 1) > cap:
        raise ResourceError("too many joint types to enumerate")
    _, _, tj = _testers(src, cfg)
    count = 0
    mass = Fraction(0) if src.exact else 0.0
    terms = []
    fact_n = math.factorial(n)
    for comp in _compositions(n, k):
        if not tj.ok(np.array(comp)):
            continue
        ways = fact_n
        for c in comp:
            ways //= math.factorial(c)
        count += ways
        if any(c and flat[i] == 0 for i, c in enumerate(comp)):
            continue
        term = ways
        for c, p in zip(comp, flat):
            if c:
                term = term * p ** c
        terms.append(term)
    mass = sum(terms, Fraction(0)) if src.exact else math.fsum(terms)
    return count, mass


def marginal_typical_mass(dist_probs, cfg: TypicalityConfig):
    """Pr[X^n in T_X] by counting over marginal types (exact for rational input)."""
    n = cfg.block_n
    exact = all(isinstance(p, Fraction) for p in dist_probs)
    t = _Tester(dist_probs, n, cfg.value, exact)
    terms = []
    for comp in _compositions(n, len(dist_probs)):
        if not t.ok(np.array(comp)):
            continue
        term = math.factorial(n)
        for c in comp:
            term //= math.factorial(c)
        for c, p in zip(comp, dist_probs):
            if c:
                term = term * p ** c
        terms.append(term)
    return sum(terms, Fraction(0)) if exact else math.fsum(terms)


# -- report and graph -------------------------------------------------------------

def _log2(x) -> float:
    return math.log2(x) if x > 0 else -math.inf


def _two_sided_slack(n: int, size: int, h: float, delta: float, lower_factor: bool = True) -> float:
    """Smallest s >= 0 with (1-delta) 2^{n(h-s)} <= size <= 2^{n(h+s)}."""
    if size <= 0:
        return math.inf
    upper = _log2(size) / n - h
    low = (1 - delta) if lower_factor and delta < 1 else 1
    lower = h - (_log2(size) - (_log2(low) if low > 0 else 0)) / n
    return max(0.0, upper, lower)


def typicality_report(src: JointSource, cfg: TypicalityConfig, ts: TypicalSets | None = None,
                      graph: LabeledGraph | None = None) -> dict:
    if ts is None:
        ts = typical_sets(src, cfg)
    n = cfg.block_n
    delta = float(cfg.value)
    px, py = marginals(src)
    hx, hy = entropy(px), entropy(py)
    hxy = hx + conditional_entropy(src)
    hyx = conditional_entropy(src)
    t_xy, mass = joint_typical_count_and_mass(src, cfg)
    row_deg = ts.matrix.sum(axis=1)[ts.matrix.any(axis=1)] if ts.matrix.size else np.array([])
    vertices = np.union1d(ts.sx, ts.sy)
    rep = {
        "block_n": n,
        "delta": delta,
        "H_X": hx, "H_Y": hy, "H_XY": hxy, "H_Y_given_X": hyx,
        "T_X": int(len(ts.tx)), "T_Y": int(len(ts.ty)), "T_XY": t_xy,
        "S_X": int(len(ts.sx)), "S_Y": int(len(ts.sy)),
        "vertices": int(len(vertices)),
        "joint_typical_mass": mass,
        "degree_min": int(row_deg.min()) if row_deg.size else 0,
        "degree_max": int(row_deg.max()) if row_deg.size else 0,
        "degree_mean": float(row_deg.mean()) if row_deg.size else 0.0,
        "eta": max(0.0, _log2(len(ts.tx)) / n - hx) if len(ts.tx) else 0.0,
        "lambda": _two_sided_slack(n, t_xy, hxy, delta),
        "psi": _two_sided_slack(n, len(ts.sx), hx, delta),
        "nu": (max(0.0, _log2(int(row_deg.max())) / n - hyx, hyx - _log2(int(row_deg.min())) / n)
               if row_deg.size else math.inf),
    }
    if graph is not None:
        comps = components(graph)
        big = max(comps, key=len) if comps else []
        keep = set(big)
        sub = LabeledGraph(big, [(u, v) for u, v, _ in graph.edges() if u in keep and v in keep])
        rep["graph_edges"] = graph.edge_count
        rep["graph_max_degree"] = graph.max_degree() if len(graph) else 0
        rep["self_loops"] = getattr(graph, "self_loops", 0)
        rep["components"] = len(comps)
        rep["largest_component"] = len(big)
        rep["diameter"] = graph_diameter(sub)
    return rep


def graph_diameter(g: LabeledGraph) -> int:
    """Diameter of a connected graph by repeated dense reachability products.

    Much faster than per-vertex BFS once the graph has a few thousand vertices.
    """
    n = len(g)
    if n <= 1:
        return 0
    if n <= 512:
        return int(path_metric(g).diameter())
    adj = g.adjacency_matrix().astype(np.float32)
    reach = np.eye(n, dtype=np.float32)
    steps = 0
    while True:
        nxt = reach + np.asarray(adj @ reach.T).T
        nxt = (nxt > 0).astype(np.float32)
        if np.array_equal(nxt, reach):
            return steps
        steps += 1
        reach = nxt


def typicality_graph(src: JointSource, cfg: TypicalityConfig,
                     edge_cap: int = EDGE_CAP) -> tuple[LabeledGraph, dict]:
    """Joint typicality graph on the union of the connected typical sets.

    Self-pairs are not graph edges; the count of jointly typical ``(v, v)``
    is kept on the graph as ``self_loops``.
    """
    ts = typical_sets(src, cfg)
    verts = np.union1d(ts.sx, ts.sy)
    if len(verts) > 100_000:
        raise ResourceError(f"{len(verts)} graph vertices exceed the cap")
    rows = ts.seqs[verts]
    mat = joint_typical_matrix(src, cfg, rows, rows)
    # rows outside T_X or columns outside T_Y never count as typical pairs
    in_tx = np.isin(verts, ts.tx)
    in_ty = np.isin(verts, ts.ty)
    mat &= in_tx[:, None] & in_ty[None, :]
    sym = mat | mat.T
    loops = int(np.count_nonzero(np.diag(mat)))
    np.fill_diagonal(sym, False)
    iu, ju = np.nonzero(np.triu(sym))
    if len(iu) > edge_cap:
        raise ResourceError(f"{len(iu)} typicality edges exceed the cap {edge_cap}")
    names = _names(src, rows)
    g = LabeledGraph(names, [(names[i], names[j]) for i, j in zip(iu.tolist(), ju.tolist())])
    g.self_loops = loops
    return g, typicality_report(src, cfg, ts, g)


# -- necessary conditions and bounds -----------------------------------------------

def theorem5_check(src: JointSource, cfg: TypicalityConfig, nK: int,
                   graph: LabeledGraph | None = None) -> dict:
    """Necessary conditions for embedding the typicality graph into the nK-cube.

    The analytic condition is nK >= max(n H(X), 2^{n H(Y|X)}) in bits.  With a
    materialized graph, also vertex count <= 2^nK and max degree <= nK.
    """
    n = cfg.block_n
    px, _ = marginals(src)
    need = max(n * entropy(px), 2 ** (n * conditional_entropy(src)))
    out = {"nK": nK, "analytic_requirement": need, "analytic_ok": nK >= need - FLOAT_TOL}
    if graph is not None:
        out["vertices"] = len(graph)
        out["vertices_ok"] = len(graph) <= 2 ** nK
        out["max_degree"] = graph.max_degree() if len(graph) else 0
        out["degree_ok"] = out["max_degree"] <= nK
        out["counting_ok"] = out["vertices_ok"] and out["degree_ok"]
    return out


@dataclass(frozen=True)
class EmbeddingDiagnostics:
    dilation: object
    contraction: object
    distortion: object
    expansion: object


def embedding_diagnostics(code, guest_metric: PathMetric, host_metric: EditMetric) -> EmbeddingDiagnostics:
    """Lipschitz constants of the code as a map between the two metrics.

    Pairs the guest leaves disconnected are skipped.  Expansion is the number
    of host strings of the longest codeword length over the number of guest
    vertices.
    """
    verts = list(guest_metric.vertices)
    missing = [v for v in verts if v not in code.codebook]
    if missing:
        raise InputError(f"guest vertex {missing[0]!r} has no codeword")
    dil = Fraction(0)
    con = Fraction(0)
    words = [code.codebook[v] for v in verts]
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            dg = guest_metric.dist[i, j]
            if not math.isfinite(dg):
                continue
            dh = host_metric(words[i], words[j])
            dg = int(dg)
            dil = max(dil, Fraction(dh, dg))
            con = max(con, Fraction(dg, dh) if dh else Fraction(10 ** 18))
    if dil == 0:
        dil = con = Fraction(1)
    length = max(len(w) for w in words)
    expansion = Fraction(code.alphabet_size ** length, len(verts))
    return EmbeddingDiagnostics(dil, con, dil * con, expansion)


def dilation_lower_bound(guest_max_deg: int, host_max_deg: int) -> int:
    """Smallest L with (d_H - 1)^L >= d_G - 1: the integer form of the ceiling of
    log(d_G - 1) / log(d_H - 1).  Degenerate degrees give 1."""
    if guest_max_deg <= 2 or host_max_deg <= 2:
        return 1
    L = 1
    while (host_max_deg - 1) ** L < guest_max_deg - 1:
        L += 1
    return L


def theorem6_bound(lip, n: int, delta, diameter) -> float:
    """(Lip / n)(1 + delta * diam): malleability bound for typicality-restricted codes."""
    if n < 1:
        raise InputError("n must be >= 1")
    if min(float(lip), float(delta), float(diameter)) < 0:
        raise InputError("inputs must be non-negative")
    return float(lip) / n * (1 + float(delta) * float(diameter))


def asymptotic_bound(lip, contraction, K, n: int, omega: float = 0.1) -> float:
    """Lip/n + K Lip Lip^-1 / n^(1/2 - omega)."""
    if n < 1:
        raise InputError("n must be >= 1")
    lip, contraction, K = float(lip), float(contraction), float(K)
    return lip / n + K * lip * contraction / n ** (0.5 - omega)

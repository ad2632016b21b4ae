"""The labeled transition graph of the mode.

Vertices are all 2^n blocks; label m leads from x to g(m, x) = encrypt(x ^ mask[m]).
Nothing is stored beyond the cipher tables: successor sweeps index
``enc[x ^ mask]`` and predecessor sweeps use the closed form
``x = dec[y] ^ mask[m]``.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from core.blocks import Block, MessageSemantics, validate_block_size
from core.ciphers import KeyedPermutation
from core.config import get_config
from core.dynamics import label_masks
from core.errors import ConfigError, ResourceLimitError
from core.log import get_logger

logger = get_logger('graph')

# Bound on the candidate-edge matrix built per sweep chunk
CHUNK_EDGES = 1 << 22

EXPLICIT = 'explicit'
IMPLICIT = 'implicit'


@dataclass(frozen=True, eq=False)
class TransitionGraph:
    """Implicit digraph determined by a cipher and a message semantics."""

    cipher: KeyedPermutation
    semantics: MessageSemantics

    @property
    def n(self) -> int:
        return self.cipher.n

    @property
    def vertex_count(self) -> int:
        return self.cipher.size

    @property
    def label_count(self) -> int:
        return self.semantics.label_count(self.n)

    @property
    def edge_count(self) -> int:
        return self.vertex_count * self.label_count

    @property
    def masks(self) -> np.ndarray:
        return label_masks(self.n, self.semantics)

    @property
    def descriptor(self) -> str:
        return f"{self.cipher.descriptor} n={self.n} {self.semantics.value}"

    def _vertex(self, x) -> int:
        value = x.value if isinstance(x, Block) else x
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ConfigError(f"vertex must be an integer block, got {x!r}")
        if not 0 <= value < self.vertex_count:
            raise ConfigError(f"vertex {value} out of range for n={self.n}")
        return int(value)

    def successor_targets(self, x) -> np.ndarray:
        """Targets of x indexed by label."""
        return self.cipher.enc[self._vertex(x) ^ self.masks]

    def predecessor_sources(self, y) -> np.ndarray:
        """Sources reaching y, indexed by label."""
        return self.cipher.dec[self._vertex(y)] ^ self.masks


def successors(G: TransitionGraph, x) -> List[Tuple[int, int]]:
    """All (label, target) pairs leaving x, labels ascending."""
    return [(m, int(t)) for m, t in enumerate(G.successor_targets(x))]


def predecessors(G: TransitionGraph, y) -> List[Tuple[int, int]]:
    """All (label, source) pairs with g(label, source) = y, labels ascending."""
    return [(m, int(s)) for m, s in enumerate(G.predecessor_sources(y))]


# ==================== Reachability ====================

def _expand(G: TransitionGraph, frontier: np.ndarray, backward: bool) -> np.ndarray:
    if backward:
        return G.cipher.dec[frontier][:, None] ^ G.masks[None, :]
    return G.cipher.enc[frontier[:, None] ^ G.masks[None, :]]


def _sweep(G: TransitionGraph, start: int, backward: bool = False) -> np.ndarray:
    """Boolean mask of vertices reachable from (or, backward, reaching) start."""
    total = G.vertex_count
    seen = np.zeros(total, dtype=bool)
    seen[start] = True
    count = 1
    frontier = np.array([start], dtype=np.int64)
    chunk = max(1, CHUNK_EDGES // G.label_count)
    while frontier.size and count < total:
        parts = []
        for i in range(0, frontier.size, chunk):
            candidates = np.unique(_expand(G, frontier[i:i + chunk], backward))
            fresh = candidates[~seen[candidates]]
            seen[fresh] = True
            count += fresh.size
            parts.append(fresh)
            if count == total:
                break
        frontier = np.concatenate(parts)
    return seen


def reachable_set(G: TransitionGraph, x, backward: bool = False) -> np.ndarray:
    """
    Vertices reachable from x (or, with backward=True, vertices reaching x).

    Returns:
        Boolean mask indexed by vertex.
    """
    return _sweep(G, G._vertex(x), backward)


@dataclass
class ConnectivityVerdict:
    """Strong-connectivity answer with a reproducible counterexample."""

    strongly_connected: bool
    mode: str
    witness: Optional[Tuple[int, int]] = None
    reachable_count: Optional[int] = None
    scc_count: Optional[int] = None

    def __post_init__(self):
        if self.strongly_connected == (self.witness is not None):
            raise ValueError("witness must be present exactly when not strongly connected")


def _check_mode_limit(G: TransitionGraph, mode: str, max_n: Optional[int]):
    config = get_config()
    if mode == EXPLICIT:
        ceiling = config.explicit_max_n
        if G.n > ceiling:
            raise ResourceLimitError(
                f"explicit mode materialises every edge and is capped at n <= {ceiling}; "
                f"use --mode implicit for n={G.n}"
            )
    elif mode == IMPLICIT:
        validate_block_size(G.n, config.max_n if max_n is None else max_n)
    else:
        raise ConfigError(f"unknown connectivity mode {mode!r} (explicit or implicit)")


def _smallest_unreached_pair(forward: np.ndarray, backward: np.ndarray,
                             reach_from) -> Tuple[Tuple[int, int], int]:
    """
    Lexicographically smallest (u, v) without a path u -> v.

    If 0 misses some vertex the pair starts at 0. Otherwise every vertex
    reaching 0 reaches everything, so u is the smallest vertex not reaching
    0 and v = 0.
    """
    if not forward.all():
        return (0, int(np.argmin(forward))), int(forward.sum())
    u = int(np.argmin(backward))
    return (u, 0), reach_from(u)


def _implicit_verdict(G: TransitionGraph) -> ConnectivityVerdict:
    forward = _sweep(G, 0)
    backward = _sweep(G, 0, backward=True) if forward.all() else np.zeros(1, dtype=bool)
    if forward.all() and backward.all():
        return ConnectivityVerdict(True, IMPLICIT)
    witness, reach = _smallest_unreached_pair(
        forward, backward, lambda u: int(_sweep(G, u).sum()))
    return ConnectivityVerdict(False, IMPLICIT, witness, reach)


def adjacency_matrix(G: TransitionGraph) -> csr_matrix:
    """Materialise every edge as a sparse 0/1 matrix (rows = sources)."""
    total = G.vertex_count
    sources = np.repeat(np.arange(total, dtype=np.int64), G.label_count)
    targets = G.cipher.enc[(sources.reshape(total, -1) ^ G.masks[None, :]).ravel()]
    data = np.ones(sources.size, dtype=np.int8)
    return csr_matrix((data, (sources, targets)), shape=(total, total))


def scc_decomposition(G: TransitionGraph) -> Tuple[int, np.ndarray]:
    """Strongly connected components of the materialised graph (count, labels)."""
    _check_mode_limit(G, EXPLICIT, None)
    return connected_components(adjacency_matrix(G), directed=True, connection='strong')


def _explicit_verdict(G: TransitionGraph) -> ConnectivityVerdict:
    matrix = adjacency_matrix(G)
    count, _ = connected_components(matrix, directed=True, connection='strong')
    if count == 1:
        return ConnectivityVerdict(True, EXPLICIT, scc_count=1)
    total = G.vertex_count

    def reached(graph, start: int) -> np.ndarray:
        mask = np.zeros(total, dtype=bool)
        mask[breadth_first_order(graph, start, directed=True,
                                 return_predecessors=False)] = True
        return mask

    forward = reached(matrix, 0)
    backward = reached(matrix.transpose().tocsr(), 0)
    witness, reach = _smallest_unreached_pair(
        forward, backward, lambda u: int(reached(matrix, u).sum()))
    return ConnectivityVerdict(False, EXPLICIT, witness, reach, int(count))


def strongly_connected(G: TransitionGraph, mode: str = IMPLICIT,
                       max_n: Optional[int] = None) -> ConnectivityVerdict:
    """
    Decide strong connectivity.

    Args:
        G: The transition graph.
        mode: 'explicit' (SCC decomposition of every edge, n <= 12) or
            'implicit' (forward and backward sweeps from vertex 0).
        max_n: Ceiling for implicit mode. If None, uses the configuration.

    Returns:
        ConnectivityVerdict; the witness is the lexicographically smallest
        pair (u, v) with no path u -> v.
    """
    _check_mode_limit(G, mode, max_n)
    logger.debug("%s sweep on %s (%d vertices, %d labels)",
                 mode, G.descriptor, G.vertex_count, G.label_count)
    verdict = _explicit_verdict(G) if mode == EXPLICIT else _implicit_verdict(G)
    logger.debug("%s: strongly connected = %s, witness = %s",
                 G.descriptor, verdict.strongly_connected, verdict.witness)
    return verdict


# ==================== Paths ====================

def find_path(G: TransitionGraph, x, y) -> Optional[List[int]]:
    """
    Shortest label sequence driving x to y.

    Breadth-first, frontier in discovery order and labels ascending, so the
    first discovery of a vertex fixes its parent.

    Returns:
        The labels, [] when x == y, None when y is unreachable.
    """
    source, target = G._vertex(x), G._vertex(y)
    if source == target:
        return []
    total, width = G.vertex_count, G.label_count
    seen = np.zeros(total, dtype=bool)
    parent = np.full(total, -1, dtype=np.int64)
    via = np.full(total, -1, dtype=np.int64)
    seen[source] = True
    frontier = np.array([source], dtype=np.int64)
    chunk = max(1, CHUNK_EDGES // width)
    while frontier.size and not seen[target]:
        parts = []
        for i in range(0, frontier.size, chunk):
            block = frontier[i:i + chunk]
            flat = _expand(G, block, backward=False).ravel()
            fresh = np.nonzero(~seen[flat])[0]
            if fresh.size == 0:
                continue
            _, first = np.unique(flat[fresh], return_index=True)
            positions = np.sort(fresh[first])
            found = flat[positions]
            parent[found] = block[positions // width]
            via[found] = positions % width
            seen[found] = True
            parts.append(found)
        frontier = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    if not seen[target]:
        return None
    labels = []
    vertex = target
    while vertex != source:
        labels.append(int(via[vertex]))
        vertex = int(parent[vertex])
    labels.reverse()
    return labels


def follow(G: TransitionGraph, x, labels) -> int:
    """Vertex reached from x after following the given labels."""
    vertex = G._vertex(x)
    for m in labels:
        G.semantics.check_label(int(m), G.n)
        vertex = int(G.cipher.enc[vertex ^ G.masks[m]])
    return vertex


# ==================== Edge tables ====================

@dataclass(frozen=True)
class EdgeRow:
    """One (x, m) entry: F(x, m) and g(m, x)."""

    x: int
    m: int
    f: int
    g: int
    n: int

    def bits(self, value: int) -> str:
        return format(value, f'0{self.n}b')


def _check_render_limit(G: TransitionGraph, max_n: Optional[int]):
    ceiling = get_config().render_max_n if max_n is None else max_n
    if G.n > ceiling:
        raise ResourceLimitError(
            f"rendering lists {G.edge_count} edges; capped at n <= {ceiling}")


def edge_table(G: TransitionGraph, max_n: Optional[int] = None) -> List[EdgeRow]:
    """All edges in (x ascending, m ascending) order."""
    _check_render_limit(G, max_n)
    rows = []
    for x in range(G.vertex_count):
        combined = x ^ G.masks
        for m, f in enumerate(combined):
            rows.append(EdgeRow(x, m, int(f), int(G.cipher.enc[f]), G.n))
    return rows

"""Minimum cuts on complete weighted graphs.

Every cut comes from a shortest augmenting path maximum flow (networkx) on
the graph of a dense capacity matrix. The side returned is the set of points
reachable from the source in the final residual graph.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.flow import shortest_augmenting_path

from .config import BRUTE_FORCE_MAX_N, FLOW_EPS
from .errors import InvalidPairError, InvalidPointError, require_k, require_size
from .similarity import Pair, Partitioning, SimilarityInstance, crossing_weight, iter_partitionings

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CutResult:
    value: float
    side: FrozenSet[int]
    flow: float = float("nan")

    def separates(self, a: int, b: int) -> bool:
        return (a in self.side) != (b in self.side)

    def complement(self, n: int) -> FrozenSet[int]:
        return frozenset(range(1, n + 1)) - self.side


def cut_value(s: SimilarityInstance, side: Iterable[int]) -> float:
    inside = set(side)
    for p in inside:
        if not 1 <= p <= s.n:
            raise InvalidPointError(f"point {p} outside 1..{s.n}")
    return math.fsum(w for (i, j), w in s.items() if (i in inside) != (j in inside))


def _capacity_graph(capacity) -> nx.Graph:
    matrix = np.asarray(capacity, dtype=float)
    g = nx.Graph()
    g.add_nodes_from(range(len(matrix)))
    rows, cols = np.nonzero(np.triu(matrix, k=1) > 0.0)
    g.add_weighted_edges_from(
        ((int(u), int(v), float(matrix[u, v])) for u, v in zip(rows, cols)), weight="capacity"
    )
    return g


def augmenting_path_flow(capacity, source: int, sink: int) -> Tuple[float, List[int]]:
    """Max flow between two 0-based nodes of a symmetric dense capacity matrix.

    Returns the flow value and the sorted nodes reachable from ``source`` in
    the final residual graph. Residuals at or below ``FLOW_EPS`` count as
    saturated.
    """

    g = _capacity_graph(capacity)
    residual = shortest_augmenting_path(g, source, sink, capacity="capacity")
    open_arcs = nx.DiGraph()
    open_arcs.add_nodes_from(g)
    open_arcs.add_edges_from(
        (u, v) for u, v, attr in residual.edges(data=True) if attr["capacity"] - attr["flow"] > FLOW_EPS
    )
    reachable = nx.descendants(open_arcs, source) | {source}
    return float(residual.graph["flow_value"]), sorted(reachable)


def _require_pair(s: SimilarityInstance, a: int, b: int) -> None:
    for p in (a, b):
        if not 1 <= p <= s.n:
            raise InvalidPointError(f"point {p} outside 1..{s.n}")
    if a == b:
        raise InvalidPairError(f"source and sink must differ, got {a} twice")


def max_flow_value(s: SimilarityInstance, a: int, b: int) -> float:
    _require_pair(s, a, b)
    value, _ = augmenting_path_flow(s.matrix, a - 1, b - 1)
    return value


def st_min_cut(s: SimilarityInstance, a: int, b: int) -> CutResult:
    """Minimum a-b cut; the side holds every point reachable from ``a``."""

    _require_pair(s, a, b)
    flow, reachable = augmenting_path_flow(s.matrix, a - 1, b - 1)
    side = frozenset(v + 1 for v in reachable)
    return CutResult(value=cut_value(s, side), side=side, flow=flow)


def global_min_cut(s: SimilarityInstance) -> CutResult:
    best = None
    for t in range(2, s.n + 1):
        cut = st_min_cut(s, 1, t)
        if best is None or cut.value < best.value:
            best = cut
    return best


def brute_force_min_kcut(s: SimilarityInstance, k: int) -> Tuple[float, Partitioning]:
    require_k(k, s.n)
    require_size(s.n, BRUTE_FORCE_MAX_N, "brute-force minimum k-cut")
    best_value, best = math.inf, None
    for gamma in iter_partitionings(s.n, k):
        value = crossing_weight(s, gamma)
        if value < best_value:
            best_value, best = value, gamma
    return best_value, best


# ---------------------- exhaustive cut tables ----------------------
def side_mask(side: Iterable[int]) -> int:
    mask = 0
    for p in side:
        mask |= 1 << (p - 1)
    return mask


def mask_points(mask: int, n: int) -> FrozenSet[int]:
    return frozenset(p for p in range(1, n + 1) if mask >> (p - 1) & 1)


def _membership(n: int) -> np.ndarray:
    # rows enumerate every side that holds point 1 and misses at least one point
    count = 2 ** (n - 1) - 1
    masks = (np.arange(count, dtype=np.int64) << 1) | 1
    bits = (masks[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return bits.astype(bool)


def exhaustive_cut_table(s: SimilarityInstance) -> List[Tuple[int, float]]:
    """Every non-trivial cut as ``(mask, value)``, each mask containing point 1.

    Bit ``p - 1`` of a mask is set when point ``p`` is on the side. Masks come
    in ascending order.
    """

    require_size(s.n, BRUTE_FORCE_MAX_N, "exhaustive cut table")
    member = _membership(s.n)
    inside = member.astype(float)
    values = ((inside @ s.matrix) * (1.0 - inside)).sum(axis=1)
    masks = member.astype(np.int64) @ (1 << np.arange(s.n, dtype=np.int64))
    return [(int(m), float(v)) for m, v in zip(masks, values)]


def pairwise_min_cuts(s: SimilarityInstance) -> Dict[Pair, float]:
    """Minimum u-v cut value for every pair, by exhaustive search."""

    table = exhaustive_cut_table(s)
    masks = np.array([m for m, _ in table], dtype=np.int64)
    values = np.array([v for _, v in table])
    result: Dict[Pair, float] = {}
    for i in range(1, s.n + 1):
        bit_i = (masks >> (i - 1)) & 1
        for j in range(i + 1, s.n + 1):
            separating = bit_i != ((masks >> (j - 1)) & 1)
            result[(i, j)] = float(values[separating].min())
    return result

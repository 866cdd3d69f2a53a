"""Spanning and cut trees: Kruskal MST, Gomory-Hu trees and tree k-cuts."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Iterable, List, NamedTuple, Sequence, Tuple

import networkx as nx
import numpy as np

from .config import BRUTE_FORCE_MAX_N, GENERAL_TREE_MAX_N, VALUE_TOL
from .errors import InvalidInstanceError, ShapeError, require_k, require_size
from .flow import augmenting_path_flow, cut_value, pairwise_min_cuts
from .similarity import Pair, Partitioning, SimilarityInstance, canonical_order
from .submodular import SymmetricSetFunctionOracle
from .unionfind import UnionFind

log = logging.getLogger(__name__)


class TreeEdge(NamedTuple):
    u: int
    v: int
    weight: float

    @property
    def pair(self) -> Pair:
        return (self.u, self.v)


def _tree_order(edges: Iterable[TreeEdge]) -> Tuple[TreeEdge, ...]:
    # reverse of the instance edge order: lightest first, larger pair first on ties
    return tuple(sorted(edges, key=lambda e: (-e.weight, e.u, e.v), reverse=True))


@dataclass(frozen=True)
class WeightedTree:
    n: int
    edges: Tuple[TreeEdge, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInstanceError(f"a tree needs at least one node, got n={self.n}")
        normalized = []
        for u, v, w in self.edges:
            u, v = (int(u), int(v)) if u < v else (int(v), int(u))
            if not 1 <= u < v <= self.n:
                raise InvalidInstanceError(f"tree edge ({u}, {v}) outside 1..{self.n}")
            if not math.isfinite(w) or w < 0:
                raise InvalidInstanceError(f"tree edge ({u}, {v}) has invalid weight {w}")
            normalized.append(TreeEdge(u, v, float(w)))
        if len(normalized) != self.n - 1:
            raise InvalidInstanceError(f"a tree on {self.n} nodes needs {self.n - 1} edges, got {len(normalized)}")

        forest = UnionFind(range(1, self.n + 1))
        for edge in normalized:
            if not forest.union(edge.u, edge.v):
                raise InvalidInstanceError(f"tree edge {edge.pair} closes a cycle")
        object.__setattr__(self, "edges", _tree_order(normalized))

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(1, self.n + 1))
        for rank, edge in enumerate(self.edges):
            g.add_edge(edge.u, edge.v, weight=edge.weight, rank=rank)
        return g

    def total_weight(self) -> float:
        return math.fsum(e.weight for e in self.edges)

    def pairs(self) -> List[Pair]:
        return sorted(e.pair for e in self.edges)

    def path(self, u: int, v: int) -> List[TreeEdge]:
        nodes = nx.shortest_path(self.graph, u, v)
        return [self.edges[self.graph[a][b]["rank"]] for a, b in zip(nodes, nodes[1:])]

    def path_min(self, u: int, v: int) -> TreeEdge:
        nodes = nx.shortest_path(self.graph, u, v)
        rank = min(self.graph[a][b]["rank"] for a, b in zip(nodes, nodes[1:]))
        return self.edges[rank]

    def side_without(self, edge: TreeEdge) -> frozenset:
        g = self.graph.copy()
        g.remove_edge(edge.u, edge.v)
        return frozenset(nx.node_connected_component(g, edge.u))

    def components_without(self, removed: Iterable[TreeEdge]) -> Partitioning:
        g = self.graph.copy()
        g.remove_edges_from((e.u, e.v) for e in removed)
        return Partitioning.of(nx.connected_components(g))

    def crossing_weight(self, gamma: Partitioning) -> float:
        return math.fsum(e.weight for e in self.edges if not gamma.same_block(e.u, e.v))

    def to_dicts(self) -> List[Dict[str, float]]:
        return [{"u": e.u, "v": e.v, "w": e.weight} for e in self.edges]


@dataclass(frozen=True)
class TreeKCut:
    removed_edges: Tuple[TreeEdge, ...]
    partition: Partitioning

    @property
    def value(self) -> float:
        return math.fsum(e.weight for e in self.removed_edges)


def tree_min_kcut(t: WeightedTree, k: int) -> TreeKCut:
    """Remove the k-1 canonically lightest edges and read off the forest."""

    require_k(k, t.n)
    removed = t.edges[: k - 1]
    return TreeKCut(removed_edges=removed, partition=t.components_without(removed))


# ---------------------- maximum spanning tree ----------------------
def mst(s: SimilarityInstance) -> WeightedTree:
    forest = UnionFind(range(1, s.n + 1))
    accepted = []
    for edge in canonical_order(s):
        if forest.union(edge.u, edge.v):
            accepted.append(TreeEdge(edge.u, edge.v, edge.weight))
            if len(accepted) == s.n - 1:
                break
    return WeightedTree(s.n, tuple(accepted))


# ---------------------- Gomory-Hu ----------------------
Separator = Callable[[List[frozenset], int, int], Tuple[float, frozenset]]


def _gomory_hu(n: int, separator: Separator) -> WeightedTree:
    """Supernode Gomory-Hu iteration with explicit contraction.

    ``separator(items, ia, ib)`` receives the contracted ground set as a list
    of point sets and must return the value of a minimum separating set
    together with the indices of the items on the ``ia`` side.
    """

    supernodes: List[frozenset] = [frozenset(range(1, n + 1))]
    tree: List[Tuple[int, int, float]] = []

    for _ in range(n - 1):
        # lexicographically smallest pair still sharing a supernode
        x = min((idx for idx, node in enumerate(supernodes) if len(node) > 1), key=lambda idx: min(supernodes[idx]))
        members = sorted(supernodes[x])
        a, b = members[0], members[1]

        adjacency: Dict[int, List[int]] = {idx: [] for idx in range(len(supernodes))}
        for p, q, _w in tree:
            adjacency[p].append(q)
            adjacency[q].append(p)

        # one contracted item per subtree hanging off x
        branches: List[Tuple[int, frozenset]] = []
        for neighbour in adjacency[x]:
            seen = {x, neighbour}
            stack = [neighbour]
            points = set()
            while stack:
                node = stack.pop()
                points |= supernodes[node]
                for nxt in adjacency[node]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            branches.append((neighbour, frozenset(points)))

        items = [frozenset([p]) for p in members] + [points for _, points in branches]
        items.sort(key=min)
        position = {min(item): idx for idx, item in enumerate(items)}
        value, side_items = separator(items, position[a], position[b])
        side = frozenset().union(*(items[idx] for idx in side_items))

        part_a = frozenset(p for p in members if p in side)
        part_b = supernodes[x] - part_a
        supernodes[x] = part_a
        supernodes.append(part_b)
        y = len(supernodes) - 1

        rewired = []
        for p, q, w in tree:
            if x in (p, q):
                other = q if p == x else p
                branch_points = next(points for nb, points in branches if nb == other)
                target = x if min(branch_points) in side else y
                rewired.append((target, other, w))
            else:
                rewired.append((p, q, w))
        rewired.append((x, y, value))
        tree = rewired

    edges = [TreeEdge(min(supernodes[p]), min(supernodes[q]), w) for p, q, w in tree]
    return WeightedTree(n, tuple(edges))


def _flow_separator(s: SimilarityInstance) -> Separator:
    def separate(items: List[frozenset], ia: int, ib: int) -> Tuple[float, frozenset]:
        indicator = np.zeros((len(items), s.n))
        for idx, item in enumerate(items):
            indicator[idx, [p - 1 for p in item]] = 1.0
        capacity = indicator @ s.matrix @ indicator.T
        np.fill_diagonal(capacity, 0.0)
        _, reachable = augmenting_path_flow(capacity.tolist(), ia, ib)
        side_items = frozenset(reachable)
        side = frozenset().union(*(items[idx] for idx in side_items))
        return cut_value(s, side), side_items

    return separate


def gomory_hu_cut_tree(s: SimilarityInstance) -> WeightedTree:
    tree = _gomory_hu(s.n, _flow_separator(s))
    log.debug("gomory-hu tree on %d points: %s", s.n, tree.pairs())
    return tree


def _exhaustive_separator(f: SymmetricSetFunctionOracle) -> Separator:
    def separate(items: List[frozenset], ia: int, ib: int) -> Tuple[float, frozenset]:
        free = [idx for idx in range(len(items)) if idx not in (ia, ib)]
        best_value, best_side = math.inf, None
        for mask in range(2 ** len(free)):
            chosen = [ia] + [free[bit] for bit in range(len(free)) if mask >> bit & 1]
            value = f(frozenset().union(*(items[idx] for idx in chosen)))
            if value < best_value:
                best_value, best_side = value, frozenset(chosen)
        return best_value, best_side

    return separate


def gomory_hu_general(f: SymmetricSetFunctionOracle, n: int) -> WeightedTree:
    """Gomory-Hu tree of a symmetric submodular set function.

    Each split takes the cheapest separating set over the contracted ground
    set, found by exhaustive search. The first minimum in ascending subset
    order wins.
    """

    if f.n != n:
        raise ShapeError(f"oracle is defined on {f.n} points, expected {n}")
    if n < 2:
        raise InvalidInstanceError(f"need at least 2 points, got n={n}")
    require_size(n, GENERAL_TREE_MAX_N, "generalized Gomory-Hu tree")
    return _gomory_hu(n, _exhaustive_separator(f))


# ---------------------- verification ----------------------
def mct_violations(t: WeightedTree, s: SimilarityInstance, tol: float = VALUE_TOL) -> List[Pair]:
    """Pairs whose path minimum disagrees with their brute-force minimum cut."""

    if t.n != s.n:
        raise ShapeError(f"tree has {t.n} nodes but the instance has {s.n}")
    require_size(s.n, BRUTE_FORCE_MAX_N, "minimum cut tree verification")
    exact = pairwise_min_cuts(s)
    bad = []
    for (u, v), best in exact.items():
        edge = t.path_min(u, v)
        if abs(edge.weight - best) > tol or abs(cut_value(s, t.side_without(edge)) - best) > tol:
            bad.append((u, v))
    return bad


def verify_mct(t: WeightedTree, s: SimilarityInstance) -> bool:
    return not mct_violations(t, s)


def path_minima(t: WeightedTree) -> Dict[Pair, float]:
    return {
        (u, v): t.path_min(u, v).weight for u in range(1, t.n + 1) for v in range(u + 1, t.n + 1)
    }


def star_tree(weights: Sequence[float]) -> WeightedTree:
    return WeightedTree(len(weights) + 1, tuple(TreeEdge(1, i + 2, w) for i, w in enumerate(weights)))

"""Partitioning functions: Single-Linkage, Max-Sum, Q-clustering and the
counterexample families used by the axiom lab."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .config import BRUTE_FORCE_MAX_N, MAX_SUM_TRIAL_K, THRESHOLD_CONTROL
from .errors import InvalidPermutationError, require_k, require_size
from .flow import CutResult, global_min_cut
from .similarity import (
    Partitioning,
    SimilarityInstance,
    canonical_order,
    enumerate_partitionings,
    iter_partitionings,
    lambda_objective,
)
from .submodular import SymmetricSetFunctionOracle
from .trees import gomory_hu_cut_tree, gomory_hu_general, mst, tree_min_kcut
from .unionfind import UnionFind

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartitioningFunction:
    name: str
    apply: Callable[[SimilarityInstance, int], Partitioning]
    # set when the output depends on (n, k) only
    fixed: Optional[Callable[[int, int], Partitioning]] = None
    # k values the axiom lab draws for this function unless told otherwise
    trial_k: Optional[Tuple[int, ...]] = None

    def __call__(self, s: SimilarityInstance, k: int) -> Partitioning:
        require_k(k, s.n)
        return self.apply(s, k)


# ---------------------- Single-Linkage ----------------------
def single_linkage(s: SimilarityInstance, k: int) -> Partitioning:
    require_k(k, s.n)
    clusters = UnionFind(range(1, s.n + 1))
    for edge in canonical_order(s):
        if clusters.components == k:
            break
        clusters.union(edge.u, edge.v)
    return Partitioning.of(clusters.groups())


def single_linkage_via_mst(s: SimilarityInstance, k: int) -> Partitioning:
    require_k(k, s.n)
    return tree_min_kcut(mst(s), k).partition


# ---------------------- Max-Sum ----------------------
def _component_cut(s: SimilarityInstance, component: Tuple[int, ...]) -> CutResult:
    local = global_min_cut(s.restrict(component))
    side = frozenset(component[p - 1] for p in local.side)
    return CutResult(value=local.value, side=side, flow=local.flow)


def max_sum_approx(s: SimilarityInstance, k: int) -> Partitioning:
    """Iterated global minimum cut.

    Every round cuts the component whose internal global minimum cut is
    cheapest, ties going to the component with the smallest point id, until
    ``k`` components remain.
    """

    require_k(k, s.n)
    components: List[Tuple[int, ...]] = [tuple(range(1, s.n + 1))]
    cuts: Dict[Tuple[int, ...], CutResult] = {}

    while len(components) < k:
        best: Optional[Tuple[int, ...]] = None
        for component in sorted(components):
            if len(component) < 2:
                continue
            if component not in cuts:
                cuts[component] = _component_cut(s, component)
            if best is None or cuts[component].value < cuts[best].value:
                best = component

        cut = cuts.pop(best)
        inside = tuple(p for p in best if p in cut.side)
        outside = tuple(p for p in best if p not in cut.side)
        components.remove(best)
        components.extend([inside, outside])
        log.debug("max-sum split %s -> %s | %s (%.6g)", best, inside, outside, cut.value)

    return Partitioning.of(components)


def max_sum_exact(s: SimilarityInstance, k: int) -> Partitioning:
    require_k(k, s.n)
    require_size(s.n, BRUTE_FORCE_MAX_N, "exact Max-Sum")
    best_value, best = -math.inf, None
    for gamma in iter_partitionings(s.n, k):
        value = lambda_objective(s, gamma)
        if value > best_value:
            best_value, best = value, gamma
    return best


def max_sum_tree(s: SimilarityInstance, k: int) -> Partitioning:
    require_k(k, s.n)
    return tree_min_kcut(gomory_hu_cut_tree(s), k).partition


def q_cluster(f: SymmetricSetFunctionOracle, n: int, k: int) -> Partitioning:
    require_k(k, n)
    if n == 1:
        return Partitioning.of([[1]])
    return tree_min_kcut(gomory_hu_general(f, n), k).partition


# ---------------------- partition permutations ----------------------
class PartitionPermutation:
    """Bijection on the k-partitionings of a fixed (n, k).

    ``mapping[i]`` is the index of the image of the i-th partitioning in
    canonical enumeration order. Partitionings of any other size pass through
    unchanged.
    """

    def __init__(self, n: int, k: int, mapping: Sequence[int]):
        self.n = n
        self.k = k
        self.mapping = tuple(int(i) for i in mapping)
        if sorted(self.mapping) != list(range(len(self._members))):
            raise InvalidPermutationError(
                f"mapping of length {len(self.mapping)} is not a permutation of the "
                f"{len(self._members)} partitionings for n={n}, k={k}"
            )

    @cached_property
    def _members(self) -> List[Partitioning]:
        return enumerate_partitionings(self.n, self.k)

    @cached_property
    def _index(self) -> Dict[Partitioning, int]:
        return {gamma: idx for idx, gamma in enumerate(self._members)}

    @classmethod
    def identity(cls, n: int, k: int) -> "PartitionPermutation":
        size = sum(1 for _ in iter_partitionings(n, k))
        return cls(n, k, range(size))

    @classmethod
    def transposition(cls, first: Partitioning, second: Partitioning) -> "PartitionPermutation":
        if (first.n, first.k) != (second.n, second.k):
            raise InvalidPermutationError("a transposition needs two partitionings of the same (n, k)")
        members = enumerate_partitionings(first.n, first.k)
        mapping = list(range(len(members)))
        a, b = members.index(first), members.index(second)
        mapping[a], mapping[b] = b, a
        return cls(first.n, first.k, mapping)

    @classmethod
    def from_relabeling(cls, n: int, k: int, points: Mapping[int, int]) -> "PartitionPermutation":
        """Permutation induced by renaming points through the bijection ``points``."""

        _require_point_bijection(points, n)
        members = enumerate_partitionings(n, k)
        index = {gamma: idx for idx, gamma in enumerate(members)}
        return cls(n, k, [index[gamma.relabel(points)] for gamma in members])

    def is_identity(self) -> bool:
        return all(i == target for i, target in enumerate(self.mapping))

    def __call__(self, gamma: Partitioning) -> Partitioning:
        if (gamma.n, gamma.k) != (self.n, self.k):
            return gamma
        return self._members[self.mapping[self._index[gamma]]]


def _require_point_bijection(points: Mapping[int, int], n: int) -> None:
    domain = set(points)
    if domain != set(points.values()) or any(not 1 <= p <= n for p in domain):
        raise InvalidPermutationError(f"point mapping {dict(points)} is not a bijection on a subset of 1..{n}")


class RelabelingFamily:
    """One partition permutation per (n, k), each induced by the same point renaming.

    Sizes too small to hold every renamed point are left alone.
    """

    def __init__(self, points: Mapping[int, int]):
        self.points = dict(points)
        _require_point_bijection(self.points, max(self.points, default=0))

    def __call__(self, gamma: Partitioning) -> Partitioning:
        if any(p > gamma.n for p in self.points):
            return gamma
        return gamma.relabel(self.points)

    def at(self, n: int, k: int) -> PartitionPermutation:
        if any(p > n for p in self.points):
            return PartitionPermutation.identity(n, k)
        return PartitionPermutation.from_relabeling(n, k, self.points)


SWAP_FIRST_TWO = RelabelingFamily({1: 2, 2: 1})

Sigma = Callable[[Partitioning], Partitioning]


class TabulatedPermutation:
    """Partition permutations read off an arbitrary callable, one (n, k) at a time.

    The first call at a given size evaluates the callable on every
    k-partitioning of ``1..n`` and raises ``InvalidPermutationError`` unless
    the images are exactly those partitionings again.
    """

    def __init__(self, sigma: Sigma):
        self.sigma = sigma
        self._tables: Dict[Tuple[int, int], PartitionPermutation] = {}

    def at(self, n: int, k: int) -> PartitionPermutation:
        if (n, k) not in self._tables:
            members = enumerate_partitionings(n, k)
            index = {gamma: idx for idx, gamma in enumerate(members)}
            mapping = []
            for gamma in members:
                image = self.sigma(gamma)
                if not isinstance(image, Partitioning) or image not in index:
                    raise InvalidPermutationError(f"{gamma} maps to {image!r}, not a {k}-partitioning of 1..{n}")
                mapping.append(index[image])
            self._tables[(n, k)] = PartitionPermutation(n, k, mapping)
        return self._tables[(n, k)]

    def __call__(self, gamma: Partitioning) -> Partitioning:
        return self.at(gamma.n, gamma.k)(gamma)


def _as_permutation(sigma: Sigma) -> Sigma:
    if isinstance(sigma, (PartitionPermutation, RelabelingFamily, TabulatedPermutation)):
        return sigma
    if not callable(sigma):
        raise InvalidPermutationError(f"{sigma!r} is not a partition permutation")
    return TabulatedPermutation(sigma)


def mct_cuts_member(sigma: Sigma, name: str = "mct-cuts") -> PartitioningFunction:
    sigma = _as_permutation(sigma)
    return PartitioningFunction(name, lambda s, k: sigma(max_sum_approx(s, k)), trial_k=MAX_SUM_TRIAL_K)


def mst_cuts_member(sigma: Sigma, name: str = "mst-cuts") -> PartitioningFunction:
    sigma = _as_permutation(sigma)
    return PartitioningFunction(name, lambda s, k: sigma(single_linkage(s, k)))


# ---------------------- negative controls ----------------------
def constant_layout(n: int, k: int) -> Partitioning:
    """First ``n - k + 1`` points together, the rest as singletons."""

    require_k(k, n)
    head = list(range(1, n - k + 2))
    return Partitioning.of([head] + [[p] for p in range(n - k + 2, n + 1)])


def constant_partitioner() -> PartitioningFunction:
    return PartitioningFunction("constant", lambda s, k: constant_layout(s.n, k), fixed=constant_layout)


def threshold_partitioner(threshold: float = THRESHOLD_CONTROL) -> PartitioningFunction:
    """Single-Linkage when the heaviest pair reaches ``threshold``, else the constant layout."""

    def apply(s: SimilarityInstance, k: int) -> Partitioning:
        if s.max_weight() >= threshold:
            return single_linkage(s, k)
        return constant_layout(s.n, k)

    return PartitioningFunction("threshold", apply)


FUNCTIONS: Dict[str, Callable[[], PartitioningFunction]] = {
    "sl": lambda: PartitioningFunction("sl", single_linkage),
    "maxsum": lambda: PartitioningFunction("maxsum", max_sum_approx, trial_k=MAX_SUM_TRIAL_K),
    "maxsum-tree": lambda: PartitioningFunction("maxsum-tree", max_sum_tree, trial_k=MAX_SUM_TRIAL_K),
    "mst-cuts": lambda: mst_cuts_member(SWAP_FIRST_TWO),
    "mct-cuts": lambda: mct_cuts_member(SWAP_FIRST_TWO),
    "constant": constant_partitioner,
    "threshold": threshold_partitioner,
}


def get_function(name: str) -> PartitioningFunction:
    try:
        return FUNCTIONS[name]()
    except KeyError:
        raise KeyError(f"unknown partitioning function {name!r}; choose from {', '.join(sorted(FUNCTIONS))}") from None

"""Similarity instances, partitionings and the generators built on them.

Points are the integers ``1..n``. A similarity instance stores one strictly
positive weight per unordered pair ``(i, j)`` with ``i < j``, laid out in
lexicographic pair order. Every value here is immutable; randomness always
comes in through an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np

from .config import INNER_FACTOR, OUTER_FACTOR, PARTITION_ENUM_MAX_N
from .errors import (
    InvalidInstanceError,
    InvalidKError,
    InvalidPointError,
    InvalidScalarError,
    ShapeError,
    require_size,
)

Pair = Tuple[int, int]


class Edge(NamedTuple):
    u: int
    v: int
    weight: float

    @property
    def pair(self) -> Pair:
        return (self.u, self.v)


CanonicalEdgeList = Tuple[Edge, ...]


# ---------------------- pair layout ----------------------
def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def all_pairs(n: int) -> List[Pair]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def normalize_pair(pair: Sequence[int], n: int) -> Pair:
    i, j = int(pair[0]), int(pair[1])
    for point in (i, j):
        if not 1 <= point <= n:
            raise InvalidPointError(f"point {point} outside 1..{n}")
    if i == j:
        raise InvalidPointError(f"pair ({i}, {j}) is not a pair of distinct points")
    return (i, j) if i < j else (j, i)


def pair_index(n: int, i: int, j: int) -> int:
    return (i - 1) * (2 * n - i) // 2 + (j - i - 1)


# ---------------------- instances ----------------------
@dataclass(frozen=True)
class SimilarityInstance:
    n: int
    weights: Tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidInstanceError(f"need at least 2 points, got n={self.n!r}")
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != pair_count(self.n):
            raise InvalidInstanceError(
                f"expected {pair_count(self.n)} pair weights for n={self.n}, got {len(weights)}"
            )
        for (i, j), w in zip(all_pairs(self.n), weights):
            if not math.isfinite(w) or w <= 0:
                raise InvalidInstanceError(f"weight of pair ({i}, {j}) must be finite and > 0, got {w}")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_pairs(cls, n: int, weights: Mapping[Pair, float]) -> "SimilarityInstance":
        values = []
        normalized: Dict[Pair, float] = {}
        for pair, w in weights.items():
            key = normalize_pair(pair, n)
            if key in normalized:
                raise InvalidInstanceError(f"pair {key} given twice")
            normalized[key] = w
        for pair in all_pairs(n):
            if pair not in normalized:
                raise InvalidInstanceError(f"missing weight for pair {pair}")
            values.append(normalized[pair])
        return cls(n, tuple(values))

    @classmethod
    def from_matrix(cls, matrix) -> "SimilarityInstance":
        grid = np.asarray(matrix, dtype=float)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
            raise ShapeError(f"similarity matrix must be square, got shape {grid.shape}")
        n = grid.shape[0]
        return cls(n, tuple(float(grid[i - 1, j - 1]) for i, j in all_pairs(n)))

    # ---------------------- accessors ----------------------
    def weight(self, i: int, j: int) -> float:
        i, j = normalize_pair((i, j), self.n)
        return self.weights[pair_index(self.n, i, j)]

    def pairs(self) -> List[Pair]:
        return all_pairs(self.n)

    def items(self) -> Iterator[Tuple[Pair, float]]:
        return zip(all_pairs(self.n), self.weights)

    @property
    def points(self) -> Tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    @cached_property
    def matrix(self) -> np.ndarray:
        grid = np.zeros((self.n, self.n))
        rows, cols = np.triu_indices(self.n, k=1)
        grid[rows, cols] = self.weights
        grid[cols, rows] = self.weights
        grid.setflags(write=False)
        return grid

    @cached_property
    def rows(self) -> Tuple[Tuple[float, ...], ...]:
        return tuple(tuple(float(x) for x in row) for row in self.matrix)

    def total_weight(self) -> float:
        return math.fsum(self.weights)

    def min_weight(self) -> float:
        return min(self.weights)

    def max_weight(self) -> float:
        return max(self.weights)

    # ---------------------- derived instances ----------------------
    def map_weights(self, fn: Callable[[Pair, float], float]) -> "SimilarityInstance":
        return SimilarityInstance(self.n, tuple(fn(pair, w) for pair, w in self.items()))

    def replace(self, updates: Mapping[Pair, float]) -> "SimilarityInstance":
        values = list(self.weights)
        for pair, w in updates.items():
            i, j = normalize_pair(pair, self.n)
            values[pair_index(self.n, i, j)] = w
        return SimilarityInstance(self.n, tuple(values))

    def restrict(self, points: Sequence[int]) -> "SimilarityInstance":
        """Sub-instance on ``points`` (ascending), relabelled to ``1..len(points)``."""

        ordered = sorted(points)
        if len(ordered) < 2:
            raise InvalidInstanceError("a restriction needs at least 2 points")
        return SimilarityInstance(
            len(ordered),
            tuple(self.weight(ordered[a], ordered[b]) for a in range(len(ordered)) for b in range(a + 1, len(ordered))),
        )

    def to_edges(self) -> List[List[float]]:
        return [[i, j, w] for (i, j), w in self.items()]


def canonical_order(s: SimilarityInstance) -> CanonicalEdgeList:
    """All pairs by strictly decreasing weight, ties in ascending (i, j)."""

    edges = [Edge(i, j, w) for (i, j), w in s.items()]
    edges.sort(key=lambda e: (-e.weight, e.u, e.v))
    return tuple(edges)


def canonical_pairs(s: SimilarityInstance) -> Tuple[Pair, ...]:
    return tuple(e.pair for e in canonical_order(s))


def scale(s: SimilarityInstance, alpha: float) -> SimilarityInstance:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0:
        raise InvalidScalarError(f"scale factor must be > 0, got {alpha}")
    return SimilarityInstance(s.n, tuple(alpha * w for w in s.weights))


def monotone_transform(s: SimilarityInstance, rng: np.random.Generator) -> SimilarityInstance:
    """Apply a random strictly increasing map ``w -> a * w**p + b``.

    The map keeps every weight positive and the canonical pair sequence of
    instances without ties.
    """

    power = float(rng.uniform(0.25, 4.0))
    gain = float(rng.uniform(0.1, 10.0))
    offset = float(rng.uniform(0.0, 1.0))
    return s.map_weights(lambda _pair, w: gain * w**power + offset)


# ---------------------- partitionings ----------------------
class EdgeClass(str, Enum):
    INNER = "Inner"
    OUTER = "Outer"


@dataclass(frozen=True)
class Partitioning:
    """Canonical k-partitioning of ``1..n``.

    Blocks are sorted internally and ordered by their smallest member, so two
    equal partitionings always compare and hash equal.
    """

    blocks: Tuple[Tuple[int, ...], ...]
    _index: Dict[int, int] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        canonical = tuple(sorted((tuple(sorted(int(p) for p in block)) for block in self.blocks)))
        if not canonical or any(not block for block in canonical):
            raise InvalidInstanceError("partitioning blocks must be non-empty")

        seen = [p for block in canonical for p in block]
        n = len(seen)
        if len(set(seen)) != n:
            raise InvalidInstanceError("partitioning blocks must be disjoint")
        if set(seen) != set(range(1, n + 1)):
            raise InvalidInstanceError(f"partitioning must cover exactly 1..{n}")

        object.__setattr__(self, "blocks", canonical)
        object.__setattr__(
            self, "_index", {p: idx for idx, block in enumerate(canonical) for p in block}
        )

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> "Partitioning":
        return cls(tuple(tuple(block) for block in blocks))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partitioning":
        """Build from a 0-based list where ``labels[p-1]`` names the block of ``p``."""

        buckets: Dict[int, List[int]] = {}
        for point, label in enumerate(labels, start=1):
            buckets.setdefault(label, []).append(point)
        return cls.of(buckets.values())

    @property
    def n(self) -> int:
        return len(self._index)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def block_of(self, point: int) -> int:
        if point not in self._index:
            raise InvalidPointError(f"point {point} outside 1..{self.n}")
        return self._index[point]

    def same_block(self, i: int, j: int) -> bool:
        return self.block_of(i) == self.block_of(j)

    def labels(self) -> List[int]:
        return [self._index[p] for p in range(1, self.n + 1)]

    def relabel(self, mapping: Mapping[int, int]) -> "Partitioning":
        """Rename points through a bijection ``mapping`` on ``1..n``."""

        return Partitioning.of([mapping.get(p, p) for p in block] for block in self.blocks)

    def to_lists(self) -> List[List[int]]:
        return [list(block) for block in self.blocks]

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def classify_edge(pair: Sequence[int], gamma: Partitioning) -> EdgeClass:
    i, j = normalize_pair(pair, gamma.n)
    return EdgeClass.INNER if gamma.same_block(i, j) else EdgeClass.OUTER


def _require_same_points(s: SimilarityInstance, gamma: Partitioning) -> None:
    if gamma.n != s.n:
        raise ShapeError(f"partitioning covers {gamma.n} points but the instance has {s.n}")


def crossing_weight(s: SimilarityInstance, gamma: Partitioning) -> float:
    _require_same_points(s, gamma)
    return math.fsum(w for (i, j), w in s.items() if not gamma.same_block(i, j))


def lambda_objective(s: SimilarityInstance, gamma: Partitioning) -> float:
    _require_same_points(s, gamma)
    return math.fsum(w for (i, j), w in s.items() if gamma.same_block(i, j))


# ---------------------- gamma transformations ----------------------
def gamma_transform_sample(
    s: SimilarityInstance, gamma: Partitioning, rng: np.random.Generator
) -> SimilarityInstance:
    """Raise inner weights by a factor in [1, 2], lower outer ones by [0.5, 1]."""

    _require_same_points(s, gamma)
    m = pair_count(s.n)
    inner = rng.uniform(*INNER_FACTOR, size=m)
    outer = rng.uniform(*OUTER_FACTOR, size=m)
    values = []
    for idx, ((i, j), w) in enumerate(s.items()):
        factor = inner[idx] if gamma.same_block(i, j) else outer[idx]
        values.append(w * float(factor))
    return SimilarityInstance(s.n, tuple(values))


def is_gamma_transform(s: SimilarityInstance, s_prime: SimilarityInstance, gamma: Partitioning) -> bool:
    if s.n != s_prime.n:
        raise ShapeError(f"instances differ in size: {s.n} vs {s_prime.n}")
    _require_same_points(s, gamma)
    for ((i, j), before), after in zip(s.items(), s_prime.weights):
        if gamma.same_block(i, j):
            if after < before:
                return False
        elif after > before:
            return False
    return True


def richness_witness(gamma: Partitioning, n: int) -> SimilarityInstance:
    """Inner weights 4n^2, outer weights 1.

    Every inner pair outweighs all outer pairs together, so both Single-Linkage
    and Max-Sum return ``gamma`` on it.
    """

    if gamma.n != n:
        raise ShapeError(f"partitioning covers {gamma.n} points, expected {n}")
    heavy = float(4 * n * n)
    return SimilarityInstance(
        n, tuple(heavy if gamma.same_block(i, j) else 1.0 for i, j in all_pairs(n))
    )


def iter_partitionings(n: int, k: int) -> Iterator[Partitioning]:
    """Every k-partitioning of ``1..n`` once, in restricted-growth order."""

    if not isinstance(n, int) or n < 1:
        raise InvalidInstanceError(f"need at least one point, got n={n!r}")
    if not isinstance(k, int) or not 1 <= k <= n:
        raise InvalidKError(f"k must be in [1, {n}], got {k!r}")
    require_size(n, PARTITION_ENUM_MAX_N, "partition enumeration")

    labels = [0] * n

    def _extend(point: int, used: int) -> Iterator[Partitioning]:
        if point == n:
            if used == k:
                yield Partitioning.from_labels(labels)
            return
        remaining = n - point
        for label in range(used):
            if used + remaining - 1 >= k:
                labels[point] = label
                yield from _extend(point + 1, used)
        if used < k:
            labels[point] = used
            yield from _extend(point + 1, used + 1)

    labels[0] = 0
    yield from _extend(1, 1)


def enumerate_partitionings(n: int, k: int) -> List[Partitioning]:
    return list(iter_partitionings(n, k))


# ---------------------- random streams ----------------------
def stream_key(label: str) -> int:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def make_stream(seed: int, *keys) -> np.random.Generator:
    """Deterministic generator for ``(seed, keys...)``; strings are hashed."""

    spawn_key = tuple(stream_key(k) if isinstance(k, str) else int(k) for k in keys)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key))


def random_instance(n: int, rng: np.random.Generator) -> SimilarityInstance:
    if not isinstance(n, int) or n < 2:
        raise InvalidInstanceError(f"need at least 2 points, got n={n!r}")
    draws = 1.0 - rng.random(pair_count(n))
    return SimilarityInstance(n, tuple(float(w) for w in draws))

"""Symmetric set-function oracles and their exact minimizers."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import BRUTE_FORCE_MAX_N, SUBMODULAR_CHECK_MAX_N, VALUE_TOL
from .errors import InvalidInstanceError, InvalidPointError, ModelError, ShapeError, require_size
from .similarity import SimilarityInstance

log = logging.getLogger(__name__)

Subset = FrozenSet[int]


class SymmetricSetFunctionOracle:
    """Memoized evaluator ``f: subsets of 1..n -> float``."""

    def __init__(self, n: int, fn: Callable[[Subset], float], name: str = "oracle"):
        if not isinstance(n, int) or n < 1:
            raise InvalidInstanceError(f"ground set needs at least one point, got n={n!r}")
        self.n = n
        self.name = name
        self._fn = fn
        self._cache: Dict[Subset, float] = {}
        self.calls = 0

    def __call__(self, subset: Iterable[int]) -> float:
        key = frozenset(subset)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        for p in key:
            if not 1 <= p <= self.n:
                raise InvalidPointError(f"point {p} outside 1..{self.n}")
        self.calls += 1
        value = float(self._fn(key))
        self._cache[key] = value
        return value

    eval = __call__

    @property
    def ground(self) -> Subset:
        return frozenset(range(1, self.n + 1))

    def complement(self, subset: Iterable[int]) -> Subset:
        return self.ground - frozenset(subset)

    def __repr__(self) -> str:
        return f"SymmetricSetFunctionOracle(name={self.name!r}, n={self.n})"


def cut_oracle(s: SimilarityInstance) -> SymmetricSetFunctionOracle:
    rows = s.rows

    def crossing(subset: Subset) -> float:
        inside = [p - 1 for p in subset]
        outside = [q for q in range(s.n) if q + 1 not in subset]
        return math.fsum(rows[p][q] for p in inside for q in outside)

    return SymmetricSetFunctionOracle(s.n, crossing, name="cut")


# ---------------------- Gaussian mutual information ----------------------
@dataclass(frozen=True)
class GaussianModel:
    covariance: np.ndarray = field(repr=False)

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] < 1:
            raise ModelError(f"covariance must be a non-empty square matrix, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ModelError("covariance has non-finite entries")
        if not np.allclose(cov, cov.T, atol=VALUE_TOL, rtol=0.0):
            raise ModelError("covariance is not symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ModelError("covariance is not positive-definite") from exc
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @classmethod
    def from_samples(cls, samples) -> "GaussianModel":
        """Fit the sample covariance; rows are observations, columns are points."""

        data = np.asarray(samples, dtype=float)
        if data.ndim != 2 or data.shape[0] < 2:
            raise ModelError(f"need a 2-D sample table with at least two rows, got shape {data.shape}")
        return cls(np.atleast_2d(np.cov(data, rowvar=False)))

    @property
    def n(self) -> int:
        return self.covariance.shape[0]

    def log_det(self, points: Sequence[int]) -> float:
        idx = sorted(p - 1 for p in points)
        if not idx:
            return 0.0
        block = self.covariance[np.ix_(idx, idx)]
        chol = np.linalg.cholesky(block)
        return 2.0 * float(np.sum(np.log(np.diag(chol))))


def gaussian_mi_oracle(model: GaussianModel) -> SymmetricSetFunctionOracle:
    n = model.n
    full = model.log_det(range(1, n + 1))

    def mutual_information(subset: Subset) -> float:
        if not subset or len(subset) == n:
            return 0.0
        rest = [p for p in range(1, n + 1) if p not in subset]
        # mutual information is non-negative; clip rounding noise around 0
        return max(0.0, 0.5 * (model.log_det(subset) + model.log_det(rest) - full))

    return SymmetricSetFunctionOracle(n, mutual_information, name="gaussian-mi")


def parity_oracle(n: int) -> SymmetricSetFunctionOracle:
    """``|A| mod 2``: symmetric for even n, never submodular for n >= 3."""

    return SymmetricSetFunctionOracle(n, lambda subset: len(subset) % 2, name="parity")


# ---------------------- exhaustive checks ----------------------
def _points(mask: int, n: int) -> Subset:
    return frozenset(p for p in range(1, n + 1) if mask >> (p - 1) & 1)


def value_table(f: SymmetricSetFunctionOracle) -> np.ndarray:
    return np.array([f(_points(mask, f.n)) for mask in range(2**f.n)])


def _checked_table(f: SymmetricSetFunctionOracle, n: int) -> np.ndarray:
    if f.n != n:
        raise ShapeError(f"oracle is defined on {f.n} points, expected {n}")
    require_size(n, SUBMODULAR_CHECK_MAX_N, "exhaustive set-function check")
    return value_table(f)


def is_symmetric(f: SymmetricSetFunctionOracle, n: int, tol: float = VALUE_TOL) -> bool:
    table = _checked_table(f, n)
    full = 2**n - 1
    masks = np.arange(2**n)
    return bool(np.all(np.abs(table - table[full ^ masks]) <= tol))


def submodularity_witness(
    f: SymmetricSetFunctionOracle, n: int, tol: float = VALUE_TOL
) -> Optional[Tuple[Subset, Subset]]:
    """First (A, B) with f(A) + f(B) < f(A & B) + f(A | B), or None.

    Only pairs ``A = S + i``, ``B = S + j`` are inspected; violating one of
    those is equivalent to violating submodularity at all.
    """

    table = _checked_table(f, n)
    masks = np.arange(2**n)
    first: Optional[Tuple[int, int, int]] = None
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            base = masks[(masks & (bi | bj)) == 0]
            slack = table[base | bi] + table[base | bj] - table[base | bi | bj] - table[base]
            bad = np.flatnonzero(slack < -tol)
            if bad.size:
                candidate = (int(base[bad[0]]), i, j)
                if first is None or candidate < first:
                    first = candidate
    if first is None:
        return None
    base, i, j = first
    return _points(base | 1 << i, n), _points(base | 1 << j, n)


def is_submodular(f: SymmetricSetFunctionOracle, n: int, tol: float = VALUE_TOL) -> bool:
    return submodularity_witness(f, n, tol) is None


def exhaustive_minimize(f: SymmetricSetFunctionOracle, n: int) -> Tuple[Subset, float]:
    """Cheapest non-empty proper subset; the first in ascending mask order wins."""

    if f.n != n:
        raise ShapeError(f"oracle is defined on {f.n} points, expected {n}")
    if n < 2:
        raise InvalidInstanceError(f"need at least 2 points, got n={n}")
    require_size(n, BRUTE_FORCE_MAX_N, "exhaustive set-function minimization")
    best_value, best = math.inf, None
    for mask in range(1, 2**n - 1):
        value = f(_points(mask, n))
        if value < best_value:
            best_value, best = value, mask
    return _points(best, n), best_value


# ---------------------- Queyranne ----------------------
def _pendant_order(f: SymmetricSetFunctionOracle, groups: List[Subset]) -> List[Subset]:
    order = [groups[0]]
    grown = groups[0]
    remaining = list(groups[1:])
    while remaining:
        best_idx, best_key = 0, math.inf
        for idx, group in enumerate(remaining):
            key = f(grown | group) - f(group)
            if key < best_key:
                best_idx, best_key = idx, key
        chosen = remaining.pop(best_idx)
        order.append(chosen)
        grown = grown | chosen
    return order


def queyranne_minimize(f: SymmetricSetFunctionOracle, n: int) -> Tuple[Subset, float]:
    """Minimize a symmetric submodular ``f`` over non-trivial subsets.

    Each round orders the current groups by ``f(W + u) - f(u)``, starting at
    the group of point 1 with ties to the smallest id. The last group is a
    candidate; the last two groups are then merged. ``n - 1`` rounds.
    """

    if f.n != n:
        raise ShapeError(f"oracle is defined on {f.n} points, expected {n}")
    if n < 2:
        raise InvalidInstanceError(f"need at least 2 points, got n={n}")

    groups: List[Subset] = [frozenset([p]) for p in range(1, n + 1)]
    best, best_value = None, math.inf
    while len(groups) > 1:
        order = _pendant_order(f, groups)
        candidate = order[-1]
        value = f(candidate)
        if value < best_value:
            best, best_value = candidate, value
        merged = order[-2] | order[-1]
        groups = sorted(order[:-2] + [merged], key=min)
    log.debug("queyranne on %s (n=%d): %s -> %.6g after %d calls", f.name, n, sorted(best), best_value, f.calls)
    return best, best_value

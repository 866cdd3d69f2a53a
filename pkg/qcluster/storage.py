"""Instance files: edge lists, comma-separated matrices and sample tables."""
from __future__ import annotations

import logging
import math
from typing import Dict, List, Tuple

import numpy as np

from .config import VALUE_TOL
from .errors import InputError, ModelError, UsageError
from .similarity import Pair, SimilarityInstance, all_pairs
from .submodular import GaussianModel

log = logging.getLogger(__name__)

FORMATS = ("edges", "matrix", "samples")


def _read_lines(path: str) -> List[Tuple[int, str]]:
    """Non-blank, non-comment lines with their 1-based line numbers."""

    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    lines = []
    for number, line in enumerate(raw, start=1):
        text = line.split("#", 1)[0].strip()
        if text:
            lines.append((number, text))
    if not lines:
        raise InputError(f"{path} holds no data")
    return lines


def _number(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InputError(f"could not parse {token!r} as a number", line) from None
    if not math.isfinite(value):
        raise InputError(f"non-finite value {token!r}", line)
    return value


def _point(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputError(f"could not parse point id {token!r}", line) from None


def _parse_edges(path: str) -> SimilarityInstance:
    weights: Dict[Pair, float] = {}
    for number, text in _read_lines(path):
        parts = text.split()
        if len(parts) != 3:
            raise InputError(f"expected 'i j w', got {len(parts)} fields", number)
        i, j = _point(parts[0], number), _point(parts[1], number)
        w = _number(parts[2], number)
        if i < 1 or j < 1:
            raise InputError("point ids are 1-based", number)
        if i >= j:
            raise InputError(f"pair ({i}, {j}) must satisfy i < j", number)
        if w <= 0:
            raise InputError("non-positive weight", number)
        if (i, j) in weights:
            raise InputError(f"pair ({i}, {j}) given twice", number)
        weights[(i, j)] = w

    n = max(j for _, j in weights)
    for pair in all_pairs(n):
        if pair not in weights:
            raise InputError(f"missing pair {pair} for n={n}")
    return SimilarityInstance.from_pairs(n, weights)


def _parse_grid(path: str) -> Tuple[np.ndarray, List[int]]:
    rows, numbers = [], []
    for number, text in _read_lines(path):
        rows.append([_number(token.strip(), number) for token in text.split(",")])
        numbers.append(number)
    n = len(rows)
    for row, number in zip(rows, numbers):
        if len(row) != n:
            raise InputError(f"expected {n} columns, got {len(row)}", number)
    return np.array(rows, dtype=float), numbers


def _parse_matrix(path: str) -> SimilarityInstance:
    grid, numbers = _parse_grid(path)
    n = grid.shape[0]
    if n < 2:
        raise InputError("a similarity matrix needs at least 2 points", numbers[0])
    for i, j in all_pairs(n):
        upper, lower = grid[i - 1, j - 1], grid[j - 1, i - 1]
        if abs(upper - lower) > VALUE_TOL:
            raise InputError(f"asymmetric matrix: entry ({j}, {i}) is {lower} but ({i}, {j}) is {upper}", numbers[j - 1])
        if upper <= 0:
            raise InputError(f"non-positive weight for pair ({i}, {j})", numbers[i - 1])
    return SimilarityInstance.from_matrix(grid)


def load_instance(path: str, fmt: str = "edges") -> SimilarityInstance:
    if fmt == "edges":
        s = _parse_edges(path)
    elif fmt == "matrix":
        s = _parse_matrix(path)
    else:
        raise UsageError(f"similarity instances are read as edges or matrix, not {fmt!r}")
    log.info("loaded %s (%s): n=%d", path, fmt, s.n)
    return s


def load_covariance(path: str) -> GaussianModel:
    grid, _ = _parse_grid(path)
    try:
        return GaussianModel(grid)
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_samples(path: str) -> GaussianModel:
    """Rows are observations, columns are the points to cluster."""

    rows, width = [], None
    for number, text in _read_lines(path):
        row = [_number(token.strip(), number) for token in text.split(",")]
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"expected {width} columns, got {len(row)}", number)
        rows.append(row)
    try:
        return GaussianModel.from_samples(rows)
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_model(path: str, fmt: str = "matrix") -> GaussianModel:
    if fmt == "matrix":
        return load_covariance(path)
    if fmt == "samples":
        return load_samples(path)
    raise UsageError(f"Gaussian models are read as matrix or samples, not {fmt!r}")

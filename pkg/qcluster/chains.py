"""Output-preserving transformation chains.

A chain starts from the well-separated instance that realizes a reference
partitioning and walks it, one Gamma-transformation at a time, towards an
instance whose spanning tree or cut tree has the same minimum k-cut as the
original. A partitioning function that satisfies the axioms must return the
same partitioning at every step.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from .clusterers import max_sum_tree, single_linkage
from .config import CHAIN_MAX_N
from .errors import PreconditionError, QClusterError, require_k, require_size
from .similarity import (
    EdgeClass,
    Pair,
    Partitioning,
    SimilarityInstance,
    canonical_order,
    canonical_pairs,
    classify_edge,
    is_gamma_transform,
    richness_witness,
    scale,
)
from .trees import WeightedTree, gomory_hu_cut_tree, mst, tree_min_kcut

log = logging.getLogger(__name__)


class ChainMode(str, Enum):
    MST = "MST"
    MCT = "MCT"

    def tree(self, s: SimilarityInstance) -> WeightedTree:
        return mst(s) if self is ChainMode.MST else gomory_hu_cut_tree(s)


# ---------------------- swap move ----------------------
def swap_adjacent(s: SimilarityInstance, p: int, gamma: Partitioning) -> SimilarityInstance:
    """Exchange canonical positions ``p`` and ``p + 1`` (1-based).

    Two outer edges swap by shrinking the heavier one into the gap below its
    neighbour; two inner edges swap by raising the lighter one into the gap
    above. Either way the result is a Gamma-transformation of ``s``.
    """

    order = canonical_order(s)
    m = len(order)
    if not 1 <= p < m:
        raise PreconditionError(f"swap position must be in 1..{m - 1}, got {p}")
    first, second = order[p - 1], order[p]
    cls_first, cls_second = classify_edge(first.pair, gamma), classify_edge(second.pair, gamma)
    if cls_first is not cls_second:
        raise PreconditionError(
            f"positions {p} and {p + 1} mix {cls_first.value} {first.pair} and {cls_second.value} {second.pair}"
        )

    if cls_first is EdgeClass.OUTER:
        floor = order[p + 1].weight if p + 1 < m else 0.0
        update = {first.pair: (floor + second.weight) / 2.0}
    else:
        ceiling = order[p - 2].weight if p >= 2 else 2.0 * first.weight
        update = {second.pair: (first.weight + ceiling) / 2.0}

    result = s.replace(update)
    expected = list(e.pair for e in order)
    expected[p - 1], expected[p] = expected[p], expected[p - 1]
    if list(canonical_pairs(result)) != expected:
        raise PreconditionError(f"no room to swap {first.pair} and {second.pair} without ties")
    return result


def _sort_region(
    current: SimilarityInstance, gamma: Partitioning, target_rank: Dict[Pair, int], edge_class: EdgeClass
) -> SimilarityInstance:
    swapped = True
    while swapped:
        swapped = False
        order = canonical_order(current)
        for p in range(1, len(order)):
            a, b = order[p - 1], order[p]
            if classify_edge(a.pair, gamma) is not edge_class or classify_edge(b.pair, gamma) is not edge_class:
                continue
            if target_rank[a.pair] > target_rank[b.pair]:
                current = swap_adjacent(current, p, gamma)
                swapped = True
                break
    return current


# ---------------------- chain construction ----------------------
@dataclass
class ChainStep:
    label: str
    instance: SimilarityInstance
    output: Optional[Partitioning] = None
    gamma_transform: Optional[bool] = None


@dataclass
class ChainTrace:
    mode: ChainMode
    function_name: str
    k: int
    reference: Partitioning
    steps: List[ChainStep] = field(default_factory=list)
    original_output: Optional[Partitioning] = None
    tree_partition: Optional[Partitioning] = None
    final_tree_partition: Optional[Partitioning] = None
    issues: List[str] = field(default_factory=list)

    @property
    def outputs(self) -> List[Optional[Partitioning]]:
        return [step.output for step in self.steps]

    @property
    def outputs_equal(self) -> bool:
        outputs = self.outputs
        return bool(outputs) and all(out is not None and out == outputs[0] for out in outputs)

    @property
    def premise_holds(self) -> bool:
        return bool(self.steps) and self.steps[0].output == self.reference

    @property
    def tree_cut_matches(self) -> bool:
        return self.final_tree_partition is not None and self.final_tree_partition == self.tree_partition

    @property
    def transforms_valid(self) -> bool:
        return all(step.gamma_transform is not False for step in self.steps)

    @property
    def complete(self) -> bool:
        return len(self.steps) == 5

    @property
    def preserved(self) -> bool:
        return self.complete and self.outputs_equal and self.tree_cut_matches and self.transforms_valid


def replay_transformations(
    s: SimilarityInstance, gamma: Partitioning, mode: ChainMode
) -> Tuple[List[Tuple[str, SimilarityInstance, Optional[bool]]], List[str]]:
    """Instances s1..s5 anchored at ``gamma``, plus any precondition failures.

    Each entry carries whether the step is a Gamma-transformation of the
    previous one (None for steps that are not meant to be).
    """

    mode = ChainMode(mode)
    steps: List[Tuple[str, SimilarityInstance, Optional[bool]]] = []
    issues: List[str] = []

    s1 = richness_witness(gamma, s.n)
    steps.append(("s1", s1, None))

    # step 2: every weight well below the lightest pair of s
    alpha = s.min_weight() / (4.0 * s1.max_weight())
    s2 = scale(s1, alpha)
    steps.append(("s2", s2, None))

    inner = {pair: w for pair, w in s.items() if gamma.same_block(*pair)}
    s3 = s2.replace(inner)
    steps.append(("s3", s3, is_gamma_transform(s2, s3, gamma)))

    # step 4: distinct outer weights whose total stays under the lightest inner weight
    outer_order = [e for e in canonical_order(s3) if not gamma.same_block(e.u, e.v)]
    s4 = s3
    if outer_order:
        q = len(outer_order)
        level = outer_order[0].weight
        lightest_inner = min(inner.values()) if inner else level
        beta = min(1.0, lightest_inner / (2.0 * q * level))
        c = beta * level
        s4 = s3.replace({e.pair: c * (1.0 - i / (2.0 * q)) for i, e in enumerate(outer_order, start=1)})
    steps.append(("s4", s4, is_gamma_transform(s3, s4, gamma)))

    target_rank = {e.pair: rank for rank, e in enumerate(canonical_order(s))}
    s5 = s4
    try:
        s5 = _sort_region(s5, gamma, target_rank, EdgeClass.OUTER)
        if mode is ChainMode.MST:
            s5 = _sort_region(s5, gamma, target_rank, EdgeClass.INNER)
    except PreconditionError as exc:
        issues.append(f"s5: {exc}")
    steps.append(("s5", s5, is_gamma_transform(s4, s5, gamma)))
    return steps, issues


def chain_reference(mode: ChainMode) -> Callable[[SimilarityInstance, int], Partitioning]:
    return single_linkage if ChainMode(mode) is ChainMode.MST else max_sum_tree


def uniqueness_chain(F, s: SimilarityInstance, k: int, mode) -> ChainTrace:
    """Replay the output-preserving chain for ``F`` on ``s`` and record every step."""

    mode = ChainMode(mode)
    require_size(s.n, CHAIN_MAX_N, "uniqueness chain")
    require_k(k, s.n)
    gamma = chain_reference(mode)(s, k)
    trace = ChainTrace(mode=mode, function_name=getattr(F, "name", getattr(F, "__name__", "F")), k=k, reference=gamma)

    steps, trace.issues = replay_transformations(s, gamma, mode)
    for label, instance, transform_ok in steps:
        step = ChainStep(label=label, instance=instance, gamma_transform=transform_ok)
        try:
            step.output = F(instance, k)
        except QClusterError as exc:
            trace.issues.append(f"{label}: {exc}")
        if transform_ok is False:
            trace.issues.append(f"{label}: not a Gamma-transformation of the previous step")
        trace.steps.append(step)

    if trace.steps and trace.steps[0].output != gamma:
        trace.issues.append(f"s1: output {trace.steps[0].output} differs from reference {gamma}")

    trace.original_output = F(s, k)
    trace.tree_partition = tree_min_kcut(mode.tree(s), k).partition
    trace.final_tree_partition = tree_min_kcut(mode.tree(trace.steps[-1].instance), k).partition
    if not trace.tree_cut_matches:
        trace.issues.append(
            f"tree cut of s5 {trace.final_tree_partition} differs from tree cut of s {trace.tree_partition}"
        )
    log.debug("%s chain for %s: %d issues", mode.value, trace.function_name, len(trace.issues))
    return trace

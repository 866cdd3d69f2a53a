"""JSON documents emitted by the command line.

Weights are printed with exactly 9 decimals and keys are sorted on rendering,
so equal inputs always produce byte-identical output.
"""
from __future__ import annotations

from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional

from .axioms import Counterexample, GridResult, PropertyReport
from .logger import FixedFloat
from .similarity import Pair, Partitioning, SimilarityInstance
from .trees import WeightedTree

DECIMALS = FixedFloat.decimals


def fmt_weight(value: float) -> FixedFloat:
    return FixedFloat(round(float(value), DECIMALS))


def clusters(gamma: Partitioning) -> List[List[int]]:
    return gamma.to_lists()


def instance_record(s: SimilarityInstance) -> Dict[str, Any]:
    return {"n": s.n, "edges": [[i, j, fmt_weight(w)] for (i, j), w in s.items()]}


def cluster_document(n: int, k: int, algorithm: str, gamma: Partitioning) -> Dict[str, Any]:
    return {"n": n, "k": k, "algorithm": algorithm, "clusters": clusters(gamma)}


def tree_document(kind: str, tree: WeightedTree) -> Dict[str, Any]:
    return {
        "kind": kind,
        "edges": [{"u": e.u, "v": e.v, "w": fmt_weight(e.weight)} for e in tree.edges],
    }


def counterexample_record(ce: Optional[Counterexample]) -> Optional[Dict[str, Any]]:
    if ce is None:
        return None
    return {
        "k": ce.k,
        "expected": clusters(ce.expected),
        "actual": clusters(ce.actual),
        "detail": ce.detail,
        "structural": ce.structural,
        "instances": [instance_record(s) for s in ce.instances],
    }


def report_record(report: PropertyReport) -> Dict[str, Any]:
    return {
        "function": report.function_name,
        "property": report.property_name.value,
        "verdict": report.verdict.value,
        "trials": report.trials,
        "discarded": report.discarded,
        "note": report.note,
        "counterexample": counterexample_record(report.counterexample),
    }


def grid_summary(grid: GridResult) -> Dict[str, Any]:
    return {"summary": grid.summary(), "matched": grid.matched, "total": grid.total, "matches": grid.matches}


def min_kcut_document(k: int, value: float, gamma: Partitioning) -> Dict[str, Any]:
    return {"oracle": "minkcut", "k": k, "value": fmt_weight(value), "clusters": clusters(gamma)}


def max_sum_document(k: int, objective: float, gamma: Partitioning) -> Dict[str, Any]:
    return {"oracle": "maxsum", "k": k, "lambda": fmt_weight(objective), "clusters": clusters(gamma)}


def pairwise_cuts_document(cuts: Mapping[Pair, float]) -> Dict[str, Any]:
    return {
        "oracle": "pairwise-cuts",
        "cuts": [{"u": u, "v": v, "value": fmt_weight(value)} for (u, v), value in sorted(cuts.items())],
    }


def queyranne_document(subset: FrozenSet[int], value: float, exhaustive: float) -> Dict[str, Any]:
    return {
        "oracle": "queyranne",
        "subset": sorted(subset),
        "value": fmt_weight(value),
        "exhaustive_value": fmt_weight(exhaustive),
    }


def records(reports: Iterable[PropertyReport]) -> List[Dict[str, Any]]:
    return [report_record(r) for r in reports]

"""Randomized checkers for the clustering axioms and tree-consistency properties.

Sampling can refute a property but never prove it, so a passing check reports
``Satisfied-on-trials``: no violation was found in the trials that ran.
Every trial draws from its own stream derived from ``(seed, property, index)``,
which gives all functions the same instances for a given seed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chains import ChainMode, chain_reference, replay_transformations
from .clusterers import PartitioningFunction, get_function, max_sum_tree
from .config import (
    AXIOM_TRIALS,
    DEFAULT_SEED,
    MCT_INDEPENDENT_DRAWS,
    RICHNESS_BUDGET,
    RICHNESS_K,
    RICHNESS_MAX_N,
    RICHNESS_N,
    SCALE_ALPHA_MAX,
    SCALE_ALPHAS,
    TREE_TRIALS,
    TRIAL_N_RANGE,
)
from .errors import require_k, require_size
from .similarity import (
    Partitioning,
    SimilarityInstance,
    enumerate_partitionings,
    gamma_transform_sample,
    is_gamma_transform,
    make_stream,
    monotone_transform,
    random_instance,
    richness_witness,
    scale,
)
from .trees import mst, tree_min_kcut

log = logging.getLogger(__name__)


class PropertyName(str, Enum):
    SCALE_INVARIANCE = "ScaleInvariance"
    K_RICHNESS = "kRichness"
    CONSISTENCY = "Consistency"
    MST_CONSISTENCY = "MSTConsistency"
    MCT_CONSISTENCY = "MCTConsistency"
    ORDER_INVARIANCE = "OrderInvariance"


class Verdict(str, Enum):
    SATISFIED = "Satisfied-on-trials"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Counterexample:
    """Witness for a Violated verdict.

    Two instances mean ``F(instances[0], k) == expected`` while
    ``F(instances[1], k) == actual``. A single instance means F returned
    ``actual`` where the target ``expected`` was wanted.
    """

    instances: Tuple[SimilarityInstance, ...]
    k: int
    expected: Partitioning
    actual: Partitioning
    detail: str = ""
    structural: bool = False

    def recheck(self, F: Callable[[SimilarityInstance, int], Partitioning]) -> bool:
        """Re-run ``F`` on the stored instances and confirm the discrepancy."""

        if len(self.instances) == 2:
            before, after = (F(inst, self.k) for inst in self.instances)
            return before == self.expected and after == self.actual and before != after
        (only,) = self.instances
        return F(only, self.k) == self.actual and self.actual != self.expected


@dataclass
class PropertyReport:
    function_name: str
    property_name: PropertyName
    verdict: Verdict
    trials: int
    discarded: int = 0
    counterexample: Optional[Counterexample] = None
    note: str = ""

    @property
    def satisfied(self) -> bool:
        return self.verdict is Verdict.SATISFIED


# ---------------------- trial plumbing ----------------------
def _draw_trial(
    seed: int,
    prop: PropertyName,
    index: int,
    n_range: Tuple[int, int],
    k_values: Optional[Sequence[int]],
) -> Tuple[np.random.Generator, SimilarityInstance, int]:
    rng = make_stream(seed, prop.value, index)
    lo, hi = n_range
    n = int(rng.integers(lo, hi + 1))
    if k_values:
        usable = [k for k in k_values if 1 <= k <= n]
        k = int(usable[int(rng.integers(len(usable)))]) if usable else 2
    else:
        k = int(rng.integers(2, n)) if n > 2 else 2
    return rng, random_instance(n, rng), k


def _finish(report: PropertyReport) -> PropertyReport:
    log.info(
        "%s / %s: %s after %d trials (%d discarded)",
        report.function_name,
        report.property_name.value,
        report.verdict.value,
        report.trials,
        report.discarded,
    )
    return report


def _pairwise_check(
    F: PartitioningFunction,
    prop: PropertyName,
    trials: int,
    seed: int,
    n_range: Tuple[int, int],
    k_values: Optional[Sequence[int]],
    perturb: Callable[[np.random.Generator, SimilarityInstance, int], List[Tuple[SimilarityInstance, str]]],
) -> PropertyReport:
    """Shared loop: Violated on the first perturbed instance that changes F's output.

    ``perturb`` returns the instances to compare against ``s``; an empty list
    discards the trial. Without explicit ``k_values`` the function's own
    ``trial_k`` applies.
    """

    k_values = k_values or F.trial_k
    evaluated = discarded = 0
    for index in range(trials):
        rng, s, k = _draw_trial(seed, prop, index, n_range, k_values)
        variants = perturb(rng, s, k)
        if not variants:
            discarded += 1
            log.debug("%s trial %d discarded", prop.value, index)
            continue
        evaluated += 1
        base = F(s, k)
        for variant, detail in variants:
            out = F(variant, k)
            if out != base:
                witness = Counterexample((s, variant), k, base, out, detail=detail)
                return _finish(PropertyReport(F.name, prop, Verdict.VIOLATED, evaluated, discarded, witness))

    verdict = Verdict.SATISFIED if evaluated else Verdict.INCONCLUSIVE
    note = "" if evaluated else "every trial was discarded"
    return _finish(PropertyReport(F.name, prop, verdict, evaluated, discarded, note=note))


# ---------------------- axioms ----------------------
def check_scale_invariance(
    F: PartitioningFunction,
    trials: int = AXIOM_TRIALS,
    seed: int = DEFAULT_SEED,
    n_range: Tuple[int, int] = TRIAL_N_RANGE,
    k_values: Optional[Sequence[int]] = None,
) -> PropertyReport:
    def perturb(rng, s, k):
        alphas = list(SCALE_ALPHAS) + [SCALE_ALPHA_MAX * (1.0 - float(rng.random()))]
        return [(scale(s, alpha), f"alpha={alpha:.9g}") for alpha in alphas]

    return _pairwise_check(F, PropertyName.SCALE_INVARIANCE, trials, seed, n_range, k_values, perturb)


def check_consistency(
    F: PartitioningFunction,
    trials: int = AXIOM_TRIALS,
    seed: int = DEFAULT_SEED,
    n_range: Tuple[int, int] = TRIAL_N_RANGE,
    k_values: Optional[Sequence[int]] = None,
) -> PropertyReport:
    def perturb(rng, s, k):
        gamma = F(s, k)
        s_prime = gamma_transform_sample(s, gamma, rng)
        if not is_gamma_transform(s, s_prime, gamma):
            log.error("sampler produced a non-transformation for %s", gamma)
            return []
        return [(s_prime, f"transformation of {gamma}")]

    return _pairwise_check(F, PropertyName.CONSISTENCY, trials, seed, n_range, k_values, perturb)


def check_order_invariance(
    F: PartitioningFunction,
    trials: int = AXIOM_TRIALS,
    seed: int = DEFAULT_SEED,
    n_range: Tuple[int, int] = TRIAL_N_RANGE,
    k_values: Optional[Sequence[int]] = None,
) -> PropertyReport:
    def perturb(rng, s, k):
        return [(monotone_transform(s, rng), "strictly increasing weight map")]

    return _pairwise_check(F, PropertyName.ORDER_INVARIANCE, trials, seed, n_range, k_values, perturb)


def check_k_richness(
    F: PartitioningFunction,
    n: int = RICHNESS_N,
    k: int = RICHNESS_K,
    budget: int = RICHNESS_BUDGET,
    seed: int = DEFAULT_SEED,
) -> PropertyReport:
    """Try to reach every k-partitioning of ``1..n`` as an output of ``F``.

    Well-separated witnesses are tried first, then up to ``budget`` random
    instances per missing target. A miss is reported Violated only for
    functions known to ignore their input; otherwise it is Inconclusive.
    """

    require_size(n, RICHNESS_MAX_N, "k-richness check")
    require_k(k, n)
    targets = enumerate_partitionings(n, k)
    attained: Dict[Partitioning, SimilarityInstance] = {}
    evaluations = 0

    for gamma in targets:
        witness = richness_witness(gamma, n)
        attained.setdefault(F(witness, k), witness)
        evaluations += 1

    rng = make_stream(seed, PropertyName.K_RICHNESS.value, n, k)
    for gamma in targets:
        tries = 0
        while gamma not in attained and tries < budget:
            s = random_instance(n, rng)
            attained.setdefault(F(s, k), s)
            evaluations += 1
            tries += 1

    missing = [gamma for gamma in targets if gamma not in attained]
    if not missing:
        note = f"all {len(targets)} partitionings attained"
        return _finish(PropertyReport(F.name, PropertyName.K_RICHNESS, Verdict.SATISFIED, evaluations, note=note))

    target = missing[0]
    witness = richness_witness(target, n)
    actual = F(witness, k)
    fixed = F.fixed(n, k) if F.fixed else None
    if fixed is not None:
        detail = f"output is always {fixed}; {len(missing)} of {len(targets)} partitionings unreachable"
        ce = Counterexample((witness,), k, target, actual, detail=detail, structural=True)
        return _finish(PropertyReport(F.name, PropertyName.K_RICHNESS, Verdict.VIOLATED, evaluations, counterexample=ce))

    note = f"{len(missing)} of {len(targets)} partitionings not attained within budget {budget}"
    ce = Counterexample((witness,), k, target, actual, detail=note)
    return _finish(
        PropertyReport(F.name, PropertyName.K_RICHNESS, Verdict.INCONCLUSIVE, evaluations, counterexample=ce, note=note)
    )


# ---------------------- tree consistency ----------------------
def check_mst_consistency(
    F: PartitioningFunction,
    trials: int = TREE_TRIALS,
    seed: int = DEFAULT_SEED,
    n_range: Tuple[int, int] = TRIAL_N_RANGE,
    k_values: Optional[Sequence[int]] = None,
) -> PropertyReport:
    def perturb(rng, s, k):
        s_prime = monotone_transform(s, rng)
        if tree_min_kcut(mst(s), k).partition != tree_min_kcut(mst(s_prime), k).partition:
            return []
        return [(s_prime, "same MST minimum k-cut")]

    return _pairwise_check(F, PropertyName.MST_CONSISTENCY, trials, seed, n_range, k_values, perturb)


def check_mct_consistency(
    F: PartitioningFunction,
    trials: int = TREE_TRIALS,
    seed: int = DEFAULT_SEED,
    n_range: Tuple[int, int] = TRIAL_N_RANGE,
    k_values: Optional[Sequence[int]] = None,
) -> PropertyReport:
    def perturb(rng, s, k):
        reference = chain_reference(ChainMode.MCT)(s, k)
        variants = []
        steps, issues = replay_transformations(s, reference, ChainMode.MCT)
        s_prime = steps[-1][1]
        if not issues and max_sum_tree(s_prime, k) == reference:
            variants.append((s_prime, "chain replay with the same minimum cut tree k-cut"))
        for _ in range(MCT_INDEPENDENT_DRAWS):
            other = random_instance(s.n, rng)
            if max_sum_tree(other, k) == reference:
                variants.append((other, "independent instance with the same minimum cut tree k-cut"))
        return variants

    return _pairwise_check(F, PropertyName.MCT_CONSISTENCY, trials, seed, n_range, k_values, perturb)


# ---------------------- clustering-function verdict ----------------------
@dataclass
class ClusteringVerdict:
    function_name: str
    reports: List[PropertyReport]

    @property
    def is_clustering_function(self) -> bool:
        return all(r.satisfied for r in self.reports)


def is_clustering_function(
    F: PartitioningFunction,
    trials: int = AXIOM_TRIALS,
    seed: int = DEFAULT_SEED,
    richness_n: int = RICHNESS_N,
    richness_k: int = RICHNESS_K,
    budget: int = RICHNESS_BUDGET,
) -> ClusteringVerdict:
    """Scale-Invariance, k-Richness and Consistency together."""

    return ClusteringVerdict(
        F.name,
        [
            check_scale_invariance(F, trials, seed),
            check_k_richness(F, richness_n, richness_k, budget, seed),
            check_consistency(F, trials, seed),
        ],
    )


# ---------------------- verdict grid ----------------------
GRID_FUNCTIONS = ("sl", "maxsum", "mst-cuts", "mct-cuts", "constant")
GRID_PROPERTIES = (
    PropertyName.CONSISTENCY,
    PropertyName.K_RICHNESS,
    PropertyName.MST_CONSISTENCY,
    PropertyName.MCT_CONSISTENCY,
)

_T, _F = True, False
# True: the property holds; False: it fails; missing: no claim either way
EXPECTED: Dict[str, Dict[PropertyName, bool]] = {
    "sl": {
        PropertyName.SCALE_INVARIANCE: _T,
        PropertyName.CONSISTENCY: _T,
        PropertyName.K_RICHNESS: _T,
        PropertyName.MST_CONSISTENCY: _T,
        PropertyName.MCT_CONSISTENCY: _F,
        PropertyName.ORDER_INVARIANCE: _T,
    },
    "maxsum": {
        PropertyName.SCALE_INVARIANCE: _T,
        PropertyName.CONSISTENCY: _T,
        PropertyName.K_RICHNESS: _T,
        PropertyName.MST_CONSISTENCY: _F,
        PropertyName.MCT_CONSISTENCY: _T,
        PropertyName.ORDER_INVARIANCE: _F,
    },
    "mst-cuts": {
        PropertyName.SCALE_INVARIANCE: _T,
        PropertyName.CONSISTENCY: _F,
        PropertyName.K_RICHNESS: _T,
        PropertyName.MST_CONSISTENCY: _T,
        PropertyName.MCT_CONSISTENCY: _F,
        PropertyName.ORDER_INVARIANCE: _T,
    },
    "mct-cuts": {
        PropertyName.SCALE_INVARIANCE: _T,
        PropertyName.CONSISTENCY: _F,
        PropertyName.K_RICHNESS: _T,
        PropertyName.MST_CONSISTENCY: _F,
        PropertyName.MCT_CONSISTENCY: _T,
        PropertyName.ORDER_INVARIANCE: _F,
    },
    "constant": {
        PropertyName.SCALE_INVARIANCE: _T,
        PropertyName.CONSISTENCY: _T,
        PropertyName.K_RICHNESS: _F,
        PropertyName.MST_CONSISTENCY: _T,
        PropertyName.MCT_CONSISTENCY: _T,
        PropertyName.ORDER_INVARIANCE: _T,
    },
    "maxsum-tree": {
        PropertyName.SCALE_INVARIANCE: _T,
        PropertyName.K_RICHNESS: _T,
        PropertyName.MST_CONSISTENCY: _F,
        PropertyName.MCT_CONSISTENCY: _T,
    },
    "threshold": {
        PropertyName.SCALE_INVARIANCE: _F,
    },
}


def expected_verdict(function_name: str, prop: PropertyName) -> Optional[Verdict]:
    claim = EXPECTED.get(function_name, {}).get(prop)
    if claim is None:
        return None
    return Verdict.SATISFIED if claim else Verdict.VIOLATED


def matches_expectation(report: PropertyReport) -> bool:
    expected = expected_verdict(report.function_name, report.property_name)
    return expected is None or report.verdict is expected


@dataclass
class LabSettings:
    trials: int = AXIOM_TRIALS
    tree_trials: int = TREE_TRIALS
    seed: int = DEFAULT_SEED
    n_range: Tuple[int, int] = TRIAL_N_RANGE
    richness_n: int = RICHNESS_N
    richness_k: int = RICHNESS_K
    richness_budget: int = RICHNESS_BUDGET
    k_values: Optional[Tuple[int, ...]] = None


def run_property(F: PartitioningFunction, prop: PropertyName, settings: LabSettings) -> PropertyReport:
    common = dict(seed=settings.seed, n_range=settings.n_range, k_values=settings.k_values)
    if prop is PropertyName.SCALE_INVARIANCE:
        return check_scale_invariance(F, settings.trials, **common)
    if prop is PropertyName.CONSISTENCY:
        return check_consistency(F, settings.trials, **common)
    if prop is PropertyName.ORDER_INVARIANCE:
        return check_order_invariance(F, settings.trials, **common)
    if prop is PropertyName.MST_CONSISTENCY:
        return check_mst_consistency(F, settings.tree_trials, **common)
    if prop is PropertyName.MCT_CONSISTENCY:
        return check_mct_consistency(F, settings.tree_trials, **common)
    return check_k_richness(F, settings.richness_n, settings.richness_k, settings.richness_budget, settings.seed)


SUITE = (
    PropertyName.SCALE_INVARIANCE,
    PropertyName.K_RICHNESS,
    PropertyName.CONSISTENCY,
    PropertyName.MST_CONSISTENCY,
    PropertyName.MCT_CONSISTENCY,
)


def run_suite(F: PartitioningFunction, settings: LabSettings, extended: bool = False) -> List[PropertyReport]:
    props = SUITE + ((PropertyName.ORDER_INVARIANCE,) if extended else ())
    return [run_property(F, prop, settings) for prop in props]


@dataclass
class GridResult:
    reports: Dict[str, Dict[PropertyName, PropertyReport]] = field(default_factory=dict)

    def cells(self) -> List[PropertyReport]:
        return [self.reports[name][prop] for name in GRID_FUNCTIONS for prop in GRID_PROPERTIES]

    @property
    def matched(self) -> int:
        return sum(1 for report in self.cells() if matches_expectation(report))

    @property
    def total(self) -> int:
        return len(GRID_FUNCTIONS) * len(GRID_PROPERTIES)

    @property
    def matches(self) -> bool:
        return self.matched == self.total

    def pattern(self) -> Dict[str, Tuple[bool, ...]]:
        return {
            name: tuple(self.reports[name][prop].satisfied for prop in GRID_PROPERTIES) for name in GRID_FUNCTIONS
        }

    def summary(self) -> str:
        return f"grid matches expected pattern: {self.matched}/{self.total}"


def verdict_grid(settings: Optional[LabSettings] = None) -> GridResult:
    settings = settings or LabSettings()
    grid = GridResult()
    for name in GRID_FUNCTIONS:
        F = get_function(name)
        grid.reports[name] = {prop: run_property(F, prop, settings) for prop in GRID_PROPERTIES}
    log.info(grid.summary())
    return grid


def expected_pattern() -> Dict[str, Tuple[bool, ...]]:
    return {name: tuple(EXPECTED[name][prop] for prop in GRID_PROPERTIES) for name in GRID_FUNCTIONS}


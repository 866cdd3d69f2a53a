"""Command line: cluster, tree, axioms and oracle.

Exit codes: 0 success, 1 input or usage error, 2 a property verdict that does
not match its expected value.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import reporting
from .axioms import LabSettings, matches_expectation, run_suite, verdict_grid
from .clusterers import FUNCTIONS, get_function, max_sum_approx, max_sum_exact, max_sum_tree, q_cluster, single_linkage
from .config import SEED_MAX, load_lab_settings
from .errors import QClusterError, UsageError
from .flow import brute_force_min_kcut, pairwise_min_cuts
from .logger import configure_logging, render, write_json, write_jsonl
from .similarity import lambda_objective
from .storage import load_instance, load_model
from .submodular import cut_oracle, exhaustive_minimize, gaussian_mi_oracle, queyranne_minimize
from .trees import gomory_hu_cut_tree, mst

log = logging.getLogger("qcluster.cli")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MISMATCH = 2

ALGORITHMS = {
    "sl": single_linkage,
    "maxsum": max_sum_approx,
    "maxsum-exact": max_sum_exact,
    "maxsum-tree": max_sum_tree,
}
MDL_ALGORITHM = "qcluster-mdl"
ORACLES = ("minkcut", "maxsum", "pairwise-cuts", "queyranne")


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so every failure maps to exit 1."""

    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    name: Optional[str] = None
    k: Optional[int] = None
    input: Optional[str] = None
    fmt: str = "edges"
    seed: int = 0
    trials: Optional[int] = None
    tree_trials: Optional[int] = None
    output: Optional[str] = None
    grid: bool = False
    extended: bool = False


def _build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--output", help="write results to this file instead of stdout")
    common.add_argument("--log-level", choices=["debug", "info", "warning", "error"], default=None)

    p = ArgumentParser(prog="qcluster", description="Q-clustering engine and axiom laboratory.")
    sub = p.add_subparsers(dest="command", required=True)

    cluster = sub.add_parser("cluster", parents=[common], help="partition an instance")
    cluster.add_argument("--algo", required=True, choices=sorted(ALGORITHMS) + [MDL_ALGORITHM])
    cluster.add_argument("--k", required=True, type=int)
    cluster.add_argument("--input", required=True)
    cluster.add_argument("--format", dest="fmt", choices=["edges", "matrix", "samples"], default=None)

    tree = sub.add_parser("tree", parents=[common], help="build a spanning or cut tree")
    tree.add_argument("--kind", required=True, choices=["mst", "mct"])
    tree.add_argument("--input", required=True)
    tree.add_argument("--format", dest="fmt", choices=["edges", "matrix"], default="edges")

    axioms = sub.add_parser("axioms", parents=[common], help="run property checks")
    axioms.add_argument("--function", choices=sorted(FUNCTIONS))
    axioms.add_argument("--grid", action="store_true", help="run every grid function against every grid property")
    axioms.add_argument("--extended", action="store_true", help="also check invariance under monotone maps")
    axioms.add_argument("--trials", type=int, default=None)
    axioms.add_argument("--tree-trials", type=int, default=None)
    axioms.add_argument("--seed", type=int, default=None)

    oracle = sub.add_parser("oracle", parents=[common], help="exhaustive reference answers")
    oracle.add_argument("--which", required=True, choices=list(ORACLES))
    oracle.add_argument("--input", required=True)
    oracle.add_argument("--format", dest="fmt", choices=["edges", "matrix"], default="edges")
    oracle.add_argument("--k", type=int, default=None)
    return p


def _to_config(args: argparse.Namespace) -> RunConfig:
    settings = load_lab_settings()
    seed = getattr(args, "seed", None)
    seed = settings["seed"] if seed is None else seed
    if not 0 <= seed <= SEED_MAX:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {seed}")

    trials = getattr(args, "trials", None)
    tree_trials = getattr(args, "tree_trials", None)
    for flag, value in (("--trials", trials), ("--tree-trials", tree_trials)):
        if value is not None and value < 1:
            raise UsageError(f"{flag} must be at least 1, got {value}")

    config = RunConfig(
        command=args.command,
        name=getattr(args, "algo", None) or getattr(args, "kind", None) or getattr(args, "function", None)
        or getattr(args, "which", None),
        k=getattr(args, "k", None),
        input=getattr(args, "input", None),
        fmt=getattr(args, "fmt", None) or "edges",
        seed=seed,
        trials=trials,
        tree_trials=tree_trials,
        output=args.output,
        grid=getattr(args, "grid", False),
        extended=getattr(args, "extended", False),
    )
    if config.command == "cluster" and config.name == MDL_ALGORITHM and args.fmt is None:
        config.fmt = "matrix"
    if config.command == "axioms" and not config.grid and not config.name:
        raise UsageError("axioms needs --function NAME or --grid")
    if config.command == "oracle" and config.name in ("minkcut", "maxsum") and config.k is None:
        raise UsageError(f"oracle {config.name} needs --k")
    return config


# ---------------------- commands ----------------------
def run_cluster(config: RunConfig) -> Dict:
    if config.name == MDL_ALGORITHM:
        model = load_model(config.input, config.fmt)
        gamma = q_cluster(gaussian_mi_oracle(model), model.n, config.k)
        return reporting.cluster_document(model.n, config.k, config.name, gamma)

    s = load_instance(config.input, config.fmt)
    gamma = ALGORITHMS[config.name](s, config.k)
    return reporting.cluster_document(s.n, config.k, config.name, gamma)


def run_tree(config: RunConfig) -> Dict:
    s = load_instance(config.input, config.fmt)
    tree = mst(s) if config.name == "mst" else gomory_hu_cut_tree(s)
    return reporting.tree_document(config.name, tree)


def _lab_settings(config: RunConfig) -> LabSettings:
    stored = load_lab_settings()
    return LabSettings(
        trials=config.trials or stored["trials"],
        tree_trials=config.tree_trials or stored["tree_trials"],
        seed=config.seed,
        n_range=tuple(stored["n_range"]),
        richness_n=stored["richness_n"],
        richness_k=stored["richness_k"],
        richness_budget=stored["richness_budget"],
    )


def run_axioms(config: RunConfig) -> Tuple[List[Dict], bool]:
    """Report records plus whether every verdict matched its expectation."""

    settings = _lab_settings(config)
    if config.grid:
        grid = verdict_grid(settings)
        lines = reporting.records(grid.cells())
        lines.append(reporting.grid_summary(grid))
        return lines, grid.matches

    reports = run_suite(get_function(config.name), settings, extended=config.extended)
    return reporting.records(reports), all(matches_expectation(r) for r in reports)


def run_oracle(config: RunConfig) -> Dict:
    s = load_instance(config.input, config.fmt)
    if config.name == "minkcut":
        value, gamma = brute_force_min_kcut(s, config.k)
        return reporting.min_kcut_document(config.k, value, gamma)
    if config.name == "maxsum":
        gamma = max_sum_exact(s, config.k)
        return reporting.max_sum_document(config.k, lambda_objective(s, gamma), gamma)
    if config.name == "pairwise-cuts":
        return reporting.pairwise_cuts_document(pairwise_min_cuts(s))
    f = cut_oracle(s)
    subset, value = queyranne_minimize(f, s.n)
    _, exhaustive = exhaustive_minimize(f, s.n)
    return reporting.queyranne_document(subset, value, exhaustive)


def _emit(lines: List[str], output: Optional[str], stream: bool) -> None:
    if output:
        if stream:
            write_jsonl(lines, output)
        else:
            write_json("\n".join(lines), output)
        log.info("wrote %s", output)
        return
    for line in lines:
        sys.stdout.write(line + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    try:
        args = _build_parser().parse_args(argv)
        if args.log_level:
            configure_logging(args.log_level)
        config = _to_config(args)

        if config.command == "axioms":
            records, matched = run_axioms(config)
            _emit([render(r) for r in records], config.output, stream=True)
            if not matched:
                log.error("verdicts differ from the expected pattern")
                return EXIT_MISMATCH
            return EXIT_OK

        handler = {"cluster": run_cluster, "tree": run_tree, "oracle": run_oracle}[config.command]
        _emit([render(handler(config))], config.output, stream=False)
        return EXIT_OK
    except QClusterError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_INPUT
    except Exception as exc:
        log.exception("unexpected failure: %s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

import json
import logging
import os
from typing import Any, Dict, Optional, Tuple

log = logging.getLogger(__name__)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip(), 0)
    except ValueError:
        log.warning("ignoring %s=%r (not an integer)", name, raw)
        return default


DEFAULT_SEED = _env_int("QCLUSTER_SEED", 0x5EED)
SEED_MAX = 2**64 - 1

VALUE_TOL = 1e-9
FLOW_EPS = 1e-12

PARTITION_ENUM_MAX_N = 14
BRUTE_FORCE_MAX_N = 12
SUBMODULAR_CHECK_MAX_N = 10
GENERAL_TREE_MAX_N = 16
CHAIN_MAX_N = 10
RICHNESS_MAX_N = 8

AXIOM_TRIALS = 1000
TREE_TRIALS = 200
TRIAL_N_RANGE: Tuple[int, int] = (4, 9)
# iterated minimum cut is exact, and Consistent, only for two clusters
MAX_SUM_TRIAL_K: Tuple[int, ...] = (2,)
# extra instances drawn per MCT-Consistency trial, kept when their cut tree agrees
MCT_INDEPENDENT_DRAWS = 4
SCALE_ALPHAS: Tuple[float, ...] = (0.25, 1.0, 7.5)
SCALE_ALPHA_MAX = 10.0
RICHNESS_BUDGET = 200
RICHNESS_N = 5
RICHNESS_K = 2
THRESHOLD_CONTROL = 0.5

# Gamma-transformation sampler factor ranges.
INNER_FACTOR = (1.0, 2.0)
OUTER_FACTOR = (0.5, 1.0)

LOG_LEVEL = os.environ.get("QCLUSTER_LOG_LEVEL", "WARNING")
SETTINGS_FILE = os.environ.get("QCLUSTER_CONFIG", "qcluster.config.json")

DEFAULT_SETTINGS: Dict[str, Any] = {
    "trials": AXIOM_TRIALS,
    "tree_trials": TREE_TRIALS,
    "n_range": TRIAL_N_RANGE,
    "richness_n": RICHNESS_N,
    "richness_k": RICHNESS_K,
    "richness_budget": RICHNESS_BUDGET,
    "seed": DEFAULT_SEED,
}


def _clean_count(value, lo: int, hi: int) -> Optional[int]:
    try:
        number = int(value)
    except (TypeError, ValueError):
        return None
    return max(lo, min(hi, number))


def _clean_settings(raw) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        return {}

    cleaned: Dict[str, Any] = {}
    for key in ("trials", "tree_trials", "richness_budget"):
        if key in raw:
            value = _clean_count(raw[key], 1, 1_000_000)
            if value is not None:
                cleaned[key] = value

    if "richness_n" in raw:
        value = _clean_count(raw["richness_n"], 2, RICHNESS_MAX_N)
        if value is not None:
            cleaned["richness_n"] = value
    if "richness_k" in raw:
        value = _clean_count(raw["richness_k"], 1, RICHNESS_MAX_N)
        if value is not None:
            cleaned["richness_k"] = value

    n_range = raw.get("n_range")
    if isinstance(n_range, (list, tuple)) and len(n_range) == 2:
        lo = _clean_count(n_range[0], 3, BRUTE_FORCE_MAX_N)
        hi = _clean_count(n_range[1], 3, BRUTE_FORCE_MAX_N)
        if lo is not None and hi is not None and lo <= hi:
            cleaned["n_range"] = (lo, hi)

    if "seed" in raw:
        value = _clean_count(raw["seed"], 0, SEED_MAX)
        if value is not None:
            cleaned["seed"] = value

    return cleaned


def load_lab_settings(path: Optional[str] = None) -> Dict[str, Any]:
    """Defaults merged with the optional JSON settings file.

    The environment seed wins over a seed stored in the file.
    """

    path = path or SETTINGS_FILE
    settings = dict(DEFAULT_SETTINGS)
    if os.path.exists(path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                settings.update(_clean_settings(json.load(fh)))
        except (OSError, json.JSONDecodeError) as exc:
            log.warning("could not read %s: %s", path, exc)

    if os.environ.get("QCLUSTER_SEED"):
        settings["seed"] = _env_int("QCLUSTER_SEED", settings["seed"])
    if settings["richness_k"] > settings["richness_n"]:
        settings["richness_k"] = settings["richness_n"]
    return settings

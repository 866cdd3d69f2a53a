import json
import logging
import os
import re
import sys
from typing import Iterable, Optional

from .config import LOG_LEVEL

LOG_FORMAT = "[%(levelname)s][%(name)s] %(message)s"

_HANDLER: Optional[logging.StreamHandler] = None


def configure_logging(level: Optional[str] = None) -> None:
    """Send library logs to stderr; stdout is reserved for JSON output."""

    global _HANDLER
    level_name = (level or LOG_LEVEL or "WARNING").upper()
    root = logging.getLogger("qcluster")
    if _HANDLER is None:
        _HANDLER = logging.StreamHandler(sys.stderr)
        _HANDLER.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(_HANDLER)
        root.propagate = False
    else:
        # sys.stderr may have been swapped (and the old one closed) since the first call
        _HANDLER.stream = sys.stderr
    root.setLevel(getattr(logging, level_name, logging.WARNING))


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_jsonl(lines: Iterable[str], path: str) -> None:
    """Append pre-rendered JSON lines to ``path``."""

    _ensure_parent(path)
    with open(path, "a", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")


def write_json(document: str, path: str) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(document + "\n")


class FixedFloat(float):
    """A float rendered with a fixed number of decimals."""

    decimals = 9

    @property
    def text(self) -> str:
        text = f"{self:.{self.decimals}f}"
        # no negative zero
        return text[1:] if text.startswith("-") and text.lstrip("-0.") == "" else text


_FIXED_TAG = "\x00fixed:"
_FIXED_RE = re.compile(r'"\\u0000fixed:(-?[0-9]+\.[0-9]+)"')


def _tag_fixed(value):
    if isinstance(value, FixedFloat):
        return _FIXED_TAG + value.text
    if isinstance(value, dict):
        return {key: _tag_fixed(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_tag_fixed(item) for item in value]
    return value


def render(record) -> str:
    """Canonical JSON rendering: sorted keys, no whitespace variance.

    ``FixedFloat`` values come out as bare numbers with their fixed decimals.
    """

    return _FIXED_RE.sub(r"\1", json.dumps(_tag_fixed(record), sort_keys=True, ensure_ascii=False))

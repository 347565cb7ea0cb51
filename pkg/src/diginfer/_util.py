"""Shared plumbing: canonical hashing, number formatting, worker control."""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigurationError


def fmt9(value):
    """Locale-independent formatting with 9 significant digits."""
    return format(float(value), ".9g")


def canonical_json(payload):
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def config_digest(payload):
    """Stable hex digest of a JSON-serializable configuration payload."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def worker_count():
    """Parallelism cap from DIG_THREADS (default 1: serial, fully reproducible)."""
    raw = os.environ.get("DIG_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ConfigurationError(f"DIG_THREADS must be a positive integer, got {raw!r}")
    return value


def parallel_map(fn, items):
    """Order-preserving map; runs on a thread pool when DIG_THREADS > 1.

    Results depend only on the items, so serial and threaded execution are
    observationally identical.
    """
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

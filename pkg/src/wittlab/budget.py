"""Wall-clock and work budgets for the exhaustive searches."""

from __future__ import annotations

import os
import time
from contextlib import contextmanager

from .errors import ResourceError

ENV_VAR = "WITTLAB_BUDGET_MS"

# upper bound on table/layer sizes built by a single search
MAX_WORK = 4_000_000

_deadline: float | None = None


def env_budget_ms() -> int | None:
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return None
    try:
        ms = int(raw)
    except ValueError:
        raise ResourceError(f"{ENV_VAR} must be an integer number of milliseconds, got {raw!r}")
    return ms if ms > 0 else None


@contextmanager
def time_budget(ms: int | None):
    global _deadline
    saved = _deadline
    _deadline = None if ms is None else time.monotonic() + ms / 1000.0
    try:
        yield
    finally:
        _deadline = saved


def tick():
    if _deadline is not None and time.monotonic() > _deadline:
        raise ResourceError("search budget exhausted (time)")


def charge(work: int, what: str):
    if work > MAX_WORK:
        raise ResourceError(f"search budget exhausted ({what}: {work} > {MAX_WORK})")

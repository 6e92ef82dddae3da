from __future__ import annotations

import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

THREADS_VAR = "RESOLVENT_LAB_THREADS"


def thread_cap(default: int | None = None) -> int:
    """
    Worker count for suite fan-out: RESOLVENT_LAB_THREADS if set (a ``.env``
    file in the working directory is honoured), else ``default`` or the CPU count.
    """
    load_dotenv(override=False)
    raw = os.environ.get(THREADS_VAR)
    fallback = default or os.cpu_count() or 1
    if raw is None or raw.strip() == "":
        return fallback
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"ignoring non-integer {THREADS_VAR}={raw!r}")
        return fallback
    return max(1, value)

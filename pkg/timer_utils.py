# timer_utils.py
import logging
from time import perf_counter
from contextlib import contextmanager

logger = logging.getLogger(__name__)


@contextmanager
def timer(section_name: str):
    """Замер секции. В отчёты время не попадает, только в лог."""
    record = {"section": section_name, "elapsed": 0.0}
    start = perf_counter()
    try:
        yield record
    finally:
        record["elapsed"] = perf_counter() - start
        logger.debug("[TIMER] %s took %.4f seconds", section_name, record["elapsed"])

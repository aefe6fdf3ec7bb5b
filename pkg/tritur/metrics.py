"""Run metrics.

Counters for the search and certificate pipeline plus wall-clock samples.
Counters are deterministic for a given run; samples only reach a report
when timings are requested.
"""
from __future__ import annotations

import threading
import time
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator, Optional

DEFAULT_COUNTERS = (
    "subsets_examined_total",
    "witnesses_found_total",
    "certificates_written_total",
    "certificates_verified_total",
)


@dataclass
class Stopwatch:
    seconds: float = 0.0


class MetricsCollector:
    """Per-process counters and timing samples, guarded by one lock."""

    def __init__(self):
        self._lock = threading.Lock()
        self._counters: Counter[str] = Counter(dict.fromkeys(DEFAULT_COUNTERS, 0))
        self._samples: dict[str, list[float]] = {}

    def counter(self, name: str, value: int = 0) -> None:
        with self._lock:
            self._counters[name] = value

    def increment(self, name: str, value: int = 1) -> None:
        with self._lock:
            self._counters[name] += value

    def observe(self, name: str, seconds: float) -> None:
        with self._lock:
            self._samples.setdefault(name, []).append(seconds)

    @contextmanager
    def timed(self, name: str) -> Iterator[Stopwatch]:
        """Time the block and record it under ``name`` even if it raises."""
        watch = Stopwatch()
        started = time.perf_counter()
        try:
            yield watch
        finally:
            watch.seconds = time.perf_counter() - started
            self.observe(name, watch.seconds)

    def get_counter(self, name: str) -> int:
        with self._lock:
            return self._counters[name]

    def get_histogram(self, name: str) -> list[float]:
        with self._lock:
            return list(self._samples.get(name, ()))

    def export_metadata(self, include_timings: bool = False) -> list[tuple[str, str]]:
        """Sorted ``(name, value)`` pairs for a report header."""
        with self._lock:
            items = [(name, str(value)) for name, value in sorted(self._counters.items())]
            if include_timings:
                for name, values in sorted(self._samples.items()):
                    items += [(f"{name}_count", str(len(values))), (f"{name}_sum", f"{sum(values):.6f}")]
        return items

    def reset(self) -> None:
        with self._lock:
            self._counters = Counter(dict.fromkeys(DEFAULT_COUNTERS, 0))
            self._samples.clear()


_collector: Optional[MetricsCollector] = None
_collector_lock = threading.Lock()


def get_metrics() -> MetricsCollector:
    global _collector
    with _collector_lock:
        if _collector is None:
            _collector = MetricsCollector()
        return _collector


def reset_metrics() -> None:
    """Drop the process collector (tests)."""
    global _collector
    with _collector_lock:
        _collector = None

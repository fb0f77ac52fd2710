"""Benchmark registry, keyed by command-line name."""

from __future__ import annotations

from .base import Benchmark, BenchmarkFactory, Feed, MatcherOptions
from .bounded_buffer import BOUNDED_BUFFER
from .size import SIZE, SIZE_WITH_GUARDS
from .smart_house import COMPLEX_SMART_HOUSE, SIMPLE_SMART_HOUSE

BENCHMARKS: dict[str, BenchmarkFactory] = {
    f.name: f for f in (SIZE, SIZE_WITH_GUARDS, SIMPLE_SMART_HOUSE, COMPLEX_SMART_HOUSE, BOUNDED_BUFFER)
}


def get_benchmark(name: str) -> BenchmarkFactory:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark {name!r}; valid names: {', '.join(BENCHMARKS)}") from None


__all__ = ["BENCHMARKS", "Benchmark", "BenchmarkFactory", "Feed", "MatcherOptions", "get_benchmark"]
